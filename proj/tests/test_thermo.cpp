#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "mflow/gibbs.hpp"

using namespace mflow;

namespace {

// independent Perron oracle: dense eigensolver on the weighted word matrix
double dense_perron(const Potential& phi, const Graph& g) {
    const int L = std::max(phi.hi(), 1);
    auto states = admissible_windows(g, L);
    std::map<std::vector<Vertex>, int> idx;
    for (std::size_t i = 0; i < states.size(); ++i) idx[states[i]] = static_cast<int>(i);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(states.size(), states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        for (Vertex b : g.out(states[i].back())) {
            std::vector<Vertex> v(states[i].begin() + 1, states[i].end());
            v.push_back(b);
            auto it = idx.find(v);
            if (it == idx.end()) continue;
            std::vector<Vertex> full(states[i]);
            full.push_back(b);
            std::vector<Vertex> key(full.begin(), full.begin() + phi.hi() + 1);
            M(static_cast<long>(i), it->second) = std::exp(to_double(phi.eval_window(key)));
        }
    Eigen::EigenSolver<Eigen::MatrixXd> es(M);
    double rho = 0;
    for (long i = 0; i < es.eigenvalues().size(); ++i)
        rho = std::max(rho, std::abs(es.eigenvalues()[i]));
    return rho;
}

} // namespace

TEST_CASE("one-sided input is returned unchanged") {
    Graph g = th::full_2_shift();
    std::mt19937_64 rng(1);
    Potential f = th::random_potential(g, 0, 1, rng);
    auto red = reduce_to_one_sided(f);
    CHECK(red.one_sided.lo() == 0);
    CHECK(red.one_sided.hi() == 1);
    CHECK(red.transfer.constant_value().value() == Rational(0));
    for (const auto& w : admissible_windows(g, 2))
        CHECK(red.one_sided.eval_window(w) == f.eval_window(w));
}

TEST_CASE("memory (-1,0) reduction matches the telescoped formula") {
    // f(x) = q(x_{-1}, x_0)  ->  f^s(x) = q(omega, x_0) + q(x_0, x_1) - q(omega, x_1)
    Graph g = th::full_2_shift();
    std::mt19937_64 rng(2);
    Potential f = th::random_potential(g, -1, 0, rng);
    auto red = reduce_to_one_sided(f);
    CHECK(red.one_sided.lo() == 0);
    CHECK(red.one_sided.hi() == 1);
    const Vertex omega = g.canonical_cycle().front();
    for (const auto& w : admissible_windows(g, 2)) {
        std::vector<Vertex> w0 = {omega, w[0]}, w1 = {w[0], w[1]}, w2 = {omega, w[1]};
        CHECK(red.one_sided.eval_window(w) ==
              f.eval_window(w0) + f.eval_window(w1) - f.eval_window(w2));
    }
}

TEST_CASE("reduction preserves periodic-orbit Birkhoff sums exactly") {
    std::mt19937_64 rng(3);
    for (const Graph& g : {th::full_2_shift(), th::golden_mean(), th::period_two()}) {
        Potential f = th::random_potential(g, -2, 1, rng);
        auto red = reduce_to_one_sided(f);
        for (const auto& cyc : g.closed_walks(5)) {
            Point z = Point::periodic(g, cyc);
            const long n = static_cast<long>(cyc.size());
            CHECK(f.birkhoff(z, n) == red.one_sided.birkhoff(z, n));
        }
    }
}

TEST_CASE("return words of the full 2-shift") {
    Graph g = th::full_2_shift();
    Roof r = th::roof0(g, {{"a", 1}, {"b", 1}});
    auto rws = recode_return_words(g, r.potential(), parse_word(g, "a", 0), 3);
    REQUIRE(rws.return_words.size() == 3); // a, ab, abb
    CHECK(rws.return_times == std::vector<long>({1, 2, 3}));
    CHECK(rws.truncated); // abbb... ran past the cap
    CHECK(rws.induced.size() == 3);
    // induced roof = excursion length for the unit roof
    for (std::size_t i = 0; i < rws.return_words.size(); ++i)
        CHECK(rws.induced_roof.eval_window(std::vector<Vertex>{static_cast<Vertex>(i)}) ==
              Rational(rws.return_times[i]));
}

TEST_CASE("induced roof equals the Birkhoff sum along the excursion") {
    Graph g = th::full_2_shift();
    std::mt19937_64 rng(4);
    Potential r = th::random_potential(g, 0, 1, rng, /*positive=*/true);
    auto rws = recode_return_words(g, r, parse_word(g, "a", 0), 4);
    // periodic orbit in the induced system <-> periodic orbit of the base
    for (std::size_t i = 0; i < rws.return_words.size(); ++i)
        for (std::size_t j = 0; j < rws.return_words.size(); ++j) {
            std::vector<Vertex> concat = rws.return_words[i];
            concat.insert(concat.end(), rws.return_words[j].begin(), rws.return_words[j].end());
            Point z = Point::periodic(g, concat);
            Rational base_sum = r.birkhoff(z, static_cast<long>(concat.size()));
            Point zi = Point::periodic(rws.induced,
                                       {static_cast<Vertex>(i), static_cast<Vertex>(j)});
            Rational induced_sum = rws.induced_roof.birkhoff(zi, 2);
            CHECK(base_sum == induced_sum);
        }
}

TEST_CASE("no return within cap reports CapExceeded") {
    Graph g = th::golden_mean();
    Roof r = th::roof0(g, {{"a", 1}, {"b", 1}});
    try {
        recode_return_words(g, r.potential(), parse_word(g, "b", 0), 1);
        FAIL("expected CapExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == Err::CapExceeded);
    }
}

TEST_CASE("transfer operator examples") {
    Graph g2 = th::full_2_shift();
    Potential zero2 = Potential::zero(g2);
    std::map<std::vector<Vertex>, double> one;
    for (const auto& w : admissible_windows(g2, 2)) one[w] = 1.0;
    auto Lone = transfer_apply(zero2, one, 2);
    for (const auto& [w, v] : Lone) CHECK(v == doctest::Approx(2.0));

    Graph gm = th::golden_mean();
    Potential zerog = Potential::zero(gm);
    std::map<std::vector<Vertex>, double> oneg;
    for (const auto& w : admissible_windows(gm, 2)) oneg[w] = 1.0;
    auto Lg = transfer_apply(zerog, oneg, 2);
    for (const auto& [w, v] : Lg)
        CHECK(v == doctest::Approx(w.front() == gm.id("a") ? 2.0 : 1.0));

    // f = 1_[a]: (Lf)(x) = e^{phi(a x_0)} [a x_0 admissible]
    std::mt19937_64 rng(5);
    Potential phi = th::random_potential(gm, 0, 1, rng);
    std::map<std::vector<Vertex>, double> ind;
    for (const auto& w : admissible_windows(gm, 2)) ind[w] = w.front() == gm.id("a") ? 1.0 : 0.0;
    auto Li = transfer_apply(phi, ind, 2);
    for (const auto& [w, v] : Li) {
        std::vector<Vertex> aw = {gm.id("a"), w[0]};
        const double expect =
            gm.edge(aw[0], aw[1]) ? std::exp(to_double(phi.eval_window(aw))) : 0.0;
        CHECK(v == doctest::Approx(expect).epsilon(1e-12));
    }

    CHECK_THROWS_AS(transfer_apply(phi, one, 0), Error);
}

TEST_CASE("pressure oracles") {
    Graph g2 = th::full_2_shift();
    CHECK(pressure(Potential::zero(g2), g2).log_lambda ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));

    Graph gm = th::golden_mean();
    CHECK(pressure(Potential::zero(gm), gm).log_lambda ==
          doctest::Approx(std::log((1 + std::sqrt(5.0)) / 2)).epsilon(1e-12));

    // row-stochastic weights force log lambda = 0
    for (double p : {0.1, 1.0 / 3, 0.5}) {
        Potential phi = th::memory0(g2, {{"a", rat_of(std::log(p))}, {"b", rat_of(std::log(1 - p))}});
        CHECK(std::abs(pressure(phi, g2).log_lambda) < 1e-12);
    }

    Graph bad = Graph::validate({"a", "b", "c"},
                                {{"a", "a"}, {"a", "b"}, {"b", "a"}, {"b", "c"}, {"c", "c"}});
    CHECK_THROWS_AS(pressure(Potential::zero(bad), bad), Error);
}

TEST_CASE("pressure matches the dense eigensolver oracle") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 12; ++t) {
        Graph g = th::random_transitive_graph(rng, 5);
        Potential phi = th::random_potential(g, 0, 1, rng);
        const double mine = pressure(phi, g).lambda;
        const double oracle = dense_perron(phi, g);
        CHECK(mine == doctest::Approx(oracle).epsilon(1e-9));
    }
    // a periodic graph exercises the p-step route
    Graph gp = th::period_two();
    CHECK(pressure(Potential::zero(gp), gp).lambda ==
          doctest::Approx(dense_perron(Potential::zero(gp), gp)).epsilon(1e-9));
}

TEST_CASE("Bernoulli equilibrium measures are product measures") {
    Graph g = th::full_2_shift();
    for (double p : {0.1, 1.0 / 3, 0.5}) {
        Potential phi = th::memory0(g, {{"a", rat_of(std::log(p))}, {"b", rat_of(std::log(1 - p))}});
        GibbsMeasure m = GibbsMeasure::equilibrium(phi, g);
        for (int len = 1; len <= 6; ++len)
            for (const auto& w : admissible_windows(g, len)) {
                double prod = 1;
                for (Vertex v : w) prod *= v == g.id("a") ? p : 1 - p;
                CHECK(m.cylinder_mass(w) == doctest::Approx(prod).epsilon(1e-10));
            }
        // nu[a,b,a] = (1/3)(2/3)(1/3)
        if (p == 1.0 / 3) {
            Word aba = parse_word(g, "a,b,a", 0);
            CHECK(m.cylinder_mass(aba) == doctest::Approx(2.0 / 27).epsilon(1e-10));
        }
    }
}

TEST_CASE("golden mean measure of maximal entropy") {
    Graph g = th::golden_mean();
    GibbsMeasure m = GibbsMeasure::equilibrium(Potential::zero(g), g);
    const double lam = (1 + std::sqrt(5.0)) / 2;
    CHECK(m.lambda() == doctest::Approx(lam).epsilon(1e-12));
    CHECK(m.cylinder_mass(parse_word(g, "a", 0)) ==
          doctest::Approx(lam * lam / (1 + lam * lam)).epsilon(1e-10));
    // g(a,...) = 1/lambda; g(b,a,...) = 1/lambda^2
    std::vector<Vertex> aa = {g.id("a"), g.id("a")};
    std::vector<Vertex> ba = {g.id("b"), g.id("a")};
    CHECK(m.g_value(aa) == doctest::Approx(1 / lam).epsilon(1e-12));
    CHECK(m.g_value(ba) == doctest::Approx(1 / (lam * lam)).epsilon(1e-12));
    CHECK(m.entropy() == doctest::Approx(std::log(lam)).epsilon(1e-12));

    // conditional mass: past (b), future starting a
    std::vector<Vertex> past = {g.id("b")}, future = {g.id("a")};
    CHECK(m.conditional_mass(past, future) == doctest::Approx(1 / (lam * lam)).epsilon(1e-12));
}

TEST_CASE("g normalization and conditional masses") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 5; ++t) {
        Graph g = th::random_transitive_graph(rng, 6);
        Potential phi = th::random_potential(g, 0, 1, rng);
        GibbsMeasure m = GibbsMeasure::equilibrium(phi, g);
        for (int rep = 0; rep < 200; ++rep) {
            Point x = th::random_point(g, rng);
            const int L = m.state_length();
            double total = 0;
            for (Vertex a = 0; a < g.size(); ++a) {
                if (!g.edge(a, x.at(0))) continue;
                std::vector<Vertex> win = {a};
                for (int i = 0; i < L; ++i) win.push_back(x.at(i));
                total += m.g_value(win);
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
        // empty past has conditional mass 1
        std::vector<Vertex> empty;
        std::vector<Vertex> fut;
        Point x = th::random_point(g, rng);
        for (int i = 0; i <= m.state_length(); ++i) fut.push_back(x.at(i));
        CHECK(m.conditional_mass(empty, fut) == 1.0);
    }
}

TEST_CASE("Bernoulli(1/3,2/3) conditional past mass") {
    Graph g = th::full_2_shift();
    Potential phi =
        th::memory0(g, {{"a", rat_of(std::log(1.0 / 3))}, {"b", rat_of(std::log(2.0 / 3))}});
    GibbsMeasure m = GibbsMeasure::equilibrium(phi, g);
    std::vector<Vertex> past = {g.id("b"), g.id("a")};
    std::vector<Vertex> future = {g.id("a")};
    CHECK(m.conditional_mass(past, future) == doctest::Approx(2.0 / 9).epsilon(1e-10));
}

TEST_CASE("cylinder masses are shift consistent") {
    std::mt19937_64 rng(8);
    for (const Graph& g : {th::golden_mean(), th::period_two()}) {
        Potential phi = th::random_potential(g, 0, 1, rng);
        GibbsMeasure m = GibbsMeasure::equilibrium(phi, g);
        double total = 0;
        for (const auto& w : admissible_windows(g, 1)) total += m.cylinder_mass(w);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        for (int len = 1; len <= 6; ++len)
            for (const auto& w : admissible_windows(g, len)) {
                double left = 0, right = 0;
                for (Vertex a = 0; a < g.size(); ++a) {
                    std::vector<Vertex> aw = {a};
                    aw.insert(aw.end(), w.begin(), w.end());
                    left += m.cylinder_mass(aw);
                    std::vector<Vertex> wb = w;
                    wb.push_back(a);
                    right += m.cylinder_mass(wb);
                }
                const double mw = m.cylinder_mass(w);
                CHECK(left == doctest::Approx(mw).epsilon(1e-12));
                CHECK(right == doctest::Approx(mw).epsilon(1e-12));
            }
    }
}

TEST_CASE("eigen residuals stay below tolerance") {
    std::mt19937_64 rng(9);
    Graph g = th::random_transitive_graph(rng, 5);
    Potential phi = th::random_potential(g, 0, 1, rng);
    GibbsMeasure m = GibbsMeasure::equilibrium(phi, g, 1e-13);
    CHECK(m.residual() < 1e-9);
}

TEST_CASE("projection measures") {
    Graph g = th::full_2_shift();
    Potential phi = th::memory0(g, {{"a", rat_of(std::log(0.5))}, {"b", rat_of(std::log(0.5))}});
    GibbsMeasure m = GibbsMeasure::equilibrium(phi, g);
    Point x = th::point_of(g, "a,b", 0); // x_0 = a, x_1 = b

    // whole local manifold -> nu([x_0])
    ProjectionMeasure ps{x, Side::Stable, &m};
    Word whole({g.id("a")}, 0);
    CHECK(projection_measure_mass(ps, whole) == doctest::Approx(0.5).epsilon(1e-12));

    // unstable projection of [x_0 = a, x_1 = b]: relative mass 1/2 of nu[a]
    ProjectionMeasure pu{x, Side::Unstable, &m};
    Word c = parse_word(g, "a,b", 0);
    CHECK(projection_measure_mass(pu, c) == doctest::Approx(0.25).epsilon(1e-12));

    // incompatible pinning
    Word bad = parse_word(g, "b", 0);
    CHECK_THROWS_AS(projection_measure_mass(pu, bad), Error);

    // additivity over one-symbol refinements (stable side: refine the past)
    Word past1 = parse_word(g, "a,a", -1);
    Word past2 = parse_word(g, "b,a", -1);
    Word past_any = parse_word(g, "a", 0);
    const double total = projection_measure_mass(ps, past_any);
    CHECK(projection_measure_mass(ps, past1) + projection_measure_mass(ps, past2) ==
          doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("projection mass sums over unconstrained gaps") {
    Graph g = th::full_2_shift();
    Potential phi = th::memory0(g, {{"a", rat_of(std::log(0.5))}, {"b", rat_of(std::log(0.5))}});
    GibbsMeasure m = GibbsMeasure::equilibrium(phi, g);
    Point x = th::point_of(g, "a");
    ProjectionMeasure ps{x, Side::Stable, &m};
    // constrain only coordinate -3: mass = nu{z_-3 = b, z_0 = a} = 1/4
    Word far = parse_word(g, "b", -3);
    CHECK(projection_measure_mass(ps, far) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("local product structure") {
    Graph g = th::full_2_shift();
    // Bernoulli: ratio is identically 1/nu[v0]
    Potential phi =
        th::memory0(g, {{"a", rat_of(std::log(1.0 / 3))}, {"b", rat_of(std::log(2.0 / 3))}});
    GibbsMeasure m = GibbsMeasure::equilibrium(phi, g);
    auto pc = local_product_check(m, g.id("a"), g.id("b"), 3);
    CHECK(pc.worst_ratio == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pc.max_ratio == doctest::Approx(3.0).epsilon(1e-10)); // 1/nu[a]

    // Markov (memory-1) measures factor through the state exactly
    std::mt19937_64 rng(10);
    Graph gm = th::golden_mean();
    Potential psi = th::random_potential(gm, 0, 1, rng);
    GibbsMeasure mm = GibbsMeasure::equilibrium(psi, gm);
    auto pcm = local_product_check(mm, gm.id("a"), gm.id("b"), 3);
    CHECK(pcm.worst_ratio == doctest::Approx(1.0).epsilon(1e-10));

    // depth 0: single cylinder through the edge, ratio 1/nu[v0]
    auto pc0 = local_product_check(mm, gm.id("a"), gm.id("b"), 0);
    CHECK(pc0.cylinders_checked == 1);
    CHECK(pc0.max_ratio ==
          doctest::Approx(1.0 / mm.cylinder_mass(parse_word(gm, "a", 0))).epsilon(1e-10));
}

TEST_CASE("two-sided Gibbs bound from the g variation profile") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 4; ++t) {
        Graph g = th::random_transitive_graph(rng, 4);
        Potential phi = th::random_potential(g, 0, 1, rng);
        GibbsMeasure m = GibbsMeasure::equilibrium(phi, g);
        const double S = log_g_variation_sum(m);
        for (Vertex v = 0; v < g.size(); ++v)
            for (Vertex w : g.out(v)) {
                auto pc = local_product_check(m, v, w, 3);
                const double C =
                    (std::exp(S) / m.cylinder_mass(Word({v}, 0))) * (1 + 1e-9);
                CHECK(pc.max_ratio <= C);
                CHECK(pc.min_ratio >= 1.0 / C);
            }
    }
}

TEST_CASE("positivity pipeline falls back to return-word recoding") {
    Graph g = th::full_2_shift();
    // positive two-sided roof whose plain reduction dips negative:
    // r^s(b,a) = Q(a,b) + Q(b,a) - Q(a,a) = 2 + 1 - 4 = -1
    const Vertex a = g.id("a"), b = g.id("b");
    std::map<std::vector<Vertex>, Rational> t;
    t[{a, a}] = 4;
    t[{a, b}] = 2;
    t[{b, a}] = 1;
    t[{b, b}] = 1;
    Potential r(g, -1, 0, std::move(t));
    REQUIRE(r.min_value() > 0);
    auto plain = reduce_to_one_sided(r);
    REQUIRE(plain.one_sided.min_value() <= 0); // forces the fallback
    auto pos = make_positive_one_sided(g, r, 9);
    CHECK(pos.recoded);
    CHECK(pos.n0 == 7); // smallest n0 with n0 inf(r) > 2 sup|h| = 6
    CHECK(pos.roof.inf() > 0);
    CHECK(pos.roof.potential().one_sided());
}
