#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <map>

#include "helpers.hpp"
#include "mflow/cubes.hpp"

using namespace mflow;

namespace {

FlowMeasure bernoulli_half_flow() {
    Graph g = th::full_2_shift();
    Potential phi = th::memory0(g, {{"a", rat_of(std::log(0.5))}, {"b", rat_of(std::log(0.5))}});
    return unit_suspension(GibbsMeasure::equilibrium(phi, g));
}

// exhaustive-coupling oracle: every vertex of the transportation polytope is
// reachable by repeatedly saturating some (row, column) pair; memoized DP
// over the remaining-marginal state
Rational dbar_oracle(const JointDist& P, const JointDist& Q, int n) {
    std::vector<Rational> p, q;
    for (const auto& a : P) p.push_back(a.mass);
    for (const auto& b : Q) q.push_back(b.mass);
    std::vector<std::vector<Rational>> cost(P.size(), std::vector<Rational>(Q.size()));
    for (std::size_t i = 0; i < P.size(); ++i)
        for (std::size_t j = 0; j < Q.size(); ++j) {
            long h = 0;
            for (int k = 0; k < n; ++k)
                if (P[i].labels[k] != Q[j].labels[k]) ++h;
            cost[i][j] = Rational(2 * h, n);
        }
    std::map<std::string, Rational> memo;
    std::function<Rational(std::vector<Rational>&, std::vector<Rational>&)> rec =
        [&](std::vector<Rational>& rp, std::vector<Rational>& rq) -> Rational {
        bool done = true;
        for (const auto& v : rp)
            if (v > 0) { done = false; break; }
        if (done) return Rational(0);
        std::string key;
        for (const auto& v : rp) key += rational_str(v) + "|";
        key += "/";
        for (const auto& v : rq) key += rational_str(v) + "|";
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Rational best(-1);
        for (std::size_t i = 0; i < rp.size(); ++i) {
            if (rp[i] <= 0) continue;
            for (std::size_t j = 0; j < rq.size(); ++j) {
                if (rq[j] <= 0) continue;
                const Rational delta = std::min(rp[i], rq[j]);
                rp[i] -= delta;
                rq[j] -= delta;
                Rational c = delta * cost[i][j] + rec(rp, rq);
                rp[i] += delta;
                rq[j] += delta;
                if (best < 0 || c < best) best = c;
            }
        }
        memo[key] = best;
        return best;
    };
    return rec(p, q);
}

JointDist random_joint(std::mt19937_64& rng, int n, int atoms, int labels) {
    std::uniform_int_distribution<int> ld(0, labels - 1), md(1, 5);
    std::map<std::vector<int>, Rational> merged;
    Rational total(0);
    for (int i = 0; i < atoms; ++i) {
        std::vector<int> lab;
        for (int k = 0; k < n; ++k) lab.push_back(ld(rng));
        Rational m(md(rng));
        merged[lab] += m;
        total += m;
    }
    JointDist out;
    for (auto& [lab, m] : merged) out.push_back({lab, m / total});
    return out;
}

// Markov-chain sampler for a unit-suspension flow measure (test-only)
struct FlowSampler {
    const FlowMeasure& fm;
    std::mt19937_64& rng;

    // word on [-m, m] sampled from the base measure, plus a height
    std::pair<Word, Rational> sample(int m) {
        const GibbsMeasure& base = fm.base();
        const auto& states = base.states();
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        // stationary state, then forward transitions
        double u = u01(rng), acc = 0;
        std::size_t s = 0;
        for (; s + 1 < states.size(); ++s) {
            acc += base.state_mass(static_cast<int>(s));
            if (u <= acc) break;
        }
        std::vector<Vertex> w = states[s];
        while (static_cast<int>(w.size()) < 2 * m + 1 + base.state_length()) {
            std::vector<Vertex> cur(w.end() - base.state_length(), w.end());
            const double denom = base.cylinder_mass(cur);
            double v = u01(rng), a2 = 0;
            for (Vertex b = 0;; ++b) {
                REQUIRE(b < base.graph().size());
                std::vector<Vertex> ext = cur;
                ext.push_back(b);
                if (!base.graph().word_admissible(ext)) continue;
                a2 += base.cylinder_mass(ext) / denom;
                if (v <= a2) {
                    w.push_back(b);
                    break;
                }
            }
        }
        w.resize(2 * m + 1);
        // unit roof: height uniform on [0,1)
        Rational h(static_cast<long>(u01(rng) * 1000000), 1000000);
        return {Word(w, -m), h};
    }
};

int atom_of(const OrderedPartition& p, const Word& w, const Rational& h) {
    for (std::size_t i = 0; i < p.atoms.size(); ++i)
        for (const Block& b : p.atoms[i]) {
            if (h < b.a || h >= b.b) continue;
            bool match = true;
            for (long c = b.word.lo(); c < b.word.hi() && match; ++c)
                match = w.covers(c) && w.at(c) == b.word.at(c);
            if (match) return static_cast<int>(i);
        }
    return -1;
}

} // namespace

TEST_CASE("partition distance basics") {
    FlowMeasure fm = bernoulli_half_flow();
    const Graph& g = fm.base().graph();
    OrderedPartition alpha{{ {base_block(parse_word(g, "a", 0))},
                             {base_block(parse_word(g, "b", 0))} }};
    CHECK(partition_distance(alpha, alpha, fm) == 0.0);

    // swapped labels: both atoms have mass 1/2 and are disjoint -> d = 2
    OrderedPartition swapped{{ {base_block(parse_word(g, "b", 0))},
                               {base_block(parse_word(g, "a", 0))} }};
    CHECK(partition_distance(alpha, swapped, fm) == doctest::Approx(2.0).epsilon(1e-12));

    // refinement arithmetic: B_1 = [a,a] u [b,a] has the mass of [?a] = 1/2
    OrderedPartition refined{{ {base_block(parse_word(g, "a,a", -1)),
                                base_block(parse_word(g, "b,a", -1))},
                               {base_block(parse_word(g, "a,b", -1)),
                                base_block(parse_word(g, "b,b", -1))} }};
    // refined's first atom = {x_0 = a} as a set, so distance to alpha is 0
    CHECK(partition_distance(alpha, refined, fm) == doctest::Approx(0.0).epsilon(1e-12));

    OrderedPartition three{{{}, {}, {}}};
    CHECK_THROWS_AS(partition_distance(alpha, three, fm), Error);

    validate_partition(fm, alpha);
    validate_partition(fm, refined);
}

TEST_CASE("partition distance is a pseudometric on random cylinder partitions") {
    FlowMeasure fm = bernoulli_half_flow();
    const Graph& g = fm.base().graph();
    std::mt19937_64 rng(41);
    auto random_two_atom = [&]() {
        // random split of the length-2 cylinders at positions [-1, 0]
        for (;;) {
            OrderedPartition p{{{}, {}}};
            bool nonempty0 = false, nonempty1 = false;
            for (const auto& w : admissible_windows(g, 2)) {
                const bool first = rng() & 1;
                p.atoms[first ? 0 : 1].push_back(base_block(Word(w, -1)));
                (first ? nonempty0 : nonempty1) = true;
            }
            if (nonempty0 && nonempty1) return p;
        }
    };
    for (int t = 0; t < 30; ++t) {
        OrderedPartition a = random_two_atom(), b = random_two_atom(), c = random_two_atom();
        const double dab = partition_distance(a, b, fm);
        CHECK(partition_distance(b, a, fm) == doctest::Approx(dab).epsilon(1e-12));
        CHECK(partition_distance(a, c, fm) <=
              dab + partition_distance(b, c, fm) + 1e-12);
    }
}

TEST_CASE("distance identity d = 2 P[labels differ] via Monte Carlo") {
    FlowMeasure fm = bernoulli_half_flow();
    const Graph& g = fm.base().graph();
    std::mt19937_64 rng(42);
    OrderedPartition alpha{{ {base_block(parse_word(g, "a", 0))},
                             {base_block(parse_word(g, "b", 0))} }};
    // beta = partition by x_1, expressed through length-2 blocks
    OrderedPartition beta{{ {base_block(parse_word(g, "a,a", 0)),
                             base_block(parse_word(g, "b,a", 0))},
                            {base_block(parse_word(g, "a,b", 0)),
                             base_block(parse_word(g, "b,b", 0))} }};
    validate_partition(fm, beta);
    const double d = partition_distance(alpha, beta, fm);
    CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
    FlowSampler sampler{fm, rng};
    const int N = 20000;
    int mismatches = 0;
    for (int i = 0; i < N; ++i) {
        auto [w, h] = sampler.sample(2);
        const int la = atom_of(alpha, w, h), lb = atom_of(beta, w, h);
        REQUIRE(la >= 0);
        REQUIRE(lb >= 0);
        if (la != lb) ++mismatches;
    }
    const double phat = static_cast<double>(mismatches) / N;
    const double sigma = std::sqrt(0.25 / N);
    CHECK(std::abs(2 * phat - d) <= 2 * 3 * sigma);
}

TEST_CASE("same distribution") {
    FlowMeasure mu = bernoulli_half_flow();
    const Graph& g = mu.base().graph();
    auto coord_partition = [&](long i) {
        return OrderedPartition{{ {base_block(parse_word(g, "a", i))},
                                  {base_block(parse_word(g, "b", i))} }};
    };
    std::vector<OrderedPartition> as, bs;
    for (long i = 1; i <= 3; ++i) {
        as.push_back(coord_partition(i));
        bs.push_back(coord_partition(i));
    }
    CHECK(same_distribution(as, bs, mu, mu));
    // independent copy: shifted coordinates have the same product law
    std::vector<OrderedPartition> cs;
    for (long i = 4; i <= 6; ++i) cs.push_back(coord_partition(i));
    CHECK(same_distribution(as, cs, mu, mu));

    // Bernoulli(1/3) vs Bernoulli(1/2) singletons differ
    Graph g2 = th::full_2_shift();
    Potential third =
        th::memory0(g2, {{"a", rat_of(std::log(1.0 / 3))}, {"b", rat_of(std::log(2.0 / 3))}});
    FlowMeasure nu = unit_suspension(GibbsMeasure::equilibrium(third, g2));
    CHECK_FALSE(same_distribution({coord_partition(1)}, {coord_partition(1)}, mu, nu));

    CHECK_THROWS_AS(same_distribution(as, {coord_partition(1)}, mu, mu), Error);
}

TEST_CASE("dbar on the worked examples") {
    // identical distributions
    JointDist p = {{{0}, Rational(1, 2)}, {{1}, Rational(1, 2)}};
    CHECK(dbar_exact_small(p, p, 1, 64).exact == Rational(0));

    // n = 1, (0.5, 0.5) vs (0.3, 0.7): optimal overlap 0.8, value 0.4
    JointDist q = {{{0}, Rational(3, 10)}, {{1}, Rational(7, 10)}};
    auto r = dbar_exact_small(p, q, 1, 64);
    CHECK(r.exact == Rational(2, 5));
    CHECK(r.mode == DbarResult::Mode::Exact);

    // relabeled swap: overlap 2 min(1/5, 4/5), so mass 3/5 is mismatched
    JointDist ps = {{{0}, Rational(1, 5)}, {{1}, Rational(4, 5)}};
    JointDist qs = {{{1}, Rational(1, 5)}, {{0}, Rational(4, 5)}};
    CHECK(dbar_exact_small(ps, qs, 1, 64).exact == Rational(6, 5));
    CHECK(dbar_exact_small(ps, qs, 1, 64).exact == dbar_oracle(ps, qs, 1));

    // cap
    CHECK_THROWS_AS(dbar_exact_small(p, q, 1, 3), Error);
}

TEST_CASE("dbar equals the exhaustive-coupling oracle") {
    std::mt19937_64 rng(43);
    int instances = 0;
    while (instances < 220) {
        const int n = std::uniform_int_distribution<int>(1, 3)(rng);
        const int ka = std::uniform_int_distribution<int>(1, 4)(rng);
        const int kb = std::uniform_int_distribution<int>(1, 3)(rng);
        JointDist P = random_joint(rng, n, ka, 2);
        JointDist Q = random_joint(rng, n, kb, 2);
        if (P.size() * Q.size() > 12) continue;
        auto mine = dbar_exact_small(P, Q, n, 64);
        CHECK(mine.exact == dbar_oracle(P, Q, n)); // exact rational equality
        ++instances;
    }
}

TEST_CASE("dbar between a sequence and itself is zero") {
    std::mt19937_64 rng(44);
    for (int t = 0; t < 20; ++t) {
        const int n = std::uniform_int_distribution<int>(1, 3)(rng);
        JointDist P = random_joint(rng, n, 4, 2);
        CHECK(dbar_exact_small(P, P, n, 64).exact == Rational(0));
    }
}

TEST_CASE("Ornstein-Weiss upper bound") {
    FlowMeasure fm = bernoulli_half_flow();
    const Graph& g = fm.base().graph();
    auto coord_partition = [&](long i) {
        return OrderedPartition{{ {base_block(parse_word(g, "a", i))},
                                  {base_block(parse_word(g, "b", i))} }};
    };
    std::vector<OrderedPartition> as = {coord_partition(1), coord_partition(2)};

    // identity map on the length-2 window algebra
    PointMap identity;
    for (const auto& w : admissible_windows(g, 2)) {
        BlockSet piece = {base_block(Word(w, 1))};
        identity.pieces.emplace_back(piece, piece);
    }
    auto up = dbar_upper_matching(as, as, fm, fm, identity, 0.0);
    CHECK(up.value == 0.0);
    CHECK(up.mode == DbarResult::Mode::UpperBound);

    // exact <= upper bound whenever both run
    auto ex = dbar_exact_small(as, as, fm, fm, 64);
    CHECK(ex.value <= up.value + 1e-15);

    // a map that mismatches labels on one length-2 cell (mass 1/4) needs
    // epsilon >= 1/4... with n = 2 the mismatch rate on that piece is 1/2,
    // so the hypothesis only holds once the piece joins the bad set
    PointMap swapped;
    for (const auto& w : admissible_windows(g, 2)) {
        BlockSet from = {base_block(Word(w, 1))};
        std::vector<Vertex> img = w;
        if (w[0] == g.id("a") && w[1] == g.id("a")) img[1] = g.id("b");
        else if (w[0] == g.id("a") && w[1] == g.id("b")) img[1] = g.id("a");
        BlockSet to = {base_block(Word(img, 1))};
        swapped.pieces.emplace_back(from, to);
    }
    CHECK_THROWS_AS(dbar_upper_matching(as, as, fm, fm, swapped, 0.0), Error);
    auto up2 = dbar_upper_matching(as, as, fm, fm, swapped, 0.5);
    CHECK(up2.value == doctest::Approx(8.0));
    auto ex2 = dbar_exact_small(as, as, fm, fm, 64);
    CHECK(ex2.value <= up2.value);
}

TEST_CASE("cube partitions") {
    // unit roof, delta = 1/4, n = 1: four slabs per length-3 word
    FlowMeasure fm = bernoulli_half_flow();
    CubePartition cp = build_cube_partition(fm, 1, Rational(1, 4));
    CHECK(cp.cubes.size() == 8 * 4);
    CHECK(cp.remainder_mass == 0.0);
    double total = 0;
    for (const auto& [w, tau] : cp.cubes) total += fm.block_mass(w, tau, tau + cp.delta);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    validate_partition(fm, cp.as_partition());

    // roof {a: 1, b: 3/2}, n = 0, delta = 1/2: 2 + 3 cubes, empty remainder
    Graph gm = th::golden_mean();
    GibbsMeasure mme = GibbsMeasure::equilibrium(Potential::zero(gm), gm);
    Roof r = th::roof0(gm, {{"a", 1}, {"b", Rational(3, 2)}});
    FlowMeasure fg(mme, r);
    CubePartition cg = build_cube_partition(fg, 0, Rational(1, 2));
    CHECK(cg.cubes.size() == 5);
    CHECK(cg.remainder_mass == 0.0);
    validate_partition(fg, cg.as_partition());

    // fractional delta leaves a remainder of mass <= delta
    CubePartition cf = build_cube_partition(fg, 0, Rational(2, 5));
    CHECK(cf.remainder_mass > 0.0);
    CHECK(cf.remainder_mass <= to_double(Rational(2, 5)) + 1e-12);
    validate_partition(fg, cf.as_partition());

    CHECK_THROWS_AS(build_cube_partition(fg, 0, Rational(1)), Error);  // delta >= inf r
    CHECK_THROWS_AS(build_cube_partition(fg, 0, Rational(3, 2)), Error);
}

TEST_CASE("k-mixing: independence gives zero deviations") {
    FlowMeasure fm = bernoulli_half_flow();
    const Graph& g = fm.base().graph();
    BlockSet B = {base_block(parse_word(g, "a", 0))};
    OrderedPartition beta{{ {base_block(parse_word(g, "a", 0))},
                            {base_block(parse_word(g, "b", 0))} }};
    auto rep = k_mixing_report(fm, B, beta, Rational(1), 2, 4, 1e-9);
    CHECK(rep.fraction_good == 1.0);
    CHECK(rep.worst_deviation < 1e-12);
    CHECK(rep.atoms == 8);
    // monotone (here constant 1) in N under exact independence
    for (int N = 2; N <= 5; ++N)
        CHECK(k_mixing_report(fm, B, beta, Rational(1), N, N + 1, 1e-9).fraction_good == 1.0);
}

TEST_CASE("k-mixing: Markov deviations track the second eigenvalue") {
    Graph g = th::full_2_shift();
    // transition matrix [[4/5, 1/5], [3/10, 7/10]], second eigenvalue 1/2
    std::map<std::vector<Vertex>, Rational> t;
    const Vertex a = g.id("a"), b = g.id("b");
    t[{a, a}] = rat_of(std::log(0.8));
    t[{a, b}] = rat_of(std::log(0.2));
    t[{b, a}] = rat_of(std::log(0.3));
    t[{b, b}] = rat_of(std::log(0.7));
    GibbsMeasure m = GibbsMeasure::equilibrium(Potential(g, 0, 1, std::move(t)), g);
    FlowMeasure fm = unit_suspension(m);
    BlockSet B = {base_block(parse_word(g, "a", 0))};
    OrderedPartition beta{{ {base_block(parse_word(g, "a", 0))},
                            {base_block(parse_word(g, "b", 0))} }};
    // oracle: explicit matrix powers
    const double lam2 = 0.5;
    double P[2][2] = {{0.8, 0.2}, {0.3, 0.7}};
    const double pia = 0.6;
    auto power_dev = [&](int N) {
        double M[2][2] = {{1, 0}, {0, 1}};
        for (int k = 0; k < N; ++k) {
            double R[2][2] = {};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int l = 0; l < 2; ++l) R[i][j] += M[i][l] * P[l][j];
            std::copy(&R[0][0], &R[0][0] + 4, &M[0][0]);
        }
        return std::max(std::abs(M[0][0] - pia), std::abs(M[1][0] - pia));
    };
    for (int N = 2; N <= 5; ++N) {
        auto rep = k_mixing_report(fm, B, beta, Rational(1), N, N + 1, 1.0);
        CHECK(rep.worst_deviation == doctest::Approx(power_dev(N)).epsilon(1e-9));
        // decay within a factor 2 of |lam2|^N
        CHECK(rep.worst_deviation <= 2 * std::pow(lam2, N));
        CHECK(rep.worst_deviation >= std::pow(lam2, N) / 2);
    }
}

TEST_CASE("k-mixing: constant-roof height windows never decay") {
    FlowMeasure fm = bernoulli_half_flow();
    BlockSet B = {{Word({}, 0), Rational(0), Rational(1, 2)}}; // height window
    // height partition as beta
    OrderedPartition beta{{ {{Word({}, 0), Rational(0), Rational(1, 2)}},
                            {{Word({}, 0), Rational(1, 2), Rational(1)}} }};
    for (int N : {2, 6, 10}) {
        auto rep = k_mixing_report(fm, B, beta, Rational(1, 2), N, N + 1, 0.4);
        CHECK(rep.fraction_good < 1.0);       // flagged as non-K behavior
        CHECK(rep.worst_deviation == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("vwb: independence gives zero dbar per atom") {
    FlowMeasure fm = bernoulli_half_flow();
    const Graph& g = fm.base().graph();
    OrderedPartition gamma{{ {base_block(parse_word(g, "a", 0))},
                             {base_block(parse_word(g, "b", 0))} }};
    auto rep = vwb_report(fm, gamma, Rational(1), 2, 2, 3);
    for (const auto& [mass, dbar] : rep.atom_dbars) CHECK(dbar < 1e-12);
    CHECK(rep.epsilon_achieved < 1e-10);
}

TEST_CASE("vwb: golden roof stays dbar-small, constant roof does not") {
    Graph gm = th::golden_mean();
    GibbsMeasure mme = GibbsMeasure::equilibrium(Potential::zero(gm), gm);
    Roof rg = th::roof0(gm, {{"a", 1}, {"b", rat_of(1.6180339887)}});
    FlowMeasure fg(mme, rg);
    CubePartition cg = build_cube_partition(fg, 0, Rational(1, 2));
    OrderedPartition gamma = group_cubes(cg, 2);
    auto rep = vwb_report(fg, gamma, Rational(1, 2), 2, 3, 4, 4096, 2000000);
    CHECK(rep.epsilon_achieved < 0.9);
    double fail_mass = 0;
    for (const auto& [mass, dbar] : rep.atom_dbars)
        if (dbar >= rep.epsilon_achieved) fail_mass += mass;
    CHECK(fail_mass <= rep.epsilon_achieved + 1e-9);

    // constant roof: the height observable is rigid under conditioning
    FlowMeasure fb = bernoulli_half_flow();
    OrderedPartition heights{{ {{Word({}, 0), Rational(0), Rational(1, 2)}},
                               {{Word({}, 0), Rational(1, 2), Rational(1)}} }};
    auto repc = vwb_report(fb, heights, Rational(1, 2), 2, 3, 4);
    CHECK(repc.epsilon_achieved > 0.4);
}
