#include "mflow/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mflow {

namespace {

long lcm_long(long a, long b) { return a / std::gcd(a, b) * b; }

// decidable check of y_{m+j} = x_{n+j} for all j >= 0 (stable orientation)
bool tails_agree_forward(const Point& y, long m, const Point& x, long n) {
    const long fy = static_cast<long>(y.future_cycle().size());
    const long fx = static_cast<long>(x.future_cycle().size());
    const long until = std::max({y.core_hi() - m, x.core_hi() - n, 0L}) + lcm_long(fy, fx) + 1;
    for (long j = 0; j <= until; ++j)
        if (y.at(m + j) != x.at(n + j)) return false;
    return true;
}

bool tails_agree_backward(const Point& y, long m, const Point& x, long n) {
    const long py = static_cast<long>(y.past_cycle().size());
    const long px = static_cast<long>(x.past_cycle().size());
    const long until = std::max({m - y.core_lo(), n - x.core_lo(), 0L}) + lcm_long(py, px) + 1;
    for (long j = 0; j <= until; ++j)
        if (y.at(m - j) != x.at(n - j)) return false;
    return true;
}

} // namespace

void AnchoredPair::validate(const Graph& g) const {
    require(x.graph().same_graph(g) && y.graph().same_graph(g), Err::InvalidAnchors,
            "points live on a different graph");
    const bool ok = side == Side::Stable ? tails_agree_forward(y, m, x, n)
                                         : tails_agree_backward(y, m, x, n);
    require(ok, Err::InvalidAnchors, "declared coordinate agreement does not hold");
}

CocycleValue bowen_marcus(const AnchoredPair& pair, const Roof& roof) {
    pair.validate(roof.graph());
    const Potential& r = roof.potential();
    if (pair.side == Side::Stable) {
        // summands r(sigma^{m+k} y) - r(sigma^{n+k} x) vanish once every
        // coordinate they read lies in the agreement zone: k >= -lo
        const long K = std::max<long>(0, -r.lo());
        Rational v = r.birkhoff(pair.y, pair.m + K) - r.birkhoff(pair.x, pair.n + K);
        return {std::move(v), 0.0};
    }
    // unstable: partial sums stabilize at k >= hi
    const long K = std::max<long>(0, r.hi());
    Rational v = r.birkhoff(pair.y, pair.m - K) - r.birkhoff(pair.x, pair.n - K);
    return {std::move(v), 0.0};
}

void SuLoop::validate(const Graph& g) const {
    require(!legs.empty(), Err::InvalidAnchors, "empty loop");
    for (std::size_t i = 0; i < legs.size(); ++i) {
        legs[i].validate(g);
        const Point& a = legs[i].y;
        const Point& b = legs[(i + 1) % legs.size()].x;
        require(a.same_point(b), Err::InvalidAnchors,
                "legs do not chain at position " + std::to_string(i));
    }
}

SuLoop SuLoop::reversed() const {
    SuLoop out;
    for (auto it = legs.rbegin(); it != legs.rend(); ++it)
        out.legs.push_back({it->y, it->x, it->side, it->n, it->m});
    return out;
}

CocycleValue su_loop_weight(const SuLoop& loop, const Roof& roof) {
    loop.validate(roof.graph());
    Rational total(0);
    double err = 0;
    for (const auto& leg : loop.legs) {
        auto cv = bowen_marcus(leg, roof);
        total += cv.value;
        err += cv.error_bound;
    }
    return {std::move(total), err};
}

std::vector<LiftStep> lift_su_path(const SuLoop& path, const Roof& roof, const Rational& theta) {
    path.validate(roof.graph());
    const Point& x0 = path.legs.front().x;
    require(theta >= 0 && theta < roof.eval(x0), Err::HeightOutOfRange,
            "0 <= theta < r(x^0) required");
    std::vector<LiftStep> out;
    Rational t(0);
    out.push_back({flow_map(roof, FlowPoint{x0, Rational(0)}, theta), t});
    for (const auto& leg : path.legs) {
        t += bowen_marcus(leg, roof).value;
        out.push_back({flow_map(roof, FlowPoint{leg.y, Rational(0)}, theta + t), t});
    }
    return out;
}

std::vector<CycleSum> periodic_orbit_sums(const Roof& roof, const Graph& g, int max_len) {
    require(max_len >= 1, Err::ValidationError, "max_len must be >= 1");
    std::vector<CycleSum> out;
    for (auto& walk : g.closed_walks(max_len)) {
        Point z = Point::periodic(g, walk);
        Rational s = roof.birkhoff(z, static_cast<long>(walk.size()));
        out.push_back({std::move(walk), std::move(s)});
    }
    return out;
}

namespace {

struct LatticeFit {
    bool lattice = false;
    double c = 0.0;
    double residual = 0.0;
};

double lattice_residual(const std::vector<double>& ev, double c) {
    double r = 0;
    for (double v : ev) r = std::max(r, std::abs(v - c * std::round(v / c)));
    return r;
}

bool fits(const std::vector<double>& ev, double c, double tol) {
    if (!(c > 0)) return false;
    for (double v : ev) {
        const double q = v / c;
        if (std::abs(q - std::round(q)) > tol) return false;
    }
    return true;
}

// Largest c >= 10 tol with every fractional part of v/c within tol of an
// integer. Candidates: integer subdivisions of the smallest evidence value
// (continued-fraction convergent denominators are a subset), least-squares
// refined before acceptance.
LatticeFit fit_lattice(std::vector<double> ev, double tol) {
    ev.erase(std::remove_if(ev.begin(), ev.end(), [](double v) { return std::abs(v) < 1e-13; }),
             ev.end());
    for (double& v : ev) v = std::abs(v);
    if (ev.empty()) return {};
    const double cmin = 10 * tol;
    // candidates come from the smallest value that must be a nonzero
    // multiple of the generator; values below the scan floor only have to
    // fit as multiples of zero
    double vmin = 0;
    for (double v : ev)
        if (v >= cmin && (vmin == 0 || v < vmin)) vmin = v;
    if (vmin == 0) return {};
    const long kmax = static_cast<long>(std::floor(vmin / cmin));
    for (long k = 1; k <= kmax; ++k) {
        double c = vmin / static_cast<double>(k);
        if (!fits(ev, c, tol)) continue;
        // least-squares refinement over the rounded multipliers
        double num = 0, den = 0;
        for (double v : ev) {
            const double n = std::round(v / c);
            num += v * n;
            den += n * n;
        }
        if (den > 0) {
            const double c2 = num / den;
            if (fits(ev, c2, tol)) c = c2;
        }
        return {true, c, lattice_residual(ev, c)};
    }
    return {};
}

} // namespace

HolonomyReport arithmeticity_classify(const std::vector<double>& sums,
                                      const std::vector<double>& loop_weights, double tol) {
    require(!sums.empty() || !loop_weights.empty(), Err::EmptyEvidence, "no evidence supplied");
    require(tol > 0, Err::ValidationError, "tol must be positive");
    HolonomyReport rep;
    rep.periodic_sums = sums;
    rep.sampled_weights = loop_weights;

    std::vector<double> all(sums);
    all.insert(all.end(), loop_weights.begin(), loop_weights.end());
    const LatticeFit combined = fit_lattice(all, tol);
    rep.lattice = combined.lattice;
    rep.c = combined.c;
    rep.residual = combined.residual;

    const LatticeFit fs = fit_lattice(sums, tol);
    const LatticeFit fl = fit_lattice(loop_weights, tol);
    rep.channel_sums_lattice = fs.lattice;
    rep.channel_loops_lattice = fl.lattice;
    // a channel with no nonzero evidence is uninformative, not inconsistent
    auto nonzero = [](const std::vector<double>& v) {
        return std::any_of(v.begin(), v.end(), [](double x) { return std::abs(x) >= 1e-13; });
    };
    rep.consistent = true;
    if (nonzero(sums) && nonzero(loop_weights)) {
        rep.consistent = fs.lattice == fl.lattice;
        if (fs.lattice && fl.lattice)
            rep.consistent = rep.consistent &&
                             std::abs(fs.c - fl.c) <= tol * std::max({fs.c, fl.c, 1.0});
    }
    return rep;
}

Point random_point_through(const Graph& g, Vertex v, std::mt19937_64& rng, int core_len) {
    auto pick = [&rng](const std::vector<Vertex>& opts) {
        return opts[std::uniform_int_distribution<std::size_t>(0, opts.size() - 1)(rng)];
    };
    // backward walk until a vertex repeats
    std::vector<Vertex> back{v};
    std::vector<int> seen_at(static_cast<std::size_t>(g.size()), -1);
    int steps = 0;
    for (;;) {
        Vertex u = back.back();
        if (steps++ >= core_len && seen_at[static_cast<std::size_t>(u)] >= 0) break;
        if (seen_at[static_cast<std::size_t>(u)] < 0)
            seen_at[static_cast<std::size_t>(u)] = static_cast<int>(back.size()) - 1;
        back.push_back(pick(g.in(u)));
    }
    const int rep = seen_at[static_cast<std::size_t>(back.back())];
    // coordinates -j hold back[j]; the past cycle is back[rep+1 ..] reversed
    std::vector<Vertex> past(back.rbegin(), back.rbegin() + (static_cast<long>(back.size()) - rep - 1));
    std::vector<Vertex> core_left(back.begin() + 1, back.begin() + rep + 1);
    std::reverse(core_left.begin(), core_left.end());

    // forward walk until a vertex repeats
    std::vector<Vertex> fwd{v};
    std::fill(seen_at.begin(), seen_at.end(), -1);
    steps = 0;
    for (;;) {
        Vertex u = fwd.back();
        if (steps++ >= core_len && seen_at[static_cast<std::size_t>(u)] >= 0) break;
        if (seen_at[static_cast<std::size_t>(u)] < 0)
            seen_at[static_cast<std::size_t>(u)] = static_cast<int>(fwd.size()) - 1;
        fwd.push_back(pick(g.out(u)));
    }
    const int repf = seen_at[static_cast<std::size_t>(fwd.back())];
    std::vector<Vertex> future, core_right;
    if (repf == 0) {
        // the walk returned to v itself: cycle starts right after v
        future.assign(fwd.begin() + 1, fwd.end());
    } else {
        future.assign(fwd.begin() + repf, fwd.end() - 1);
        core_right.assign(fwd.begin() + 1, fwd.begin() + repf);
    }

    std::vector<Vertex> core = core_left;
    core.push_back(v);
    core.insert(core.end(), core_right.begin(), core_right.end());
    return Point(g, std::move(past), Word(std::move(core), -static_cast<long>(core_left.size())),
                 std::move(future));
}

namespace {

// anchored pair for two points with a shared forward tail (stable) or
// shared backward tail (unstable), shifted by `s` periods of that tail
AnchoredPair make_leg(const Point& from, const Point& to, Side side, long s) {
    if (side == Side::Stable) {
        const long L = static_cast<long>(to.future_cycle().size());
        long base = std::max(from.core_hi(), to.core_hi());
        base = std::max(base, 0L) + (s < 0 ? -s * L : 0);
        return {from, to, side, base + s * L, base};
    }
    const long L = static_cast<long>(to.past_cycle().size());
    long base = std::min(from.core_lo(), to.core_lo());
    base = std::min(base, 0L) - (s > 0 ? s * L : 0);
    return {from, to, side, base + s * L, base};
}

} // namespace

std::vector<SuLoop> sample_su_loops(const Graph& g, std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> shift_dist(-3, 3);
    std::uniform_int_distribution<int> vdist(0, g.size() - 1);
    std::vector<SuLoop> loops;
    while (static_cast<int>(loops.size()) < count) {
        const Vertex v = vdist(rng);
        Point w0 = random_point_through(g, v, rng);
        Point y = random_point_through(g, v, rng);
        if ((loops.size() % 4) == 3) {
            // single-leg tail loop: periodic-sum style evidence
            long s = shift_dist(rng);
            if (s == 0) s = 1;
            SuLoop loop;
            loop.legs.push_back(make_leg(w0, w0, Side::Stable, s));
            loops.push_back(std::move(loop));
            continue;
        }
        Point x1 = smale_bracket(w0, y); // past of w0, future of y
        Point x3 = smale_bracket(y, w0); // past of y, future of w0
        SuLoop loop;
        loop.legs.push_back(make_leg(w0, x1, Side::Unstable, shift_dist(rng)));
        loop.legs.push_back(make_leg(x1, y, Side::Stable, shift_dist(rng)));
        loop.legs.push_back(make_leg(y, x3, Side::Unstable, shift_dist(rng)));
        loop.legs.push_back(make_leg(x3, w0, Side::Stable, shift_dist(rng)));
        loops.push_back(std::move(loop));
    }
    return loops;
}

ClassificationReport classify_flow(const GibbsMeasure& m, const Roof& roof, const Graph& g,
                                   double tol, std::uint64_t seed, int cycle_cap, int loop_count) {
    require(m.graph().same_graph(g), Err::ValidationError, "measure lives on a different graph");
    require(g.is_transitive(), Err::NotTransitive, "classification needs a transitive graph");

    std::vector<double> sums;
    for (const auto& cs : periodic_orbit_sums(roof, g, cycle_cap))
        sums.push_back(to_double(cs.sum));
    std::vector<double> weights;
    for (const auto& loop : sample_su_loops(g, seed, loop_count))
        weights.push_back(to_double(su_loop_weight(loop, roof).value));

    ClassificationReport rep;
    rep.holonomy = arithmeticity_classify(sums, weights, tol);
    rep.period_p = g.period();
    if (rep.holonomy.lattice) {
        // evidence lattice = p c: cycle lengths are multiples of the period,
        // so the per-step generator is c = Lambda / p
        const double lambda_gen = rep.holonomy.c;
        rep.arithmetic = true;
        rep.c = lambda_gen / rep.period_p;
        rep.theta = 2.0 * M_PI / *rep.c;
        rep.flow_period = lambda_gen;
        rep.verdict = Verdict::BernoulliTimesRotation;
    } else {
        rep.arithmetic = false;
        rep.verdict = Verdict::Bernoulli;
    }
    return rep;
}

} // namespace mflow
