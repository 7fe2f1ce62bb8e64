#pragma once

#include <optional>
#include <random>

#include "mflow/suspension.hpp"

namespace mflow {

// Pair of points on the same weak (un)stable set, with explicit anchors:
// stable means y_m^inf = x_n^inf, unstable means y_{-inf}^m = x_{-inf}^n.
// P^tau is anchor-independent only off pre-periodic points; our points are
// all eventually periodic, so the anchors are part of the datum.
struct AnchoredPair {
    Point x, y;
    Side side;
    long m = 0, n = 0;

    void validate(const Graph& g) const;
};

struct CocycleValue {
    Rational value;
    double error_bound; // 0 for locally constant roofs
};

// Bowen-Marcus cocycle P^s(x,y) = lim_k [r_{m+k}(y) - r_{n+k}(x)] (stable),
// P^u via k -> -infinity. The series terminates for locally constant roofs
// and the value is returned exactly.
CocycleValue bowen_marcus(const AnchoredPair& pair, const Roof& roof);

// Closed chain of anchored legs x^0 -> x^1 -> ... -> x^n = x^0.
struct SuLoop {
    std::vector<AnchoredPair> legs;

    void validate(const Graph& g) const;
    SuLoop reversed() const;
};

CocycleValue su_loop_weight(const SuLoop& loop, const Roof& roof);

// Lift of an su-path at (x^0, theta): t_0 = 0, t_i = t_{i-1} + P^{tau_i},
// flow points sigma_r^{theta + t_i}(x^i, 0).
struct LiftStep {
    FlowPoint point;
    Rational t;
};
std::vector<LiftStep> lift_su_path(const SuLoop& path, const Roof& roof, const Rational& theta);

// Birkhoff sums of the roof over all periodic orbits of period <= max_len
// (closed walks up to rotation), exact for rational tables.
struct CycleSum {
    std::vector<Vertex> cycle;
    Rational sum;
};
std::vector<CycleSum> periodic_orbit_sums(const Roof& roof, const Graph& g, int max_len);

// Lattice-vs-dense fit of the holonomy evidence. A candidate c > 0 fits if
// every evidence value sits within tol * c of c Z (fractional parts of v/c
// within tol of integers); the largest fitting c >= 10 tol wins.
struct HolonomyReport {
    std::vector<double> sampled_weights; // loop-weight channel
    std::vector<double> periodic_sums;   // periodic-orbit channel
    bool lattice = false;
    double c = 0.0;       // generator when lattice
    double residual = 0.0; // max absolute distance of evidence to c Z
    bool consistent = true; // the two channels agree on the verdict
    bool channel_loops_lattice = false;
    bool channel_sums_lattice = false;
};
HolonomyReport arithmeticity_classify(const std::vector<double>& sums,
                                      const std::vector<double>& loop_weights, double tol);

enum class Verdict { Bernoulli, BernoulliTimesRotation };

struct ClassificationReport {
    bool arithmetic = false;
    std::optional<double> c;           // lattice generator / graph period
    std::optional<double> theta;       // 2 pi / c
    int period_p = 1;
    std::optional<double> flow_period; // p c = the evidence lattice generator
    Verdict verdict = Verdict::Bernoulli;
    HolonomyReport holonomy;
};

// Deterministic sampler for su-loops: bracket quadrilaterals with anchor
// shifts by multiples of the shared cycle length (zero-shift quadrilaterals
// have weight forced near 0 for short-memory roofs).
std::vector<SuLoop> sample_su_loops(const Graph& g, std::uint64_t seed, int count);

ClassificationReport classify_flow(const GibbsMeasure& m, const Roof& roof, const Graph& g,
                                   double tol, std::uint64_t seed, int cycle_cap = 8,
                                   int loop_count = 64);

// random eventually-periodic point with x_0 = v (test and sampler helper)
Point random_point_through(const Graph& g, Vertex v, std::mt19937_64& rng, int core_len = 4);

} // namespace mflow
