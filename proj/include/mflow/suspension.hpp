#pragma once

#include "mflow/gibbs.hpp"
#include "mflow/potential.hpp"

namespace mflow {

// Point of the suspension space: base point plus height 0 <= t < r(base).
// Heights are exact rationals so the flow group law has zero residual.
struct FlowPoint {
    Point base;
    Rational height;
};

FlowPoint make_flow_point(const Roof& r, Point base, Rational height);

// sigma_r^tau: increase t at unit speed subject to (x, r(x)) ~ (sigma x, 0).
FlowPoint flow_map(const Roof& r, const FlowPoint& z, const Rational& tau);

// Certified upper bound on the Bowen-Walters distance: minimum length over
// enumerated basic paths (vertical / horizontal segments in Sigma_1
// coordinates through theta_r(x,t) = (x, t/r(x))) with at most
// segment_budget segments, symmetrized over the two argument orders.
double bw_distance_upper(const Roof& r, const FlowPoint& z, const FlowPoint& w,
                         int segment_budget);

// mu = (1 / int r dnu) int int delta_(x,t) dt dnu
class FlowMeasure {
public:
    FlowMeasure(GibbsMeasure base, Roof roof);

    const GibbsMeasure& base() const { return base_; }
    const Roof& roof() const { return roof_; }
    double normalizer() const { return normalizer_; } // int r dnu

    // mass of cylinder x [a,b); requires the interval to sit under the roof
    // on the whole cylinder
    double block_mass(const Word& cyl, const Rational& a, const Rational& b) const;
    // inf of the roof over a cylinder, exact
    Rational roof_inf(const Word& cyl) const;

private:
    GibbsMeasure base_;
    Roof roof_;
    double normalizer_;
};

inline FlowMeasure suspend_measure(const GibbsMeasure& base, const Roof& roof) {
    return FlowMeasure(base, roof);
}
inline const GibbsMeasure& induce_measure(const FlowMeasure& fm) { return fm.base(); }

// Abramov: flow entropy = base entropy / int r dnu.
double abramov_entropy(double base_entropy, const FlowMeasure& fm);

// Replace a period-p basis by its mixing component with the p-step shift
// (alphabet: length-p paths, so multiplicities survive) and the roof by p c.
struct ConstantRoofRecode {
    Graph graph;
    Roof roof;                                  // constant p c
    std::vector<std::vector<Vertex>> path_of;   // base-graph path per new vertex
};
ConstantRoofRecode constant_roof_recode(const Graph& g, int p, const Rational& c);
// validates constancy first (RoofNotConstant otherwise)
ConstantRoofRecode constant_roof_recode(const Graph& g, int p, const Roof& r);
// Push a memory <= 1 potential through the recode (Birkhoff p-sums on paths).
Potential recode_potential(const ConstantRoofRecode& rec, const Potential& phi);

// Conjugacy witness for constant suspensions: rho(x,s) = (S^s x, s mod 1).
struct ProductCoords {
    Rational s;            // base_image_time
    Rational circle;       // s mod 1
    Point shifted_base;    // sigma^{floor(s)} x
};
ProductCoords product_coordinates(const Roof& r, const FlowPoint& z, const Rational& t);

} // namespace mflow
