#pragma once

#include <span>

#include "mflow/potential.hpp"

namespace mflow {

// lambda = exp(P_top) as the Perron eigenvalue of the weighted word matrix.
struct Pressure {
    double lambda;
    double log_lambda;
    long iterations;
};
Pressure pressure(const Potential& phi, const Graph& g, double tol = 1e-13,
                  long iteration_cap = 200000);

// One application of the Ruelle operator to a function represented on
// cylinders of fixed length: (Lf)(x) = sum_{sigma y = x} e^{phi(y)} f(y).
std::map<std::vector<Vertex>, double> transfer_apply(
    const Potential& phi, const std::map<std::vector<Vertex>, double>& f, int depth);

// Equilibrium (Gibbs) measure from the Perron triple (lambda, h, xi) of the
// Ruelle operator of a one-sided locally constant potential. Immutable after
// construction; all queries are pure.
class GibbsMeasure {
public:
    static GibbsMeasure equilibrium(const Potential& phi, const Graph& g, double tol = 1e-13,
                                    long iteration_cap = 200000);

    const Graph& graph() const { return g_; }
    const Potential& potential() const { return phi_; }
    double lambda() const { return lambda_; }
    double log_pressure() const { return std::log(lambda_); }
    int state_length() const { return L_; }
    long iterations() const { return iterations_; }
    double residual() const; // max of the two eigen-residuals, sup norm
    int period() const { return period_; }

    // nu(_m[w]); anchor-independent by shift invariance
    double cylinder_mass(const Word& w) const;
    double cylinder_mass(std::span<const Vertex> w) const;

    // g = e^{phi} h / (lambda h o sigma), from the first L+1 coordinates
    double g_value(std::span<const Vertex> window) const;
    // nu(past | future) = prod of g over the past coordinates
    double conditional_mass(std::span<const Vertex> past, std::span<const Vertex> future) const;

    double entropy() const; // log lambda - int phi dnu
    double integral(const Potential& f) const;

    const std::vector<std::vector<Vertex>>& states() const { return states_; }
    double state_mass(int i) const { return h_[i] * xi_[i]; }
    double h_at(std::span<const Vertex> w) const { return h_[state_index(w)]; }
    double xi_at(std::span<const Vertex> w) const { return xi_[state_index(w)]; }

private:
    GibbsMeasure(Graph g, Potential phi) : g_(std::move(g)), phi_(std::move(phi)) {}
    int state_index(std::span<const Vertex> w) const;

    Graph g_;
    Potential phi_;
    int L_ = 1;
    int period_ = 1;
    std::vector<std::vector<Vertex>> states_;
    std::map<std::vector<Vertex>, int> index_;
    std::vector<std::vector<double>> M_;
    double lambda_ = 0;
    std::vector<double> h_, xi_;
    long iterations_ = 0;
};

// nu restricted to a local stable/unstable set through the bracket
// projection p^s_x(.) = [., x], p^u_x(.) = [x, .].
enum class Side { Stable, Unstable };
struct ProjectionMeasure {
    Point anchor;
    Side side;
    const GibbsMeasure* underlying;
};
// Mass of a cylinder under the projection. Coordinates the projection pins
// to the anchor must match it (IncompatibleCylinder otherwise); the free
// side is summed exactly.
double projection_measure_mass(const ProjectionMeasure& pm, const Cylinder& c);

// Empirical local product structure through one edge: the ratio
// nu(_m[v_m..v_n]) / (nu(_m[v_m..v_0]) nu(_0[v_0..v_n])) over all cylinders
// through v -> w within the sample depth.
struct ProductCheck {
    double c_estimate;  // max of ratio and 1/ratio seen
    double worst_ratio; // max ratio / min ratio
    double min_ratio, max_ratio;
    long cylinders_checked;
};
ProductCheck local_product_check(const GibbsMeasure& m, Vertex v, Vertex w, int sample_depth);

// sum_{k>=1} var_k(log g): finite for finite-memory measures; exponent of
// the theoretical two-sided Gibbs constant.
double log_g_variation_sum(const GibbsMeasure& m);

} // namespace mflow
