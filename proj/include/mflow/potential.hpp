#pragma once

#include <map>
#include <optional>
#include <span>

#include "mflow/point.hpp"
#include "mflow/rational.hpp"

namespace mflow {

// var_k <= C * exp(-alpha k); tail bounds only, never pointwise evaluation.
struct HolderEnvelope {
    double C = 0.0;
    double alpha = 1.0;
};

// Locally constant potential: a rational table over admissible windows
// x_lo..x_hi. Exactly evaluable on points; the envelope certifies tails.
class Potential {
public:
    Potential(const Graph& g, int lo, int hi, std::map<std::vector<Vertex>, Rational> table,
              HolderEnvelope env = {});

    static Potential zero(const Graph& g);
    static Potential constant(const Graph& g, const Rational& c);

    const Graph& graph() const { return g_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    int window_len() const { return hi_ - lo_ + 1; }
    bool one_sided() const { return lo_ >= 0; }
    const HolderEnvelope& envelope() const { return env_; }
    const std::map<std::vector<Vertex>, Rational>& table() const { return table_; }

    const Rational& eval_window(std::span<const Vertex> w) const;
    // f(sigma^shift x): reads coordinates shift+lo .. shift+hi of x
    Rational eval(const Point& x, long shift = 0) const;
    double evald(const Point& x, long shift = 0) const { return to_double(eval(x, shift)); }

    // Birkhoff sum f_n with the cocycle convention: f_0 = 0 and
    // f_n = -f_{|n|} o sigma^{-|n|} for n < 0.
    Rational birkhoff(const Point& x, long n) const;

    Rational min_value() const { return min_; }
    Rational max_value() const { return max_; }
    std::optional<Rational> constant_value() const; // set iff the table is constant

    // exact variation: var_k = sup{|f(x)-f(y)| : x_i = y_i for |i| <= k}
    double variation(int k) const;
    // sum_{k >= k0} var_k, exact (finitely many nonzero terms)
    double variation_tail(int k0) const;

    // f + (u o sigma - u), exact on tables
    Potential plus_coboundary(const Potential& u) const;

private:
    Graph g_;
    int lo_, hi_;
    std::map<std::vector<Vertex>, Rational> table_;
    HolderEnvelope env_;
    Rational min_, max_;
};

// Positive potential with certified bounds 0 < inf_r <= r <= sup_r.
class Roof {
public:
    Roof(Potential p, HolderEnvelope env);
    explicit Roof(const Potential& p) : Roof(p, p.envelope()) {}

    const Potential& potential() const { return pot_; }
    const Graph& graph() const { return pot_.graph(); }
    const Rational& inf() const { return inf_; }
    const Rational& sup() const { return sup_; }
    const HolderEnvelope& envelope() const { return pot_.envelope(); }

    Rational eval(const Point& x, long shift = 0) const { return pot_.eval(x, shift); }
    Rational birkhoff(const Point& x, long n) const { return pot_.birkhoff(x, n); }
    std::optional<Rational> constant_value() const { return pot_.constant_value(); }

private:
    Potential pot_;
    Rational inf_, sup_;
};

inline Rational birkhoff_sum(const Potential& f, const Point& x, long n) { return f.birkhoff(x, n); }
inline Rational birkhoff_sum(const Roof& r, const Point& x, long n) { return r.birkhoff(x, n); }

// All admissible windows of the given coordinate range, in sorted order.
std::vector<std::vector<Vertex>> admissible_windows(const Graph& g, int len);

} // namespace mflow
