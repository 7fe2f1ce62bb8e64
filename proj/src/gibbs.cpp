#include "mflow/gibbs.hpp"

#include <algorithm>
#include <cmath>

namespace mflow {

namespace {

struct WordMatrix {
    std::vector<std::vector<Vertex>> states;
    std::map<std::vector<Vertex>, int> index;
    std::vector<std::vector<double>> M; // M[u][v] = e^{phi(u . v_last)}, 0 if no transition
    int L;
};

WordMatrix build_word_matrix(const Potential& phi, const Graph& g) {
    require(phi.one_sided(), Err::ValidationError, "potential must be one-sided; reduce first");
    WordMatrix wm;
    wm.L = std::max(phi.hi(), 1);
    wm.states = admissible_windows(g, wm.L);
    for (std::size_t i = 0; i < wm.states.size(); ++i) wm.index[wm.states[i]] = static_cast<int>(i);
    const int n = static_cast<int>(wm.states.size());
    wm.M.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        const auto& u = wm.states[i];
        for (Vertex b : g.out(u.back())) {
            std::vector<Vertex> v(u.begin() + 1, u.end());
            v.push_back(b);
            auto it = wm.index.find(v);
            if (it == wm.index.end()) continue;
            // phi reads (u_0 .. u_{L-1}, b) clipped to its window [0, hi]
            std::vector<Vertex> full(u);
            full.push_back(b);
            std::vector<Vertex> key(full.begin(), full.begin() + phi.hi() + 1);
            wm.M[i][static_cast<std::size_t>(it->second)] = std::exp(to_double(phi.eval_window(key)));
        }
    }
    return wm;
}

struct PerronPair {
    double lambda;
    std::vector<double> right; // M r = lambda r
    std::vector<double> left;  // M^T l = lambda l
    long iterations;
};

void matvec(const std::vector<std::vector<double>>& M, const std::vector<double>& x,
            std::vector<double>& y, bool transpose) {
    const std::size_t n = M.size();
    y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            y[transpose ? j : i] += M[i][j] * x[transpose ? i : j];
}

// Power iteration on the p-step matrix (the p-step operator is primitive on
// each period class), then projection onto the lambda-eigenspace of M:
// h = sum_j lambda^{-j} M^j v.
std::vector<double> perron_vector(const std::vector<std::vector<double>>& M, int p, bool transpose,
                                  double tol, long cap, double& lambda_out, long& iters_out) {
    const std::size_t n = M.size();
    std::vector<double> v(n, 1.0), w, tmp;
    double rq = 0;
    long it = 0;
    bool converged = false;
    for (; it < cap && !converged; ++it) {
        w = v;
        for (int s = 0; s < p; ++s) {
            matvec(M, w, tmp, transpose);
            w.swap(tmp);
        }
        double num = 0, den = 0;
        for (std::size_t i = 0; i < n; ++i) {
            num += w[i] * v[i];
            den += v[i] * v[i];
        }
        rq = num / den; // ~ lambda^p
        // converge on the eigenvector residual, componentwise relative: the
        // iterates of a nonnegative irreducible matrix stay positive, and
        // w_i is the backward-error scale of its own coordinate. A global
        // norm test would let small components carry large relative error,
        // which the g-function queries cannot afford.
        converged = true;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(w[i] - rq * v[i]) > tol * std::abs(w[i])) {
                converged = false;
                break;
            }
        double norm = 0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        require(norm > 0 && std::isfinite(norm), Err::NoConvergence, "power iteration degenerated");
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    }
    require(converged, Err::NoConvergence,
            "power iteration did not converge in " + std::to_string(cap) + " iterations");
    const double lambda = std::pow(rq, 1.0 / p);
    // project onto the lambda-eigenspace of the one-step matrix
    std::vector<double> h(v);
    if (p > 1) {
        std::vector<double> acc(v), cur(v);
        for (int j = 1; j < p; ++j) {
            matvec(M, cur, tmp, transpose);
            cur.swap(tmp);
            for (std::size_t i = 0; i < n; ++i) acc[i] += cur[i] / std::pow(lambda, j);
        }
        h = acc;
    }
    double m = *std::max_element(h.begin(), h.end());
    require(m > 0, Err::NoConvergence, "Perron vector not positive");
    for (double& x : h) x /= m;
    lambda_out = lambda;
    iters_out = it + 1;
    return h;
}

} // namespace

Pressure pressure(const Potential& phi, const Graph& g, double tol, long iteration_cap) {
    require(g.is_transitive(), Err::NotTransitive, "pressure needs a transitive graph");
    auto wm = build_word_matrix(phi, g);
    const int p = g.period();
    double lambda = 0;
    long iters = 0;
    perron_vector(wm.M, p, false, tol, iteration_cap, lambda, iters);
    return {lambda, std::log(lambda), iters};
}

std::map<std::vector<Vertex>, double> transfer_apply(
    const Potential& phi, const std::map<std::vector<Vertex>, double>& f, int depth) {
    require(phi.one_sided(), Err::ValidationError, "potential must be one-sided");
    require(depth >= std::max(phi.hi(), 1), Err::MemoryTooShort,
            "cylinder length " + std::to_string(depth) + " below potential memory " +
                std::to_string(phi.hi()));
    const Graph& g = phi.graph();
    std::map<std::vector<Vertex>, double> out;
    for (const auto& x : admissible_windows(g, depth)) {
        double s = 0;
        for (Vertex a = 0; a < g.size(); ++a) {
            if (!g.edge(a, x.front())) continue;
            std::vector<Vertex> y;
            y.push_back(a);
            y.insert(y.end(), x.begin(), x.end());
            std::vector<Vertex> win(y.begin(), y.begin() + phi.window_len());
            auto it = f.find(std::vector<Vertex>(y.begin(), y.end() - 1));
            const double fy = it == f.end() ? 0.0 : it->second;
            s += std::exp(to_double(phi.eval_window(win))) * fy;
        }
        out[x] = s;
    }
    return out;
}

GibbsMeasure GibbsMeasure::equilibrium(const Potential& phi, const Graph& g, double tol,
                                       long iteration_cap) {
    require(g.is_transitive(), Err::NotTransitive, "equilibrium measure needs a transitive graph");
    GibbsMeasure m(g, phi);
    auto wm = build_word_matrix(phi, g);
    m.L_ = wm.L;
    m.states_ = std::move(wm.states);
    m.index_ = std::move(wm.index);
    m.M_ = std::move(wm.M);
    m.period_ = g.period();
    double lam_h = 0, lam_xi = 0;
    long it_h = 0, it_xi = 0;
    m.h_ = perron_vector(m.M_, m.period_, true, tol, iteration_cap, lam_h, it_h);
    m.xi_ = perron_vector(m.M_, m.period_, false, tol, iteration_cap, lam_xi, it_xi);
    m.lambda_ = 0.5 * (lam_h + lam_xi);
    m.iterations_ = it_h + it_xi;
    // normalize nu to a probability: sum_u h(u) xi(u) = 1
    double z = 0;
    for (std::size_t i = 0; i < m.h_.size(); ++i) z += m.h_[i] * m.xi_[i];
    for (double& x : m.xi_) x /= z;
    return m;
}

double GibbsMeasure::residual() const {
    double r = 0;
    const std::size_t n = states_.size();
    std::vector<double> y;
    matvec(M_, h_, y, true);
    for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(y[i] - lambda_ * h_[i]));
    matvec(M_, xi_, y, false);
    for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(y[i] - lambda_ * xi_[i]));
    return r;
}

int GibbsMeasure::state_index(std::span<const Vertex> w) const {
    auto it = index_.find(std::vector<Vertex>(w.begin(), w.end()));
    require(it != index_.end(), Err::Inadmissible, "word is not an admissible state");
    return it->second;
}

double GibbsMeasure::cylinder_mass(std::span<const Vertex> w) const {
    if (w.empty()) return 1.0;
    if (!g_.word_admissible(w)) return 0.0;
    const long k = static_cast<long>(w.size());
    if (k < L_) {
        // sum over admissible completions to state length
        double s = 0;
        for (const auto& u : states_) {
            if (!std::equal(w.begin(), w.end(), u.begin())) continue;
            s += h_[static_cast<std::size_t>(state_index(u))] *
                 xi_[static_cast<std::size_t>(state_index(u))];
        }
        return s;
    }
    // nu[w] = h(w_0^{L-1}) lambda^{-(k-L)} exp(sum phi) xi(w_{k-L}^{k-1})
    const int i0 = state_index(w.subspan(0, static_cast<std::size_t>(L_)));
    const int i1 = state_index(w.subspan(static_cast<std::size_t>(k - L_)));
    double log_acc = 0;
    for (long j = 0; j + L_ < k; ++j) {
        std::vector<Vertex> win(w.begin() + j + phi_.lo(), w.begin() + j + phi_.hi() + 1);
        log_acc += to_double(phi_.eval_window(win));
    }
    return h_[static_cast<std::size_t>(i0)] * std::exp(log_acc) *
           std::pow(lambda_, -static_cast<double>(k - L_)) * xi_[static_cast<std::size_t>(i1)];
}

double GibbsMeasure::cylinder_mass(const Word& w) const { return cylinder_mass(w.symbols); }

double GibbsMeasure::g_value(std::span<const Vertex> window) const {
    require(static_cast<int>(window.size()) >= L_ + 1, Err::MemoryTooShort,
            "g needs a window of length >= memory + 1");
    require(g_.word_admissible(window.subspan(0, static_cast<std::size_t>(L_) + 1)),
            Err::Inadmissible, "inadmissible window");
    std::vector<Vertex> win(window.begin() + phi_.lo(), window.begin() + phi_.hi() + 1);
    const double e = std::exp(to_double(phi_.eval_window(win)));
    const int u = state_index(window.subspan(0, static_cast<std::size_t>(L_)));
    const int v = state_index(window.subspan(1, static_cast<std::size_t>(L_)));
    return e * h_[static_cast<std::size_t>(u)] / (lambda_ * h_[static_cast<std::size_t>(v)]);
}

double GibbsMeasure::conditional_mass(std::span<const Vertex> past,
                                      std::span<const Vertex> future) const {
    require(static_cast<int>(future.size()) >= L_, Err::MemoryTooShort,
            "future must determine a state");
    std::vector<Vertex> concat(past.begin(), past.end());
    concat.insert(concat.end(), future.begin(), future.end());
    require(g_.word_admissible(concat), Err::Inadmissible, "past . future inadmissible");
    double prod = 1.0;
    const long n = static_cast<long>(past.size());
    for (long j = 0; j < n; ++j) {
        std::span<const Vertex> tail(concat.data() + j,
                                     std::min<std::size_t>(concat.size() - j,
                                                           static_cast<std::size_t>(L_ + 1)));
        prod *= g_value(tail);
    }
    return prod;
}

double GibbsMeasure::integral(const Potential& f) const {
    double s = 0;
    for (const auto& w : admissible_windows(g_, f.window_len()))
        s += to_double(f.eval_window(w)) * cylinder_mass(w);
    return s;
}

double GibbsMeasure::entropy() const { return log_pressure() - integral(phi_); }

double projection_measure_mass(const ProjectionMeasure& pm, const Cylinder& c) {
    const GibbsMeasure& m = *pm.underlying;
    const Point& x = pm.anchor;
    require(c.admissible(m.graph()), Err::Inadmissible, "empty cylinder");
    // Stable side: the projection [., x] pins coordinates >= 0 to x and
    // leaves the past free; unstable is the mirror image.
    const bool stable = pm.side == Side::Stable;
    std::vector<Vertex> free_part;
    long free_lo = 0;
    for (long i = c.lo(); i < c.hi(); ++i) {
        const bool pinned = stable ? i >= 0 : i <= 0;
        if (pinned) {
            require(c.at(i) == x.at(i), Err::IncompatibleCylinder,
                    "cylinder pins coordinate " + std::to_string(i) + " away from the anchor");
        } else {
            if (free_part.empty()) free_lo = i;
            free_part.push_back(c.at(i));
        }
    }
    if (free_part.empty()) return m.cylinder_mass(Word({x.at(0)}, 0));
    // The preimage pins the free coordinates plus z_0 = x_0; coordinates in
    // between are unconstrained, so sum over admissible gap fillings.
    const long free_end = free_lo + static_cast<long>(free_part.size());
    const long gap = stable ? -free_end : free_lo - 1;
    double total = 0;
    std::vector<Vertex> filler(static_cast<std::size_t>(std::max(gap, 0L)));
    auto rec = [&](auto&& self, long pos) -> void {
        if (pos == gap) {
            std::vector<Vertex> word;
            if (stable) {
                word = free_part;
                word.insert(word.end(), filler.begin(), filler.end());
                word.push_back(x.at(0));
            } else {
                word.push_back(x.at(0));
                word.insert(word.end(), filler.begin(), filler.end());
                word.insert(word.end(), free_part.begin(), free_part.end());
            }
            if (m.graph().word_admissible(word)) total += m.cylinder_mass(word);
            return;
        }
        for (Vertex v = 0; v < m.graph().size(); ++v) {
            filler[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1);
        }
    };
    rec(rec, 0);
    return total;
}

ProductCheck local_product_check(const GibbsMeasure& m, Vertex v, Vertex w, int sample_depth) {
    const Graph& g = m.graph();
    require(g.edge(v, w), Err::Inadmissible, "v -> w is not an edge");
    ProductCheck pc{0, 0, 0, 0, 0};
    bool first = true;
    for (int back = 0; back <= sample_depth; ++back)
        for (int fwd = 1; fwd <= std::max(1, sample_depth); ++fwd) {
            // cylinders _{-back}[v_{-back} .. v_0 = v, v_1 = w, .., v_fwd]
            for (const auto& pre : admissible_windows(g, back + 1)) {
                if (pre.back() != v) continue;
                for (const auto& post : admissible_windows(g, fwd + 1)) {
                    if (post.front() != v || post[1] != w) continue;
                    std::vector<Vertex> full(pre);
                    full.insert(full.end(), post.begin() + 1, post.end());
                    if (!g.word_admissible(full)) continue;
                    const double num = m.cylinder_mass(full);
                    const double den = m.cylinder_mass(pre) * m.cylinder_mass(post);
                    if (num <= 0 || den <= 0) continue;
                    const double ratio = num / den;
                    if (first) {
                        pc.min_ratio = pc.max_ratio = ratio;
                        first = false;
                    }
                    pc.min_ratio = std::min(pc.min_ratio, ratio);
                    pc.max_ratio = std::max(pc.max_ratio, ratio);
                    ++pc.cylinders_checked;
                }
            }
        }
    require(!first, Err::Inadmissible, "no cylinders through the edge");
    pc.c_estimate = std::max(pc.max_ratio, 1.0 / pc.min_ratio);
    pc.worst_ratio = pc.max_ratio / pc.min_ratio;
    return pc;
}

double log_g_variation_sum(const GibbsMeasure& m) {
    // log g is a function of the first L+1 coordinates; var_k vanishes for
    // k >= L+1. var_k = max over windows agreeing on coords 0..k.
    const Graph& g = m.graph();
    const int L = m.state_length();
    double sum = 0;
    for (int k = 1; k <= L; ++k) {
        std::map<std::vector<Vertex>, std::pair<double, double>> ranges;
        for (const auto& w : admissible_windows(g, L + 1)) {
            const double lg = std::log(m.g_value(w));
            std::vector<Vertex> key(w.begin(), w.begin() + k + 1);
            auto it = ranges.find(key);
            if (it == ranges.end()) ranges.emplace(std::move(key), std::make_pair(lg, lg));
            else {
                it->second.first = std::min(it->second.first, lg);
                it->second.second = std::max(it->second.second, lg);
            }
        }
        double var = 0;
        for (const auto& [k2, mm] : ranges) var = std::max(var, mm.second - mm.first);
        sum += var;
    }
    return sum;
}

} // namespace mflow
