#include "mflow/suspension.hpp"

#include <algorithm>
#include <cmath>

namespace mflow {

FlowPoint make_flow_point(const Roof& r, Point base, Rational height) {
    require(height >= 0 && height < r.eval(base), Err::HeightOutOfRange,
            "height must satisfy 0 <= t < r(x)");
    return {std::move(base), std::move(height)};
}

FlowPoint flow_map(const Roof& r, const FlowPoint& z, const Rational& tau) {
    Point x = z.base;
    Rational s = z.height + tau;
    while (s < 0) {
        x = x.shifted(-1);
        s += r.eval(x);
    }
    Rational rx = r.eval(x);
    while (s >= rx) {
        s -= rx;
        x = x.shifted(1);
        rx = r.eval(x);
    }
    return {std::move(x), std::move(s)};
}

namespace {

// length of the vertical segment from (x, a) to (sigma^i x, b) in Sigma_1
double vlen(long i, const Rational& a, const Rational& b) {
    return std::abs(to_double(Rational(i) + b - a));
}

double bw_one_sided(const Roof& r, const FlowPoint& z, const FlowPoint& w, int K) {
    const Point &x = z.base, &y = w.base;
    const Rational s = z.height / r.eval(z.base); // theta_r height in [0,1)
    const Rational u = w.height / r.eval(w.base);
    double best = std::numeric_limits<double>::infinity();
    const long J = 2;

    if (x.same_point(y) && s == u) return 0.0;

    // single vertical: w on the Sigma_1 orbit of z
    for (long j = -J; j <= J; ++j)
        if (y.same_point(x.shifted(j))) best = std::min(best, vlen(j, s, u));

    // single horizontal at the common height
    if (K >= 1 && s == u) {
        const double h = to_double(s);
        best = std::min(best,
                        (1 - h) * metric_d(x, y) + h * metric_d(x.shifted(1), y.shifted(1)));
    }

    if (K >= 2) {
        // vertical to height h, horizontal, vertical to the target; the
        // length is piecewise linear in h, so endpoints {0, s, u} suffice
        std::vector<Rational> heights = {Rational(0), s, u};
        for (long i = -J; i <= J; ++i)
            for (long j = -J; j <= J; ++j) {
                if (K == 2 && i != 0 && j != 0) continue; // one vertical only
                Point xi = x.shifted(i), yj = y.shifted(j);
                const double dxy = metric_d(xi, yj);
                const double dsxy = metric_d(xi.shifted(1), yj.shifted(1));
                for (const Rational& h : heights) {
                    const double v1 = vlen(i, s, h);
                    const double v2 = vlen(-j, h, u);
                    if (K == 2 && v1 > 0 && v2 > 0) continue;
                    const double hd = to_double(h);
                    best = std::min(best, v1 + (1 - hd) * dxy + hd * dsxy + v2);
                }
            }
    }
    return best;
}

} // namespace

double bw_distance_upper(const Roof& r, const FlowPoint& z, const FlowPoint& w,
                         int segment_budget) {
    require(segment_budget >= 1, Err::ValidationError, "segment budget must be >= 1");
    return std::min(bw_one_sided(r, z, w, segment_budget), bw_one_sided(r, w, z, segment_budget));
}

FlowMeasure::FlowMeasure(GibbsMeasure base, Roof roof)
    : base_(std::move(base)), roof_(std::move(roof)) {
    normalizer_ = base_.integral(roof_.potential());
}

Rational FlowMeasure::roof_inf(const Word& cyl) const {
    require(cyl.admissible(base_.graph()), Err::Inadmissible, "empty cylinder");
    const Graph& g = base_.graph();
    const Potential& rp = roof_.potential();
    // extend the word to cover the roof window [lo, hi] around coordinate 0
    const long lo = std::min<long>(rp.lo(), cyl.lo());
    const long hi = std::max<long>(rp.hi() + 1, cyl.hi());
    Rational best;
    bool first = true;
    std::vector<Vertex> w(static_cast<std::size_t>(hi - lo));
    auto rec = [&](auto&& self, long pos) -> void {
        if (pos == hi) {
            std::span<const Vertex> win(w.data() + (rp.lo() - lo),
                                        static_cast<std::size_t>(rp.window_len()));
            Rational v = rp.eval_window(win);
            if (first || v < best) {
                best = v;
                first = false;
            }
            return;
        }
        if (cyl.covers(pos)) {
            const Vertex v = cyl.at(pos);
            if (pos == lo || g.edge(w[static_cast<std::size_t>(pos - lo - 1)], v)) {
                w[static_cast<std::size_t>(pos - lo)] = v;
                self(self, pos + 1);
            }
            return;
        }
        for (Vertex v = 0; v < g.size(); ++v) {
            if (pos != lo && !g.edge(w[static_cast<std::size_t>(pos - lo - 1)], v)) continue;
            w[static_cast<std::size_t>(pos - lo)] = v;
            self(self, pos + 1);
        }
    };
    rec(rec, lo);
    require(!first, Err::Inadmissible, "cylinder has no admissible extension");
    return best;
}

double FlowMeasure::block_mass(const Word& cyl, const Rational& a, const Rational& b) const {
    require(a >= 0 && a <= b, Err::ValidationError, "bad interval");
    require(b <= roof_inf(cyl), Err::IntervalAboveRoof,
            "interval [" + rational_str(a) + "," + rational_str(b) + ") exceeds the roof");
    return base_.cylinder_mass(cyl) * to_double(b - a) / normalizer_;
}

double abramov_entropy(double base_entropy, const FlowMeasure& fm) {
    require(base_entropy >= 0, Err::ValidationError, "entropy must be nonnegative");
    return base_entropy / fm.normalizer();
}

ConstantRoofRecode constant_roof_recode(const Graph& g, int p, const Rational& c) {
    require(c > 0, Err::RoofNotPositive, "roof constant must be positive");
    auto [period, classes] = g.period_and_decomposition();
    require(period == p, Err::ValidationError,
            "declared period " + std::to_string(p) + " but graph has period " +
                std::to_string(period));
    if (p == 1) {
        std::vector<std::vector<Vertex>> self;
        for (Vertex v = 0; v < g.size(); ++v) self.push_back({v});
        return {g, Roof(Potential::constant(g, c)), std::move(self)};
    }
    // alphabet: length-p paths from the zeroth class (p+1 vertices), so
    // multiple paths between the same endpoints stay distinct
    std::vector<std::vector<Vertex>> paths;
    std::vector<Vertex> cur;
    auto rec = [&](auto&& self) -> void {
        if (static_cast<int>(cur.size()) == p + 1) {
            paths.push_back(cur);
            return;
        }
        for (Vertex w : g.out(cur.back())) {
            cur.push_back(w);
            self(self);
            cur.pop_back();
        }
    };
    for (Vertex v : classes[0]) {
        cur.assign(1, v);
        rec(rec);
    }
    std::vector<std::string> names;
    for (const auto& pa : paths) {
        std::string nm;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            if (i) nm += '.';
            nm += g.name(pa[i]);
        }
        names.push_back(nm);
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (std::size_t i = 0; i < paths.size(); ++i)
        for (std::size_t j = 0; j < paths.size(); ++j)
            if (paths[i].back() == paths[j].front()) edges.emplace_back(names[i], names[j]);
    Graph ng = Graph::validate(names, edges);
    return {ng, Roof(Potential::constant(ng, Rational(p) * c)), std::move(paths)};
}

ConstantRoofRecode constant_roof_recode(const Graph& g, int p, const Roof& r) {
    auto cv = r.constant_value();
    require(cv.has_value(), Err::RoofNotConstant, "roof is not constant");
    return constant_roof_recode(g, p, *cv);
}

Potential recode_potential(const ConstantRoofRecode& rec, const Potential& phi) {
    require(phi.one_sided() && phi.hi() <= 1, Err::ValidationError,
            "recode supports potentials with memory window within [0,1]");
    const long p = static_cast<long>(rec.path_of.front().size()) - 1;
    std::map<std::vector<Vertex>, Rational> t;
    for (Vertex b = 0; b < rec.graph.size(); ++b) {
        const auto& path = rec.path_of[static_cast<std::size_t>(b)];
        Rational s(0);
        for (long j = 0; j < std::max(p, 1L); ++j) {
            std::vector<Vertex> win(path.begin() + j, path.begin() + j + phi.window_len());
            s += phi.eval_window(win);
        }
        t[{b}] = s;
    }
    return Potential(rec.graph, 0, 0, std::move(t), phi.envelope());
}

ProductCoords product_coordinates(const Roof& r, const FlowPoint& z, const Rational& t) {
    auto cv = r.constant_value();
    require(cv.has_value() && *cv == 1, Err::RoofNotOne, "product coordinates need roof == 1");
    const Rational s = z.height + t;
    const long n = rat_floor_long(s);
    return {s, rat_mod1(s), z.base.shifted(n)};
}

} // namespace mflow
