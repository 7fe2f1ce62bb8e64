#include "mflow/dbar.hpp"

#include <algorithm>

namespace mflow {

namespace {

// normalize to total mass exactly 1 (measure queries return doubles whose
// sum carries rounding; the transport needs balanced marginals)
void normalize(JointDist& d) {
    Rational total(0);
    for (const auto& a : d) total += a.mass;
    require(total > 0, Err::ValidationError, "empty joint distribution");
    for (auto& a : d) a.mass /= total;
}

JointDist joint_impl(const std::vector<OrderedPartition>& ps, const FlowMeasure& fm,
                     const BlockSet* cond) {
    require(!ps.empty(), Err::ValidationError, "empty partition sequence");
    std::vector<const BlockSet*> sets;
    for (const auto& p : ps)
        for (const auto& a : p.atoms) sets.push_back(&a);
    if (cond) sets.push_back(cond);
    Refiner ref(fm, sets);

    std::vector<std::vector<CellSet>> cells(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (const auto& a : ps[i].atoms) cells[i].push_back(ref.decompose(a));

    CellSet start;
    if (cond) start = ref.decompose(*cond);
    else {
        BlockSet all;
        for (const auto& a : ps[0].atoms) all.insert(all.end(), a.begin(), a.end());
        start = ref.decompose(all);
    }

    JointDist out;
    std::vector<int> labels(ps.size());
    auto rec = [&](auto&& self, std::size_t depth, const CellSet& cur) -> void {
        if (cur.empty()) return;
        if (depth == ps.size()) {
            const double m = ref.mass(cur);
            if (m > 0) out.push_back({labels, rat_of(m)});
            return;
        }
        for (std::size_t l = 0; l < cells[depth].size(); ++l) {
            labels[depth] = static_cast<int>(l);
            self(self, depth + 1, cell_intersection(cur, cells[depth][l]));
        }
    };
    rec(rec, 0, start);
    normalize(out);
    return out;
}

} // namespace

JointDist joint_distribution(const std::vector<OrderedPartition>& ps, const FlowMeasure& fm) {
    return joint_impl(ps, fm, nullptr);
}

JointDist joint_distribution_conditioned(const std::vector<OrderedPartition>& ps,
                                         const FlowMeasure& fm, const BlockSet& cond) {
    return joint_impl(ps, fm, &cond);
}

namespace {

Rational hamming_cost(const std::vector<int>& u, const std::vector<int>& v, int n) {
    long mismatches = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] != v[i]) ++mismatches;
    return Rational(2 * mismatches, n);
}

// min-cost transport by successive shortest paths (Bellman-Ford on the
// residual network), exact rational arithmetic throughout
Rational transport_min_cost(const std::vector<Rational>& supply,
                            const std::vector<Rational>& demand,
                            const std::vector<std::vector<Rational>>& cost) {
    const std::size_t K = supply.size(), L = demand.size();
    std::vector<std::vector<Rational>> flow(K, std::vector<Rational>(L, Rational(0)));
    std::vector<Rational> rs = supply, rd = demand;

    const std::size_t V = K + L;
    const Rational INF(1000000000);
    long guard = static_cast<long>((K + L + 2) * (K * L + 1));
    for (;;) {
        bool any_supply = false;
        for (const auto& s : rs)
            if (s > 0) { any_supply = true; break; }
        if (!any_supply) break;
        require(guard-- > 0, Err::NoConvergence, "transport solver exceeded iteration guard");

        // Bellman-Ford from the set of rows with remaining supply
        std::vector<Rational> dist(V, INF);
        std::vector<int> pred(V, -1); // predecessor node
        for (std::size_t i = 0; i < K; ++i)
            if (rs[i] > 0) dist[i] = 0;
        for (std::size_t round = 0; round < V; ++round) {
            bool changed = false;
            for (std::size_t i = 0; i < K; ++i)
                for (std::size_t j = 0; j < L; ++j) {
                    // forward edge i -> K+j (unbounded capacity)
                    if (dist[i] < INF && dist[i] + cost[i][j] < dist[K + j]) {
                        dist[K + j] = dist[i] + cost[i][j];
                        pred[K + j] = static_cast<int>(i);
                        changed = true;
                    }
                    // reverse edge K+j -> i (capacity = flow[i][j])
                    if (flow[i][j] > 0 && dist[K + j] < INF &&
                        dist[K + j] - cost[i][j] < dist[i]) {
                        dist[i] = dist[K + j] - cost[i][j];
                        pred[i] = static_cast<int>(K + j);
                        changed = true;
                    }
                }
            if (!changed) break;
        }
        // cheapest reachable column with remaining demand
        int best = -1;
        for (std::size_t j = 0; j < L; ++j)
            if (rd[j] > 0 && dist[K + j] < INF &&
                (best < 0 || dist[K + j] < dist[K + static_cast<std::size_t>(best)]))
                best = static_cast<int>(j);
        require(best >= 0, Err::ValidationError, "transport marginals do not balance");

        // walk the path back to a supply row, collecting the bottleneck
        std::vector<std::pair<int, int>> path; // (row, col) edges, alternating direction
        Rational bottleneck = rd[static_cast<std::size_t>(best)];
        int node = static_cast<int>(K) + best;
        while (true) {
            int p = pred[static_cast<std::size_t>(node)];
            if (node >= static_cast<int>(K)) {
                // forward edge p -> node
                path.emplace_back(p, node - static_cast<int>(K));
                node = p;
                if (pred[static_cast<std::size_t>(node)] < 0) break;
            } else {
                // reverse edge p (= column) -> node (= row)
                int col = p - static_cast<int>(K);
                bottleneck = std::min(bottleneck, flow[static_cast<std::size_t>(node)]
                                                      [static_cast<std::size_t>(col)]);
                path.emplace_back(node, col);
                node = p;
            }
        }
        const std::size_t src = static_cast<std::size_t>(node);
        bottleneck = std::min(bottleneck, rs[src]);

        // apply: even-indexed edges from the walk are forward (add),
        // odd-indexed are reverse (subtract); the walk alternates
        bool forward = true;
        for (const auto& [i, j] : path) {
            if (forward) flow[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += bottleneck;
            else flow[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -= bottleneck;
            forward = !forward;
        }
        rs[src] -= bottleneck;
        rd[static_cast<std::size_t>(best)] -= bottleneck;
    }
    Rational total(0);
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < L; ++j) total += flow[i][j] * cost[i][j];
    return total;
}

} // namespace

DbarResult dbar_exact_small(const JointDist& p, const JointDist& q, int n, std::size_t cap) {
    require(n >= 1, Err::ValidationError, "n must be >= 1");
    require(p.size() + q.size() <= cap, Err::CapExceeded,
            "joint atom count " + std::to_string(p.size() + q.size()) + " exceeds cap " +
                std::to_string(cap));
    for (const auto& a : p)
        require(static_cast<int>(a.labels.size()) == n, Err::ShapeMismatch, "label length != n");
    for (const auto& b : q)
        require(static_cast<int>(b.labels.size()) == n, Err::ShapeMismatch, "label length != n");

    // normalize both marginals to total mass exactly 1
    Rational tp(0), tq(0);
    for (const auto& a : p) tp += a.mass;
    for (const auto& b : q) tq += b.mass;
    require(tp > 0 && tq > 0, Err::ValidationError, "empty distribution");
    std::vector<Rational> supply, demand;
    for (const auto& a : p) supply.push_back(a.mass / tp);
    for (const auto& b : q) demand.push_back(b.mass / tq);
    std::vector<std::vector<Rational>> cost(p.size(), std::vector<Rational>(q.size()));
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j)
            cost[i][j] = hamming_cost(p[i].labels, q[j].labels, n);

    DbarResult res;
    res.exact = transport_min_cost(supply, demand, cost);
    res.value = to_double(res.exact);
    res.mode = DbarResult::Mode::Exact;
    res.witness = "min-cost transport over " + std::to_string(p.size()) + "x" +
                  std::to_string(q.size()) + " joint atoms";
    return res;
}

DbarResult dbar_exact_small(const std::vector<OrderedPartition>& alphas,
                            const std::vector<OrderedPartition>& betas, const FlowMeasure& mu,
                            const FlowMeasure& nu, std::size_t cap) {
    require(alphas.size() == betas.size() && !alphas.empty(), Err::ShapeMismatch,
            "sequence lengths differ");
    JointDist p = joint_distribution(alphas, mu);
    JointDist q = joint_distribution(betas, nu);
    return dbar_exact_small(p, q, static_cast<int>(alphas.size()), cap);
}

DbarResult dbar_upper_matching(const std::vector<OrderedPartition>& alphas,
                               const std::vector<OrderedPartition>& betas, const FlowMeasure& mu,
                               const FlowMeasure& nu, const PointMap& theta, double epsilon) {
    require(alphas.size() == betas.size() && !alphas.empty(), Err::ShapeMismatch,
            "sequence lengths differ");
    require(epsilon >= 0, Err::ValidationError, "epsilon must be >= 0");
    const int n = static_cast<int>(alphas.size());

    std::vector<const BlockSet*> msets, nsets;
    for (const auto& p : alphas)
        for (const auto& a : p.atoms) msets.push_back(&a);
    for (const auto& [from, to] : theta.pieces) msets.push_back(&from);
    for (const auto& p : betas)
        for (const auto& b : p.atoms) nsets.push_back(&b);
    for (const auto& [from, to] : theta.pieces) nsets.push_back(&to);
    Refiner mref(mu, msets), nref(nu, nsets);

    // invertibility on the block algebra: disjoint domains, disjoint ranges
    std::vector<CellSet> froms, tos;
    for (const auto& [from, to] : theta.pieces) {
        froms.push_back(mref.decompose(from));
        tos.push_back(nref.decompose(to));
    }
    for (std::size_t i = 0; i < froms.size(); ++i)
        for (std::size_t j = i + 1; j < froms.size(); ++j) {
            require(cell_intersection(froms[i], froms[j]).empty(), Err::HypothesisFailed,
                    "theta domain pieces overlap");
            require(cell_intersection(tos[i], tos[j]).empty(), Err::HypothesisFailed,
                    "theta range pieces overlap");
        }

    // labels of a piece under each partition; fails if a piece straddles
    auto label_of = [](const Refiner& ref, const CellSet& piece,
                       const std::vector<CellSet>& atoms) -> int {
        for (std::size_t l = 0; l < atoms.size(); ++l) {
            CellSet inter = cell_intersection(piece, atoms[l]);
            if (inter.empty()) continue;
            require(inter.size() == piece.size(), Err::HypothesisFailed,
                    "map piece straddles partition atoms");
            (void)ref;
            return static_cast<int>(l);
        }
        fail(Err::HypothesisFailed, "map piece outside every atom");
    };

    std::vector<std::vector<CellSet>> acells(alphas.size()), bcells(betas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        for (const auto& a : alphas[i].atoms) acells[i].push_back(mref.decompose(a));
        for (const auto& b : betas[i].atoms) bcells[i].push_back(nref.decompose(b));
    }

    double good_mass = 0;
    for (std::size_t k = 0; k < theta.pieces.size(); ++k) {
        const double mfrom = mref.mass(froms[k]);
        const double mto = nref.mass(tos[k]);
        if (mfrom <= 0) continue;
        const bool ratio_ok = std::abs(mto / mfrom - 1.0) <= epsilon + 1e-15;
        long mismatches = 0;
        for (std::size_t i = 0; i < alphas.size(); ++i)
            if (label_of(mref, froms[k], acells[i]) != label_of(nref, tos[k], bcells[i]))
                ++mismatches;
        const bool rate_ok =
            static_cast<double>(mismatches) / n <= epsilon + 1e-15;
        if (ratio_ok && rate_ok) good_mass += mfrom;
    }
    require(good_mass >= 1.0 - epsilon - 1e-12, Err::HypothesisFailed,
            "bad-set mass " + std::to_string(1.0 - good_mass) + " exceeds epsilon");

    DbarResult res;
    res.value = 16.0 * epsilon;
    res.exact = rat_of(res.value);
    res.mode = DbarResult::Mode::UpperBound;
    res.witness = "Ornstein-Weiss bound 16 epsilon, epsilon = " + std::to_string(epsilon);
    return res;
}

} // namespace mflow
