#include "mflow/cubes.hpp"

#include <algorithm>
#include <map>

namespace mflow {

OrderedPartition CubePartition::as_partition() const {
    OrderedPartition p;
    for (const auto& [w, tau] : cubes) p.atoms.push_back({Block{w, tau, tau + delta}});
    p.atoms.push_back(remainder);
    return p;
}

CubePartition build_cube_partition(const FlowMeasure& fm, int n, const Rational& delta) {
    require(n >= 0, Err::ValidationError, "n must be >= 0");
    require(delta > 0, Err::ValidationError, "delta must be positive");
    require(delta < fm.roof().inf(), Err::DeltaTooLarge, "delta must be below inf of the roof");
    const Graph& g = fm.base().graph();
    const Potential& roof = fm.roof().potential();

    CubePartition cp;
    cp.n = n;
    cp.delta = delta;
    for (const auto& w : admissible_windows(g, 2 * n + 1)) {
        Word word(w, -n);
        const Rational rho = fm.roof_inf(word);
        const long slabs = rat_floor_long(rho / delta);
        for (long i = 0; i < slabs; ++i)
            cp.cubes.emplace_back(word, Rational(i) * delta);
        // roof-top gap {slabs delta <= t < r(x)}, refined so the roof is
        // constant on each remainder block
        const Rational gap_lo = Rational(slabs) * delta;
        const long wlo = std::min<long>(-n, roof.lo());
        const long whi = std::max<long>(n + 1, roof.hi() + 1);
        for_each_extension(g, word, wlo, whi, [&](const std::vector<Vertex>& ext) {
            std::span<const Vertex> win(ext.data() + (roof.lo() - wlo),
                                        static_cast<std::size_t>(roof.window_len()));
            const Rational rv = roof.eval_window(win);
            if (gap_lo < rv) {
                cp.remainder.push_back({Word(ext, wlo), gap_lo, rv});
                cp.remainder_mass +=
                    fm.base().cylinder_mass(Word(ext, wlo)) * to_double(rv - gap_lo) /
                    fm.normalizer();
            }
        });
    }
    require(cp.remainder_mass <= to_double(delta) + 1e-12, Err::DeltaTooLarge,
            "remainder mass " + std::to_string(cp.remainder_mass) + " exceeds delta");
    return cp;
}

OrderedPartition group_cubes(const CubePartition& cp, int bands) {
    require(bands >= 1, Err::ValidationError, "bands must be >= 1");
    // key: (middle symbol, height band relative to the word's column)
    std::map<std::pair<Vertex, long>, BlockSet> groups;
    for (const auto& [w, tau] : cp.cubes) {
        const Vertex mid = w.at(0);
        // band from the slab index, folded into [0, bands)
        const long idx = rat_floor_long(tau / cp.delta);
        const long band = idx % bands;
        groups[{mid, band}].push_back({w, tau, tau + cp.delta});
    }
    OrderedPartition p;
    for (auto& [k, bs] : groups) p.atoms.push_back(std::move(bs));
    p.atoms.push_back(cp.remainder);
    return p;
}

namespace {

struct JoinAtom {
    std::vector<int> labels;
    CellSet cells;
};

// atoms of v_{k=N}^{N'} sigma_r^{t0 k} beta as cell sets, plus the refiner
struct Join {
    std::vector<JoinAtom> atoms;
    std::vector<BlockSet> flowed_storage; // keeps blocks alive for the refiner
    std::unique_ptr<Refiner> ref;
};

Join build_join(const FlowMeasure& fm, const OrderedPartition& beta, const Rational& t0, int N,
                int Nprime, const BlockSet* extra, std::size_t cell_cap) {
    require(Nprime >= N, Err::ValidationError, "N' must be >= N");
    Join out;
    std::vector<std::vector<std::size_t>> flowed_index; // per k, atom -> storage slot
    for (int k = N; k <= Nprime; ++k) {
        OrderedPartition fp = flow_partition(fm, beta, t0 * k);
        flowed_index.emplace_back();
        for (auto& atom : fp.atoms) {
            flowed_index.back().push_back(out.flowed_storage.size());
            out.flowed_storage.push_back(std::move(atom));
        }
    }
    std::vector<const BlockSet*> sets;
    for (const auto& bs : out.flowed_storage) sets.push_back(&bs);
    if (extra) sets.push_back(extra);
    out.ref = std::make_unique<Refiner>(fm, sets);

    std::vector<std::vector<CellSet>> cells(flowed_index.size());
    std::size_t cell_count = 0;
    for (std::size_t k = 0; k < flowed_index.size(); ++k)
        for (std::size_t slot : flowed_index[k]) {
            cells[k].push_back(out.ref->decompose(out.flowed_storage[slot]));
            cell_count += cells[k].back().size();
            require(cell_count <= cell_cap, Err::ResolutionExceeded,
                    "join exceeded the cell cap");
        }

    // seed with the level-N atoms, then intersect level by level
    std::vector<JoinAtom> cur;
    for (std::size_t l = 0; l < cells[0].size(); ++l)
        if (!cells[0][l].empty()) cur.push_back({{static_cast<int>(l)}, cells[0][l]});
    for (std::size_t k = 1; k < cells.size(); ++k) {
        std::vector<JoinAtom> next;
        for (const auto& atom : cur)
            for (std::size_t l = 0; l < cells[k].size(); ++l) {
                CellSet inter = cell_intersection(atom.cells, cells[k][l]);
                if (inter.empty()) continue;
                JoinAtom ja{atom.labels, std::move(inter)};
                ja.labels.push_back(static_cast<int>(l));
                next.push_back(std::move(ja));
                cell_count += next.back().cells.size();
                require(cell_count <= cell_cap, Err::ResolutionExceeded,
                        "join exceeded the cell cap");
            }
        cur = std::move(next);
    }
    out.atoms = std::move(cur);
    return out;
}

std::string label_string(const std::vector<int>& labels) {
    std::string s;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(labels[i]);
    }
    return s;
}

} // namespace

KMixReport k_mixing_report(const FlowMeasure& fm, const BlockSet& B, const OrderedPartition& beta,
                           const Rational& t0, int N, int Nprime, double delta,
                           std::size_t cell_cap) {
    require(t0 > 0, Err::ValidationError, "t0 must be positive");
    Join join = build_join(fm, beta, t0, N, Nprime, &B, cell_cap);
    const CellSet bcells = join.ref->decompose(B);
    KMixReport rep;
    rep.mu_B = join.ref->mass(bcells);
    double total = 0, good = 0;
    for (const auto& atom : join.atoms) {
        const double ma = join.ref->mass(atom.cells);
        if (ma <= 0) continue;
        const double mab = join.ref->mass(cell_intersection(atom.cells, bcells));
        const double dev = std::abs(mab / ma - rep.mu_B);
        total += ma;
        if (dev < delta) good += ma;
        if (dev > rep.worst_deviation) {
            rep.worst_deviation = dev;
            rep.worst_atom = label_string(atom.labels);
        }
        rep.atom_devs.emplace_back(ma, dev);
        ++rep.atoms;
    }
    require(total > 0, Err::ValidationError, "join has no mass");
    rep.fraction_good = good / total;
    return rep;
}

VwbReport vwb_report(const FlowMeasure& fm, const OrderedPartition& gamma, const Rational& t0,
                     int n, int N, int Nprime, std::size_t dbar_cap, std::size_t cell_cap) {
    require(t0 > 0, Err::ValidationError, "t0 must be positive");
    require(n >= 1, Err::ValidationError, "n must be >= 1");

    std::vector<OrderedPartition> forward;
    for (int i = 1; i <= n; ++i) forward.push_back(flow_partition(fm, gamma, -t0 * i));
    const JointDist p = joint_distribution(forward, fm);

    Join join = build_join(fm, gamma, t0, N, Nprime, nullptr, cell_cap);
    VwbReport rep;
    rep.n = n;
    rep.N = N;
    rep.Nprime = Nprime;
    for (const auto& atom : join.atoms) {
        const double ma = join.ref->mass(atom.cells);
        if (ma <= 0) continue;
        BlockSet cond;
        for (const Cell& c : atom.cells) cond.push_back({Word(c.word, c.anchor), c.a, c.b});
        const JointDist q = joint_distribution_conditioned(forward, fm, cond);
        const DbarResult d = dbar_exact_small(p, q, n, dbar_cap);
        rep.atom_dbars.emplace_back(ma, d.value);
    }
    // smallest eps with mass{dbar >= eps} <= eps, up to atom boundaries
    std::vector<std::pair<double, double>> sorted = rep.atom_dbars; // (mass, dbar)
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    double eps = 1.0, prefix = 0;
    for (std::size_t k = 0; k <= sorted.size(); ++k) {
        const double next_dbar = k < sorted.size() ? sorted[k].second : 0.0;
        eps = std::min(eps, std::max(prefix, next_dbar));
        if (k < sorted.size()) prefix += sorted[k].first;
    }
    rep.epsilon_achieved = eps;
    return rep;
}

} // namespace mflow
