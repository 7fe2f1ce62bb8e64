#include "mflow/partition.hpp"

#include <algorithm>
#include <functional>

namespace mflow {

// admissible completions of the block word to the window [wlo, whi)
void for_each_extension(const Graph& g, const Word& w, long wlo, long whi,
                        const std::function<void(const std::vector<Vertex>&)>& emit) {
    std::vector<Vertex> cur(static_cast<std::size_t>(whi - wlo));
    auto rec = [&](auto&& self, long pos) -> void {
        if (pos == whi) {
            emit(cur);
            return;
        }
        auto place = [&](Vertex v) {
            if (pos != wlo && !g.edge(cur[static_cast<std::size_t>(pos - wlo - 1)], v)) return;
            cur[static_cast<std::size_t>(pos - wlo)] = v;
            self(self, pos + 1);
        };
        if (w.covers(pos)) place(w.at(pos));
        else
            for (Vertex v = 0; v < g.size(); ++v) place(v);
    };
    rec(rec, wlo);
}

namespace {

Rational roof_value_on(const Potential& roof, std::span<const Vertex> word, long anchor) {
    // word window must cover [roof.lo, roof.hi]
    const long off = roof.lo() - anchor;
    return roof.eval_window(word.subspan(static_cast<std::size_t>(off),
                                         static_cast<std::size_t>(roof.window_len())));
}

} // namespace

Refiner::Refiner(const FlowMeasure& fm, const std::vector<const BlockSet*>& sets) : fm_(&fm) {
    const Potential& roof = fm.roof().potential();
    wlo_ = roof.lo();
    whi_ = roof.hi() + 1;
    std::vector<Rational> bps;
    for (const BlockSet* bs : sets)
        for (const Block& b : *bs) {
            wlo_ = std::min(wlo_, b.word.lo());
            whi_ = std::max(whi_, b.word.hi());
            bps.push_back(b.a);
            bps.push_back(b.b);
        }
    bps.push_back(Rational(0));
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    breaks_ = std::move(bps);
}

CellSet Refiner::decompose(const BlockSet& bs) const {
    const Graph& g = fm_->base().graph();
    const Potential& roof = fm_->roof().potential();
    CellSet cells;
    for (const Block& blk : bs) {
        require(blk.a >= 0 && blk.a <= blk.b, Err::ValidationError, "bad block interval");
        if (blk.a == blk.b) continue;
        for_each_extension(g, blk.word, wlo_, whi_, [&](const std::vector<Vertex>& w) {
            const Rational rv = roof_value_on(roof, w, wlo_);
            require(blk.b <= rv, Err::IntervalAboveRoof,
                    "block interval ends above the roof on an extension");
            // grid points inside [a, b)
            Rational lo = blk.a;
            for (const Rational& bp : breaks_) {
                if (bp <= lo) continue;
                if (bp >= blk.b) break;
                cells.push_back({wlo_, w, lo, bp});
                lo = bp;
            }
            if (lo < blk.b) cells.push_back({wlo_, w, lo, blk.b});
        });
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

double Refiner::cell_mass(const Cell& c) const {
    return fm_->base().cylinder_mass(Word(c.word, c.anchor)) * to_double(c.b - c.a) /
           fm_->normalizer();
}

double Refiner::mass(const CellSet& cells) const {
    double s = 0;
    for (const Cell& c : cells) s += cell_mass(c);
    return s;
}

CellSet cell_union(const CellSet& a, const CellSet& b) {
    CellSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}
CellSet cell_intersection(const CellSet& a, const CellSet& b) {
    CellSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}
CellSet cell_difference(const CellSet& a, const CellSet& b) {
    CellSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}
CellSet cell_symmetric_difference(const CellSet& a, const CellSet& b) {
    CellSet out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

void validate_partition(const FlowMeasure& fm, const OrderedPartition& p, double tol) {
    std::vector<const BlockSet*> sets;
    for (const auto& a : p.atoms) sets.push_back(&a);
    Refiner ref(fm, sets);
    std::vector<CellSet> decomposed;
    double total = 0;
    for (const auto& a : p.atoms) {
        decomposed.push_back(ref.decompose(a));
        total += ref.mass(decomposed.back());
    }
    for (std::size_t i = 0; i < decomposed.size(); ++i)
        for (std::size_t j = i + 1; j < decomposed.size(); ++j)
            require(cell_intersection(decomposed[i], decomposed[j]).empty(), Err::ValidationError,
                    "atoms " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    require(std::abs(total - 1.0) <= tol, Err::ValidationError,
            "partition mass defect " + std::to_string(std::abs(total - 1.0)));
}

double partition_distance(const OrderedPartition& alpha, const OrderedPartition& beta,
                          const FlowMeasure& fm) {
    require(alpha.atoms.size() == beta.atoms.size(), Err::AtomCountMismatch,
            "partitions have different atom counts");
    std::vector<const BlockSet*> sets;
    for (const auto& a : alpha.atoms) sets.push_back(&a);
    for (const auto& b : beta.atoms) sets.push_back(&b);
    Refiner ref(fm, sets);
    double d = 0;
    for (std::size_t i = 0; i < alpha.atoms.size(); ++i)
        d += ref.mass(cell_symmetric_difference(ref.decompose(alpha.atoms[i]),
                                                ref.decompose(beta.atoms[i])));
    return d;
}

bool same_distribution(const std::vector<OrderedPartition>& alphas,
                       const std::vector<OrderedPartition>& betas, const FlowMeasure& mu,
                       const FlowMeasure& nu, double tol) {
    require(alphas.size() == betas.size(), Err::ShapeMismatch, "sequence lengths differ");
    for (std::size_t i = 0; i < alphas.size(); ++i)
        require(alphas[i].atoms.size() == betas[i].atoms.size(), Err::ShapeMismatch,
                "atom counts differ at index " + std::to_string(i));
    if (alphas.empty()) return true;

    std::vector<const BlockSet*> asets, bsets;
    for (const auto& p : alphas)
        for (const auto& a : p.atoms) asets.push_back(&a);
    for (const auto& p : betas)
        for (const auto& b : p.atoms) bsets.push_back(&b);
    Refiner aref(mu, asets), bref(nu, bsets);

    std::vector<std::vector<CellSet>> acells(alphas.size()), bcells(betas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        for (const auto& a : alphas[i].atoms) acells[i].push_back(aref.decompose(a));
        for (const auto& b : betas[i].atoms) bcells[i].push_back(bref.decompose(b));
    }

    bool equal = true;
    auto rec = [&](auto&& self, std::size_t depth, const CellSet& ai, const CellSet& bi) -> void {
        if (!equal) return;
        if (depth == alphas.size()) {
            if (std::abs(aref.mass(ai) - bref.mass(bi)) > tol) equal = false;
            return;
        }
        for (std::size_t l = 0; l < acells[depth].size(); ++l) {
            CellSet na = cell_intersection(ai, acells[depth][l]);
            CellSet nb = cell_intersection(bi, bcells[depth][l]);
            if (na.empty() && nb.empty()) continue;
            self(self, depth + 1, na, nb);
        }
    };
    CellSet whole_a, whole_b;
    {
        // whole-space cell sets: decompose the trivial one-block covers
        BlockSet all_a, all_b;
        for (const auto& p : alphas)
            for (const auto& a : p.atoms) all_a.insert(all_a.end(), a.begin(), a.end());
        for (const auto& p : betas)
            for (const auto& b : p.atoms) all_b.insert(all_b.end(), b.begin(), b.end());
        whole_a = aref.decompose(all_a);
        whole_b = bref.decompose(all_b);
    }
    rec(rec, 0, whole_a, whole_b);
    return equal;
}

BlockSet flow_block(const FlowMeasure& fm, const Block& blk, const Rational& t) {
    if (blk.a == blk.b) return {};
    const Graph& g = fm.base().graph();
    const Potential& roof = fm.roof().potential();
    const double inf_r = to_double(fm.roof().inf());
    // range of crossing counts n with r_n - t intersecting [a, b)
    const double span = to_double(blk.b) + std::abs(to_double(t));
    const long n_hi = t >= 0 ? static_cast<long>(std::ceil(span / inf_r)) + 1 : 0;
    const long n_lo = t <= 0 ? -static_cast<long>(std::ceil(span / inf_r)) - 1 : 0;
    // word window wide enough to determine r_n for n in [n_lo, n_hi]
    const long wlo = std::min(blk.word.lo(), n_lo + roof.lo());
    const long whi = std::max(blk.word.hi(), n_hi + roof.hi() + 1);

    BlockSet out;
    for_each_extension(g, blk.word, wlo, whi, [&](const std::vector<Vertex>& w) {
        // Birkhoff sums r_n on this refined word, n in [n_lo, n_hi]
        auto r_at = [&](long j) { // r(sigma^j x)
            return roof_value_on(roof, w, wlo - j);
        };
        auto r_n = [&](long n) {
            Rational s(0);
            if (n > 0)
                for (long j = 0; j < n; ++j) s += r_at(j);
            else
                for (long j = n; j < 0; ++j) s -= r_at(j);
            return s;
        };
        require(blk.b <= r_at(0), Err::IntervalAboveRoof,
                "block interval ends above the roof");
        for (long n = n_lo; n <= n_hi; ++n) {
            // pieces with s + t in [r_n, r_{n+1})
            Rational lo = std::max(blk.a, r_n(n) - t);
            Rational hi = std::min(blk.b, r_n(n + 1) - t);
            if (lo >= hi) continue;
            out.push_back({Word(w, wlo - n), lo + t - r_n(n), hi + t - r_n(n)});
        }
    });
    return out;
}

BlockSet flow_block_set(const FlowMeasure& fm, const BlockSet& bs, const Rational& t) {
    BlockSet out;
    for (const Block& b : bs) {
        BlockSet fb = flow_block(fm, b, t);
        out.insert(out.end(), fb.begin(), fb.end());
    }
    return out;
}

OrderedPartition flow_partition(const FlowMeasure& fm, const OrderedPartition& p,
                                const Rational& t) {
    OrderedPartition out;
    for (const auto& atom : p.atoms) out.atoms.push_back(flow_block_set(fm, atom, t));
    return out;
}

FlowMeasure unit_suspension(const GibbsMeasure& base) {
    return FlowMeasure(base, Roof(Potential::constant(base.graph(), Rational(1))));
}

Block base_block(const Word& w) { return {w, Rational(0), Rational(1)}; }

} // namespace mflow
