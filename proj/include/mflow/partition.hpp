#pragma once

#include <functional>

#include "mflow/suspension.hpp"

namespace mflow {

// Measurable set piece: cylinder x height interval [a,b). Base-space sets
// are the roof == 1 special case with intervals in [0,1).
struct Block {
    Word word;
    Rational a, b;
};
using BlockSet = std::vector<Block>; // finite union

// Refined elementary piece: word on a fixed window, interval from a common
// breakpoint grid. Cells of one Refiner are pairwise equal or disjoint.
struct Cell {
    long anchor;
    std::vector<Vertex> word;
    Rational a, b;

    friend bool operator==(const Cell& x, const Cell& y) {
        return x.anchor == y.anchor && x.word == y.word && x.a == y.a && x.b == y.b;
    }
    friend bool operator<(const Cell& x, const Cell& y) {
        if (x.anchor != y.anchor) return x.anchor < y.anchor;
        if (x.word != y.word) return x.word < y.word;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    }
};
using CellSet = std::vector<Cell>; // sorted, unique

// Common refinement context for a family of block sets over one flow
// measure: a shared word window covering every block and the roof memory,
// and a shared interval breakpoint grid.
class Refiner {
public:
    Refiner(const FlowMeasure& fm, const std::vector<const BlockSet*>& sets);

    CellSet decompose(const BlockSet& bs) const;
    double mass(const CellSet& cells) const;
    double cell_mass(const Cell& c) const;

    long window_lo() const { return wlo_; }
    long window_hi() const { return whi_; }

private:
    const FlowMeasure* fm_;
    long wlo_, whi_;
    std::vector<Rational> breaks_;
};

CellSet cell_union(const CellSet& a, const CellSet& b);
CellSet cell_intersection(const CellSet& a, const CellSet& b);
CellSet cell_difference(const CellSet& a, const CellSet& b);
CellSet cell_symmetric_difference(const CellSet& a, const CellSet& b);

// alpha = <A_1, ..., A_N>, ordered
struct OrderedPartition {
    std::vector<BlockSet> atoms;
};

// checks disjointness and that the total mass defect is <= tol
void validate_partition(const FlowMeasure& fm, const OrderedPartition& p, double tol = 1e-12);

// d(alpha, beta) = sum_i mu(A_i symdiff B_i)
double partition_distance(const OrderedPartition& alpha, const OrderedPartition& beta,
                          const FlowMeasure& fm);

// equality of all n-fold intersection masses within tol
bool same_distribution(const std::vector<OrderedPartition>& alphas,
                       const std::vector<OrderedPartition>& betas, const FlowMeasure& mu,
                       const FlowMeasure& nu, double tol = 1e-12);

// image sigma_r^t(block) as a finite block union, exact for locally
// constant roofs (crossings happen at word-determined heights)
BlockSet flow_block(const FlowMeasure& fm, const Block& b, const Rational& t);
BlockSet flow_block_set(const FlowMeasure& fm, const BlockSet& bs, const Rational& t);

// partition whose atoms are the flowed atoms of p
OrderedPartition flow_partition(const FlowMeasure& fm, const OrderedPartition& p,
                                const Rational& t);

// wrap a Gibbs base measure as the unit-roof flow (cylinder partitions of
// the base become cylinder x [0,1) partitions)
FlowMeasure unit_suspension(const GibbsMeasure& base);
Block base_block(const Word& w); // w x [0,1)

// admissible completions of a word to the window [wlo, whi)
void for_each_extension(const Graph& g, const Word& w, long wlo, long whi,
                        const std::function<void(const std::vector<Vertex>&)>& emit);

} // namespace mflow
