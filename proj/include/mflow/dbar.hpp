#pragma once

#include "mflow/partition.hpp"

namespace mflow {

// Joint distribution of a finite sequence of ordered partitions: one atom
// per label sequence with positive mass. Masses are exact rationals so the
// transport optimum is exact for rational inputs.
struct JointAtom {
    std::vector<int> labels;
    Rational mass;
};
using JointDist = std::vector<JointAtom>;

JointDist joint_distribution(const std::vector<OrderedPartition>& ps, const FlowMeasure& fm);
// conditioned on a set A (cells within a refinement of fm)
JointDist joint_distribution_conditioned(const std::vector<OrderedPartition>& ps,
                                         const FlowMeasure& fm, const BlockSet& cond);

struct DbarResult {
    double value = 0.0;          // in [0, 2]
    Rational exact;              // exact optimum when mode == Exact
    enum class Mode { Exact, UpperBound } mode = Mode::Exact;
    std::string witness;
};

// Exact d-bar between two label processes: minimum-cost transport between
// the joint distributions with cost (2/n) x Hamming mismatch of the label
// sequences (the finite reduction of the infimum over same-distribution
// copies). Solved by successive shortest paths in exact arithmetic.
DbarResult dbar_exact_small(const JointDist& p, const JointDist& q, int n, std::size_t cap);
DbarResult dbar_exact_small(const std::vector<OrderedPartition>& alphas,
                            const std::vector<OrderedPartition>& betas, const FlowMeasure& mu,
                            const FlowMeasure& nu, std::size_t cap);

// Explicit point map for the Ornstein-Weiss bound: finitely many pieces,
// each mapped as a block (mass scales uniformly within a piece).
struct PointMap {
    std::vector<std::pair<BlockSet, BlockSet>> pieces; // (from on mu, to on nu)
};

// Verifies that theta is epsilon-measure-preserving on the supplied block
// algebra and that labels mismatch with frequency <= epsilon off a set of
// mass epsilon; returns the 16 epsilon upper bound.
DbarResult dbar_upper_matching(const std::vector<OrderedPartition>& alphas,
                               const std::vector<OrderedPartition>& betas, const FlowMeasure& mu,
                               const FlowMeasure& nu, const PointMap& theta, double epsilon);

} // namespace mflow
