#pragma once

#include "mflow/dbar.hpp"

namespace mflow {

// Symbol-window x height-slab atoms: cubes (word of length 2n+1, [tau,
// tau+delta)) tiling each cylinder column up to rho(word) = inf of the roof
// over the cylinder, plus the roof-top remainder atom.
struct CubePartition {
    int n = 0;
    Rational delta;
    std::vector<std::pair<Word, Rational>> cubes; // (word anchored at -n, tau)
    BlockSet remainder;
    double remainder_mass = 0.0;

    OrderedPartition as_partition() const; // cubes in order, remainder last
};

CubePartition build_cube_partition(const FlowMeasure& fm, int n, const Rational& delta);

// Pseudo-canonical coarsening: group cubes by (middle symbol, height band)
// into at most `bands` height bands per symbol; refinable back to the
// canonical partition by construction.
OrderedPartition group_cubes(const CubePartition& cp, int bands);

// |mu(B|A) - mu(B)| < delta over the atoms A of the join
// v_{k=N}^{N'} sigma_r^{t0 k} beta.
struct KMixReport {
    double mu_B = 0.0;
    double fraction_good = 0.0;  // mass fraction of atoms passing the bound
    double worst_deviation = 0.0;
    std::string worst_atom;     // label sequence of the worst atom
    long atoms = 0;
    std::vector<std::pair<double, double>> atom_devs; // (atom mass, deviation)
};
KMixReport k_mixing_report(const FlowMeasure& fm, const BlockSet& B, const OrderedPartition& beta,
                           const Rational& t0, int N, int Nprime, double delta,
                           std::size_t cell_cap = 200000);

// Per-atom d-bar between the unconditioned process {sigma_r^{-i t0} gamma}
// and the same process conditioned on far-past atoms of
// v_{k=N}^{N'} sigma_r^{t0 k} gamma.
struct VwbReport {
    std::vector<std::pair<double, double>> atom_dbars; // (atom mass, dbar)
    double epsilon_achieved = 1.0; // min eps: mass{dbar >= eps} <= eps
    int n = 0, N = 0, Nprime = 0;  // coverage actually computed
};
VwbReport vwb_report(const FlowMeasure& fm, const OrderedPartition& gamma, const Rational& t0,
                     int n, int N, int Nprime, std::size_t dbar_cap = 512,
                     std::size_t cell_cap = 200000);

} // namespace mflow
