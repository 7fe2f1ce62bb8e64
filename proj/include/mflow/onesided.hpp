#pragma once

#include "mflow/potential.hpp"

namespace mflow {

// f^s = f - h + h o sigma depending only on coordinates >= 0, via the
// fixed-past construction h(x) = sum_{k>=0} [f(sigma^k x) - f(sigma^k x^)],
// where x^ replaces the past of x with the canonical past of x_0. The sum is
// finite for locally constant f. Birkhoff sums over periodic orbits are
// preserved exactly.
struct OneSidedReduction {
    Potential one_sided;
    Potential transfer; // the h above
};
OneSidedReduction reduce_to_one_sided(const Potential& f);

// Induced system over the first-return words of a base word: states are the
// return words w (w . base admissible, base occurring in w . base only at the
// ends), the induced graph is the full shift on them, and the induced roof is
// the Birkhoff sum of the original roof over the excursion.
struct ReturnWordSystem {
    Graph induced;
    Potential induced_roof;
    std::vector<std::vector<Vertex>> return_words; // base-graph symbols per state
    std::vector<long> return_times;
    bool truncated = false; // some excursions ran past the cap
};
ReturnWordSystem recode_return_words(const Graph& g, const Potential& roof, const Word& base_word,
                                     int cap);

// Roof-positivity pipeline: reduce; if the one-sided roof is not positive,
// recode by return words with min return time > n_0, n_0 the smallest
// integer with sup h < n_0 inf(r)/2, and reduce the induced roof.
struct PositiveReduction {
    Graph graph;    // original or induced
    Roof roof;      // one-sided, positive
    bool recoded = false;
    long n0 = 0;
};
PositiveReduction make_positive_one_sided(const Graph& g, const Potential& roof, int cap = 64);

} // namespace mflow
