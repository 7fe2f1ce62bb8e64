#pragma once

#include <string>
#include <vector>

#include "mflow/graph.hpp"

namespace mflow {

// Finite vertex sequence with an anchor: symbols occupy coordinates
// [anchor, anchor + size). Houses the cylinder _m[a_0,...,a_{n-1}].
struct Word {
    std::vector<Vertex> symbols;
    long anchor = 0;

    Word() = default;
    Word(std::vector<Vertex> syms, long a) : symbols(std::move(syms)), anchor(a) {}

    long size() const { return static_cast<long>(symbols.size()); }
    long lo() const { return anchor; }
    long hi() const { return anchor + size(); } // one past the last coordinate
    Vertex at(long i) const { return symbols[static_cast<std::size_t>(i - anchor)]; }
    bool covers(long i) const { return i >= lo() && i < hi(); }

    bool admissible(const Graph& g) const { return g.word_admissible(symbols); }

    std::string str(const Graph& g) const;

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;
};

// A cylinder is its defining word; nonempty iff the word is admissible.
using Cylinder = Word;

Word parse_word(const Graph& g, const std::string& text, long anchor);

} // namespace mflow
