#pragma once

#include <optional>
#include <vector>

#include "mflow/word.hpp"

namespace mflow {

// Bi-infinite admissible sequence, eventually periodic on both sides:
//
//   ... (past)^inf | core | (future)^inf ...
//
// The core occupies [lo, lo+|core|); the past cycle repeats to the left
// ending just before lo; the future cycle repeats from the core's end.
// Dense in the shift space, closed under shift and Smale bracket, and with
// decidable equality, which is all the cocycle machinery needs.
class Point {
public:
    Point(const Graph& g, std::vector<Vertex> past_cycle, Word core,
          std::vector<Vertex> future_cycle);

    // point through a word, completed canonically on both sides
    static Point through(const Graph& g, const Word& w);
    // purely periodic point (cycle)^inf with cycle starting at coordinate 0
    static Point periodic(const Graph& g, std::vector<Vertex> cycle);

    const Graph& graph() const { return g_; }
    Vertex at(long i) const;
    Vertex operator[](long i) const { return at(i); }

    Point shifted(long n) const; // sigma^n: (sigma^n x)_i = x_{i+n}

    const std::vector<Vertex>& past_cycle() const { return past_; }
    const std::vector<Vertex>& future_cycle() const { return future_; }
    const Word& core() const { return core_; }
    long core_lo() const { return core_.lo(); }
    long core_hi() const { return core_.hi(); }

    // equivalent point whose core covers [lo, hi)
    Point materialized(long lo, long hi) const;
    Word window(long lo, long hi) const; // symbols on [lo, hi)

    bool same_point(const Point& other) const;
    // scan radius beyond which two points that still agree must be equal
    long comparison_radius(const Point& other) const;

private:
    Graph g_;
    std::vector<Vertex> past_, future_;
    Word core_;
};

// d(x,y) = exp(-min{|n| : x_n != y_n}); 0 iff equal.
double metric_d(const Point& x, const Point& y);
// first disagreement by |n| (ties: nonnegative first); nullopt if equal
std::optional<long> first_disagreement(const Point& x, const Point& y);

// z_i = x_i for i <= 0, z_i = y_i for i >= 0; requires x_0 = y_0.
Point smale_bracket(const Point& x, const Point& y);

} // namespace mflow
