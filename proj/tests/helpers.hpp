#pragma once

#include <random>

#include "mflow/cocycle.hpp"
#include "mflow/onesided.hpp"

namespace th {

using namespace mflow;

inline Graph full_2_shift() {
    return Graph::validate({"a", "b"}, {{"a", "a"}, {"a", "b"}, {"b", "a"}, {"b", "b"}});
}

inline Graph golden_mean() {
    return Graph::validate({"a", "b"}, {{"a", "a"}, {"a", "b"}, {"b", "a"}});
}

inline Graph full_shift(int n) {
    std::vector<std::string> vs;
    for (int i = 0; i < n; ++i) vs.push_back(std::string(1, static_cast<char>('a' + i)));
    std::vector<std::pair<std::string, std::string>> es;
    for (const auto& u : vs)
        for (const auto& v : vs) es.emplace_back(u, v);
    return Graph::validate(vs, es);
}

// period-2 graph: 4-cycle plus a chord creating a 2-cycle
inline Graph period_two() {
    return Graph::validate({"a", "b", "c", "d"},
                           {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}, {"c", "b"}});
}

// period-p ladder: p classes, two parallel vertices in class 0
inline Graph period_p_graph(int p) {
    std::vector<std::string> vs = {"s", "t"};
    for (int i = 1; i < p; ++i) vs.push_back("m" + std::to_string(i));
    std::vector<std::pair<std::string, std::string>> es;
    if (p == 1) return full_2_shift();
    // s,t -> m1 -> m2 -> ... -> m_{p-1} -> s,t
    es.emplace_back("s", "m1");
    es.emplace_back("t", "m1");
    for (int i = 1; i + 1 < p; ++i)
        es.emplace_back("m" + std::to_string(i), "m" + std::to_string(i + 1));
    es.emplace_back("m" + std::to_string(p - 1), "s");
    es.emplace_back("m" + std::to_string(p - 1), "t");
    return Graph::validate(vs, es);
}

inline Potential memory0(const Graph& g, std::vector<std::pair<std::string, Rational>> vals,
                         HolderEnvelope env = {}) {
    std::map<std::vector<Vertex>, Rational> t;
    for (const auto& [name, v] : vals) t[{g.id(name)}] = v;
    return Potential(g, 0, 0, std::move(t), env);
}

inline Roof roof0(const Graph& g, std::vector<std::pair<std::string, Rational>> vals,
                  HolderEnvelope env = {}) {
    return Roof(memory0(g, std::move(vals), env));
}

inline Point point_of(const Graph& g, const std::string& word, long anchor = 0) {
    return Point::through(g, parse_word(g, word, anchor));
}

// random transitive graph on <= max_vertices vertices
inline Graph random_transitive_graph(std::mt19937_64& rng, int max_vertices) {
    std::uniform_int_distribution<int> nv(2, max_vertices);
    for (;;) {
        const int n = nv(rng);
        std::vector<std::string> vs;
        for (int i = 0; i < n; ++i) vs.push_back(std::string(1, static_cast<char>('a' + i)));
        std::vector<std::pair<std::string, std::string>> es;
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (coin(rng) < 0.45) es.emplace_back(vs[i], vs[j]);
        try {
            Graph g = Graph::validate(vs, es);
            if (g.is_transitive()) return g;
        } catch (const Error&) {
            continue;
        }
    }
}

inline Point random_point(const Graph& g, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> vd(0, g.size() - 1);
    return random_point_through(g, vd(rng), rng);
}

// random memory-(lo,hi) potential with small rational values
inline Potential random_potential(const Graph& g, int lo, int hi, std::mt19937_64& rng,
                                  bool positive = false) {
    std::uniform_int_distribution<int> num(positive ? 1 : -4, 4);
    std::uniform_int_distribution<int> den(1, 4);
    std::map<std::vector<Vertex>, Rational> t;
    for (const auto& w : admissible_windows(g, hi - lo + 1))
        t[w] = Rational(num(rng), den(rng));
    return Potential(g, lo, hi, std::move(t));
}

} // namespace th
