#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mflow/error.hpp"

namespace mflow {

using Vertex = int;

// Finite directed graph defining the shift. Standing assumptions from
// validate(): every vertex has an in- and an out-edge and the graph is not a
// disjoint union of cycles (deterministic dynamics carry no branching).
// Immutable after construction; copies share the underlying data.
class Graph {
public:
    static Graph validate(const std::vector<std::string>& vertices,
                          const std::vector<std::pair<std::string, std::string>>& edges);

    int size() const { return static_cast<int>(d_->names.size()); }
    bool edge(Vertex u, Vertex v) const { return d_->adj[u][v]; }
    const std::vector<Vertex>& out(Vertex v) const { return d_->out[v]; }
    const std::vector<Vertex>& in(Vertex v) const { return d_->in[v]; }
    const std::string& name(Vertex v) const { return d_->names[v]; }
    Vertex id(const std::string& name) const;
    bool has_vertex(const std::string& name) const { return d_->ids.count(name) > 0; }
    bool same_graph(const Graph& other) const { return d_ == other.d_; }

    bool word_admissible(std::span<const Vertex> w) const;
    // admissible as a cycle: internal edges plus the wrap-around edge
    bool cycle_admissible(std::span<const Vertex> w) const;

    bool is_transitive() const;
    bool is_mixing() const;

    // Spectral decomposition of a transitive graph: the gcd p of cycle
    // lengths and the level classes Sigma_0..Sigma_{p-1}, with edges mapping
    // class i into class i+1 (mod p).
    std::pair<int, std::vector<std::vector<Vertex>>> period_and_decomposition() const;
    int period() const { return period_and_decomposition().first; }

    // All closed walks of length <= max_len, one representative per rotation
    // class, as vertex sequences (w_0..w_{n-1}) with w_{n-1} -> w_0 an edge.
    std::vector<std::vector<Vertex>> closed_walks(int max_len) const;

    // Deterministic completions used to extend words to bi-infinite points.
    // canonical_cycle: the self-loop at the smallest looped vertex, else a
    // shortest cycle.
    const std::vector<Vertex>& canonical_cycle() const { return d_->canon_cycle; }
    // (cycle, path): cycle^inf . path . v admissible, path excludes v
    std::pair<std::vector<Vertex>, std::vector<Vertex>> canonical_past(Vertex v) const;
    // (path, cycle): v . path . cycle^inf admissible, path excludes v
    std::pair<std::vector<Vertex>, std::vector<Vertex>> canonical_future(Vertex v) const;

    std::vector<std::pair<std::string, std::string>> edge_list() const;

private:
    struct Data {
        std::vector<std::string> names;
        std::map<std::string, Vertex> ids;
        std::vector<std::vector<Vertex>> out, in;
        std::vector<std::vector<char>> adj;
        std::vector<Vertex> canon_cycle;
    };
    explicit Graph(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
    static std::vector<Vertex> find_canonical_cycle(const Data& d);

    std::shared_ptr<const Data> d_;
};

} // namespace mflow
