#include "mflow/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace mflow {

const char* err_name(Err e) {
    switch (e) {
        case Err::MissingInEdge: return "MissingInEdge";
        case Err::MissingOutEdge: return "MissingOutEdge";
        case Err::IsPureCycle: return "IsPureCycle";
        case Err::NotTransitive: return "NotTransitive";
        case Err::BadWord: return "BadWord";
        case Err::Inadmissible: return "Inadmissible";
        case Err::MismatchedZero: return "MismatchedZero";
        case Err::MemoryTooShort: return "MemoryTooShort";
        case Err::NoConvergence: return "NoConvergence";
        case Err::CapExceeded: return "CapExceeded";
        case Err::IncompatibleCylinder: return "IncompatibleCylinder";
        case Err::InvalidAnchors: return "InvalidAnchors";
        case Err::HeightOutOfRange: return "HeightOutOfRange";
        case Err::RoofNotConstant: return "RoofNotConstant";
        case Err::RoofNotOne: return "RoofNotOne";
        case Err::RoofNotPositive: return "RoofNotPositive";
        case Err::IntervalAboveRoof: return "IntervalAboveRoof";
        case Err::DeltaTooLarge: return "DeltaTooLarge";
        case Err::AtomCountMismatch: return "AtomCountMismatch";
        case Err::ShapeMismatch: return "ShapeMismatch";
        case Err::HypothesisFailed: return "HypothesisFailed";
        case Err::ResolutionExceeded: return "ResolutionExceeded";
        case Err::EmptyEvidence: return "EmptyEvidence";
        case Err::ParseError: return "ParseError";
        case Err::ValidationError: return "ValidationError";
    }
    return "UnknownError";
}

Graph Graph::validate(const std::vector<std::string>& vertices,
                      const std::vector<std::pair<std::string, std::string>>& edges) {
    require(!vertices.empty(), Err::ValidationError, "empty vertex set");
    auto d = std::make_shared<Data>();
    for (const auto& v : vertices) {
        require(d->ids.count(v) == 0, Err::ValidationError, "duplicate vertex '" + v + "'");
        d->ids[v] = static_cast<Vertex>(d->names.size());
        d->names.push_back(v);
    }
    const int n = static_cast<int>(d->names.size());
    d->out.assign(n, {});
    d->in.assign(n, {});
    d->adj.assign(n, std::vector<char>(n, 0));
    for (const auto& [a, b] : edges) {
        require(d->ids.count(a) > 0, Err::ValidationError, "edge references unknown vertex '" + a + "'");
        require(d->ids.count(b) > 0, Err::ValidationError, "edge references unknown vertex '" + b + "'");
        Vertex u = d->ids[a], v = d->ids[b];
        if (!d->adj[u][v]) {
            d->adj[u][v] = 1;
            d->out[u].push_back(v);
            d->in[v].push_back(u);
        }
    }
    for (Vertex v = 0; v < n; ++v) {
        std::sort(d->out[v].begin(), d->out[v].end());
        std::sort(d->in[v].begin(), d->in[v].end());
        if (d->out[v].empty()) fail(Err::MissingOutEdge, "vertex '" + d->names[v] + "' has no successor");
        if (d->in[v].empty()) fail(Err::MissingInEdge, "vertex '" + d->names[v] + "' has no predecessor");
    }
    bool deterministic = true;
    for (Vertex v = 0; v < n; ++v)
        if (d->out[v].size() != 1 || d->in[v].size() != 1) { deterministic = false; break; }
    if (deterministic)
        fail(Err::IsPureCycle, "graph is a disjoint union of cycles");
    d->canon_cycle = find_canonical_cycle(*d);
    return Graph(std::move(d));
}

Vertex Graph::id(const std::string& name) const {
    auto it = d_->ids.find(name);
    require(it != d_->ids.end(), Err::ValidationError, "unknown vertex '" + name + "'");
    return it->second;
}

bool Graph::word_admissible(std::span<const Vertex> w) const {
    for (const Vertex v : w)
        if (v < 0 || v >= size()) return false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (!d_->adj[w[i]][w[i + 1]]) return false;
    return true;
}

bool Graph::cycle_admissible(std::span<const Vertex> w) const {
    if (w.empty()) return false;
    return word_admissible(w) && d_->adj[w.back()][w.front()];
}

bool Graph::is_transitive() const {
    const int n = size();
    // reach[u][v]: path of length >= 1 from u to v
    std::vector<std::vector<char>> reach = d_->adj;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (reach[i][k])
                for (int j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!reach[i][j]) return false;
    return true;
}

std::pair<int, std::vector<std::vector<Vertex>>> Graph::period_and_decomposition() const {
    require(is_transitive(), Err::NotTransitive, "period is defined for transitive graphs");
    // gcd of simple cycle lengths; cycles of length <= |V| generate the
    // cycle-length subgroup.
    int p = 0;
    const int n = size();
    std::vector<Vertex> path;
    std::vector<char> onpath(n, 0);
    auto dfs = [&](auto&& self, Vertex start, Vertex v) -> void {
        for (Vertex w : d_->out[v]) {
            if (w == start) p = std::gcd(p, static_cast<int>(path.size()));
            else if (w > start && !onpath[w] && static_cast<int>(path.size()) < n) {
                path.push_back(w);
                onpath[w] = 1;
                self(self, start, w);
                onpath[w] = 0;
                path.pop_back();
            }
        }
    };
    for (Vertex s = 0; s < n; ++s) {
        path.assign(1, s);
        std::fill(onpath.begin(), onpath.end(), 0);
        onpath[s] = 1;
        dfs(dfs, s, s);
    }
    // classes: BFS levels mod p
    std::vector<int> level(n, -1);
    level[0] = 0;
    std::queue<Vertex> q;
    q.push(0);
    while (!q.empty()) {
        Vertex u = q.front();
        q.pop();
        for (Vertex w : d_->out[u])
            if (level[w] < 0) {
                level[w] = (level[u] + 1) % p;
                q.push(w);
            }
    }
    std::vector<std::vector<Vertex>> classes(p);
    for (Vertex v = 0; v < n; ++v) classes[level[v]].push_back(v);
    return {p, classes};
}

bool Graph::is_mixing() const {
    if (!is_transitive()) return false;
    return period_and_decomposition().first == 1;
}

std::vector<std::vector<Vertex>> Graph::closed_walks(int max_len) const {
    std::vector<std::vector<Vertex>> result;
    std::vector<Vertex> walk;
    // Walks start at their smallest vertex; keep the lexicographically least
    // rotation as the class representative.
    auto canonical = [](const std::vector<Vertex>& w) {
        const std::size_t n = w.size();
        for (std::size_t s = 1; s < n; ++s)
            for (std::size_t i = 0; i < n; ++i) {
                Vertex a = w[(s + i) % n], b = w[i];
                if (a != b) {
                    if (a < b) return false;
                    break;
                }
            }
        return true;
    };
    auto dfs = [&](auto&& self, Vertex start, Vertex v) -> void {
        for (Vertex w : d_->out[v]) {
            if (w == start && canonical(walk)) result.push_back(walk);
            if (w >= start && static_cast<int>(walk.size()) < max_len) {
                walk.push_back(w);
                self(self, start, w);
                walk.pop_back();
            }
        }
    };
    for (Vertex s = 0; s < size(); ++s) {
        walk.assign(1, s);
        dfs(dfs, s, s);
    }
    return result;
}

std::vector<Vertex> Graph::find_canonical_cycle(const Data& d) {
    const int n = static_cast<int>(d.names.size());
    for (Vertex v = 0; v < n; ++v)
        if (d.adj[v][v]) return {v};
    // shortest cycle via BFS from each vertex back to itself
    std::vector<Vertex> best;
    for (Vertex s = 0; s < n; ++s) {
        std::vector<Vertex> parent(n, -1);
        std::vector<int> dist(n, -1);
        std::queue<Vertex> q;
        for (Vertex w : d.out[s])
            if (dist[w] < 0) {
                dist[w] = 1;
                parent[w] = s;
                q.push(w);
            }
        while (!q.empty()) {
            Vertex u = q.front();
            q.pop();
            if (u == s) break;
            for (Vertex w : d.out[u])
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    q.push(w);
                }
        }
        if (dist[s] > 0 && (best.empty() || dist[s] < static_cast<int>(best.size()))) {
            std::vector<Vertex> cyc;
            Vertex u = s;
            do {
                cyc.push_back(u);
                u = parent[u];
            } while (u != s);
            std::reverse(cyc.begin(), cyc.end());
            best = cyc;
        }
    }
    return best;
}

std::pair<std::vector<Vertex>, std::vector<Vertex>> Graph::canonical_past(Vertex v) const {
    // BFS backwards from v to the canonical cycle; returns (cycle, path)
    // with cycle^inf . path . v admissible.
    const int n = size();
    std::vector<Vertex> next(n, -1); // next step towards v
    std::vector<int> dist(n, -1);
    std::queue<Vertex> q;
    dist[v] = 0;
    q.push(v);
    while (!q.empty()) {
        Vertex u = q.front();
        q.pop();
        for (Vertex w : d_->in[u])
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                next[w] = u;
                q.push(w);
            }
    }
    Vertex hook = -1;
    for (Vertex c : d_->canon_cycle)
        if (dist[c] >= 0 && (hook < 0 || dist[c] < dist[hook])) hook = c;
    require(hook >= 0, Err::ValidationError,
            "vertex '" + name(v) + "' not reachable from the canonical cycle");
    std::vector<Vertex> cyc = d_->canon_cycle;
    auto it = std::find(cyc.begin(), cyc.end(), hook);
    if (hook == v) {
        // v sits on the cycle: rotate so the cycle ends at v's predecessor
        std::rotate(cyc.begin(), it, cyc.end());
        return {cyc, {}};
    }
    std::vector<Vertex> path;
    for (Vertex u = next[hook]; u != v && u != -1; u = next[u]) path.push_back(u);
    // cyc rotated to end at hook; cyc^inf . path . v admissible
    std::rotate(cyc.begin(), it + 1, cyc.end());
    return {cyc, path};
}

std::pair<std::vector<Vertex>, std::vector<Vertex>> Graph::canonical_future(Vertex v) const {
    // smallest-successor walk from v until a vertex repeats
    std::vector<int> seen(size(), -1);
    std::vector<Vertex> walk;
    Vertex u = v;
    for (;;) {
        Vertex w = d_->out[u][0];
        if (seen[w] >= 0) {
            std::vector<Vertex> path(walk.begin(), walk.begin() + seen[w]);
            std::vector<Vertex> cyc(walk.begin() + seen[w], walk.end());
            return {path, cyc};
        }
        seen[w] = static_cast<int>(walk.size());
        walk.push_back(w);
        u = w;
    }
}

std::vector<std::pair<std::string, std::string>> Graph::edge_list() const {
    std::vector<std::pair<std::string, std::string>> es;
    for (Vertex u = 0; u < size(); ++u)
        for (Vertex v : d_->out[u]) es.emplace_back(d_->names[u], d_->names[v]);
    return es;
}

} // namespace mflow
