#include "mflow/config.hpp"

namespace mflow {

using nlohmann::json;

Rational json_rational(const json& v, const std::string& path) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_float()) return rat_of(v.get<double>());
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const Error& e) {
            fail(Err::ParseError, path + ": " + e.what());
        }
    }
    fail(Err::ParseError, path + ": expected a number or rational string");
}

namespace {

json need(const json& j, const std::string& key, const std::string& path) {
    require(j.is_object() && j.contains(key), Err::ParseError, path + "." + key + ": missing");
    return j.at(key);
}

// table keys are comma-separated vertex names
std::map<std::vector<Vertex>, Rational> parse_table(const Graph& g, const json& t,
                                                    const std::string& path) {
    require(t.is_object(), Err::ParseError, path + ": expected an object");
    std::map<std::vector<Vertex>, Rational> out;
    for (const auto& [key, val] : t.items()) {
        Word w = parse_word(g, key, 0);
        require(w.admissible(g), Err::ValidationError, path + "." + key + ": inadmissible window");
        out[w.symbols] = json_rational(val, path + "." + key);
    }
    return out;
}

std::pair<int, int> table_memory(const json& block, const std::string& path,
                                 const std::map<std::vector<Vertex>, Rational>& table) {
    if (block.contains("memory")) {
        const json& m = block.at("memory");
        require(m.is_array() && m.size() == 2, Err::ParseError, path + ".memory: expected [l, m]");
        return {m[0].get<int>(), m[1].get<int>()};
    }
    require(!table.empty(), Err::ValidationError, path + ".table: empty");
    const int len = static_cast<int>(table.begin()->first.size());
    return {0, len - 1};
}

HolderEnvelope parse_holder(const json& block, const std::string& path) {
    HolderEnvelope env;
    if (block.contains("holder")) {
        const json& h = block.at("holder");
        env.C = need(h, "C", path + ".holder").get<double>();
        env.alpha = need(h, "alpha", path + ".holder").get<double>();
        require(env.C >= 0, Err::ValidationError, path + ".holder.C: must be >= 0");
        require(env.alpha > 0, Err::ValidationError, path + ".holder.alpha: must be > 0");
    }
    return env;
}

} // namespace

AnalysisConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Err::ParseError, std::string("document: ") + e.what());
    }

    const json jg = need(doc, "graph", "config");
    std::vector<std::string> vertices;
    for (const auto& v : need(jg, "vertices", "config.graph")) {
        require(v.is_string(), Err::ParseError, "config.graph.vertices: names must be strings");
        vertices.push_back(v.get<std::string>());
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : need(jg, "edges", "config.graph")) {
        require(e.is_array() && e.size() == 2, Err::ParseError,
                "config.graph.edges: expected [u, v] pairs");
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    Graph graph = Graph::validate(vertices, edges);

    AnalysisConfig cfg{graph, std::nullopt, std::nullopt, 1e-13, 1e-6, 64, 200000,
                       std::nullopt, {}, {}};
    cfg.raw = doc;

    if (doc.contains("potential")) {
        const json jp = doc.at("potential");
        auto table = parse_table(graph, need(jp, "table", "config.potential"), "config.potential.table");
        auto [lo, hi] = table_memory(jp, "config.potential", table);
        cfg.potential = Potential(graph, lo, hi, std::move(table), parse_holder(jp, "config.potential"));
    }
    if (doc.contains("roof")) {
        const json jr = doc.at("roof");
        auto table = parse_table(graph, need(jr, "table", "config.roof"), "config.roof.table");
        auto [lo, hi] = table_memory(jr, "config.roof", table);
        for (const auto& [w, v] : table)
            require(v > 0, Err::ValidationError,
                    "config.roof.table." + Word(w, lo).str(graph) + ": must be > 0");
        cfg.roof = Roof(Potential(graph, lo, hi, std::move(table), parse_holder(jr, "config.roof")));
    }
    if (doc.contains("tolerances")) {
        const json jt = doc.at("tolerances");
        if (jt.contains("pressure")) cfg.pressure_tol = jt.at("pressure").get<double>();
        if (jt.contains("lattice")) cfg.lattice_tol = jt.at("lattice").get<double>();
        if (jt.contains("dbar_cap")) cfg.dbar_cap = jt.at("dbar_cap").get<std::size_t>();
        if (jt.contains("iteration_cap")) cfg.iteration_cap = jt.at("iteration_cap").get<long>();
        require(cfg.pressure_tol > 0, Err::ValidationError, "config.tolerances.pressure: must be > 0");
        require(cfg.lattice_tol > 0, Err::ValidationError, "config.tolerances.lattice: must be > 0");
    }
    if (doc.contains("params")) {
        cfg.params = doc.at("params");
        if (cfg.params.contains("seed")) cfg.seed = cfg.params.at("seed").get<std::uint64_t>();
    }
    return cfg;
}

} // namespace mflow
