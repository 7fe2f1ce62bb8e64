#include "mflow/run.hpp"

#include "mflow/cocycle.hpp"
#include "mflow/cubes.hpp"

namespace mflow {

using nlohmann::json;

namespace {

Potential effective_potential(const AnalysisConfig& cfg) {
    Potential phi = cfg.potential ? *cfg.potential : Potential::zero(cfg.graph);
    if (!phi.one_sided()) phi = reduce_to_one_sided(phi).one_sided;
    return phi;
}

Roof need_roof(const AnalysisConfig& cfg) {
    require(cfg.roof.has_value(), Err::ValidationError, "command requires a roof table");
    return *cfg.roof;
}

std::uint64_t need_seed(const AnalysisConfig& cfg) {
    require(cfg.seed.has_value(), Err::ValidationError,
            "sampling commands require an explicit seed");
    return *cfg.seed;
}

long param_long(const json& p, const std::string& key, long dflt) {
    return p.contains(key) ? p.at(key).get<long>() : dflt;
}

Block parse_block(const AnalysisConfig& cfg, const json& jb, const std::string& path) {
    require(jb.is_object() && jb.contains("word") && jb.contains("interval"), Err::ParseError,
            path + ": block needs word and interval");
    const long anchor = jb.contains("anchor") ? jb.at("anchor").get<long>() : 0;
    Word w = parse_word(cfg.graph, jb.at("word").get<std::string>(), anchor);
    require(w.admissible(cfg.graph), Err::ValidationError, path + ": inadmissible word");
    const json& iv = jb.at("interval");
    require(iv.is_array() && iv.size() == 2, Err::ParseError, path + ".interval: expected [a, b]");
    return {w, json_rational(iv[0], path + ".interval[0]"), json_rational(iv[1], path + ".interval[1]")};
}

json run_analyze_graph(const AnalysisConfig& cfg) {
    json res;
    const Graph& g = cfg.graph;
    res["vertices"] = g.size();
    res["edges"] = g.edge_list().size();
    res["transitive"] = g.is_transitive();
    res["mixing"] = g.is_mixing();
    if (g.is_transitive()) {
        auto [p, classes] = g.period_and_decomposition();
        res["period"] = p;
        json comps = json::array();
        for (const auto& cls : classes) {
            json names = json::array();
            for (Vertex v : cls) names.push_back(g.name(v));
            comps.push_back(names);
        }
        res["components"] = comps;
    }
    return res;
}

json run_pressure(const AnalysisConfig& cfg) {
    const Potential phi = effective_potential(cfg);
    const Pressure pr = pressure(phi, cfg.graph, cfg.pressure_tol, cfg.iteration_cap);
    json res;
    res["lambda"] = tagged(pr.lambda, cfg.pressure_tol);
    res["log_lambda"] = tagged(pr.log_lambda, cfg.pressure_tol);
    res["iterations"] = pr.iterations;
    return res;
}

json run_measure(const AnalysisConfig& cfg) {
    const Potential phi = effective_potential(cfg);
    GibbsMeasure m = GibbsMeasure::equilibrium(phi, cfg.graph, cfg.pressure_tol, cfg.iteration_cap);
    json res;
    res["lambda"] = tagged(m.lambda(), cfg.pressure_tol);
    res["log_pressure"] = tagged(m.log_pressure(), cfg.pressure_tol);
    res["entropy"] = tagged(m.entropy(), cfg.pressure_tol);
    res["iterations"] = m.iterations();
    res["residual"] = tagged_exact(m.residual());
    const long depth = param_long(cfg.params, "depth", 3);
    json cyl = json::object();
    for (long len = 1; len <= depth; ++len)
        for (const auto& w : admissible_windows(cfg.graph, static_cast<int>(len)))
            cyl[Word(w, 0).str(cfg.graph)] = tagged(m.cylinder_mass(w), cfg.pressure_tol);
    res["cylinders"] = cyl;
    return res;
}

json run_classify(const AnalysisConfig& cfg) {
    const Roof roof = need_roof(cfg);
    const std::uint64_t seed = need_seed(cfg);
    const Potential phi = effective_potential(cfg);
    GibbsMeasure m = GibbsMeasure::equilibrium(phi, cfg.graph, cfg.pressure_tol, cfg.iteration_cap);
    const int cycle_cap = static_cast<int>(param_long(cfg.params, "cycle_cap", 8));
    const int loops = static_cast<int>(param_long(cfg.params, "loops", 64));
    ClassificationReport rep =
        classify_flow(m, roof, cfg.graph, cfg.lattice_tol, seed, cycle_cap, loops);

    json res;
    res["verdict"] = rep.verdict == Verdict::Bernoulli ? "Bernoulli" : "BernoulliTimesRotation";
    res["arithmetic"] = rep.arithmetic;
    res["period_p"] = rep.period_p;
    if (rep.c) res["c"] = tagged(*rep.c, rep.holonomy.residual);
    if (rep.theta) res["theta"] = tagged(*rep.theta, rep.holonomy.residual);
    if (rep.flow_period) res["flow_period"] = tagged(*rep.flow_period, rep.holonomy.residual);
    json hol;
    hol["lattice"] = rep.holonomy.lattice;
    if (rep.holonomy.lattice) hol["generator"] = tagged(rep.holonomy.c, rep.holonomy.residual);
    hol["residual"] = tagged_exact(rep.holonomy.residual);
    hol["consistent"] = rep.holonomy.consistent;
    hol["loop_weights_sampled"] = rep.holonomy.sampled_weights.size();
    hol["periodic_sums"] = rep.holonomy.periodic_sums.size();
    res["holonomy"] = hol;
    const FlowMeasure fm(m, roof);
    res["flow_entropy"] = tagged(abramov_entropy(m.entropy(), fm), cfg.pressure_tol);
    res["mean_roof"] = tagged(fm.normalizer(), cfg.pressure_tol);
    return res;
}

json run_mixing_report(const AnalysisConfig& cfg) {
    const Roof roof = need_roof(cfg);
    const Potential phi = effective_potential(cfg);
    GibbsMeasure m = GibbsMeasure::equilibrium(phi, cfg.graph, cfg.pressure_tol, cfg.iteration_cap);
    FlowMeasure fm(m, roof);
    const json& p = cfg.params;
    const int n = static_cast<int>(param_long(p, "n", 0));
    const Rational delta = p.contains("delta") ? json_rational(p.at("delta"), "params.delta")
                                               : roof.inf() / 2;
    const Rational t0 = p.contains("t0") ? json_rational(p.at("t0"), "params.t0")
                                         : roof.inf() / 2;
    const int N = static_cast<int>(param_long(p, "N", 1));
    const int Np = static_cast<int>(param_long(p, "Nprime", N + 1));
    const double threshold = p.contains("threshold") ? p.at("threshold").get<double>() : 0.1;
    const int bands = static_cast<int>(param_long(p, "bands", 2));

    CubePartition cp = build_cube_partition(fm, n, delta);
    OrderedPartition beta = group_cubes(cp, bands);
    BlockSet B;
    if (p.contains("B"))
        for (std::size_t i = 0; i < p.at("B").size(); ++i)
            B.push_back(parse_block(cfg, p.at("B")[i], "params.B[" + std::to_string(i) + "]"));
    else
        B = beta.atoms.front();

    KMixReport rep = k_mixing_report(fm, B, beta, t0, N, Np, threshold);
    json res;
    res["mu_B"] = tagged(rep.mu_B, cfg.pressure_tol);
    res["fraction_good"] = tagged_exact(rep.fraction_good);
    res["worst_deviation"] = tagged_exact(rep.worst_deviation);
    res["worst_atom"] = rep.worst_atom;
    res["atoms"] = rep.atoms;
    res["beta_atoms"] = beta.atoms.size();
    res["cube_count"] = cp.cubes.size();
    res["remainder_mass"] = tagged_exact(cp.remainder_mass);
    res["non_k_flag"] = rep.fraction_good < 1.0;
    return res;
}

json run_dbar(const AnalysisConfig& cfg) {
    const json& p = cfg.params;
    require(p.contains("dbar"), Err::ValidationError, "params.dbar required");
    const json& d = p.at("dbar");
    const int n = static_cast<int>(param_long(d, "n", 1));
    auto parse_dist = [&](const json& arr, const std::string& path) {
        JointDist out;
        require(arr.is_array(), Err::ParseError, path + ": expected an array");
        for (const auto& atom : arr) {
            require(atom.is_array() && atom.size() == 2, Err::ParseError,
                    path + ": atoms are [labels, mass]");
            JointAtom ja;
            for (const auto& l : atom[0]) ja.labels.push_back(l.get<int>());
            ja.mass = json_rational(atom[1], path + ".mass");
            out.push_back(std::move(ja));
        }
        return out;
    };
    const JointDist P = parse_dist(d.at("p"), "params.dbar.p");
    const JointDist Q = parse_dist(d.at("q"), "params.dbar.q");
    DbarResult r = dbar_exact_small(P, Q, n, cfg.dbar_cap);
    json res;
    res["value"] = tagged_exact(r.value);
    res["exact"] = rational_str(r.exact);
    res["mode"] = r.mode == DbarResult::Mode::Exact ? "Exact" : "UpperBound";
    res["witness"] = r.witness;
    return res;
}

} // namespace

Report run_command(const AnalysisConfig& cfg, const std::string& command) {
    Report rep;
    rep.command = command;
    rep.input_digest = fnv1a_hex(canonical_json(cfg.raw));
    rep.runtime["tool"] = "markovflow";
    rep.runtime["version"] = "0.1.0";
    if (cfg.seed) rep.runtime["seed"] = *cfg.seed;

    if (command == "analyze-graph") rep.results = run_analyze_graph(cfg);
    else if (command == "pressure") rep.results = run_pressure(cfg);
    else if (command == "measure") rep.results = run_measure(cfg);
    else if (command == "classify") rep.results = run_classify(cfg);
    else if (command == "mixing-report") rep.results = run_mixing_report(cfg);
    else if (command == "dbar") rep.results = run_dbar(cfg);
    else
        fail(Err::ValidationError, "unknown command '" + command + "'");
    return rep;
}

} // namespace mflow
