#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mflow/run.hpp"

using namespace mflow;

// Exit codes: 0 success, 2 config error, 3 computation error.
int main(int argc, char** argv) {
    CLI::App app{"markovflow: topological Markov shifts, equilibrium measures, "
                 "cocycle arithmeticity and mixing reports"};
    app.require_subcommand(1);

    const std::vector<std::string> commands = {"analyze-graph", "pressure",      "measure",
                                               "classify",      "mixing-report", "dbar"};
    std::string config_path, format = "json";
    std::uint64_t seed = 0;
    bool seed_set = false;
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "path to the JSON config")->required();
        sub->add_option("--format", format, "json or text")
            ->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--seed", seed, "seed for sampling commands")
            ->each([&](const std::string&) { seed_set = true; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // anything but help/version is a config error
    }
    const std::string command = app.get_subcommands().front()->get_name();

    auto emit_error = [&](const Error& e, int code) {
        nlohmann::json j;
        j["error"]["code"] = err_name(e.code());
        j["error"]["message"] = e.what();
        std::cout << canonical_json(j) << "\n";
        return code;
    };

    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cout << R"({"error":{"code":"ParseError","message":"cannot open config )"
                      << config_path << R"("}})" << "\n";
            return 2;
        }
        std::ostringstream ss;
        ss << in.rdbuf();

        AnalysisConfig cfg = [&] {
            try {
                return parse_config(ss.str());
            } catch (const Error& e) {
                throw;
            }
        }();
        if (seed_set) cfg.seed = seed;

        Report rep;
        try {
            rep = run_command(cfg, command);
        } catch (const Error& e) {
            if (e.code() == Err::ParseError || e.code() == Err::ValidationError)
                return emit_error(e, 2);
            return emit_error(e, 3);
        }
        if (format == "json") std::cout << canonical_json(rep.to_json()) << "\n";
        else std::cout << render_text(rep);
        return 0;
    } catch (const Error& e) {
        return emit_error(e, 2);
    } catch (const std::exception& e) {
        nlohmann::json j;
        j["error"]["code"] = "Internal";
        j["error"]["message"] = e.what();
        std::cout << canonical_json(j) << "\n";
        return 3;
    }
}
