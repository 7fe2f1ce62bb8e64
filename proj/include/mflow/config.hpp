#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "mflow/onesided.hpp"
#include "mflow/suspension.hpp"

namespace mflow {

struct AnalysisConfig {
    Graph graph;
    std::optional<Potential> potential; // as configured; may be two-sided
    std::optional<Roof> roof;

    double pressure_tol = 1e-13;
    double lattice_tol = 1e-6;
    std::size_t dbar_cap = 64;
    long iteration_cap = 200000;

    std::optional<std::uint64_t> seed;
    nlohmann::json params; // command-specific knobs
    nlohmann::json raw;    // the parsed document, for echo and digest
};

// Parses and validates the configuration document; throws ParseError /
// ValidationError with a field path in the message.
AnalysisConfig parse_config(const std::string& text);

// Helpers shared with tests: read "1.5" / "2/7" / JSON numbers exactly.
Rational json_rational(const nlohmann::json& v, const std::string& path);

} // namespace mflow
