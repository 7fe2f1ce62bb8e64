#pragma once

#include <json.hpp>

namespace mflow {

struct Report {
    std::string command;
    std::string input_digest;
    nlohmann::json results = nlohmann::json::object();
    nlohmann::json errors = nlohmann::json::array();
    nlohmann::json runtime = nlohmann::json::object(); // deterministic metadata only

    nlohmann::json to_json() const;
};

// Canonical serialization: keys sorted, floats with 17 significant digits,
// byte-stable across runs.
std::string canonical_json(const nlohmann::json& j);

std::string fnv1a_hex(const std::string& bytes);

// value-with-error convention for results entries
nlohmann::json tagged_exact(double value);
nlohmann::json tagged(double value, double error_bound);

std::string render_text(const Report& r);

} // namespace mflow
