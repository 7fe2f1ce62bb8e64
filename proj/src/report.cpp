#include "mflow/report.hpp"

#include <cinttypes>
#include <cstdio>

namespace mflow {

using nlohmann::json;

json Report::to_json() const {
    json j;
    j["command"] = command;
    j["input_digest"] = input_digest;
    j["results"] = results;
    j["errors"] = errors;
    j["runtime"] = runtime;
    return j;
}

namespace {

void escape_into(const std::string& s, std::string& out) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void emit(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) { // nlohmann objects iterate sorted
                if (!first) out += ',';
                first = false;
                escape_into(it.key(), out);
                out += ':';
                emit(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                emit(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::string: escape_into(j.get<std::string>(), out); break;
        case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
        case json::value_t::number_integer: out += std::to_string(j.get<long long>()); break;
        case json::value_t::number_unsigned: out += std::to_string(j.get<unsigned long long>()); break;
        case json::value_t::number_float: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
            out += buf;
            break;
        }
        default: out += "null";
    }
}

} // namespace

std::string canonical_json(const json& j) {
    std::string out;
    emit(j, out);
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

json tagged_exact(double value) {
    json j;
    j["value"] = value;
    j["error"] = "exact";
    return j;
}

json tagged(double value, double error_bound) {
    json j;
    j["value"] = value;
    j["error"] = error_bound;
    return j;
}

namespace {

void render_value(const std::string& key, const json& v, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (v.is_object() && v.contains("value") && v.contains("error")) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v.at("value").get<double>());
        out += pad + key + " = " + buf;
        if (v.at("error").is_string()) out += " (exact)";
        else {
            std::snprintf(buf, sizeof buf, "%.3g", v.at("error").get<double>());
            out += " (+/- " + std::string(buf) + ")";
        }
        out += '\n';
    } else if (v.is_object()) {
        out += pad + key + ":\n";
        for (auto it = v.begin(); it != v.end(); ++it)
            render_value(it.key(), it.value(), out, indent + 2);
    } else {
        out += pad + key + " = " + canonical_json(v) + '\n';
    }
}

} // namespace

std::string render_text(const Report& r) {
    std::string out = "command: " + r.command + "\n";
    out += "input_digest: " + r.input_digest + "\n";
    for (auto it = r.results.begin(); it != r.results.end(); ++it)
        render_value(it.key(), it.value(), out, 0);
    if (!r.errors.empty()) out += "errors: " + canonical_json(r.errors) + "\n";
    return out;
}

} // namespace mflow
