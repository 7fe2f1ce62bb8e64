#pragma once

#include <stdexcept>
#include <string>

namespace mflow {

// Machine-readable error codes surfaced through the CLI as well.
enum class Err {
    MissingInEdge,
    MissingOutEdge,
    IsPureCycle,
    NotTransitive,
    BadWord,
    Inadmissible,
    MismatchedZero,
    MemoryTooShort,
    NoConvergence,
    CapExceeded,
    IncompatibleCylinder,
    InvalidAnchors,
    HeightOutOfRange,
    RoofNotConstant,
    RoofNotOne,
    RoofNotPositive,
    IntervalAboveRoof,
    DeltaTooLarge,
    AtomCountMismatch,
    ShapeMismatch,
    HypothesisFailed,
    ResolutionExceeded,
    EmptyEvidence,
    ParseError,
    ValidationError,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& msg)
        : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}

    Err code() const { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, Err code, const std::string& msg) {
    if (!ok) fail(code, msg);
}

} // namespace mflow
