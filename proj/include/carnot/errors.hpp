#pragma once

#include <stdexcept>
#include <string>

namespace carnot {

// Bad user input: malformed spec files, out-of-range parameters, words with
// letters outside 1..m. Maps to exit code 2 at the CLI.
struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

// A structural invariant of a custom algebra failed validation. Carries the
// witness (which invariant, which basis triple) in the message.
struct AlgebraError : std::runtime_error {
    explicit AlgebraError(const std::string& what) : std::runtime_error(what) {}
};

// An internal certificate check failed. This is a bug surface, not a user
// error: constructions are supposed to verify by design.
struct CertificateError : std::logic_error {
    explicit CertificateError(const std::string& what) : std::logic_error(what) {}
};

} // namespace carnot
