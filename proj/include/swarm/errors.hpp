#pragma once

#include <stdexcept>
#include <string>

namespace swarm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};
struct BadMeasure : Error {
    using Error::Error;
};
struct NotIrreducible : Error {
    using Error::Error;
};
struct NotReversible : Error {
    using Error::Error;
};
struct NotMinimizer : Error {
    using Error::Error;
};
struct NoBracket : Error {
    using Error::Error;
};
struct NonFinite : Error {
    using Error::Error;
};
struct StepFailure : Error {
    using Error::Error;
};
struct WindowTooShort : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};

namespace tol {
// Structural identities (row sums, detailed balance, antisymmetry).
inline constexpr double structural = 1e-12;
// Mass normalization of densities.
inline constexpr double mass = 1e-10;
} // namespace tol

} // namespace swarm
