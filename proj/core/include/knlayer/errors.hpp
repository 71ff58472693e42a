#pragma once

#include <stdexcept>
#include <string>

namespace knlayer {

/// A matrix invariant failed while building a moment system
/// (rank deficiency, lost semi-definiteness, overlapping null spaces).
class AssemblyError : public std::runtime_error {
public:
    explicit AssemblyError(const std::string &what) : std::runtime_error(what) {}
};

/// Numerically determined ranks disagree with a count identity they
/// must satisfy. Usually indicates a rank-threshold failure.
class InconsistencyError : public std::runtime_error {
public:
    explicit InconsistencyError(const std::string &what) : std::runtime_error(what) {}
};

/// The boundary system is rank deficient; no unique solution exists.
class IllPosedBoundaryError : public std::runtime_error {
public:
    explicit IllPosedBoundaryError(const std::string &what) : std::runtime_error(what) {}
};

/// Boundary data lies outside the attainable span of decaying solutions.
class InconsistentDataError : public std::runtime_error {
public:
    explicit InconsistentDataError(const std::string &what) : std::runtime_error(what) {}
};

/// A structurally valid request that this solver does not cover
/// (e.g. boundary conditions requiring r2 = 0).
class UnsupportedConfigurationError : public std::runtime_error {
public:
    explicit UnsupportedConfigurationError(const std::string &what) : std::runtime_error(what) {}
};

} // namespace knlayer
