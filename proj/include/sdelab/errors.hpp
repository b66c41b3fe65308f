#pragma once

#include <stdexcept>
#include <string>

namespace sdelab {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
    ok = 0,
    usage = 2,
    model_domain = 3,
    resource = 4,
    estimation = 5,
};

/// Base of every error raised by the library. Carries the exit code the CLI
/// reports for it.
class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

/// Bad arguments: dimension mismatch, invalid parameters, out-of-domain input.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ExitCode::usage, what) {}
};

/// A coefficient produced a non-finite value at a finite state.
class ModelDomainError : public Error {
public:
    explicit ModelDomainError(const std::string& what) : Error(ExitCode::model_domain, what) {}
};

/// A request would exceed a memory guard.
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& what) : Error(ExitCode::resource, what) {}
};

/// Monte Carlo estimation failed (e.g. every path exploded).
class EstimationError : public Error {
public:
    explicit EstimationError(const std::string& what) : Error(ExitCode::estimation, what) {}
};

/// Adaptive quadrature could not reach its tolerance or hit a non-finite integrand.
class QuadratureError : public Error {
public:
    explicit QuadratureError(const std::string& what) : Error(ExitCode::estimation, what) {}
};

/// A self-check inside the library failed. Indicates a bug, not bad input.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

void require(bool condition, const std::string& message);

}  // namespace sdelab
