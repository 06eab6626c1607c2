#pragma once

#include <stdexcept>
#include <string>

namespace openspin1 {

/// Base class for every failure raised by the library. `code()` is a short
/// machine-readable tag used by the CLI's error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Requested object does not fit the configured size budget.
class SizeError : public Error {
public:
    explicit SizeError(const std::string& what) : Error("size", what) {}
};

/// Input violates a documented precondition (e.g. non-Hermitian matrix).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error("contract", what) {}
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error("parameter", what) {}
};

/// Node set too ill-conditioned for a polynomial fit.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double condition)
        : Error("conditioning", what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Leading coefficient vanishes, so the contract degree cannot be honoured.
class DegreeError : public Error {
public:
    explicit DegreeError(const std::string& what) : Error("degree", what) {}
};

/// Numerical method did not reach the requested accuracy.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double best_estimate, double error_estimate)
        : Error("accuracy", what), best_(best_estimate), err_(error_estimate) {}
    double best_estimate() const noexcept { return best_; }
    double error_estimate() const noexcept { return err_; }

private:
    double best_;
    double err_;
};

class PoleError : public Error {
public:
    explicit PoleError(const std::string& what) : Error("pole", what) {}
};

/// Energy-degenerate subspace could not be split by the transfer matrix.
class DegeneracyError : public Error {
public:
    DegeneracyError(const std::string& what, std::size_t dimension)
        : Error("degeneracy", what), dimension_(dimension) {}
    std::size_t dimension() const noexcept { return dimension_; }

private:
    std::size_t dimension_;
};

class ReconstructionError : public Error {
public:
    explicit ReconstructionError(const std::string& what) : Error("reconstruction", what) {}
};

class ExtractionError : public Error {
public:
    explicit ExtractionError(const std::string& what) : Error("extraction", what) {}
};

/// Argument outside the domain where a closed form is defined.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

/// Fourier-transform convention check failed; density evaluation must not proceed.
class ConventionError : public Error {
public:
    explicit ConventionError(const std::string& what) : Error("convention", what) {}
};

class ClassificationError : public Error {
public:
    explicit ClassificationError(const std::string& what) : Error("classification", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

} // namespace openspin1
