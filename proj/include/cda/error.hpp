#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cda {

/// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorClass {
    kValidation,  // bad input: out-of-range query, malformed model or scenario
    kSynthesis,   // a feasible optimal structure could not be assembled
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
    ErrorClass error_class() const noexcept { return class_; }

private:
    ErrorClass class_;
};

/// Query outside a model's domain (altitude range, negative speed, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorClass::kValidation, what) {}
};

/// Aircraft model or scenario file violates an invariant.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorClass::kValidation, what) {}
};

/// Iterative solver failed to converge.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorClass::kSynthesis, what) {}
};

/// Cross wind at least as large as the airspeed: no crab angle keeps the track.
class InfeasibleCrabError : public Error {
public:
    explicit InfeasibleCrabError(const std::string& what) : Error(ErrorClass::kSynthesis, what) {}
};

/// Admissible flight-path-angle set is empty.
class InfeasibleControlError : public Error {
public:
    explicit InfeasibleControlError(const std::string& what) : Error(ErrorClass::kSynthesis, what) {}
};

/// Integration horizon exhausted without reaching a stopping event.
class NoJunctionError : public Error {
public:
    explicit NoJunctionError(const std::string& what) : Error(ErrorClass::kSynthesis, what) {}
};

/// Trajectory synthesis failed; carries the step-by-step trace for diagnosis.
class SynthesisError : public Error {
public:
    SynthesisError(const std::string& what, std::vector<std::string> trace)
        : Error(ErrorClass::kSynthesis, what), trace_(std::move(trace)) {}
    const std::vector<std::string>& trace() const noexcept { return trace_; }

private:
    std::vector<std::string> trace_;
};

}  // namespace cda
