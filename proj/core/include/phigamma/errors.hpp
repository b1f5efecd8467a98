#pragma once

#include <stdexcept>
#include <string>

namespace phigamma {

// Base class for all mathematically meaningful failures. Usage errors in the
// CLI layer use plain std::invalid_argument instead.
struct MathError : std::runtime_error {
    explicit MathError(const std::string& what) : std::runtime_error(what) {}
};

struct NonUnitError : MathError {
    explicit NonUnitError(const std::string& w = "element is not a unit") : MathError(w) {}
};

struct InexactDivisionError : MathError {
    explicit InexactDivisionError(const std::string& w) : MathError(w) {}
};

struct RingMismatchError : MathError {
    explicit RingMismatchError(const std::string& w = "operands live in different rings") : MathError(w) {}
};

struct WindowTooSmallError : MathError {
    explicit WindowTooSmallError(const std::string& w) : MathError(w) {}
};

struct UncertifiedLeadingTermError : MathError {
    explicit UncertifiedLeadingTermError(const std::string& w = "leading term not certified by window") : MathError(w) {}
};

struct PerfLevelExceededError : MathError {
    explicit PerfLevelExceededError(const std::string& w = "perfection depth cap exceeded") : MathError(w) {}
};

struct NoValuationError : MathError {
    explicit NoValuationError(const std::string& w = "coefficient ring carries no valuation") : MathError(w) {}
};

struct ConstantTermNonzeroError : MathError {
    explicit ConstantTermNonzeroError(const std::string& w = "series must have zero constant term") : MathError(w) {}
};

struct NoConvergenceError : MathError {
    explicit NoConvergenceError(const std::string& w) : MathError(w) {}
};

struct TraceNotDivisibleError : MathError {
    explicit TraceNotDivisibleError(const std::string& w = "trace not divisible by the prime element") : MathError(w) {}
};

struct CertificateInvalidError : MathError {
    explicit CertificateInvalidError(const std::string& w) : MathError(w) {}
};

struct NoValidRError : MathError {
    explicit NoValidRError(const std::string& w = "grid search found no admissible radius at this precision") : MathError(w) {}
};

struct TooLargeError : MathError {
    explicit TooLargeError(const std::string& w = "enumeration domain exceeds the configured cap") : MathError(w) {}
};

struct DeltaOrderDivisibleByPError : MathError {
    explicit DeltaOrderDivisibleByPError(const std::string& w = "torsion subgroup order divisible by p") : MathError(w) {}
};

struct RankNotCertifiedError : MathError {
    explicit RankNotCertifiedError(const std::string& w = "projector rank not constant on the window") : MathError(w) {}
};

struct NotEtaleError : MathError {
    explicit NotEtaleError(const std::string& w = "module is not etale") : MathError(w) {}
};

struct NotStabilizedError : MathError {
    explicit NotStabilizedError(const std::string& w) : MathError(w) {}
};

}  // namespace phigamma
