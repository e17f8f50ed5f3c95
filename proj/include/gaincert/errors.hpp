#pragma once

#include <stdexcept>
#include <string>

namespace gaincert {

// A symmetric matrix failed the Cholesky certificate.
struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

// The eigensolver exhausted its sweep budget.
struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

// An objective was evaluated at (or too close to) an eigenvalue where it is undefined.
struct EvalAtEigenvalue : std::runtime_error {
  explicit EvalAtEigenvalue(const std::string& what) : std::runtime_error(what) {}
};

// The smallest eigenvalue is too close to the next one for its gradient to be meaningful.
struct DegenerateEigenvalue : std::runtime_error {
  explicit DegenerateEigenvalue(const std::string& what) : std::runtime_error(what) {}
};

// Grid search requested for a gain with too many entries.
struct GridTooLarge : std::runtime_error {
  explicit GridTooLarge(const std::string& what) : std::runtime_error(what) {}
};

// A requested evaluation would exceed the floating-point range.
struct OverflowRisk : std::runtime_error {
  explicit OverflowRisk(const std::string& what) : std::runtime_error(what) {}
};

// A document (problem file, polynomial file, flag value) could not be parsed.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// An output path could not be opened or written.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gaincert
