#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gaincert/kalman.hpp"
#include "gaincert/objectives.hpp"

namespace gaincert {

// Seeded recipe for a random problem instance.
struct RandomProblemSpec {
  std::uint64_t seed{0};
  double log10_p_lo{-2.0};
  double log10_p_hi{2.0};
  double log10_r_lo{-2.0};
  double log10_r_hi{2.0};
  enum class HMode { kGaussian, kIdentityBlock, kZero } h_mode{HMode::kGaussian};
};

// Parsed problem document: dimensions plus either explicit row-major matrices
// or a random block, never both.
struct ProblemFile {
  std::size_t n{0};
  std::size_t m{0};
  std::optional<std::vector<double>> p_entries;
  std::optional<std::vector<double>> r_entries;
  std::optional<std::vector<double>> h_entries;
  std::optional<RandomProblemSpec> random;
};

// Throws ParseError on malformed documents; messages name the offending key.
ProblemFile load_problem_file(const std::string& path);
ProblemFile parse_problem_text(const std::string& text);

// Builds the instance. Explicit P and R run the SPD certificate here and throw
// NotPositiveDefinite naming the key.
KalmanProblem realize_problem(const ProblemFile& file);

// Writes the problem in the explicit-matrix file format. Values round-trip
// bit-identically.
void save_problem_file(const std::string& path, const KalmanProblem& prob);
std::string problem_to_text(const KalmanProblem& prob);

// One term per line: coefficient followed by n exponents.
SymmetricPolySpec load_sympoly_file(const std::string& path, std::size_t n);

}  // namespace gaincert
