#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gaincert/kalman.hpp"
#include "gaincert/matrix.hpp"
#include "gaincert/objectives.hpp"
#include "gaincert/random.hpp"

namespace gaincert {

// Knobs shared by the perturbation and finite-difference machinery.
struct ProbeConfig {
  std::size_t num_directions{100};
  std::vector<double> epsilons{1e-2, 1e-1};  // ascending, all positive
  std::uint64_t seed{0};
  double fd_step_scale{1e-6};
};

enum class ClaimKind {
  kCriticalPoint,
  kLocalMin,
  kGlobalMinGrid,
  kLoewnerIdentity,
  kTraceLimit,
  kCoeffEvenMin,
};

const char* claim_name(ClaimKind kind);

// One certification record. Fields that do not apply to a record's claim stay
// NaN and render as "-".
struct ReportRecord {
  ClaimKind claim{ClaimKind::kCriticalPoint};
  std::string objective;
  double value{0.0};  // objective value at the optimal gain, or check value
  double grad_max{std::numeric_limits<double>::quiet_NaN()};
  double fd_grad_max{std::numeric_limits<double>::quiet_NaN()};
  double worst_margin{std::numeric_limits<double>::quiet_NaN()};
  double fd_rel_err{std::numeric_limits<double>::quiet_NaN()};
  double grid_gap{std::numeric_limits<double>::quiet_NaN()};  // cells from K*
  bool asserted{true};
  bool pass{true};
  std::string note;
};

struct VerificationReport {
  std::vector<ReportRecord> records;

  bool all_asserted_pass() const;
  std::size_t asserted_count() const;
  std::size_t failed_count() const;
};

// Central differences entry by entry with step fd_step_scale * max(1, |K_ij|).
Matrix finite_diff_grad(const KalmanProblem& prob, const GainMatrix& gain,
                        const ObjectiveSpec& spec, const ProbeConfig& cfg);

// Passes iff the analytic gradient at the optimal gain has max-norm at most
// tol * scale and the finite-difference gradient at most 10 * tol * scale,
// where scale = max(1, |objective value|). Degenerate-eigenvalue cases are
// recorded, not failed.
ReportRecord critical_point_check(const KalmanProblem& prob, const ObjectiveSpec& spec,
                                  double tol);

// Probes num_directions random unit-max-norm directions at every epsilon and
// records the worst margin objective(K* + eps D) - objective(K*).
ReportRecord local_min_probe(const KalmanProblem& prob, const ObjectiveSpec& spec,
                             const ProbeConfig& cfg);

struct GridResult {
  GainMatrix argmin;
  double value{0.0};
  std::uint64_t flat_index{0};
  double center_value{0.0};  // value at the grid point nearest the optimal gain
};

// Exhaustive evaluation of several objectives over a uniform gain grid
// centered at the optimal gain, one posterior evaluation per point. Ties break
// toward the lowest flattened index. Throws GridTooLarge when the gain has
// more than four entries.
std::vector<GridResult> grid_scan(const KalmanProblem& prob,
                                  const std::vector<ObjectiveSpec>& specs,
                                  double half_width, std::size_t points_per_axis);

GridResult grid_oracle(const KalmanProblem& prob, const ObjectiveSpec& spec,
                       double half_width, std::size_t points_per_axis);

// Checks P_K - P_{K*} == (K - K*) S (K - K*)^T within tol * max|P| and that
// the gap is PSD.
ReportRecord loewner_identity_check(const KalmanProblem& prob, const GainMatrix& gain,
                                    double tol);

// Checks (|Phi(P_K, lambda)| - |lambda|^n) / |lambda|^{n-1} against the trace
// of P_K for a probe point far left of the spectrum.
ReportRecord trace_limit_check(const KalmanProblem& prob, const GainMatrix& gain,
                               double lambda_probe, double tol);

// Runs the local-min probe on every coefficient magnitude; asserts nonnegative
// margins for even indices and only logs odd ones.
std::vector<ReportRecord> coefficient_parity_study(const KalmanProblem& prob,
                                                   const ProbeConfig& cfg);

// The full certification suite; never aborts on a single failing record.
VerificationReport run_suite(const KalmanProblem& prob, const ProbeConfig& cfg,
                             bool include_grid = true);

// Probe values left of, between, and right of the spectrum, kept a guard
// distance away from every eigenvalue.
std::vector<double> sample_lambdas_outside_spectrum(const std::vector<double>& eigenvalues);

// Random polynomial in the elementary symmetric basis: up to three terms,
// positive coefficients, exponents at most two.
SymmetricPolySpec random_symmetric_poly(std::size_t n, Rng& rng);

// The objective list exercised by the critical-point records: Trace, Det,
// SmallestEig, LogCharMag at the sampled probe points, every coefficient
// magnitude, every elementary symmetric polynomial, the coefficient sum, and
// three random symmetric polynomials.
std::vector<ObjectiveSpec> critical_point_catalog(const std::vector<double>& optimum_eigenvalues,
                                                  std::size_t n, Rng& sympoly_rng);

// Random gain with unit-scaled entries around the optimal gain's magnitude.
GainMatrix random_gain(std::size_t n, std::size_t m, double scale, Rng& rng);

// Random direction with max-norm one.
Matrix random_unit_direction(std::size_t n, std::size_t m, Rng& rng);

// Random non-optimal gain for finite-difference comparisons. Rejection-samples
// so the posterior spectrum at the gain keeps the probe lambdas and the
// smallest-eigenvalue gap clear of the finite-difference stencil.
GainMatrix sample_fd_test_gain(const KalmanProblem& prob,
                               const std::vector<double>& avoid_lambdas, double scale,
                               Rng& rng);

// One line per record, stable field order, 17 significant digits.
std::string build_report_text(const VerificationReport& report);

// Human-readable table.
std::string render_report_table(const VerificationReport& report);

void write_report_file(const std::string& path, const VerificationReport& report);

}  // namespace gaincert
