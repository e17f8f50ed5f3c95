#include "gaincert/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "gaincert/errors.hpp"
#include "gaincert/polynomial.hpp"
#include "gaincert/spectral.hpp"

namespace gaincert {

namespace {

void validate_probe_config(const ProbeConfig& cfg) {
  if (cfg.num_directions == 0) {
    throw std::invalid_argument("ProbeConfig: num_directions must be positive");
  }
  if (cfg.epsilons.empty()) throw std::invalid_argument("ProbeConfig: epsilons empty");
  double prev = 0.0;
  for (double e : cfg.epsilons) {
    if (e <= 0.0) throw std::invalid_argument("ProbeConfig: epsilons must be positive");
    if (e < prev) throw std::invalid_argument("ProbeConfig: epsilons must be ascending");
    prev = e;
  }
  if (cfg.fd_step_scale <= 0.0) {
    throw std::invalid_argument("ProbeConfig: fd_step_scale must be positive");
  }
}

std::uint64_t djb2(const std::string& s) {
  std::uint64_t h = 5381;
  for (unsigned char c : s) h = h * 33 + c;
  return h;
}

std::string fmt17(double v) {
  if (std::isnan(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt4(double v) {
  if (std::isnan(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double objective_scale(double value_at_optimum) {
  return std::max(1.0, std::abs(value_at_optimum));
}

}  // namespace

Matrix random_unit_direction(std::size_t n, std::size_t m, Rng& rng) {
  Matrix d(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) d(i, j) = 2.0 * rng.next_double() - 1.0;
  }
  const double norm = max_norm(d);
  if (norm < 1e-12) {
    d(0, 0) = 1.0;
    return d;
  }
  return (1.0 / norm) * d;
}

const char* claim_name(ClaimKind kind) {
  switch (kind) {
    case ClaimKind::kCriticalPoint:
      return "CriticalPoint";
    case ClaimKind::kLocalMin:
      return "LocalMin";
    case ClaimKind::kGlobalMinGrid:
      return "GlobalMinGrid";
    case ClaimKind::kLoewnerIdentity:
      return "LoewnerIdentity";
    case ClaimKind::kTraceLimit:
      return "TraceLimit";
    case ClaimKind::kCoeffEvenMin:
      return "CoeffEvenMin";
  }
  return "?";
}

bool VerificationReport::all_asserted_pass() const {
  for (const ReportRecord& r : records) {
    if (r.asserted && !r.pass) return false;
  }
  return true;
}

std::size_t VerificationReport::asserted_count() const {
  std::size_t c = 0;
  for (const ReportRecord& r : records) c += r.asserted ? 1 : 0;
  return c;
}

std::size_t VerificationReport::failed_count() const {
  std::size_t c = 0;
  for (const ReportRecord& r : records) c += (r.asserted && !r.pass) ? 1 : 0;
  return c;
}

Matrix finite_diff_grad(const KalmanProblem& prob, const GainMatrix& gain,
                        const ObjectiveSpec& spec, const ProbeConfig& cfg) {
  if (cfg.fd_step_scale <= 0.0) {
    throw std::invalid_argument("finite_diff_grad: fd_step_scale must be positive");
  }
  const std::size_t n = gain.rows();
  const std::size_t m = gain.cols();
  Matrix out(n, m);
  Matrix k = gain;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double orig = k(i, j);
      const double h = cfg.fd_step_scale * std::max(1.0, std::abs(orig));
      k(i, j) = orig + h;
      const double up = eval_objective(prob, k, spec);
      k(i, j) = orig - h;
      const double down = eval_objective(prob, k, spec);
      k(i, j) = orig;
      out(i, j) = (up - down) / (2.0 * h);
    }
  }
  return out;
}

ReportRecord critical_point_check(const KalmanProblem& prob, const ObjectiveSpec& spec,
                                  double tol) {
  ReportRecord rec;
  rec.claim = ClaimKind::kCriticalPoint;
  rec.objective = spec.name();
  const GainMatrix k = optimal_gain(prob);
  try {
    rec.value = eval_objective(prob, k, spec);
    const double scale = objective_scale(rec.value);
    rec.grad_max = max_norm(objective_grad_gain(prob, k, spec));
    rec.fd_grad_max = max_norm(finite_diff_grad(prob, k, spec, ProbeConfig{}));
    rec.pass = rec.grad_max <= tol * scale && rec.fd_grad_max <= 10.0 * tol * scale;
    if (!rec.pass) rec.note = "gradient above threshold at the optimal gain";
  } catch (const DegenerateEigenvalue&) {
    rec.pass = true;
    rec.note = "degenerate smallest eigenvalue: gradient undefined, recorded only";
  } catch (const EvalAtEigenvalue&) {
    rec.pass = true;
    rec.note = "lambda at an eigenvalue: recorded only";
  }
  return rec;
}

ReportRecord local_min_probe(const KalmanProblem& prob, const ObjectiveSpec& spec,
                             const ProbeConfig& cfg) {
  validate_probe_config(cfg);
  ReportRecord rec;
  rec.claim = ClaimKind::kLocalMin;
  rec.objective = spec.name();

  const GainMatrix k = optimal_gain(prob);
  const std::size_t n = k.rows();
  const std::size_t m = k.cols();
  rec.value = eval_objective(prob, k, spec);
  const double scale = objective_scale(rec.value);

  Rng rng = Rng(cfg.seed).split(djb2("local_min:" + spec.name()));
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_dir = 0;
  double worst_eps = 0.0;
  for (std::size_t d = 0; d < cfg.num_directions; ++d) {
    const Matrix dir = random_unit_direction(n, m, rng);
    for (double eps : cfg.epsilons) {
      const double value = eval_objective(prob, k + eps * dir, spec);
      const double margin = value - rec.value;
      if (margin < worst) {
        worst = margin;
        worst_dir = d;
        worst_eps = eps;
      }
    }
  }
  rec.worst_margin = worst;
  rec.pass = worst >= -1e-12 * scale;
  if (!rec.pass) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "negative margin at direction %zu, epsilon %.17g, seed %llu", worst_dir,
                  worst_eps, static_cast<unsigned long long>(cfg.seed));
    rec.note = buf;
  }
  return rec;
}

namespace {

// Stack-allocated evaluation path for the grid: the cap n*m <= 4 bounds every
// matrix involved by 4x4.
struct SmallPosterior {
  double p[16];
  double r[16];
  double h[16];
  std::size_t n;
  std::size_t m;

  explicit SmallPosterior(const KalmanProblem& prob)
      : n(prob.state_dim()), m(prob.obs_dim()) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) p[i * n + j] = prob.prior(i, j);
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) r[i * m + j] = prob.likelihood(i, j);
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) h[i * n + j] = prob.measurement(i, j);
    }
  }

  // Joseph form on stack buffers; fills pk (n x n, symmetrized).
  void eval(const double* k, double* pk) const {
    double t[16];
    double tp[16];
    double kr[16];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t l = 0; l < m; ++l) sum += k[i * m + l] * h[l * n + j];
        t[i * n + j] = (i == j ? 1.0 : 0.0) - sum;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t l = 0; l < n; ++l) sum += t[i * n + l] * p[l * n + j];
        tp[i * n + j] = sum;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t l = 0; l < n; ++l) sum += tp[i * n + l] * t[j * n + l];
        pk[i * n + j] = sum;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < m; ++l) {
        double sum = 0.0;
        for (std::size_t c = 0; c < m; ++c) sum += k[i * m + c] * r[c * m + l];
        kr[i * m + l] = sum;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t l = 0; l < m; ++l) sum += kr[i * m + l] * k[j * m + l];
        pk[i * n + j] += sum;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = 0.5 * (pk[i * n + j] + pk[j * n + i]);
        pk[i * n + j] = v;
        pk[j * n + i] = v;
      }
    }
  }
};

// Jacobi eigenvalues on a stack buffer, ascending; no eigenvectors.
void small_jacobi_eigenvalues(double* a, std::size_t n, std::vector<double>& out) {
  double norm = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) norm += a[i] * a[i];
  norm = std::sqrt(norm);
  const double threshold = 1e-13 * norm;

  for (std::size_t sweep = 0; sweep < 30; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    }
    if (std::sqrt(2.0 * off) <= threshold) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        a[p * n + p] -= t * apq;
        a[q * n + q] += t * apq;
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a[i * n + p];
          const double aiq = a[i * n + q];
          a[i * n + p] = aip - s * (aiq + tau * aip);
          a[p * n + i] = a[i * n + p];
          a[i * n + q] = aiq + s * (aip - tau * aiq);
          a[q * n + i] = a[i * n + q];
        }
      }
    }
  }
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i * n + i];
  std::sort(out.begin(), out.end());
}

}  // namespace

std::vector<GridResult> grid_scan(const KalmanProblem& prob,
                                  const std::vector<ObjectiveSpec>& specs,
                                  double half_width, std::size_t points_per_axis) {
  const std::size_t n = prob.state_dim();
  const std::size_t m = prob.obs_dim();
  const std::size_t dims = n * m;
  if (dims > 4) {
    throw GridTooLarge("grid_scan: gain has more than four entries");
  }
  if (points_per_axis < 2) {
    throw std::invalid_argument("grid_scan: need at least two points per axis");
  }
  if (half_width <= 0.0) {
    throw std::invalid_argument("grid_scan: half_width must be positive");
  }
  if (specs.empty()) return {};

  const GainMatrix center = optimal_gain(prob);
  const double step = 2.0 * half_width / static_cast<double>(points_per_axis - 1);
  const double mid = static_cast<double>(points_per_axis - 1) / 2.0;
  std::vector<double> axis(points_per_axis);
  for (std::size_t t = 0; t < points_per_axis; ++t) {
    axis[t] = (static_cast<double>(t) - mid) * step;
  }

  const SmallPosterior fast(prob);
  bool need_eigen = false;
  for (const ObjectiveSpec& s : specs) {
    if (s.kind != ObjectiveKind::kTrace) need_eigen = true;
  }

  std::uint64_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) total *= points_per_axis;

  std::uint64_t center_flat = 0;
  for (std::size_t d = 0; d < dims; ++d) {
    center_flat = center_flat * points_per_axis + (points_per_axis - 1) / 2;
  }

  std::vector<std::size_t> digit(dims, 0);
  double k[16];
  double pk[16];
  std::vector<double> eigs;
  std::vector<double> best_value(specs.size(), std::numeric_limits<double>::infinity());
  std::vector<std::uint64_t> best_index(specs.size(), 0);
  std::vector<std::vector<double>> best_gain(specs.size(), std::vector<double>(dims, 0.0));
  std::vector<double> center_value(specs.size(), 0.0);

  for (std::uint64_t flat = 0; flat < total; ++flat) {
    for (std::size_t d = 0; d < dims; ++d) k[d] = center.entries()[d] + axis[digit[d]];
    fast.eval(k, pk);
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += pk[i * n + i];
    if (need_eigen) {
      double work[16];
      for (std::size_t i = 0; i < n * n; ++i) work[i] = pk[i];
      small_jacobi_eigenvalues(work, n, eigs);
    } else {
      eigs.assign(n, 0.0);
    }
    for (std::size_t si = 0; si < specs.size(); ++si) {
      const double v = eval_objective_from(specs[si], tr, eigs);
      if (v < best_value[si]) {
        best_value[si] = v;
        best_index[si] = flat;
        for (std::size_t d = 0; d < dims; ++d) best_gain[si][d] = k[d];
      }
      if (flat == center_flat) center_value[si] = v;
    }
    // odometer increment, last digit fastest
    for (std::size_t d = dims; d-- > 0;) {
      if (++digit[d] < points_per_axis) break;
      digit[d] = 0;
    }
  }

  std::vector<GridResult> out(specs.size());
  for (std::size_t si = 0; si < specs.size(); ++si) {
    out[si].argmin = Matrix(n, m, best_gain[si]);
    out[si].value = best_value[si];
    out[si].flat_index = best_index[si];
    out[si].center_value = center_value[si];
  }
  return out;
}

GridResult grid_oracle(const KalmanProblem& prob, const ObjectiveSpec& spec,
                       double half_width, std::size_t points_per_axis) {
  return grid_scan(prob, {spec}, half_width, points_per_axis).front();
}

ReportRecord loewner_identity_check(const KalmanProblem& prob, const GainMatrix& gain,
                                    double tol) {
  ReportRecord rec;
  rec.claim = ClaimKind::kLoewnerIdentity;
  rec.objective = "LoewnerGap";

  const SymmetricMatrix gap = loewner_gap(prob, gain);
  const Matrix diff = gain - optimal_gain(prob);
  const SpdMatrix s = innovation_cov(prob);
  const SymmetricMatrix reference(diff * s.sym().mat() * transpose(diff));
  const double resid = max_norm(gap.mat() - reference.mat());
  const double p_norm = max_norm(prob.prior.sym().mat());

  rec.value = resid;
  const Spectrum gap_spectrum = sym_eigen(gap);
  rec.worst_margin = gap_spectrum.eigenvalues.front();
  const bool identity_ok = resid <= tol * p_norm;
  const bool psd_ok = rec.worst_margin >= -tol * max_norm(gap.mat());
  rec.pass = identity_ok && psd_ok;
  if (!rec.pass) {
    rec.note = identity_ok ? "gap is not PSD" : "identity residual above threshold";
  }
  return rec;
}

ReportRecord trace_limit_check(const KalmanProblem& prob, const GainMatrix& gain,
                               double lambda_probe, double tol) {
  if (lambda_probe >= 0.0) {
    throw std::invalid_argument("trace_limit_check: probe point must be negative");
  }
  const std::size_t n = prob.state_dim();
  const double abs_probe = std::abs(lambda_probe);
  if (static_cast<double>(n) * std::log10(abs_probe) > 300.0) {
    throw OverflowRisk("trace_limit_check: |lambda|^n exceeds the floating-point range");
  }

  ReportRecord rec;
  rec.claim = ClaimKind::kTraceLimit;
  rec.objective = "TraceLimit";

  const SymmetricMatrix cov = posterior_cov(prob, gain);
  const Spectrum s = sym_eigen(cov);
  const CharPolyCoeffs coeffs = char_poly_from_spectrum(s);
  const double mag = std::abs(eval_poly(coeffs, lambda_probe));
  const double expr =
      (mag - std::pow(abs_probe, static_cast<double>(n))) /
      std::pow(abs_probe, static_cast<double>(n - 1));
  const double tr = trace(cov.mat());

  rec.value = expr;
  rec.worst_margin = expr - tr;
  rec.pass = std::abs(expr - tr) <= tol * tr;
  if (!rec.pass) {
    rec.note = "limit expression does not match the trace (trace " + fmt17(tr) + ")";
  }
  return rec;
}

std::vector<ReportRecord> coefficient_parity_study(const KalmanProblem& prob,
                                                   const ProbeConfig& cfg) {
  std::vector<ReportRecord> out;
  const std::size_t n = prob.state_dim();
  for (std::size_t i = 0; i < n; ++i) {
    ReportRecord rec = local_min_probe(prob, ObjectiveSpec::coefficient_mag(i), cfg);
    rec.claim = ClaimKind::kCoeffEvenMin;
    if (i % 2 == 1) {
      rec.asserted = false;
      rec.note = rec.note.empty() ? "odd index: margin logged, not asserted"
                                  : rec.note + "; odd index: logged, not asserted";
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<double> sample_lambdas_outside_spectrum(const std::vector<double>& eigenvalues) {
  const double lam1 = eigenvalues.front();
  const double lamn = eigenvalues.back();
  const double guard = 1e-6 * lamn;

  std::vector<double> candidates;
  candidates.push_back(0.5 * lam1);
  candidates.push_back(0.9 * lam1);
  candidates.push_back(-lamn);
  for (std::size_t i = 0; i + 1 < eigenvalues.size(); ++i) {
    const double gap = eigenvalues[i + 1] - eigenvalues[i];
    if (gap > 0.05 * lamn) {
      candidates.push_back(0.5 * (eigenvalues[i] + eigenvalues[i + 1]));
    }
  }
  candidates.push_back(lamn + 1.0);

  std::vector<double> out;
  for (double c : candidates) {
    double dist = std::numeric_limits<double>::infinity();
    for (double e : eigenvalues) dist = std::min(dist, std::abs(c - e));
    if (dist >= guard) out.push_back(c);
  }
  return out;
}

SymmetricPolySpec random_symmetric_poly(std::size_t n, Rng& rng) {
  SymmetricPolySpec poly;
  const std::size_t terms = 1 + rng.next_u64() % 3;
  for (std::size_t t = 0; t < terms; ++t) {
    SymPolyTerm term;
    term.coefficient = 0.5 + 1.5 * rng.next_double();
    term.exponents.resize(n, 0);
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
      const double u = rng.next_double();
      term.exponents[k] = u < 0.6 ? 0 : (u < 0.9 ? 1 : 2);
      any = any || term.exponents[k] > 0;
    }
    if (!any) term.exponents[rng.next_u64() % n] = 1;
    poly.terms.push_back(std::move(term));
  }
  return poly;
}

std::vector<ObjectiveSpec> critical_point_catalog(const std::vector<double>& optimum_eigenvalues,
                                                  std::size_t n, Rng& sympoly_rng) {
  std::vector<ObjectiveSpec> catalog;
  catalog.push_back(ObjectiveSpec::trace());
  catalog.push_back(ObjectiveSpec::det());
  catalog.push_back(ObjectiveSpec::smallest_eig());
  for (double lam : sample_lambdas_outside_spectrum(optimum_eigenvalues)) {
    catalog.push_back(ObjectiveSpec::log_char_mag(lam));
  }
  for (std::size_t i = 0; i < n; ++i) catalog.push_back(ObjectiveSpec::coefficient_mag(i));
  for (std::size_t k = 1; k <= n; ++k) catalog.push_back(ObjectiveSpec::elem_sym(k));
  catalog.push_back(ObjectiveSpec::coeff_abs_sum());
  for (int t = 0; t < 3; ++t) {
    catalog.push_back(ObjectiveSpec::symmetric_poly(random_symmetric_poly(n, sympoly_rng)));
  }
  return catalog;
}

GainMatrix random_gain(std::size_t n, std::size_t m, double scale, Rng& rng) {
  Matrix k(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) k(i, j) = scale * (2.0 * rng.next_double() - 1.0);
  }
  return k;
}

GainMatrix sample_fd_test_gain(const KalmanProblem& prob,
                               const std::vector<double>& avoid_lambdas, double max_scale,
                               Rng& rng) {
  const std::size_t n = prob.state_dim();
  const std::size_t m = prob.obs_dim();
  const GainMatrix k_opt = optimal_gain(prob);

  // Test gains are offsets from the optimum. Eigenvalues only move up with
  // the offset (the posterior gap is PSD), so a probe point is threatened by
  // the nearest eigenvalue below it; cap the expected eigenvalue travel,
  // roughly scale^2 tr(S) / 3, at a quarter of the smallest below-side
  // clearance.
  double scale = max_scale;
  {
    const Spectrum s_opt = sym_eigen(posterior_cov(prob, k_opt));
    double clear_min = std::numeric_limits<double>::infinity();
    for (double lam : avoid_lambdas) {
      double below = -std::numeric_limits<double>::infinity();
      for (double e : s_opt.eigenvalues) {
        if (e < lam) below = std::max(below, e);
      }
      if (below > -std::numeric_limits<double>::infinity()) {
        clear_min = std::min(clear_min, lam - below);
      }
    }
    if (std::isfinite(clear_min)) {
      const double travel = std::max(trace(innovation_cov(prob).sym().mat()) / 3.0, 1e-300);
      scale = std::min(scale, std::sqrt(0.25 * clear_min / travel));
      scale = std::max(scale, 1e-4);
    }
  }

  GainMatrix best(n, m);
  double best_score = -1.0;
  for (int attempt = 0; attempt < 128; ++attempt) {
    const GainMatrix k = k_opt + random_gain(n, m, scale, rng);
    const Spectrum s = sym_eigen(posterior_cov(prob, k));
    const std::vector<double>& eigs = s.eigenvalues;
    const Matrix residual = gain_residual(prob, k);
    const double step = 1e-6 * std::max(1.0, max_norm(k));

    // Per-eigenvalue stencil velocity: lambda_i moves at most
    // 2 max|v_i| max|G^T v_i| per unit step in any single gain entry.
    std::vector<double> velocity(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double v_max = 0.0;
      for (std::size_t r = 0; r < n; ++r) v_max = std::max(v_max, std::abs(s.eigenvectors(r, i)));
      double w_max = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double w = 0.0;
        for (std::size_t r = 0; r < n; ++r) w += residual(r, j) * s.eigenvectors(r, i);
        w_max = std::max(w_max, std::abs(w));
      }
      velocity[i] = 2.0 * v_max * w_max;
    }
    const double velocity_bound =
        2.0 * std::sqrt(static_cast<double>(n * m)) * max_norm(residual);

    // Objectives with a pole at a probe point (log char magnitude) pick up a
    // third-order term (h v_i / d)^2 / 3 from the nearest eigenvalue; demand
    // a predicted relative error two orders below the comparison tolerance.
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (double lam : avoid_lambdas) {
      double predicted = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::max(std::abs(lam - eigs[i]), 1e-300);
        const double r = step * velocity[i] / d;
        predicted = std::max(predicted, r * r / 3.0);
      }
      worst_ratio = std::min(worst_ratio, 1e-7 / std::max(predicted, 1e-300));
    }

    // The smallest-eigenvalue gradient 2 v1 (G^T v1) can be nearly orthogonal
    // to G while its stencil still carries cross-eigenvector curvature
    // h^2 nu^3 / (6 gap^2); that error must stay far below the gradient.
    if (n >= 2) {
      const double gap = std::max(eigs[1] - eigs[0], 1e-300);
      const double predicted =
          step * step * velocity_bound * velocity_bound * velocity_bound / (6.0 * gap * gap);
      const double allowed = 1e-7 * std::max(velocity[0], 1e-300);
      worst_ratio = std::min(worst_ratio, allowed / std::max(predicted, 1e-300));
    }

    if (worst_ratio >= 1.0) return k;
    if (worst_ratio > best_score) {
      best_score = worst_ratio;
      best = k;
    }
  }
  return best;
}

VerificationReport run_suite(const KalmanProblem& prob, const ProbeConfig& cfg,
                             bool include_grid) {
  validate_probe_config(cfg);
  VerificationReport report;
  auto add = [&report](ReportRecord rec) { report.records.push_back(std::move(rec)); };

  const std::size_t n = prob.state_dim();
  const std::size_t m = prob.obs_dim();
  const GainMatrix k_opt = optimal_gain(prob);
  const SymmetricMatrix posterior_opt = posterior_cov(prob, k_opt);
  const Spectrum spectrum_opt = sym_eigen(posterior_opt);
  const double lam1 = spectrum_opt.eigenvalues.front();
  const double p_norm = max_norm(prob.prior.sym().mat());

  // Gain residual: the defining property of the optimal gain.
  {
    ReportRecord rec;
    rec.claim = ClaimKind::kCriticalPoint;
    rec.objective = "GainResidual";
    const double resid = max_norm(gain_residual(prob, k_opt));
    const double scale = max_norm(prob.prior.sym().mat() * transpose(prob.measurement));
    rec.value = resid;
    rec.pass = resid <= 1e-10 * scale || resid == 0.0;
    if (!rec.pass) rec.note = "gain residual above 1e-10 of |P H^T|";
    add(std::move(rec));
  }

  // Joseph form against the short form, valid only at the optimum.
  {
    ReportRecord rec;
    rec.claim = ClaimKind::kLoewnerIdentity;
    rec.objective = "JosephVsStandard";
    const double gap = max_norm(posterior_opt.mat() - posterior_cov_standard(prob).mat());
    rec.value = gap;
    rec.pass = gap <= 1e-10 * p_norm;
    if (!rec.pass) rec.note = "Joseph and standard forms disagree at the optimal gain";
    add(std::move(rec));
  }

  // Loewner identity and PSD gap at sampled gains.
  {
    Rng gains_rng = Rng(cfg.seed).split(djb2("loewner_gains"));
    const double scale = 0.5 * (1.0 + max_norm(k_opt));
    for (int g = 0; g < 5; ++g) {
      const GainMatrix k = random_gain(n, m, scale, gains_rng);
      ReportRecord rec = loewner_identity_check(prob, k, 1e-9);
      rec.objective = "LoewnerGap(sample " + std::to_string(g) + ")";
      add(std::move(rec));
    }
  }

  // Critical point of every objective in the catalog.
  {
    Rng sympoly_rng = Rng(cfg.seed).split(djb2("sympoly"));
    for (const ObjectiveSpec& spec :
         critical_point_catalog(spectrum_opt.eigenvalues, n, sympoly_rng)) {
      add(critical_point_check(prob, spec, 1e-8));
    }
  }

  // Local minimization probes.
  {
    std::vector<ObjectiveSpec> specs{ObjectiveSpec::trace(), ObjectiveSpec::det(),
                                     ObjectiveSpec::smallest_eig()};
    for (double lam : {-lam1, 0.0, 0.5 * lam1, 0.9 * lam1}) {
      specs.push_back(ObjectiveSpec::char_mag(lam));
    }
    specs.push_back(ObjectiveSpec::coeff_abs_sum());
    for (const ObjectiveSpec& spec : specs) add(local_min_probe(prob, spec, cfg));
  }

  // Coefficient parity: even indices asserted, odd logged.
  for (ReportRecord& rec : coefficient_parity_study(prob, cfg)) add(std::move(rec));

  // Far-left probe recovers the trace.
  add(trace_limit_check(prob, k_opt, -1e6, 1e-3));
  {
    Rng gain_rng = Rng(cfg.seed).split(djb2("trace_limit_gain"));
    const GainMatrix k = random_gain(n, m, 0.5 * (1.0 + max_norm(k_opt)), gain_rng);
    ReportRecord rec = trace_limit_check(prob, k, -1e6, 1e-3);
    rec.objective = "TraceLimit(sampled gain)";
    add(std::move(rec));
  }

  // Brute-force grid oracle for small gains.
  if (include_grid && n * m <= 4) {
    const std::vector<ObjectiveSpec> specs{ObjectiveSpec::trace(), ObjectiveSpec::det(),
                                           ObjectiveSpec::smallest_eig(),
                                           ObjectiveSpec::char_mag(0.0)};
    const double half_width = 2.0 * max_norm(k_opt) + 0.5;
    const std::size_t points = 41;
    const double spacing = 2.0 * half_width / static_cast<double>(points - 1);
    const std::vector<GridResult> results = grid_scan(prob, specs, half_width, points);
    for (std::size_t si = 0; si < specs.size(); ++si) {
      ReportRecord rec;
      rec.claim = ClaimKind::kGlobalMinGrid;
      rec.objective = specs[si].name();
      rec.value = results[si].value;
      rec.grid_gap = max_norm(results[si].argmin - k_opt) / spacing;
      const bool within_cell = rec.grid_gap <= 1.0 + 1e-9;
      // A distant argmin whose value ties the center cell still confirms the
      // optimum; the minimizer is just not unique (possible for degenerate
      // operators, e.g. H = 0).
      const double tie_tol = 1e-12 * std::max(1.0, std::abs(results[si].center_value));
      const bool tied = results[si].center_value - results[si].value <= tie_tol;
      rec.pass = within_cell || tied;
      if (!rec.pass) {
        rec.note = "grid argmin is more than one cell away from the optimal gain";
      } else if (!within_cell) {
        rec.note = "argmin value ties the optimum; minimizer not unique along flat directions";
      }
      add(std::move(rec));
    }
  }

  return report;
}

std::string build_report_text(const VerificationReport& report) {
  std::string out;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const ReportRecord& r = report.records[i];
    out += "record=" + std::to_string(i);
    out += " claim=";
    out += claim_name(r.claim);
    out += " objective=" + r.objective;
    out += " value=" + fmt17(r.value);
    out += " grad_max=" + fmt17(r.grad_max);
    out += " fd_grad_max=" + fmt17(r.fd_grad_max);
    out += " margin=" + fmt17(r.worst_margin);
    out += " fd_rel_err=" + fmt17(r.fd_rel_err);
    out += " grid_gap=" + fmt17(r.grid_gap);
    out += " asserted=" + std::string(r.asserted ? "1" : "0");
    out += " pass=" + std::string(r.pass ? "1" : "0");
    out += " note=" + (r.note.empty() ? std::string("-") : r.note);
    out += "\n";
  }
  out += "overall pass=" + std::string(report.all_asserted_pass() ? "1" : "0");
  out += " asserted=" + std::to_string(report.asserted_count());
  out += " failed=" + std::to_string(report.failed_count());
  out += "\n";
  return out;
}

std::string render_report_table(const VerificationReport& report) {
  std::string out;
  char line[512];
  std::snprintf(line, sizeof(line), "%4s  %-15s %-42s %12s %12s %12s %8s  %s\n", "idx", "claim",
                "objective", "value", "grad_max", "margin", "grid", "status");
  out += line;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const ReportRecord& r = report.records[i];
    const char* status = r.asserted ? (r.pass ? "PASS" : "FAIL") : "LOG";
    std::snprintf(line, sizeof(line), "%4zu  %-15s %-42s %12s %12s %12s %8s  %s\n", i,
                  claim_name(r.claim), r.objective.c_str(), fmt4(r.value).c_str(),
                  fmt4(r.grad_max).c_str(), fmt4(r.worst_margin).c_str(),
                  fmt4(r.grid_gap).c_str(), status);
    out += line;
    if (!r.note.empty()) {
      std::snprintf(line, sizeof(line), "      note: %s\n", r.note.c_str());
      out += line;
    }
  }
  std::snprintf(line, sizeof(line), "overall: %s (%zu asserted, %zu failed)\n",
                report.all_asserted_pass() ? "PASS" : "FAIL", report.asserted_count(),
                report.failed_count());
  out += line;
  return out;
}

void write_report_file(const std::string& path, const VerificationReport& report) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open report file for writing: " + path);
  const std::string text = build_report_text(report);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("failed while writing report file: " + path);
}

}  // namespace gaincert
