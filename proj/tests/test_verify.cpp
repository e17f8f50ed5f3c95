#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "gaincert/errors.hpp"
#include "gaincert/verify.hpp"
#include "test_support.hpp"

using namespace gaincert;
using gaincert::testing::make_problem;
using gaincert::testing::mat;
using gaincert::testing::scalar_problem;

TEST_CASE("finite differences on the scalar trace") {
  const Matrix g =
      finite_diff_grad(scalar_problem(), mat(1, 1, {0.0}), ObjectiveSpec::trace(), ProbeConfig{});
  CHECK(g(0, 0) == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("critical point checks pass on closed-form and random instances") {
  CHECK(critical_point_check(scalar_problem(), ObjectiveSpec::trace(), 1e-8).pass);

  const KalmanProblem prob = make_problem(3, 2, 171);
  CHECK(critical_point_check(prob, ObjectiveSpec::log_char_mag(-1.0), 1e-8).pass);

  Rng rng(9);
  const SymmetricPolySpec poly = random_symmetric_poly(3, rng);
  CHECK(critical_point_check(prob, ObjectiveSpec::symmetric_poly(poly), 1e-7).pass);
}

TEST_CASE("local minimum probe margins on the scalar quadratic") {
  ProbeConfig cfg;
  cfg.num_directions = 10;
  cfg.epsilons = {0.1};
  const ReportRecord rec = local_min_probe(scalar_problem(), ObjectiveSpec::trace(), cfg);
  CHECK(rec.pass);
  // trace objective is 0.5 + 2 (K - 0.5)^2, so every probe margin is 2 eps^2
  CHECK(rec.worst_margin == doctest::Approx(0.02).epsilon(1e-9));
}

TEST_CASE("local minimum probes on a random instance") {
  const KalmanProblem prob = make_problem(3, 2, 29);
  ProbeConfig cfg;
  cfg.num_directions = 40;
  CHECK(local_min_probe(prob, ObjectiveSpec::smallest_eig(), cfg).pass);

  const GainMatrix k = optimal_gain(prob);
  const Spectrum s = sym_eigen(posterior_cov(prob, k));
  const double lam1 = s.eigenvalues.front();
  CHECK(local_min_probe(prob, ObjectiveSpec::char_mag(0.5 * lam1), cfg).pass);
}

TEST_CASE("probe config validation") {
  ProbeConfig bad;
  bad.epsilons = {0.1, 0.01};
  CHECK_THROWS_AS(local_min_probe(scalar_problem(), ObjectiveSpec::trace(), bad),
                  std::invalid_argument);
  bad.epsilons = {-0.1};
  CHECK_THROWS_AS(local_min_probe(scalar_problem(), ObjectiveSpec::trace(), bad),
                  std::invalid_argument);
  bad.epsilons = {};
  CHECK_THROWS_AS(local_min_probe(scalar_problem(), ObjectiveSpec::trace(), bad),
                  std::invalid_argument);
}

TEST_CASE("grid oracle finds the scalar optimum exactly") {
  const GridResult trace_result =
      grid_oracle(scalar_problem(), ObjectiveSpec::trace(), 1.0, 2001);
  CHECK(trace_result.argmin(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(trace_result.value == doctest::Approx(0.5).epsilon(1e-12));

  const GridResult det_result = grid_oracle(scalar_problem(), ObjectiveSpec::det(), 1.0, 2001);
  CHECK(det_result.flat_index == trace_result.flat_index);
}

TEST_CASE("grid argmin stays within one cell on a 2x1 instance") {
  const KalmanProblem prob = make_problem(2, 1, 3131);
  const GainMatrix k = optimal_gain(prob);
  const double half_width = 2.0 * max_norm(k) + 0.5;
  const double spacing = 2.0 * half_width / 40.0;
  const GridResult r = grid_oracle(prob, ObjectiveSpec::char_mag(0.0), half_width, 41);
  CHECK(max_norm(r.argmin - k) <= spacing * (1.0 + 1e-9));
}

TEST_CASE("grid refuses more than four gain entries") {
  const KalmanProblem prob = make_problem(3, 2, 5);
  CHECK_THROWS_AS(grid_oracle(prob, ObjectiveSpec::trace(), 1.0, 11), GridTooLarge);
}

TEST_CASE("Loewner identity check") {
  const KalmanProblem prob = scalar_problem();
  CHECK(loewner_identity_check(prob, mat(1, 1, {0.5}), 1e-9).pass);
  const ReportRecord rec = loewner_identity_check(prob, mat(1, 1, {0.6}), 1e-9);
  CHECK(rec.pass);
  CHECK(rec.value <= 1e-15);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const KalmanProblem p = make_problem(1 + seed % 8, 1 + (seed / 2) % 8, 17000 + seed);
    Rng rng(seed);
    const GainMatrix k =
        random_gain(p.state_dim(), p.obs_dim(), 0.5 * (1.0 + max_norm(optimal_gain(p))), rng);
    CHECK(loewner_identity_check(p, k, 1e-9).pass);
  }
}

TEST_CASE("trace limit probe") {
  // degree 1: the expression collapses to the posterior variance exactly
  const ReportRecord scalar_rec =
      trace_limit_check(scalar_problem(), mat(1, 1, {0.5}), -1e6, 1e-3);
  CHECK(scalar_rec.pass);
  CHECK(scalar_rec.value == doctest::Approx(0.5).epsilon(1e-12));

  // pinned spectrum {1, 2}: (|Phi| - lambda^2)/|lambda| = 3 + 2/1e6
  const KalmanProblem pinned(SpdMatrix(SymmetricMatrix::from_diag({1.0, 2.0})),
                             SpdMatrix(SymmetricMatrix(mat(1, 1, {1.0}))), Matrix(1, 2, 0.0));
  const ReportRecord rec = trace_limit_check(pinned, Matrix(2, 1, 0.0), -1e6, 1e-3);
  CHECK(rec.pass);
  CHECK(rec.value == doctest::Approx(3.0 + 2e-6).epsilon(1e-12));

  CHECK_THROWS_AS(trace_limit_check(pinned, Matrix(2, 1, 0.0), 1e6, 1e-3),
                  std::invalid_argument);
  CHECK_THROWS_AS(trace_limit_check(pinned, Matrix(2, 1, 0.0), -1e308, 1e-3), OverflowRisk);
}

TEST_CASE("coefficient parity study asserts even indices only") {
  const KalmanProblem prob = make_problem(2, 1, 808);
  ProbeConfig cfg;
  cfg.num_directions = 30;
  const std::vector<ReportRecord> recs = coefficient_parity_study(prob, cfg);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].asserted);
  CHECK(recs[0].pass);  // |a_0| is the determinant, minimized at the optimum
  CHECK_FALSE(recs[1].asserted);
}

TEST_CASE("full suite passes on hand and seeded instances") {
  ProbeConfig cfg;
  cfg.num_directions = 25;

  const VerificationReport scalar_report = run_suite(scalar_problem(), cfg);
  CHECK(scalar_report.all_asserted_pass());

  const VerificationReport seeded = run_suite(make_problem(3, 2, 42), cfg);
  CHECK(seeded.all_asserted_pass());

  // zero measurement operator: the optimum is the zero gain and the posterior
  // equals the prior
  const KalmanProblem degenerate(SpdMatrix(SymmetricMatrix::from_diag({1.0, 3.0})),
                                 SpdMatrix(SymmetricMatrix(mat(2, 2, {2, 0, 0, 5}))),
                                 Matrix(2, 2, 0.0));
  const VerificationReport zero_h = run_suite(degenerate, cfg);
  CHECK(zero_h.all_asserted_pass());
  CHECK(max_norm(optimal_gain(degenerate)) == 0.0);
}

TEST_CASE("suite reports are byte-identical across runs") {
  ProbeConfig cfg;
  cfg.num_directions = 15;
  cfg.seed = 77;
  const KalmanProblem prob = make_problem(2, 2, 1234);
  const std::string a = build_report_text(run_suite(prob, cfg));
  const std::string b = build_report_text(run_suite(prob, cfg));
  CHECK(a == b);
  CHECK(a.find("overall pass=1") != std::string::npos);
}

TEST_CASE("failing records name the offending probe") {
  // A non-optimal "optimum" cannot happen through the public path, so check
  // the bookkeeping instead: negative margins are reported with direction,
  // epsilon and seed when an objective is probed around a non-minimizing
  // point. SmallestEig maximization direction: use -Trace by probing CharMag
  // above the spectrum where the optimum is a maximum along some directions.
  const KalmanProblem prob = scalar_problem();
  ProbeConfig cfg;
  cfg.num_directions = 50;
  cfg.seed = 3;
  // |Phi(lambda)| with lambda above the spectrum is maximized, not minimized,
  // at the optimal gain, so margins go negative and the record must replay.
  const ReportRecord rec = local_min_probe(prob, ObjectiveSpec::char_mag(10.0), cfg);
  CHECK_FALSE(rec.pass);
  CHECK(rec.note.find("direction") != std::string::npos);
  CHECK(rec.note.find("seed 3") != std::string::npos);
}
