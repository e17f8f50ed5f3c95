#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gaincert/errors.hpp"
#include "gaincert/kalman.hpp"
#include "gaincert/objectives.hpp"
#include "gaincert/polynomial.hpp"
#include "gaincert/problem_io.hpp"
#include "gaincert/random.hpp"
#include "gaincert/spectral.hpp"
#include "gaincert/verify.hpp"

namespace {

using namespace gaincert;

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string fmt17(double v) { return fmt(v, "%.17g"); }

void print_matrix(const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::string line = " ";
    for (std::size_t j = 0; j < m.cols(); ++j) line += " " + fmt(m(i, j));
    std::puts(line.c_str());
  }
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError(what + ": trailing characters in '" + s + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError(what + ": cannot parse number '" + s + "'");
  }
}

std::size_t parse_index(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size() || v < 0) throw ParseError(what + ": expected a nonnegative integer");
    return static_cast<std::size_t>(v);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError(what + ": cannot parse integer '" + s + "'");
  }
}

// "lo,hi,count" -> count values linearly spaced from lo to hi inclusive.
std::vector<double> parse_epsilon_range(const std::string& s, bool require_positive) {
  const std::vector<std::string> parts = split_csv(s);
  if (parts.size() != 3) throw ParseError("--epsilons must be \"lo,hi,count\"");
  const double lo = parse_double(parts[0], "--epsilons lo");
  const double hi = parse_double(parts[1], "--epsilons hi");
  const std::size_t count = parse_index(parts[2], "--epsilons count");
  if (count < 2) throw ParseError("--epsilons count must be at least 2");
  if (lo >= hi) throw ParseError("--epsilons requires lo < hi");
  if (require_positive && lo <= 0.0) {
    throw ParseError("--epsilons for verify must be positive");
  }
  std::vector<double> out(count);
  for (std::size_t t = 0; t < count; ++t) {
    out[t] = lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(count - 1);
  }
  return out;
}

ObjectiveSpec parse_objective(const std::string& token, std::size_t n) {
  const std::size_t colon = token.find(':');
  const std::string name = token.substr(0, colon);
  const std::string param =
      colon == std::string::npos ? std::string() : token.substr(colon + 1);
  auto need_param = [&](const char* what) {
    if (param.empty()) throw ParseError("--objective " + name + " needs a parameter: " + what);
  };
  if (name == "trace") return ObjectiveSpec::trace();
  if (name == "det") return ObjectiveSpec::det();
  if (name == "lmin") return ObjectiveSpec::smallest_eig();
  if (name == "coeffsum") return ObjectiveSpec::coeff_abs_sum();
  if (name == "charmag") {
    need_param("lambda");
    return ObjectiveSpec::char_mag(parse_double(param, "--objective charmag"));
  }
  if (name == "logcharmag") {
    need_param("lambda");
    return ObjectiveSpec::log_char_mag(parse_double(param, "--objective logcharmag"));
  }
  if (name == "coeff") {
    need_param("index");
    return ObjectiveSpec::coefficient_mag(parse_index(param, "--objective coeff"));
  }
  if (name == "esym") {
    need_param("index");
    return ObjectiveSpec::elem_sym(parse_index(param, "--objective esym"));
  }
  if (name == "sympoly-file") {
    need_param("path");
    return ObjectiveSpec::symmetric_poly(load_sympoly_file(param, n));
  }
  throw ParseError("unknown objective '" + name +
                   "'; expected trace, det, lmin, charmag, logcharmag, coeff, esym, "
                   "coeffsum or sympoly-file");
}

int cmd_gain(const std::string& problem_path, const std::string& output_path) {
  const KalmanProblem prob = realize_problem(load_problem_file(problem_path));
  const GainMatrix k = optimal_gain(prob);
  const SymmetricMatrix posterior = posterior_cov(prob, k);
  const Spectrum spectrum = sym_eigen(posterior);
  const CharPolyCoeffs coeffs = char_poly_from_spectrum(spectrum);

  double det = 1.0;
  for (double v : spectrum.eigenvalues) det *= v;

  std::printf("n = %zu  m = %zu\n", prob.state_dim(), prob.obs_dim());
  std::puts("optimal gain K* =");
  print_matrix(k);
  std::puts("posterior covariance at K* =");
  print_matrix(posterior.mat());
  std::printf("trace = %s\n", fmt(trace(posterior.mat())).c_str());
  std::printf("det = %s\n", fmt(det).c_str());
  std::string eigs;
  for (double v : spectrum.eigenvalues) eigs += (eigs.empty() ? "" : " ") + fmt(v);
  std::printf("eigenvalues = %s\n", eigs.c_str());
  std::string cs;
  for (double a : coeffs.coeffs) cs += (cs.empty() ? "" : " ") + fmt(a);
  std::printf("coefficients a_0..a_n = %s\n", cs.c_str());

  if (!output_path.empty()) {
    save_problem_file(output_path, prob);
    std::printf("problem written to %s\n", output_path.c_str());
  }
  return 0;
}

int cmd_verify(const std::string& problem_path, std::uint64_t seed,
               std::size_t directions, const std::string& epsilons, bool grid,
               const std::string& report_path) {
  const KalmanProblem prob = realize_problem(load_problem_file(problem_path));
  ProbeConfig cfg;
  cfg.seed = seed;
  cfg.num_directions = directions;
  cfg.epsilons = parse_epsilon_range(epsilons, true);

  const VerificationReport report = run_suite(prob, cfg, grid);
  std::fputs(render_report_table(report).c_str(), stdout);
  if (!report_path.empty()) write_report_file(report_path, report);
  return report.all_asserted_pass() ? 0 : 1;
}

int cmd_sweep(const std::string& problem_path, const std::string& objective,
              const std::string& direction, const std::string& epsilons,
              std::uint64_t seed, const std::string& output_path) {
  const KalmanProblem prob = realize_problem(load_problem_file(problem_path));
  const std::size_t n = prob.state_dim();
  const std::size_t m = prob.obs_dim();
  const ObjectiveSpec spec = parse_objective(objective, n);
  const std::vector<double> eps = parse_epsilon_range(epsilons, false);

  Matrix dir(n, m, 0.0);
  if (direction == "random") {
    Rng rng = Rng(seed).split(0x5eedu);
    dir = random_unit_direction(n, m, rng);
  } else {
    const std::vector<std::string> parts = split_csv(direction);
    if (parts.size() != n * m) {
      throw ParseError("--direction needs " + std::to_string(n * m) +
                       " comma-separated entries (row-major) or \"random\"");
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      dir.entries()[i] = parse_double(parts[i], "--direction");
    }
  }

  const GainMatrix k_opt = optimal_gain(prob);
  const double at_opt = eval_objective(prob, k_opt, spec);

  std::ofstream f(output_path, std::ios::binary);
  if (!f) throw IoError("cannot open output file for writing: " + output_path);
  f << "epsilon,objective_value,objective_value_at_kstar,margin\n";
  for (double e : eps) {
    const double value = eval_objective(prob, k_opt + e * dir, spec);
    f << fmt17(e) << ',' << fmt17(value) << ',' << fmt17(at_opt) << ','
      << fmt17(value - at_opt) << '\n';
  }
  if (!f) throw IoError("failed while writing output file: " + output_path);
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Kalman gain optimality certification for spectral uncertainty measures"};
  app.require_subcommand(1);

  std::string problem_path;
  std::string output_path;
  std::string report_path;
  std::string objective;
  std::string direction = "random";
  std::string epsilons = "1e-2,1e-1,2";
  std::string sweep_epsilons = "-1,1,41";
  std::uint64_t seed = 0;
  std::size_t directions = 100;
  bool grid = false;

  CLI::App* gain = app.add_subcommand("gain", "Print the optimal gain and posterior summary");
  gain->add_option("problem", problem_path, "problem file")->required();
  gain->add_option("--output", output_path, "write the resolved problem in file format");

  CLI::App* verify = app.add_subcommand("verify", "Run the certification suite");
  verify->add_option("problem", problem_path, "problem file")->required();
  verify->add_option("--seed", seed, "probe seed (default 0)");
  verify->add_option("--directions", directions, "perturbation directions (default 100)");
  verify->add_option("--epsilons", epsilons,
                     "perturbation sizes \"lo,hi,count\" (default \"1e-2,1e-1,2\")");
  verify->add_flag("--grid", grid, "include the brute-force grid oracle (gains up to 4 entries)");
  verify->add_option("--report", report_path, "also write a machine-readable report");

  CLI::App* sweep = app.add_subcommand("sweep", "Emit a CSV objective landscape along a direction");
  sweep->add_option("problem", problem_path, "problem file")->required();
  sweep->add_option("--objective", objective,
                    "objective NAME[:PARAM]; one of trace, det, lmin, charmag:L, logcharmag:L, "
                    "coeff:I, esym:K, coeffsum, sympoly-file:PATH")
      ->required();
  sweep->add_option("--direction", direction,
                    "\"random\" or n*m comma-separated entries (default random)");
  sweep->add_option("--epsilons", sweep_epsilons,
                    "sweep range \"lo,hi,count\" (default \"-1,1,41\")");
  sweep->add_option("--seed", seed, "direction seed (default 0)");
  sweep->add_option("--output", output_path, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (app.got_subcommand(gain)) return cmd_gain(problem_path, output_path);
  if (app.got_subcommand(verify)) {
    return cmd_verify(problem_path, seed, directions, epsilons, grid, report_path);
  }
  return cmd_sweep(problem_path, objective, direction, sweep_epsilons, seed, output_path);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gaincert::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gaincert::NotPositiveDefinite& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const gaincert::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
