#include "gaincert/problem_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gaincert/errors.hpp"
#include "gaincert/random.hpp"

namespace gaincert {

namespace {

using nlohmann::json;

std::vector<double> read_matrix_entries(const json& j, const char* key, std::size_t expected) {
  const json& arr = j.at(key);
  if (!arr.is_array()) throw ParseError(std::string(key) + " must be a flat array of numbers");
  if (arr.size() != expected) {
    throw ParseError(std::string(key) + " has " + std::to_string(arr.size()) +
                     " entries, expected " + std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const json& v : arr) {
    if (!v.is_number()) throw ParseError(std::string(key) + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::pair<double, double> read_range(const json& j, const char* key) {
  const json& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number() || !arr[1].is_number()) {
    throw ParseError(std::string(key) + " must be an array [lo, hi]");
  }
  return {arr[0].get<double>(), arr[1].get<double>()};
}

}  // namespace

ProblemFile parse_problem_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("problem file is not valid JSON: ") + e.what());
  }

  ProblemFile out;
  try {
    if (!j.contains("n") || !j.at("n").is_number_unsigned() || j.at("n").get<std::size_t>() == 0) {
      throw ParseError("n must be a positive integer");
    }
    if (!j.contains("m") || !j.at("m").is_number_unsigned() || j.at("m").get<std::size_t>() == 0) {
      throw ParseError("m must be a positive integer");
    }
    out.n = j.at("n").get<std::size_t>();
    out.m = j.at("m").get<std::size_t>();

    const bool has_explicit = j.contains("P") || j.contains("R") || j.contains("H");
    const bool has_random = j.contains("random");
    if (has_explicit && has_random) {
      throw ParseError("exactly one of explicit matrices or random block allowed, found both");
    }
    if (!has_explicit && !has_random) {
      throw ParseError("either P, R, H or a random block is required");
    }

    if (has_explicit) {
      if (!j.contains("P")) throw ParseError("P is missing");
      if (!j.contains("R")) throw ParseError("R is missing");
      if (!j.contains("H")) throw ParseError("H is missing");
      out.p_entries = read_matrix_entries(j, "P", out.n * out.n);
      out.r_entries = read_matrix_entries(j, "R", out.m * out.m);
      out.h_entries = read_matrix_entries(j, "H", out.m * out.n);
    } else {
      const json& r = j.at("random");
      RandomProblemSpec spec;
      if (!r.contains("seed") || !r.at("seed").is_number_unsigned()) {
        throw ParseError("random.seed must be an unsigned integer");
      }
      spec.seed = r.at("seed").get<std::uint64_t>();
      std::tie(spec.log10_p_lo, spec.log10_p_hi) = read_range(r, "log10_eig_range_P");
      std::tie(spec.log10_r_lo, spec.log10_r_hi) = read_range(r, "log10_eig_range_R");
      if (spec.log10_p_lo > spec.log10_p_hi) {
        throw ParseError("random.log10_eig_range_P is inverted");
      }
      if (spec.log10_r_lo > spec.log10_r_hi) {
        throw ParseError("random.log10_eig_range_R is inverted");
      }
      const std::string mode = r.contains("H_mode") ? r.at("H_mode").get<std::string>()
                                                    : std::string("gaussian");
      if (mode == "gaussian") {
        spec.h_mode = RandomProblemSpec::HMode::kGaussian;
      } else if (mode == "identity-block") {
        spec.h_mode = RandomProblemSpec::HMode::kIdentityBlock;
      } else if (mode == "zero") {
        spec.h_mode = RandomProblemSpec::HMode::kZero;
      } else {
        throw ParseError("random.H_mode must be gaussian, identity-block or zero");
      }
      out.random = spec;
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("problem file is malformed: ") + e.what());
  }
  return out;
}

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open problem file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_problem_text(buf.str());
}

KalmanProblem realize_problem(const ProblemFile& file) {
  if (file.random.has_value()) {
    const RandomProblemSpec& spec = *file.random;
    const Rng root(spec.seed);
    Rng p_rng = root.split(1);
    Rng r_rng = root.split(2);
    Rng h_rng = root.split(3);
    SpdMatrix p = random_spd(file.n, spec.log10_p_lo, spec.log10_p_hi, p_rng);
    SpdMatrix r = random_spd(file.m, spec.log10_r_lo, spec.log10_r_hi, r_rng);
    Matrix h(file.m, file.n, 0.0);
    switch (spec.h_mode) {
      case RandomProblemSpec::HMode::kGaussian:
        h = random_gaussian(file.m, file.n, h_rng);
        break;
      case RandomProblemSpec::HMode::kIdentityBlock:
        for (std::size_t i = 0; i < std::min(file.m, file.n); ++i) h(i, i) = 1.0;
        break;
      case RandomProblemSpec::HMode::kZero:
        break;
    }
    return KalmanProblem(std::move(p), std::move(r), std::move(h));
  }

  auto certify = [](const char* key, std::size_t dim, const std::vector<double>& entries) {
    try {
      return SpdMatrix(SymmetricMatrix(Matrix(dim, dim, entries)));
    } catch (const NotPositiveDefinite&) {
      throw NotPositiveDefinite(std::string(key) + " is not positive definite");
    }
  };
  SpdMatrix p = certify("P", file.n, *file.p_entries);
  SpdMatrix r = certify("R", file.m, *file.r_entries);
  Matrix h(file.m, file.n, *file.h_entries);
  return KalmanProblem(std::move(p), std::move(r), std::move(h));
}

std::string problem_to_text(const KalmanProblem& prob) {
  json j;
  j["n"] = prob.state_dim();
  j["m"] = prob.obs_dim();
  j["P"] = prob.prior.sym().mat().entries();
  j["R"] = prob.likelihood.sym().mat().entries();
  j["H"] = prob.measurement.entries();
  return j.dump(2) + "\n";
}

void save_problem_file(const std::string& path, const KalmanProblem& prob) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open output file for writing: " + path);
  const std::string text = problem_to_text(prob);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("failed while writing output file: " + path);
}

SymmetricPolySpec load_sympoly_file(const std::string& path, std::size_t n) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open polynomial file: " + path);
  SymmetricPolySpec poly;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t")] == '#') continue;
    std::istringstream ss(line);
    SymPolyTerm term;
    if (!(ss >> term.coefficient)) {
      throw ParseError("polynomial file line " + std::to_string(lineno) +
                       ": expected a coefficient");
    }
    term.exponents.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (!(ss >> term.exponents[k])) {
        throw ParseError("polynomial file line " + std::to_string(lineno) + ": expected " +
                         std::to_string(n) + " exponents after the coefficient");
      }
      if (term.exponents[k] < 0) {
        throw ParseError("polynomial file line " + std::to_string(lineno) +
                         ": exponents must be nonnegative");
      }
    }
    std::string extra;
    if (ss >> extra) {
      throw ParseError("polynomial file line " + std::to_string(lineno) +
                       ": unexpected trailing token '" + extra + "'");
    }
    poly.terms.push_back(std::move(term));
  }
  if (poly.terms.empty()) {
    throw ParseError("polynomial file has no terms: " + path);
  }
  return poly;
}

}  // namespace gaincert
