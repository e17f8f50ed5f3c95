#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "gaincert/problem_io.hpp"
#include "test_support.hpp"

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

std::string cli_path() {
  const char* p = std::getenv("GAINCERT_CLI");
  REQUIRE_MESSAGE(p != nullptr, "GAINCERT_CLI must point at the CLI binary");
  return p;
}

RunResult run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return RunResult{WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/gaincert_cli_" + name;
  std::ofstream f(path, std::ios::binary);
  f << content;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

const char* kScalar = R"({"n":1,"m":1,"P":[1.0],"R":[1.0],"H":[1.0]})";

}  // namespace

TEST_CASE("gain prints the scalar closed form") {
  const std::string path = write_temp("scalar.json", kScalar);
  const RunResult r = run_cli("gain " + path);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("0.5") != std::string::npos);
  CHECK(r.out.find("coefficients a_0..a_n = -0.5 1") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("gain --output emits a file that reloads bit-identically") {
  const std::string path = write_temp(
      "rand.json",
      R"({"n":3,"m":2,"random":{"seed":7,"log10_eig_range_P":[-2,2],"log10_eig_range_R":[-2,2],"H_mode":"gaussian"}})");
  const std::string emitted = "/tmp/gaincert_cli_emitted.json";
  const RunResult r = run_cli("gain " + path + " --output " + emitted);
  CHECK(r.exit_code == 0);

  const gaincert::KalmanProblem original =
      gaincert::realize_problem(gaincert::load_problem_file(path));
  const gaincert::KalmanProblem reloaded =
      gaincert::realize_problem(gaincert::load_problem_file(emitted));
  CHECK(original.prior.sym().mat().entries() == reloaded.prior.sym().mat().entries());
  CHECK(original.likelihood.sym().mat().entries() == reloaded.likelihood.sym().mat().entries());
  CHECK(original.measurement.entries() == reloaded.measurement.entries());
  std::remove(path.c_str());
  std::remove(emitted.c_str());
}

TEST_CASE("same seed twice gives identical gain output") {
  const std::string path = write_temp(
      "rand7.json",
      R"({"n":3,"m":2,"random":{"seed":7,"log10_eig_range_P":[-2,2],"log10_eig_range_R":[-2,2],"H_mode":"gaussian"}})");
  const RunResult a = run_cli("gain " + path);
  const RunResult b = run_cli("gain " + path);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  std::remove(path.c_str());
}

TEST_CASE("exit codes: parse 2, validation 3") {
  const std::string bad = write_temp("bad.json", "{not json");
  CHECK(run_cli("gain " + bad).exit_code == 2);
  std::remove(bad.c_str());

  const std::string indefinite =
      write_temp("indef.json", R"({"n":2,"m":1,"P":[1,2,2,1],"R":[1],"H":[1,0]})");
  const RunResult r = run_cli("gain " + indefinite);
  CHECK(r.exit_code == 3);
  CHECK(r.out.find("P is not positive definite") != std::string::npos);
  std::remove(indefinite.c_str());

  CHECK(run_cli("gain /tmp/gaincert_cli_missing.json").exit_code == 2);
  CHECK(run_cli("nonsense-subcommand").exit_code == 2);
}

TEST_CASE("verify: scalar passes, reports are deterministic") {
  const std::string path = write_temp("scalarv.json", kScalar);
  const std::string rep1 = "/tmp/gaincert_cli_rep1.txt";
  const std::string rep2 = "/tmp/gaincert_cli_rep2.txt";
  const RunResult a = run_cli("verify " + path + " --directions 10 --report " + rep1);
  const RunResult b = run_cli("verify " + path + " --directions 10 --report " + rep2);
  CHECK(a.exit_code == 0);
  CHECK(a.out.find("overall: PASS") != std::string::npos);
  CHECK(a.out == b.out);
  CHECK(slurp(rep1) == slurp(rep2));
  CHECK(slurp(rep1).find("overall pass=1") != std::string::npos);
  std::remove(path.c_str());
  std::remove(rep1.c_str());
  std::remove(rep2.c_str());
}

TEST_CASE("verify --grid adds grid records on a small instance") {
  const std::string path = write_temp(
      "r22.json",
      R"({"n":2,"m":2,"random":{"seed":5,"log10_eig_range_P":[-1,1],"log10_eig_range_R":[-1,1],"H_mode":"gaussian"}})");
  const RunResult r = run_cli("verify " + path + " --directions 10 --grid");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("GlobalMinGrid") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("sweep: scalar trace landscape is the exact quadratic") {
  const std::string path = write_temp("scalars.json", kScalar);
  const std::string csv = "/tmp/gaincert_cli_sweep.csv";
  const RunResult r = run_cli("sweep " + path +
                              " --objective trace --direction 1 --epsilons -1,1,5 --output " +
                              csv);
  CHECK(r.exit_code == 0);

  std::ifstream f(csv);
  std::string header;
  std::getline(f, header);
  CHECK(header == "epsilon,objective_value,objective_value_at_kstar,margin");
  const double expected[5] = {2.5, 1.0, 0.5, 1.0, 2.5};
  const double eps_expected[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  std::string line;
  int rows = 0;
  while (std::getline(f, line)) {
    REQUIRE(rows < 5);
    double eps = 0.0;
    double value = 0.0;
    double at_opt = 0.0;
    double margin = 0.0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &eps, &value, &at_opt, &margin) == 4);
    CHECK(eps == doctest::Approx(eps_expected[rows]).epsilon(1e-15));
    CHECK(value == doctest::Approx(expected[rows]).epsilon(1e-12));
    CHECK(at_opt == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(margin == doctest::Approx(expected[rows] - 0.5).epsilon(1e-12));
    ++rows;
  }
  CHECK(rows == 5);

  // n = 1: determinant and trace are the same number
  const std::string csv_det = "/tmp/gaincert_cli_sweep_det.csv";
  const RunResult rd = run_cli("sweep " + path +
                               " --objective det --direction 1 --epsilons -1,1,5 --output " +
                               csv_det);
  CHECK(rd.exit_code == 0);
  std::string trace_body = slurp(csv);
  std::string det_body = slurp(csv_det);
  CHECK(trace_body == det_body);
  std::remove(path.c_str());
  std::remove(csv.c_str());
  std::remove(csv_det.c_str());
}

TEST_CASE("sweep: charmag(0) minimum sits on the epsilon-zero row") {
  const std::string path = write_temp(
      "r32.json",
      R"({"n":3,"m":2,"random":{"seed":11,"log10_eig_range_P":[-2,2],"log10_eig_range_R":[-2,2],"H_mode":"gaussian"}})");
  const std::string csv = "/tmp/gaincert_cli_sweep32.csv";
  const RunResult r = run_cli("sweep " + path +
                              " --objective charmag:0 --epsilons -0.5,0.5,21 --seed 4 --output " +
                              csv);
  CHECK(r.exit_code == 0);
  std::ifstream f(csv);
  std::string line;
  std::getline(f, line);  // header
  double best_eps = 1e9;
  double best_value = 1e300;
  double prev_eps = -1e300;
  while (std::getline(f, line)) {
    double eps = 0.0;
    double value = 0.0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &eps, &value) == 2);
    CHECK(eps > prev_eps);  // ascending order
    prev_eps = eps;
    if (value < best_value) {
      best_value = value;
      best_eps = eps;
    }
  }
  CHECK(best_eps == doctest::Approx(0.0));
  std::remove(path.c_str());
  std::remove(csv.c_str());
}

TEST_CASE("sweep: unwritable output exits 4, bad objective exits 2") {
  const std::string path = write_temp("scalarw.json", kScalar);
  CHECK(run_cli("sweep " + path +
                " --objective trace --output /tmp/no_such_dir_gaincert/x.csv")
            .exit_code == 4);
  CHECK(run_cli("sweep " + path + " --objective bogus --output /tmp/gaincert_cli_x.csv")
            .exit_code == 2);
  CHECK(run_cli("sweep " + path + " --objective charmag --output /tmp/gaincert_cli_x.csv")
            .exit_code == 2);
  CHECK(run_cli("sweep " + path +
                " --objective trace --direction 1,2,3 --output /tmp/gaincert_cli_x.csv")
            .exit_code == 2);
  std::remove(path.c_str());
}
