#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "gaincert/errors.hpp"
#include "gaincert/problem_io.hpp"
#include "test_support.hpp"

using namespace gaincert;
using gaincert::testing::make_problem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/gaincert_io_" + name;
  std::ofstream f(path, std::ios::binary);
  f << content;
  return path;
}

}  // namespace

TEST_CASE("explicit problem round trip is bit-identical") {
  const KalmanProblem prob = make_problem(3, 2, 2024);
  const std::string text = problem_to_text(prob);
  const KalmanProblem again = realize_problem(parse_problem_text(text));
  CHECK(again.prior.sym().mat().entries() == prob.prior.sym().mat().entries());
  CHECK(again.likelihood.sym().mat().entries() == prob.likelihood.sym().mat().entries());
  CHECK(again.measurement.entries() == prob.measurement.entries());
}

TEST_CASE("explicit parse and validation") {
  const ProblemFile f = parse_problem_text(
      R"({"n":1,"m":1,"P":[1.0],"R":[1.0],"H":[1.0]})");
  const KalmanProblem prob = realize_problem(f);
  CHECK(prob.state_dim() == 1);
  CHECK(prob.prior(0, 0) == 1.0);
}

TEST_CASE("malformed documents raise parse errors naming the key") {
  CHECK_THROWS_AS(parse_problem_text("not json"), ParseError);
  CHECK_THROWS_AS(parse_problem_text(R"({"m":1,"P":[1],"R":[1],"H":[1]})"), ParseError);
  CHECK_THROWS_AS(parse_problem_text(R"({"n":1,"m":1})"), ParseError);
  CHECK_THROWS_AS(parse_problem_text(R"({"n":1,"m":1,"P":[1],"R":[1]})"), ParseError);
  CHECK_THROWS_WITH_AS(parse_problem_text(R"({"n":2,"m":1,"P":[1,0,0],"R":[1],"H":[1,0]})"),
                       doctest::Contains("P"), ParseError);
  CHECK_THROWS_AS(
      parse_problem_text(
          R"({"n":1,"m":1,"P":[1],"R":[1],"H":[1],"random":{"seed":1,"log10_eig_range_P":[0,1],"log10_eig_range_R":[0,1]}})"),
      ParseError);
  CHECK_THROWS_AS(
      parse_problem_text(
          R"({"n":1,"m":1,"random":{"seed":1,"log10_eig_range_P":[1,0],"log10_eig_range_R":[0,1]}})"),
      ParseError);
  CHECK_THROWS_AS(
      parse_problem_text(
          R"({"n":1,"m":1,"random":{"seed":1,"log10_eig_range_P":[0,1],"log10_eig_range_R":[0,1],"H_mode":"eye"}})"),
      ParseError);
}

TEST_CASE("indefinite explicit matrices fail validation with the key name") {
  const ProblemFile f = parse_problem_text(
      R"({"n":2,"m":1,"P":[1,2,2,1],"R":[1],"H":[1,0]})");
  CHECK_THROWS_WITH_AS(realize_problem(f), doctest::Contains("P"), NotPositiveDefinite);

  const ProblemFile g = parse_problem_text(
      R"({"n":1,"m":2,"P":[1],"R":[1,2,2,1],"H":[1,1]})");
  CHECK_THROWS_WITH_AS(realize_problem(g), doctest::Contains("R"), NotPositiveDefinite);
}

TEST_CASE("random block is deterministic and honors H modes") {
  const std::string base =
      R"({"n":3,"m":2,"random":{"seed":7,"log10_eig_range_P":[-2,2],"log10_eig_range_R":[-1,1],"H_mode":)";
  const KalmanProblem a = realize_problem(parse_problem_text(base + R"("gaussian"}})"));
  const KalmanProblem b = realize_problem(parse_problem_text(base + R"("gaussian"}})"));
  CHECK(a.prior.sym().mat().entries() == b.prior.sym().mat().entries());
  CHECK(a.measurement.entries() == b.measurement.entries());

  const KalmanProblem zero = realize_problem(parse_problem_text(base + R"("zero"}})"));
  CHECK(max_norm(zero.measurement) == 0.0);

  const KalmanProblem block = realize_problem(parse_problem_text(base + R"("identity-block"}})"));
  CHECK(block.measurement(0, 0) == 1.0);
  CHECK(block.measurement(1, 1) == 1.0);
  CHECK(block.measurement(0, 1) == 0.0);
  CHECK(block.measurement(1, 2) == 0.0);
}

TEST_CASE("problem files load from disk") {
  const std::string path =
      write_temp("scalar.json", R"({"n":1,"m":1,"P":[2.0],"R":[0.5],"H":[1.0]})");
  const KalmanProblem prob = realize_problem(load_problem_file(path));
  CHECK(prob.prior(0, 0) == 2.0);
  CHECK_THROWS_AS(load_problem_file("/tmp/gaincert_io_does_not_exist.json"), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("save and reload through the filesystem") {
  const KalmanProblem prob = make_problem(2, 2, 99);
  const std::string path = "/tmp/gaincert_io_roundtrip.json";
  save_problem_file(path, prob);
  const KalmanProblem again = realize_problem(load_problem_file(path));
  CHECK(again.prior.sym().mat().entries() == prob.prior.sym().mat().entries());
  std::remove(path.c_str());
  CHECK_THROWS_AS(save_problem_file("/tmp/no_such_dir_gaincert/x.json", prob), IoError);
}

TEST_CASE("symmetric polynomial files") {
  const std::string path = write_temp("poly.txt",
                                      "# trace plus squared determinant\n"
                                      "1.0 1 0 0\n"
                                      "0.5 0 0 2\n"
                                      "\n");
  const SymmetricPolySpec poly = load_sympoly_file(path, 3);
  REQUIRE(poly.terms.size() == 2);
  CHECK(poly.terms[0].coefficient == 1.0);
  CHECK(poly.terms[0].exponents == std::vector<int>{1, 0, 0});
  CHECK(poly.terms[1].exponents == std::vector<int>{0, 0, 2});
  std::remove(path.c_str());

  const std::string bad1 = write_temp("poly_bad1.txt", "1.0 1 0\n");
  CHECK_THROWS_AS(load_sympoly_file(bad1, 3), ParseError);
  std::remove(bad1.c_str());

  const std::string bad2 = write_temp("poly_bad2.txt", "1.0 1 0 0 9\n");
  CHECK_THROWS_AS(load_sympoly_file(bad2, 3), ParseError);
  std::remove(bad2.c_str());

  const std::string bad3 = write_temp("poly_bad3.txt", "\n# nothing\n");
  CHECK_THROWS_AS(load_sympoly_file(bad3, 3), ParseError);
  std::remove(bad3.c_str());

  const std::string bad4 = write_temp("poly_bad4.txt", "1.0 -1 0 0\n");
  CHECK_THROWS_AS(load_sympoly_file(bad4, 3), ParseError);
  std::remove(bad4.c_str());
}
