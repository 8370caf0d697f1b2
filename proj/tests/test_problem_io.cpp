#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pc_testing.hpp"
#include "sinrgp/problem_io.hpp"

using namespace sinrgp;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sinrgp_test_" + name);
}

json example_doc() { return problem_to_json(testing::example1()); }

}  // namespace

TEST_CASE("fixture matches the in-code instance") {
  const auto loaded = load_problem("data/example1.json");
  const auto ref = testing::example1();
  CHECK(loaded.gain == ref.gain);
  CHECK(loaded.noise == ref.noise);
  CHECK(loaded.weights == ref.weights);
  CHECK(loaded.p_max == ref.p_max);
  CHECK(loaded.p_min == ref.p_min);
  CHECK_FALSE(loaded.has_qos());
}

TEST_CASE("round trip through a file") {
  auto prob = testing::example1();
  prob.gamma_min << 0.5, 0.0, 1.5, 0.0;
  prob.rate_a = 0.6;
  prob.rate_b = 0.8;
  const auto path = scratch("roundtrip.json");
  save_problem(prob, path);
  const auto back = load_problem(path);
  std::filesystem::remove(path);
  CHECK(back.gain == prob.gain);
  CHECK(back.gamma_min == prob.gamma_min);
  CHECK(back.p_min == prob.p_min);
  CHECK(back.rate_a == prob.rate_a);
  CHECK(back.rate_b == prob.rate_b);
}

TEST_CASE("flat gain layout and defaults") {
  json doc = example_doc();
  json flat = json::array();
  for (const auto& row : doc["G"]) {
    for (const auto& v : row) flat.push_back(v);
  }
  doc["G"] = flat;
  doc.erase("p_min_watts");
  doc.erase("gamma_min");
  doc.erase("rate_a");
  const auto prob = problem_from_json(doc);
  CHECK(prob.gain == testing::example1().gain);
  CHECK((prob.p_min.array() == kDefaultMinPower).all());
  CHECK(prob.rate_a == 1.0);
}

TEST_CASE("rate floors convert to SINR floors") {
  json doc = example_doc();
  doc.erase("gamma_min");
  doc["rate_b"] = 0.5;
  doc["r_min"] = {1.0, 0.0, 2.0, 0.0};
  const auto prob = problem_from_json(doc);
  CHECK(prob.gamma_min(0) == doctest::Approx(2.0));
  CHECK(prob.gamma_min(1) == 0.0);
  CHECK(prob.gamma_min(2) == doctest::Approx(6.0));
  doc["gamma_min"] = {0, 0, 0, 0};
  CHECK_THROWS_AS(problem_from_json(doc), ParseError);
}

TEST_CASE("malformed documents name the field") {
  SUBCASE("negative gain") {
    json doc = example_doc();
    doc["G"][0][1] = -0.5;
    try {
      (void)problem_from_json(doc);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.field() == "G");
    }
  }
  SUBCASE("missing field") {
    json doc = example_doc();
    doc.erase("n_watts");
    CHECK_THROWS_WITH_AS(problem_from_json(doc), doctest::Contains("n_watts"), ParseError);
  }
  SUBCASE("wrong length") {
    json doc = example_doc();
    doc["w"] = {1.0, 1.0};
    CHECK_THROWS_WITH_AS(problem_from_json(doc), doctest::Contains("w"), ParseError);
  }
  SUBCASE("not a number") {
    json doc = example_doc();
    doc["p_max_watts"][2] = "lots";
    CHECK_THROWS_WITH_AS(problem_from_json(doc), doctest::Contains("p_max_watts"), ParseError);
  }
  SUBCASE("broken syntax") {
    const auto path = scratch("broken.json");
    std::ofstream(path) << "{\"G\": [[1, 2], \n";
    CHECK_THROWS_AS(load_problem(path), ParseError);
    std::filesystem::remove(path);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_problem(scratch("does_not_exist.json")), std::runtime_error);
  }
}
