#include <doctest.h>

#include <cstdlib>
#include <cstring>

#include "common.hpp"
#include "membed/io.hpp"

using namespace membed;
using namespace testing_support;

namespace {

int error_line(const std::string& text) {
  try {
    parse_matrix(text);
  } catch (const InputError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("JSON matrix documents") {
  auto doc = parse_matrix(R"({"dim": 2, "rows": [[0.7, 0.3], [0.2, 0.8]], "label": "k",
                              "tolerances": {"residual": 1e-9}})");
  CHECK(doc.m(0, 1) == 0.3);
  CHECK(doc.label == std::optional<std::string>("k"));
  CHECK(doc.tol.residual == 1e-9);
  CHECK(doc.tol.nonneg == Tolerances{}.nonneg);

  auto bare = parse_matrix("[[1, 0, 0], [0, 1, 0], [0, 0, 1]]");
  CHECK(bare.m == identity(3));
}

TEST_CASE("plain row format") {
  auto doc = parse_matrix("# a comment\n0.7 0.3\n\n0.2, 0.8  # trailing\n");
  CHECK(doc.m(1, 0) == 0.2);
  CHECK(doc.m(1, 1) == 0.8);
}

TEST_CASE("malformed input carries line numbers") {
  CHECK(error_line("0.7 0.3\n0.2 x\n") == 2);
  CHECK(error_line("0.7 0.3\n0.2\n") == 2);
  CHECK(error_line("{\n  \"rows\": [\n    [0.7, 0.3],\n    [0.2, \"a\"]\n  ]\n}") == 4);
  CHECK(error_line("{\n  \"rows\": [[1, 0], [0, 1]],\n  \"dim\": 3\n}") == 3);
  CHECK(error_line("{\n  \"rows\": [[1, 0],\n [0, 1]]\n  oops\n}") == 4);
  CHECK(error_line("[[1]]") > 0);
  CHECK(error_line("{\"dim\": 2}") == 1);
  CHECK(error_line("{\"rows\": [[1,0],[0,1]], \"tolerances\": {\"bogus\": 1}}") == 1);
  CHECK(error_line("") > 0);
  try {
    parse_matrix("0.5 0.5\n0.5 q\n");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).rfind("line 2: ", 0) == 0);
  }
}

TEST_CASE("17-digit output round-trips bit-exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int s = 0; s < 10000; ++s) {
    double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    double y = std::strtod(format_double(x).c_str(), nullptr);
    CHECK(std::memcmp(&x, &y, sizeof x) == 0);
  }
  CHECK(format_double(1) == "1.0");
  CHECK(format_double(0) == "0.0");
  CHECK(format_double(0.1) == "0.10000000000000001");

  std::mt19937_64 r2(2);
  Mat m = random_markov(r2, 4);
  auto back = parse_matrix(dump(matrix_document_json(m, "x")));
  CHECK(back.m == m);
  CHECK(back.label == std::optional<std::string>("x"));
}

TEST_CASE("schedules") {
  auto s = parse_schedule(R"([{"Q": [[-1, 1], [0, 0]], "duration": 0.5},
                              {"samples": [[[-1, 1], [1, -1]], [[-2, 2], [2, -2]]], "step": 0.1}])");
  REQUIRE(s.segments.size() == 2);
  CHECK(s.span() == doctest::Approx(0.6));
  auto o = parse_schedule(R"({"segments": [{"Q": [[-1, 1], [0, 0]], "duration": 2}]})");
  CHECK(o.span() == 2);
  CHECK_THROWS_AS(parse_schedule("[]"), InputError);
  CHECK_THROWS_AS(parse_schedule(R"([{"Q": [[-1, 1], [0, 0]]}])"), InputError);
  CHECK_THROWS_AS(parse_schedule(R"([{"Q": [[1, -1], [0, 0]], "duration": 1}])"), InputError);
  CHECK_THROWS_AS(parse_schedule(R"([{"Q": [[-1, 1], [0, 0]], "duration": -1}])"), InputError);
}

TEST_CASE("verdict documents") {
  MatrixDocument doc;
  doc.m = identity(3);
  auto j = verdict_document(doc, decide(doc.m));
  CHECK(j["verdict"] == "Embeddable");
  CHECK(j["generators"].size() == 1);
  CHECK(j["generators"][0].contains("residual"));
  CHECK(j["case_tag"]["pattern"] == "D3_IDENTITY");
  CHECK(dump(j) == dump(verdict_document(doc, decide(doc.m))));

  auto g = greport_json(g_embed_d3(identity(3)));
  CHECK(g["verdict"] == "GEmbeddable");

  Mat w(3, 3);
  w << 0.5, 0.5, 0, 0, 1, 0, 0.5, 0, 0.5;
  auto t = table_text(decide(w));
  CHECK(t.find("NotEmbeddable") != std::string::npos);
  CHECK(t.find("TRANSITIVITY") != std::string::npos);
}
