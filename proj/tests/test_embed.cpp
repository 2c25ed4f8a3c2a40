#include <doctest.h>

#include <cmath>
#include <numbers>

#include "common.hpp"
#include "membed/embed.hpp"
#include "membed/models.hpp"

using namespace membed;
using namespace testing_support;
using std::numbers::pi;

namespace {

Mat kendall(double a, double b) {
  Mat m(2, 2);
  m << 1 - a, a, b, 1 - b;
  return m;
}

Mat equal_input3(double c1, double c2, double c3) {
  return equal_input_matrix({{c1, c2, c3}});
}

Mat witness(double a, double b) {
  Mat m(3, 3);
  m << 1 - a, a, 0, 0, 1, 0, b, 0, 1 - b;
  return m;
}

Mat bad_product(double a, double b) {
  Mat m(3, 3);
  m << (1 - a) * (1 - b), a, (1 - a) * b, a * (1 - b), 1 - a, a * b, b, 0, 1 - b;
  return m;
}

void check_sound(const Mat& m, const EmbeddingResult& r) {
  CHECK((r.verdict == Verdict::Embeddable) == !r.generators.empty());
  for (auto& g : r.generators) {
    CHECK(is_generator(g.matrix));
    CHECK(inf_norm(mat_exp(g.matrix) - m) <= 1e-8 * scale(m));
  }
  if (r.verdict == Verdict::Undecided) CHECK(r.reason != Reason::NONE);
}

}  // namespace

TEST_CASE("identity has only the zero generator") {
  for (int n = 2; n <= 4; ++n) {
    auto r = decide(identity(n));
    REQUIRE(r.verdict == Verdict::Embeddable);
    CHECK(r.uniqueness == Uniqueness::Unique);
    CHECK(inf_norm(r.generators[0].matrix) == 0);
  }
}

TEST_CASE("Kendall's 2x2 criterion") {
  auto r = embed_d2(kendall(0.3, 0.2));
  REQUIRE(r.verdict == Verdict::Embeddable);
  Mat q = 2 * std::log(2.0) * (kendall(0.3, 0.2) - identity(2));
  CHECK(inf_norm(r.generators[0].matrix - q) < 1e-14);
  CHECK(inf_norm(mat_exp(r.generators[0].matrix) - kendall(0.3, 0.2)) < 1e-10);
  CHECK(r.uniqueness == Uniqueness::Unique);

  auto s = decide(kendall(0.5, 0.5));
  CHECK(s.verdict == Verdict::NotEmbeddable);
  CHECK(s.reason == Reason::DET_NONPOSITIVE);

  auto z = embed_d2(kendall(0, 0));
  REQUIRE(z.verdict == Verdict::Embeddable);
  CHECK(inf_norm(z.generators[0].matrix) == 0);
}

TEST_CASE("doubly stochastic product is not embeddable") {
  auto r = decide(bad_product(0.3, 0.4));
  CHECK(r.verdict == Verdict::NotEmbeddable);
  CHECK(r.reason == Reason::TRANSITIVITY);
}

TEST_CASE("confluent coefficient formula") {
  double mu = -0.4;
  EigenData e;
  e.lambda = 1 + mu;
  auto c = smt_coeffs(Pattern::D3_JORDAN2, e);
  CHECK(c[0] == doctest::Approx(2 * std::log1p(mu) / mu - 1 / (1 + mu)).epsilon(1e-12));
}

TEST_CASE("polynomial logarithms agree with the principal log") {
  std::mt19937_64 rng(1);
  int complex = 0, real3 = 0, real4 = 0;
  for (int s = 0; s < 2000 && (complex < 100 || real3 < 100 || real4 < 100); ++s) {
    int n = 3 + static_cast<int>(s % 2);
    Mat m = mat_exp(random_generator(rng, n, 0.05, 2.0, 0.0));
    auto tag = classify(m);
    Mat a = m - identity(n);
    if (tag.pattern == Pattern::D3_COMPLEX_PAIR || tag.pattern == Pattern::D3_SIMPLE_REAL) {
      auto c = smt_coeffs(tag.pattern, tag.eigen);
      CHECK(inf_norm(poly_in(c, a) - principal_log(m)) < 1e-9);
      (tag.pattern == Pattern::D3_COMPLEX_PAIR ? complex : real3)++;
    } else if (tag.pattern == Pattern::D4_SIMPLE_REAL) {
      auto c = smt_coeffs(tag.pattern, tag.eigen);
      auto got = expand(eigenvalues(poly_in(c, a)));
      std::vector<cplx> want;
      for (auto& z : schur_eigenvalues(m)) want.push_back(std::log(z.real()));
      CHECK(multiset_distance(got, want) < 1e-9);
      ++real4;
    }
  }
  CHECK(complex > 0);
  CHECK(real3 > 0);
  CHECK(real4 > 0);
}

TEST_CASE("repeated eigenvalue d=3") {
  auto r = decide(equal_input3(0.1, 0.2, 0.2));
  REQUIRE(r.verdict == Verdict::Embeddable);
  Mat m = equal_input3(0.1, 0.2, 0.2);
  CHECK(inf_norm(r.generators[0].matrix - (-std::log(0.5) / 0.5) * (m - identity(3))) < 1e-12);

  // negative lambda with a non-equal-input layout
  Mat n(3, 3);
  n << 0.2, 0.4, 0.4, 0.6, 0.1, 0.3, 0.6, 0.3, 0.1;
  CHECK(decide(n).verdict == Verdict::NotEmbeddable);

  double lambda = std::exp(-2 * pi * std::sqrt(3.0)) + 1e-3;
  double c = 1 - lambda;
  auto u = decide(equal_input3(c / 3, c / 3, c / 3));
  REQUIRE(u.verdict == Verdict::Embeddable);
  CHECK(u.uniqueness == Uniqueness::Unique);
}

TEST_CASE("extremal equal-input constant") {
  CHECK(delta_min(1, 1, 1) == doctest::Approx(pi * std::sqrt(3.0)).epsilon(1e-14));
  for (double t : {0.01, 0.5, 7.0}) CHECK(delta_min(t, 2 * t, 3 * t) == doctest::Approx(delta_min(1, 2, 3)).epsilon(1e-14));
  // extended-precision oracle for (1, 1, 2)
  long double want = std::numbers::pi_v<long double> * 2 * std::sqrt(4.0L) / std::sqrt(2.0L);
  CHECK(std::abs(delta_min(1, 1, 2) - static_cast<double>(want)) < 1e-14);
  CHECK_THROWS_AS(delta_min(0, 1, 1), Error);
}

TEST_CASE("extremal generators") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int s = 0; s < 1000; ++s) {
    double c1 = u(rng), c2 = u(rng), c3 = u(rng);
    auto [qp, qm] = eq_input_extremal_generators(c1, c2, c3);
    Mat cm(3, 3);
    cm << c1, c2, c3, c1, c2, c3, c1, c2, c3;
    double cmax = 1 + std::exp(-delta_min(c1, c2, c3));
    double c = c1 + c2 + c3;
    Mat target = equal_input_matrix({{cmax * c1 / c, cmax * c2 / c, cmax * c3 / c}});
    for (const Mat& q : {qp, qm}) {
      CHECK(is_generator(q));
      CHECK(inf_norm(mat_exp(q) - target) < 1e-9);
      CHECK(inf_norm(q * cm - cm * q) < 1e-10);
    }
  }
}

TEST_CASE("negative equal-input d=3") {
  double cmax = 1 + std::exp(-pi * std::sqrt(3.0));
  auto at = decide(equal_input3(cmax / 3, cmax / 3, cmax / 3));
  REQUIRE(at.verdict == Verdict::Embeddable);
  CHECK(at.generators.size() == 2);
  CHECK(at.uniqueness == Uniqueness::MultipleKnown);
  double f = 2 * pi / std::sqrt(3.0);
  Mat circ(3, 3);
  circ << -1, 1, 0, 0, -1, 1, 1, 0, -1;
  circ *= f;
  double best = 1e9;
  for (auto& g : at.generators) best = std::min({best, inf_norm(g.matrix - circ), inf_norm(g.matrix - Mat(circ.transpose()))});
  CHECK(best < 1e-9);

  CHECK(decide(equal_input3(1.4 / 3, 1.4 / 3, 1.4 / 3)).verdict == Verdict::NotEmbeddable);
  CHECK(decide(equal_input3(1.4 / 3, 1.4 / 3, 1.4 / 3)).reason == Reason::EQUAL_INPUT_BEYOND_MAX);

  Mat inside = equal_input3(1.002 / 3, 1.002 / 3, 1.002 / 3);
  auto r = decide(inside);
  REQUIRE(r.verdict == Verdict::Embeddable);
  CHECK(r.generators.size() == 2);
  check_sound(inside, r);
}

TEST_CASE("cyclic real d=3") {
  auto w = decide(witness(0.3, 0.6));
  CHECK(w.verdict == Verdict::NotEmbeddable);
  CHECK(decide(witness(0.4, 0.4)).verdict == Verdict::NotEmbeddable);
  Mat c(3, 3);
  c << 0.2, 0.7, 0.1, 0.7, 0.2, 0.1, 0.1, 0.1, 0.8;
  CHECK(decide(c).verdict == Verdict::NotEmbeddable);

  std::mt19937_64 rng(3);
  int seen = 0;
  for (int s = 0; s < 500 && seen < 50; ++s) {
    Mat q = random_generator(rng, 3, 0.1, 2.0);
    Mat m = mat_exp(q);
    if (classify(m).pattern != Pattern::D3_SIMPLE_REAL) continue;
    ++seen;
    auto r = decide(m);
    REQUIRE(r.verdict == Verdict::Embeddable);
    CHECK(inf_norm(r.generators[0].matrix - q) < 1e-8);
  }
  CHECK(seen > 0);
}

TEST_CASE("complex d=3 branches") {
  CHECK(complex_branch_bound(std::exp(-4 * pi * std::sqrt(3.0)), 3) == 3);
  std::mt19937_64 rng(4);
  int seen = 0;
  for (int s = 0; s < 2000 && seen < 100; ++s) {
    Mat m = mat_exp(random_generator(rng, 3, 0.2, 4.0, 0.0));
    auto tag = classify(m);
    if (tag.pattern != Pattern::D3_COMPLEX_PAIR || !(m.determinant() > std::exp(-pi))) continue;
    ++seen;
    auto r = decide(m);
    REQUIRE(r.verdict == Verdict::Embeddable);
    CHECK(r.generators.size() == 1);
    CHECK(r.generators[0].branch == 0);
    CHECK(r.uniqueness == Uniqueness::Unique);
  }
  CHECK(seen > 0);
}

TEST_CASE("d=4 repeated eigenvalue cases") {
  Mat p2 = Mat::Identity(4, 4);
  p2.row(0) << 0.6, 0.1, 0.2, 0.1;
  auto r = decide(p2);
  REQUIRE(r.verdict == Verdict::Embeddable);
  Mat a = p2 - identity(4);
  CHECK(inf_norm(r.generators[0].matrix - (-std::log(0.6) / 0.4) * a) < 1e-12);

  // JNF diag(1, l, -mu, -mu) with mu > e^-pi
  auto k = decide(k3st_matrix({0.1, 0.5, 0.1}));
  CHECK(k.verdict == Verdict::NotEmbeddable);
}

TEST_CASE("planted generators with a rotation block are recovered") {
  // a 3-cycle at rate 2pi/sqrt3 has eigenvalues -sqrt3 pi +- i pi, so exp gives a negative double eigenvalue
  double rate = 2 * pi / std::sqrt(3.0);
  Mat hidden = Mat::Zero(4, 4);
  hidden.bottomRightCorner(3, 3) << -1, 1, 0, 0, -1, 1, 1, 0, -1;
  hidden *= rate;
  Mat m = mat_exp(hidden);
  CHECK(classify(m).pattern == Pattern::D4_DEG2_DOUBLE_NEG);
  auto r = decide(m);
  CHECK(r.verdict == Verdict::Embeddable);
  check_sound(m, r);

  // state 0 leaks into the cycle: JNF diag(1, l1, l2, l2) with l2 < 0
  Mat coupled = hidden;
  coupled.row(0) << -0.9, 0.3, 0.3, 0.3;
  Mat mc = mat_exp(coupled);
  CHECK(classify(mc).pattern == Pattern::D4_DEG3_DOUBLE_L2_NEG);
  auto rc = decide(mc);
  CHECK(rc.verdict == Verdict::Embeddable);
  check_sound(mc, rc);
}

TEST_CASE("uniqueness certificates") {
  Mat d = Mat::Constant(3, 3, 0.1);
  d.diagonal().setConstant(0.8);
  CHECK(uniqueness_certificates(d, principal_log(d)) == Uniqueness::Unique);

  Mat low(3, 3);
  low << 0.3, 0.35, 0.35, 0.35, 0.3, 0.35, 0.35, 0.35, 0.3;
  CHECK(std::abs(low.determinant()) < 0.05);
  CHECK(uniqueness_certificates(low, Mat::Zero(3, 3)) == Uniqueness::Unknown);

  // det slightly above e^-pi with min diagonal 0.5 or less: the second certificate decides
  std::mt19937_64 rng(5);
  int hits = 0;
  for (int s = 0; s < 5000 && hits < 20; ++s) {
    Mat m = mat_exp(random_generator(rng, 3, 0.5, 3.0));
    double det = m.determinant();
    if (!(det > std::exp(-pi) && det < 0.06 && m.diagonal().minCoeff() <= 0.5)) continue;
    ++hits;
    CHECK(uniqueness_certificates(m, principal_log(m)) == Uniqueness::Unique);
  }
}

TEST_CASE("soundness, necessary-condition consistency and semigroup stability") {
  std::mt19937_64 rng(6);
  for (int n = 2; n <= 4; ++n)
    for (int s = 0; s < 300; ++s) {
      Mat m = random_markov(rng, n);
      auto r = decide(m);
      check_sound(m, r);
      if (!necessary_checks(m).all()) CHECK(r.verdict != Verdict::Embeddable);
    }
  for (int n = 2; n <= 4; ++n)
    for (int s = 0; s < 100; ++s) {
      Mat q = random_generator(rng, n, 0.05, 2.5);
      for (double t : {0.5, 1.0, 2.0}) {
        Mat m = mat_exp(t * q);
        auto r = decide(m);
        CHECK(r.verdict == Verdict::Embeddable);
        check_sound(m, r);
      }
    }
}
