#include <doctest.h>

#include <cmath>
#include <numbers>

#include "common.hpp"
#include "membed/linalg.hpp"

using namespace membed;
using namespace testing_support;

namespace {

Mat m2(double a, double b) {
  Mat m(2, 2);
  m << 1 - a, a, b, 1 - b;
  return m;
}

Mat equal_input4(double c) {
  Mat m = Mat::Constant(4, 4, c / 4);
  m.diagonal().array() += 1 - c;
  return m;
}

}  // namespace

TEST_CASE("closed-form roots agree with an independent QR iteration") {
  std::mt19937_64 rng(1);
  for (int n = 2; n <= 4; ++n)
    for (int s = 0; s < 300; ++s) {
      Mat m = random_markov(rng, n);
      auto roots = expand(eigenvalues(m));
      REQUIRE(roots.size() == static_cast<size_t>(n));
      CHECK(multiset_distance(roots, qr_eigenvalues(m)) < 1e-9);
    }
}

TEST_CASE("polynomial roots of known factorizations") {
  // (x-1)(x-2)(x-3)(x-4)
  std::vector<double> c{-10, 35, -50, 24};
  auto r = poly_roots(c);
  std::vector<cplx> expect{1, 2, 3, 4};
  CHECK(multiset_distance(r, expect) < 1e-10);
  // (x^2+1)(x-0.5)
  std::vector<double> c3{-0.5, 1, -0.5};
  CHECK(multiset_distance(poly_roots(c3), {cplx(0, 1), cplx(0, -1), 0.5}) < 1e-12);
}

TEST_CASE("K3ST spectrum") {
  double x = 0.1, y = 0.15, z = 0.05;
  Mat m(4, 4);
  m << 1 - x - y - z, x, y, z, x, 1 - x - y - z, z, y, y, z, 1 - x - y - z, x, z, y, x, 1 - x - y - z;
  std::vector<cplx> expect{1, 1 - 2 * (x + z), 1 - 2 * (y + z), 1 - 2 * (x + y)};
  CHECK(multiset_distance(expand(eigenvalues(m)), expect) < 1e-12);
}

TEST_CASE("eigenvalue 1 of a Markov matrix is semisimple") {
  std::mt19937_64 rng(2);
  for (int n = 2; n <= 4; ++n)
    for (int s = 0; s < 100; ++s) {
      auto js = jordan_structure(random_markov(rng, n));
      auto* one = js.find(1.0, 1e-8);
      REQUIRE(one != nullptr);
      CHECK(one->largest() == 1);
    }
}

TEST_CASE("Jordan structure of diag(1,l,l,l) and 1 + J3(l)") {
  Mat d = equal_input4(0.4);
  auto js = jordan_structure(d);
  CHECK(js.min_poly_degree == 2);
  auto* l = js.find(0.6, 1e-8);
  REQUIRE(l != nullptr);
  CHECK(l->sizes == std::vector<int>{1, 1, 1});

  Mat j = Mat::Zero(4, 4);
  j(0, 0) = 1;
  for (int i = 1; i < 4; ++i) j(i, i) = 0.5;
  j(1, 2) = j(2, 3) = 1;
  Mat t(4, 4);
  t << 1, 2, 0, 1, 0, 1, 3, 0, 1, 0, 1, 2, 0, 1, 1, 1;
  Mat m = t * j * t.inverse();
  auto jm = jordan_structure(m);
  CHECK(jm.min_poly_degree == 4);
  CHECK(jm.cyclic());
  auto* b = jm.find(0.5, 1e-6);
  REQUIRE(b != nullptr);
  CHECK(b->sizes == std::vector<int>{3});
}

TEST_CASE("exp of a Poisson generator") {
  for (double alpha : {0.1, 1.0, 3.5}) {
    Mat q = Mat::Zero(3, 3);
    q(0, 0) = -alpha;
    q(0, 2) = alpha;
    Mat r = Mat::Zero(3, 3);
    r(0, 0) = -1;
    r(0, 2) = 1;
    CHECK(inf_norm(mat_exp(q) - (identity(3) + (1 - std::exp(-alpha)) * r)) < 1e-14);
  }
}

TEST_CASE("exp agrees with a long-double Taylor oracle and factorizes on commuting pairs") {
  std::mt19937_64 rng(3);
  for (int n = 2; n <= 4; ++n)
    for (int s = 0; s < 100; ++s) {
      Mat q = random_generator(rng, n, 0.05, 2.0);
      CHECK(inf_norm(mat_exp(q) - taylor_exp(q)) < 1e-12);
      Mat q2 = 0.3 * q + 0.2 * q * q;
      Mat q1 = 0.7 * q;
      CHECK(inf_norm(mat_exp(q1 + q2) - mat_exp(q1) * mat_exp(q2)) < 1e-10);
    }
}

TEST_CASE("exp of generators is Markov") {
  std::mt19937_64 rng(4);
  for (int n = 2; n <= 4; ++n)
    for (int s = 0; s < 200; ++s) CHECK(is_markov(mat_exp(random_generator(rng, n, 0.05, 20.0))));
}

TEST_CASE("principal log closed forms") {
  Mat m = m2(0.3, 0.2);
  Mat a = m - identity(2);
  CHECK(inf_norm(principal_log(m) - (-std::log(1 - 0.5) / 0.5) * a) < 1e-14);

  for (double c : {0.1, 0.5, 0.9}) {
    Mat e = equal_input4(c);
    Mat ea = e - identity(4);
    // series oracle: log(1+A) = sum (-1)^(k+1) A^k / k, with A^k = (-c)^(k-1) A
    long double coef = 0;
    for (int k = 1; k < 4000; ++k) coef += std::pow(-1.0L, k + 1) * std::pow(-(long double)c, k - 1) / k;
    CHECK(inf_norm(principal_log(e) - static_cast<double>(coef) * ea) < 1e-12);
    CHECK(inf_norm(principal_log(e) - (-std::log(1 - c) / c) * ea) < 1e-13);
  }
}

TEST_CASE("principal log inverts exp on the principal strip") {
  std::mt19937_64 rng(5);
  for (int n = 2; n <= 4; ++n)
    for (int s = 0; s < 200; ++s) {
      Mat q = random_generator(rng, n, 0.05, 2.0);
      Mat l = principal_log(mat_exp(q));
      CHECK(inf_norm(mat_exp(l) - mat_exp(q)) < 1e-12);
      // small norms keep the spectrum inside |Im| < pi so the log is q itself
      CHECK(inf_norm(l - q) < 1e-9);
    }
}

TEST_CASE("principal log rejects spectra on the negative axis") {
  Mat m = m2(0.7, 0.6);
  CHECK_THROWS_AS(principal_log(m), Error);
}

TEST_CASE("square root squares back") {
  std::mt19937_64 rng(6);
  for (int s = 0; s < 50; ++s) {
    Mat m = mat_exp(random_generator(rng, 3, 0.05, 2.0));
    Mat r = mat_sqrt(m);
    CHECK(inf_norm(r * r - m) < 1e-12);
  }
}

TEST_CASE("poly_in evaluates a polynomial in A") {
  Mat a = m2(0.3, 0.2) - identity(2);
  std::vector<double> c{2.0, -1.0};
  CHECK(inf_norm(poly_in(c, a) - (2 * a - a * a)) < 1e-15);
}

TEST_CASE("Markov and generator predicates") {
  double a = 0.3, b = 0.6;
  Mat bad(3, 3);
  bad << (1 - a) * (1 - b), a, (1 - a) * b, a * (1 - b), 1 - a, a * b, b, 0, 1 - b;
  CHECK(is_markov(bad));
  Mat neg = m2(0.3, 0.2);
  neg(0, 1) = -0.1;
  neg(0, 0) = 1.1;
  CHECK_FALSE(is_markov(neg));
  Mat q = neg - identity(2);
  CHECK_FALSE(is_generator(q));
  CHECK(is_generator(m2(0.3, 0.2) - identity(2)));
}

TEST_CASE("real Jordan form reconstructs M") {
  CHECK(inf_norm(real_jordan(equal_input4(0.3)).canonical -
                 Mat(Eigen::Vector4d(1, 0.7, 0.7, 0.7).asDiagonal())) < 1e-12);
  std::mt19937_64 rng(7);
  for (int n = 2; n <= 4; ++n)
    for (int s = 0; s < 200; ++s) {
      Mat m = random_markov(rng, n);
      auto rj = real_jordan(m);
      CHECK(inf_norm(rj.T * rj.canonical * rj.T.inverse() - m) < 1e-8);
    }
}

TEST_CASE("input validation") {
  Mat big = Mat::Identity(1, 1);
  CHECK_THROWS_AS(check_mat(big), Error);
  Mat nan = identity(2);
  nan(0, 1) = std::nan("");
  CHECK_THROWS_AS(check_mat(nan), Error);
  Tolerances t;
  t.residual = -1;
  CHECK_THROWS_AS(t.validate(), Error);
}
