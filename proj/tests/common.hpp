#pragma once

// Shared corpora and independent oracles for the test binaries.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "membed/embed.hpp"
#include "membed/inhom.hpp"
#include "membed/models.hpp"

namespace testing_support {

using membed::Mat;

// Random generator corpus: each off-diagonal rate is 0 with probability
// p_zero, otherwise U(0,1)^2; the matrix is then rescaled so that its
// infinity norm equals U(norm_lo, norm_hi).
inline Mat random_generator(std::mt19937_64& rng, int n, double norm_lo = 0.05, double norm_hi = 5.0,
                            double p_zero = 0.15) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat q = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && u(rng) >= p_zero) {
        double r = u(rng);
        q(i, j) = r * r;
      }
  for (int i = 0; i < n; ++i) q(i, i) = -q.row(i).sum();
  double nrm = q.cwiseAbs().rowwise().sum().maxCoeff();
  double target = norm_lo + (norm_hi - norm_lo) * u(rng);
  if (nrm > 0) q *= target / nrm;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j)
      if (j != i) s += q(i, j);
    q(i, i) = -s;
  }
  return q;
}

// Random Markov matrix with Dirichlet(1,...,1) rows.
inline Mat random_markov(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += (m(i, j) = e(rng));
    m.row(i) /= s;
  }
  return m;
}

// Eigen's real Schur solver applied to M directly.
inline std::vector<std::complex<double>> schur_eigenvalues(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXd a = m.cast<double>();
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// Hand-written shifted QR on the upper Hessenberg form (Wilkinson shifts,
// complex arithmetic); used as an oracle for the closed-form roots.
inline std::vector<std::complex<double>> qr_eigenvalues(const Mat& m) {
  using C = std::complex<double>;
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXcd h = m.cast<C>();
  std::vector<C> out;
  int hi = n - 1;
  for (int iter = 0; hi >= 0 && iter < 10000; ++iter) {
    if (hi == 0) {
      out.push_back(h(0, 0));
      break;
    }
    if (std::abs(h(hi, hi - 1)) <= 1e-15 * (std::abs(h(hi, hi)) + std::abs(h(hi - 1, hi - 1)))) {
      out.push_back(h(hi, hi));
      --hi;
      continue;
    }
    C a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
    C tr = a + d, det = a * d - b * c;
    C disc = std::sqrt(tr * tr / 4.0 - det);
    C mu1 = tr / 2.0 + disc, mu2 = tr / 2.0 - disc;
    C mu = std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
    if (iter % 11 == 10) mu += C(0.1 * std::abs(h(hi, hi - 1)), 0.05);  // exceptional shift
    Eigen::MatrixXcd sub = h.topLeftCorner(hi + 1, hi + 1) - mu * Eigen::MatrixXcd::Identity(hi + 1, hi + 1);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(sub);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = q.adjoint() * sub;
    h.topLeftCorner(hi + 1, hi + 1) = r * q + mu * Eigen::MatrixXcd::Identity(hi + 1, hi + 1);
  }
  return out;
}

// Distance between two eigenvalue multisets after greedy matching.
inline double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  double worst = 0;
  for (auto& x : a) {
    size_t best = 0;
    for (size_t i = 1; i < b.size(); ++i)
      if (std::abs(b[i] - x) < std::abs(b[best] - x)) best = i;
    worst = std::max(worst, std::abs(b[best] - x));
    b.erase(b.begin() + static_cast<long>(best));
  }
  return worst;
}

inline std::vector<std::complex<double>> expand(const membed::Spectrum& s) {
  std::vector<std::complex<double>> out;
  for (auto& r : s.roots)
    for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.value);
  return out;
}

// Taylor series in long double without scaling; accurate for small norms.
inline Mat taylor_exp(const Mat& a, int terms = 60) {
  const int n = static_cast<int>(a.rows());
  using ML = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  ML x = a.cast<long double>(), term = ML::Identity(n, n), sum = ML::Identity(n, n);
  for (int k = 1; k < terms; ++k) {
    term = term * x / static_cast<long double>(k);
    sum += term;
  }
  return sum.cast<double>();
}

inline bool generator_like(const Mat& q, double tol) {
  for (int i = 0; i < q.rows(); ++i) {
    if (std::abs(q.row(i).sum()) > tol) return false;
    for (int j = 0; j < q.cols(); ++j)
      if (i != j && q(i, j) < -tol) return false;
  }
  return true;
}

}  // namespace testing_support
