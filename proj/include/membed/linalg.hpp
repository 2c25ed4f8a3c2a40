#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace membed {

// Dense real matrix of dimension 2..4, stored without heap allocation.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, 4, 4>;
using cplx = std::complex<double>;

struct Tolerances {
  double spec_cluster = 1e-8;  // relative to max(1, spectral radius)
  double nonneg = 1e-10;
  double rowsum = 1e-10;
  double residual = 1e-8;
  double rank = 1e-9;  // relative singular value cutoff

  void validate() const;
};

enum class ErrorCode {
  RejectsDimension,
  NonFinite,
  NotMarkov,
  IllConditioned,
  SpectrumOnCut,
  DegenerateDenominator,
  NonpositiveParameter,
  InfeasibleParams,
  NotConverged,
  NotTotallyPositive,
  InvalidArgument,
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct Root {
  cplx value;
  int multiplicity = 1;
};

struct Spectrum {
  std::vector<Root> roots;  // distinct roots, deterministic order
  bool clustered = false;   // some roots were merged

  int total_multiplicity() const;
};

struct EigenBlocks {
  cplx eigenvalue;
  std::vector<int> sizes;  // descending

  int algebraic() const;
  int geometric() const { return static_cast<int>(sizes.size()); }
  int largest() const { return sizes.empty() ? 0 : sizes.front(); }
};

struct JordanStructure {
  std::vector<EigenBlocks> blocks;
  int min_poly_degree = 0;

  bool cyclic() const;
  const EigenBlocks* find(cplx lambda, double tol) const;
};

struct RealJordan {
  Mat T;
  Mat canonical;  // M = T * canonical * T^-1
  double cond = 0;
  bool ill_conditioned = false;
};

Mat identity(int dim);
void check_mat(const Mat& m);
double scale(const Mat& m);  // max(1, infinity norm)
double inf_norm(const Mat& m);

// Monic characteristic polynomial, highest degree first without the leading 1.
std::vector<double> char_poly(const Mat& m);
// Roots of x^n + c[0] x^(n-1) + ... + c[n-1] for n <= 4 by closed forms.
std::vector<cplx> poly_roots(std::span<const double> c);

Spectrum eigenvalues(const Mat& m, const Tolerances& tol = {});
JordanStructure jordan_structure(const Mat& m, const Tolerances& tol = {});
// Numerical rank of (M - mu I)^p with the tolerance policy of jordan_structure.
int shifted_rank(const Mat& m, cplx mu, int p, const Tolerances& tol, bool* ambiguous = nullptr);

Mat mat_exp(const Mat& a);
Mat principal_log(const Mat& m, const Tolerances& tol = {});
Mat mat_sqrt(const Mat& m);
Mat poly_in(std::span<const double> coeffs, const Mat& a);

bool is_markov(const Mat& m, const Tolerances& tol = {});
bool is_generator(const Mat& q, const Tolerances& tol = {});

RealJordan real_jordan(const Mat& m, const Tolerances& tol = {});

}  // namespace membed
