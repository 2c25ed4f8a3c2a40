#include "membed/embed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "membed/models.hpp"

namespace membed {
namespace {

using std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);

EmbeddingResult not_embeddable(Reason r, std::string note = {}) {
  EmbeddingResult res;
  res.verdict = Verdict::NotEmbeddable;
  res.reason = r;
  res.note = std::move(note);
  return res;
}

EmbeddingResult undecided(Reason r, std::string note = {}) {
  EmbeddingResult res;
  res.verdict = Verdict::Undecided;
  res.reason = r;
  res.note = std::move(note);
  return res;
}

EmbeddingResult embeddable(std::vector<GeneratorCandidate> gens, Uniqueness u) {
  EmbeddingResult res;
  res.verdict = Verdict::Embeddable;
  res.generators = std::move(gens);
  res.uniqueness = u;
  return res;
}

Mat a_of(const Mat& m) { return m - identity(static_cast<int>(m.rows())); }

// cot(pi/d): eigenvalues z of a d-dimensional generator obey |Im z| <= -Re z cot(pi/d)
double cone_slope(int dim) { return 1.0 / std::tan(pi / dim); }

// Principal-branch case: try the polynomial formula and the principal log, keep the better verified one.
EmbeddingResult principal_only(const Mat& m, const CaseTag& tag, const Tolerances& tol) {
  std::vector<GeneratorCandidate> found;
  bool log_ok = false;
  try {
    auto c = smt_coeffs(tag.pattern, tag.eigen, 0, tol);
    if (auto g = verify_candidate(m, poly_in(c, a_of(m)), 0, Construction::POLY_SMT, tol)) found.push_back(*g);
  } catch (const Error&) {
  }
  try {
    Mat l = principal_log(m, tol);
    log_ok = true;
    if (auto g = verify_candidate(m, l, 0, Construction::PRINCIPAL_LOG, tol)) found.push_back(*g);
  } catch (const Error&) {
  }
  if (found.empty()) {
    if (log_ok) return not_embeddable(Reason::LOG_NOT_GENERATOR);
    return undecided(Reason::ILL_CONDITIONED, "principal logarithm unavailable");
  }
  auto best = std::min_element(found.begin(), found.end(),
                               [](auto& a, auto& b) { return a.residual < b.residual; });
  return embeddable({*best}, Uniqueness::Unique);
}

bool positive_unit(double l) { return l > 0 && l < 1; }

// Runs the hyperbola machinery for a repeated real eigenvalue in the last two canonical slots.
struct BranchScan {
  std::vector<GeneratorCandidate> found;
  bool inconclusive = false;
  bool any_admissible = false;
};

BranchScan scan_pair_branches(const Mat& m, double lambda, bool negative, bool skip_zero, const Tolerances& tol) {
  BranchScan out;
  const int n = static_cast<int>(m.rows());
  double ell = std::log(std::abs(lambda));
  double slope = cone_slope(n);
  double reach = std::abs(ell) * slope * (1 + 1e-12);
  std::vector<std::pair<int, double>> ks;
  if (negative) {
    // |2k+1| pi <= |log|lambda|| cot(pi/d)
    int kmax = static_cast<int>(std::floor((reach / pi - 1) / 2));
    for (int k = -kmax - 1; k <= kmax; ++k)
      if (std::abs(2 * k + 1) * pi <= reach) ks.emplace_back(k, (2 * k + 1) * pi);
  } else {
    int kmax = static_cast<int>(std::floor(reach / (2 * pi)));
    for (int k = 1; k <= kmax; ++k) {
      ks.emplace_back(k, 2 * k * pi);
      ks.emplace_back(-k, -2 * k * pi);
    }
  }
  (void)skip_zero;
  if (ks.empty()) return out;
  out.any_admissible = true;
  RealJordan rj = real_jordan(m, tol);
  if (std::abs(rj.canonical(n - 1, n - 1) - lambda) > 1e-6 || std::abs(rj.canonical(n - 2, n - 2) - lambda) > 1e-6)
    throw Error(ErrorCode::IllConditioned, "unexpected canonical ordering");
  Mat fixed = Mat::Zero(n - 2, n - 2);
  for (int i = 0; i < n - 2; ++i) {
    double d = rj.canonical(i, i);
    if (!(d > 0)) throw Error(ErrorCode::IllConditioned, "fixed block not positive");
    fixed(i, i) = std::log(d);
  }
  for (auto [k, angle] : ks) {
    auto hr = hyperbola_search(rj, fixed, ell, angle, tol);
    if (hr.status == SearchStatus::Found) {
      Mat r = hyperbola_generator(rj, fixed, ell, angle, *hr.point);
      if (auto g = verify_candidate(m, r, k, Construction::HYPERBOLA, tol))
        out.found.push_back(*g);
      else
        out.inconclusive = true;
    } else if (hr.status == SearchStatus::Inconclusive) {
      out.inconclusive = true;
    }
  }
  return out;
}

// Principal generator known; decide uniqueness from extra rotational branches.
EmbeddingResult with_extra_branches(const Mat& m, GeneratorCandidate principal, double lambda, bool search,
                                    const Tolerances& tol) {
  BranchScan scan;
  if (search) {
    scan = scan_pair_branches(m, lambda, false, true, tol);
  } else {
    const int n = static_cast<int>(m.rows());
    double reach = std::abs(std::log(lambda)) * cone_slope(n) * (1 + 1e-12);
    scan.any_admissible = reach >= 2 * pi;
    scan.inconclusive = scan.any_admissible;
  }
  std::vector<GeneratorCandidate> gens{principal};
  for (auto& g : scan.found) gens.push_back(g);
  if (gens.size() > 1) return embeddable(gens, Uniqueness::MultipleKnown);
  return embeddable(gens, scan.inconclusive ? Uniqueness::PossiblyMore : Uniqueness::Unique);
}

EmbeddingResult negative_pair(const Mat& m, double lambda, const Tolerances& tol) {
  if (std::abs(lambda) <= tol.nonneg) return not_embeddable(Reason::DET_NONPOSITIVE);
  auto scan = scan_pair_branches(m, lambda, true, false, tol);
  if (!scan.any_admissible) return not_embeddable(Reason::K_RANGE_EMPTY);
  if (!scan.found.empty())
    return embeddable(scan.found, scan.found.size() > 1 ? Uniqueness::MultipleKnown : Uniqueness::PossiblyMore);
  if (scan.inconclusive) return undecided(Reason::SEARCH_INCONCLUSIVE);
  return not_embeddable(Reason::NO_BRANCH_FEASIBLE);
}

EmbeddingResult complex_case(const Mat& m, const CaseTag& tag, const Tolerances& tol) {
  double r = std::abs(tag.eigen.theta);
  if (!(r < 1)) return not_embeddable(Reason::UNIT_CIRCLE);
  if (tag.pattern == Pattern::D4_SIMPLE_COMPLEX && !positive_unit(tag.eigen.lambda))
    return not_embeddable(tag.eigen.lambda <= 0 ? Reason::NEGATIVE_EIGENVALUE_CULVER : Reason::UNIT_CIRCLE);
  auto [k0, k1] = complex_branch_window(tag.eigen.theta, tag.dim);
  if (k0 > k1) return not_embeddable(Reason::K_RANGE_EMPTY);
  std::vector<GeneratorCandidate> gens;
  for (int k = k0; k <= k1; ++k)
    if (auto g = complex_branch(m, tag, k, tol)) gens.push_back(*g);
  if (gens.empty()) return not_embeddable(Reason::NO_BRANCH_FEASIBLE);
  return embeddable(gens, gens.size() == 1 ? Uniqueness::Unique : Uniqueness::MultipleKnown);
}

std::vector<double> lagrange3(const cplx mu[3], const cplx f[3]) {
  // p(x) = alpha x + beta x^2 + gamma x^3 with p(mu_i) = f_i
  cplx a = 0, b = 0, g = 0;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    cplx mi = mu[i] * (mu[j] - mu[i]) * (mu[k] - mu[i]);
    if (std::abs(mi) == 0) throw Error(ErrorCode::DegenerateDenominator, "coincident interpolation nodes");
    a += mu[j] * mu[k] / mi * f[i];
    b -= (mu[j] + mu[k]) / mi * f[i];
    g += f[i] / mi;
  }
  return {a.real(), b.real(), g.real()};
}

void require_separated(double gap, double scale_ref, const Tolerances& tol) {
  if (!(std::abs(gap) > tol.spec_cluster * std::max(1.0, scale_ref)))
    throw Error(ErrorCode::DegenerateDenominator, "denominator below the clustering threshold");
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Embeddable: return "Embeddable";
    case Verdict::NotEmbeddable: return "NotEmbeddable";
    case Verdict::Undecided: return "Undecided";
  }
  return "?";
}

const char* to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::Unique: return "Unique";
    case Uniqueness::MultipleKnown: return "MultipleKnown";
    case Uniqueness::PossiblyMore: return "PossiblyMore";
    case Uniqueness::Unknown: return "Unknown";
  }
  return "?";
}

const char* to_string(Construction c) {
  switch (c) {
    case Construction::PRINCIPAL_LOG: return "PRINCIPAL_LOG";
    case Construction::POLY_SMT: return "POLY_SMT";
    case Construction::HYPERBOLA: return "HYPERBOLA";
    case Construction::EQ_INPUT_EXTREMAL_PLUS: return "EQ_INPUT_EXTREMAL_PLUS";
    case Construction::EQ_INPUT_EXTREMAL_MINUS: return "EQ_INPUT_EXTREMAL_MINUS";
    case Construction::MODEL_CLOSED_FORM: return "MODEL_CLOSED_FORM";
  }
  return "?";
}

const char* to_string(Reason r) {
  switch (r) {
    case Reason::NONE: return "NONE";
    case Reason::ZERO_DIAGONAL: return "ZERO_DIAGONAL";
    case Reason::DET_NONPOSITIVE: return "DET_NONPOSITIVE";
    case Reason::NEGATIVE_EIGENVALUE_CULVER: return "NEGATIVE_EIGENVALUE_CULVER";
    case Reason::UNIT_CIRCLE: return "UNIT_CIRCLE";
    case Reason::TRANSITIVITY: return "TRANSITIVITY";
    case Reason::NONPOSITIVE_EIGENVALUE: return "NONPOSITIVE_EIGENVALUE";
    case Reason::LOG_NOT_GENERATOR: return "LOG_NOT_GENERATOR";
    case Reason::NO_BRANCH_FEASIBLE: return "NO_BRANCH_FEASIBLE";
    case Reason::K_RANGE_EMPTY: return "K_RANGE_EMPTY";
    case Reason::EQUAL_INPUT_BEYOND_MAX: return "EQUAL_INPUT_BEYOND_MAX";
    case Reason::MODEL_CONDITION: return "MODEL_CONDITION";
    case Reason::SEARCH_INCONCLUSIVE: return "SEARCH_INCONCLUSIVE";
    case Reason::ILL_CONDITIONED: return "ILL_CONDITIONED";
  }
  return "?";
}

std::optional<GeneratorCandidate> verify_candidate(const Mat& m, const Mat& q, int branch, Construction c,
                                                   const Tolerances& tol) {
  if (!is_generator(q, tol)) return std::nullopt;
  double res = inf_norm(mat_exp(q) - m);
  if (!(res <= tol.residual * scale(m))) return std::nullopt;
  return GeneratorCandidate{q, branch, c, res};
}

Uniqueness uniqueness_certificates(const Mat& m, const Mat& q) {
  (void)q;
  auto d = m.diagonal();
  double mn = d.minCoeff();
  if (mn > 0.5) return Uniqueness::Unique;
  double prod = d.prod();
  if (m.determinant() * mn > std::exp(-pi) * prod) return Uniqueness::Unique;
  return Uniqueness::Unknown;
}

int complex_branch_bound(double det, int dim) {
  if (!(det > 0)) return 0;
  return static_cast<int>(std::floor(1 - std::log(det) * cone_slope(dim) / (2 * pi)));
}

std::pair<int, int> complex_branch_window(cplx theta, int dim) {
  double reach = -std::log(std::abs(theta)) * cone_slope(dim);
  reach += 1e-9 * (1 + reach);
  double arg = std::arg(theta);
  int k0 = static_cast<int>(std::ceil((-reach - arg) / (2 * pi)));
  int k1 = static_cast<int>(std::floor((reach - arg) / (2 * pi)));
  return {k0, k1};
}

std::optional<GeneratorCandidate> complex_branch(const Mat& m, const CaseTag& tag, int k, const Tolerances& tol) {
  std::optional<GeneratorCandidate> g;
  try {
    auto c = smt_coeffs(tag.pattern, tag.eigen, k, tol);
    g = verify_candidate(m, poly_in(c, a_of(m)), k, Construction::POLY_SMT, tol);
  } catch (const Error&) {
  }
  if (!g && k == 0) {
    try {
      g = verify_candidate(m, principal_log(m, tol), 0, Construction::PRINCIPAL_LOG, tol);
    } catch (const Error&) {
    }
  }
  return g;
}

std::vector<double> smt_coeffs(Pattern p, const EigenData& e, int k, const Tolerances& tol) {
  auto real_k = [&] {
    if (k != 0) throw Error(ErrorCode::InvalidArgument, "real spectra only admit the principal branch here");
  };
  auto albe1 = [&](double l1, double l2) -> std::vector<double> {
    double mu = l1 - 1, nu = l2 - 1;
    require_separated(mu - nu, 1, tol);
    require_separated(mu, 1, tol);
    require_separated(nu, 1, tol);
    double lm = std::log1p(mu), ln = std::log1p(nu);
    double den = mu * nu * (mu - nu);
    return {(mu * mu * ln - nu * nu * lm) / den, (-mu * ln + nu * lm) / den};
  };
  auto albe2 = [&](double l) -> std::vector<double> {
    double mu = l - 1;
    require_separated(mu, 1, tol);
    double lm = std::log1p(mu);
    return {2 * lm / mu - 1 / (1 + mu), 1 / (mu * (1 + mu)) - lm / (mu * mu)};
  };
  auto complex_pair = [&](cplx th) -> std::vector<double> {
    cplx mu = th - 1.0, mb = std::conj(mu);
    require_separated(2 * mu.imag(), 1, tol);
    cplx z = std::log(th) + cplx(0, 2 * pi * k);
    cplx den = std::norm(mu) * (mb - mu);
    cplx a = (mb * mb * z - mu * mu * std::conj(z)) / den;
    cplx b = (-mb * z + mu * std::conj(z)) / den;
    return {a.real(), b.real()};
  };
  switch (p) {
    case Pattern::D2_GENERIC:
    case Pattern::D3_DEG2_1_1_L:
    case Pattern::D3_DEG2_1_L_L_POS:
    case Pattern::D4_DEG2_TRIPLE_ONE:
    case Pattern::D4_DEG2_TRIPLE_L:
    case Pattern::D4_DEG2_DOUBLE_POS: {
      real_k();
      if (!(e.lambda > 0)) throw Error(ErrorCode::SpectrumOnCut, "nonpositive eigenvalue");
      require_separated(1 - e.lambda, 1, tol);
      return {-std::log(e.lambda) / (1 - e.lambda)};
    }
    case Pattern::D3_SIMPLE_REAL:
    case Pattern::D4_DEG3_TWO_ONES_DISTINCT:
    case Pattern::D4_DEG3_DOUBLE_L2_POS:
      real_k();
      if (!(e.lambda1 > 0 && e.lambda2 > 0)) throw Error(ErrorCode::SpectrumOnCut, "nonpositive eigenvalue");
      return albe1(e.lambda1, e.lambda2);
    case Pattern::D3_JORDAN2:
    case Pattern::D4_DEG3_TWO_ONES_JORDAN:
    case Pattern::D4_DEG3_L_JORDAN_L:
      real_k();
      if (!(e.lambda > 0)) throw Error(ErrorCode::SpectrumOnCut, "nonpositive eigenvalue");
      return albe2(e.lambda);
    case Pattern::D3_COMPLEX_PAIR:
    case Pattern::D4_DEG3_COMPLEX: return complex_pair(e.theta);
    case Pattern::D4_SIMPLE_REAL: {
      real_k();
      if (!(e.lambda1 > 0 && e.lambda2 > 0 && e.lambda3 > 0))
        throw Error(ErrorCode::SpectrumOnCut, "nonpositive eigenvalue");
      double l[3] = {e.lambda1, e.lambda2, e.lambda3};
      for (int i = 0; i < 3; ++i) {
        require_separated(l[i] - 1, 1, tol);
        require_separated(l[i] - l[(i + 1) % 3], 1, tol);
      }
      cplx mu[3] = {l[0] - 1, l[1] - 1, l[2] - 1};
      cplx f[3] = {std::log(l[0]), std::log(l[1]), std::log(l[2])};
      return lagrange3(mu, f);
    }
    case Pattern::D4_SIMPLE_COMPLEX: {
      if (!(e.lambda > 0)) throw Error(ErrorCode::SpectrumOnCut, "nonpositive eigenvalue");
      require_separated(e.lambda - 1, 1, tol);
      require_separated(2 * e.theta.imag(), 1, tol);
      cplx z = std::log(e.theta) + cplx(0, 2 * pi * k);
      cplx mu[3] = {e.lambda - 1, e.theta - 1.0, std::conj(e.theta) - 1.0};
      cplx f[3] = {std::log(e.lambda), z, std::conj(z)};
      return lagrange3(mu, f);
    }
    case Pattern::D4_JORDAN3: {
      real_k();
      if (!(e.lambda > 0)) throw Error(ErrorCode::SpectrumOnCut, "nonpositive eigenvalue");
      double mu = e.lambda - 1;
      require_separated(mu, 1, tol);
      double r[3] = {std::log(e.lambda), 1 / e.lambda, -1 / (e.lambda * e.lambda)};
      double a = 3 / mu * r[0] - 2 * r[1] + mu / 2 * r[2];
      double b = -3 / (mu * mu) * r[0] + 3 / mu * r[1] - r[2];
      double g = 1 / (mu * mu * mu) * r[0] - 1 / (mu * mu) * r[1] + 1 / (2 * mu) * r[2];
      return {a, b, g};
    }
    case Pattern::D4_MIXED_JORDAN2: {
      real_k();
      if (!(e.lambda1 > 0 && e.lambda2 > 0)) throw Error(ErrorCode::SpectrumOnCut, "nonpositive eigenvalue");
      double m1 = e.lambda1 - 1, m2 = e.lambda2 - 1;
      require_separated(m1, 1, tol);
      require_separated(m2, 1, tol);
      require_separated(m1 - m2, 1, tol);
      Eigen::Matrix3d v;
      v << m1, m1 * m1, m1 * m1 * m1, m2, m2 * m2, m2 * m2 * m2, 1, 2 * m2, 3 * m2 * m2;
      Eigen::Vector3d rhs(std::log(e.lambda1), std::log(e.lambda2), 1 / e.lambda2);
      Eigen::Vector3d x = v.fullPivLu().solve(rhs);
      return {x(0), x(1), x(2)};
    }
    default: throw Error(ErrorCode::InvalidArgument, "no polynomial logarithm formula for this case");
  }
}

EmbeddingResult embed_d2(const Mat& m, const Tolerances& tol) {
  check_mat(m);
  if (m.rows() != 2) throw Error(ErrorCode::RejectsDimension, "embed_d2 needs a 2x2 matrix");
  double a = m(0, 1), b = m(1, 0);
  double s = a + b;
  if (s == 0) return embeddable({{Mat::Zero(2, 2), 0, Construction::PRINCIPAL_LOG, inf_norm(a_of(m))}},
                                Uniqueness::Unique);
  if (!(s >= 0 && s < 1)) return not_embeddable(Reason::DET_NONPOSITIVE);
  Mat q = (-std::log1p(-s) / s) * a_of(m);
  GeneratorCandidate g{q, 0, Construction::POLY_SMT, inf_norm(mat_exp(q) - m)};
  (void)tol;
  return embeddable({g}, Uniqueness::Unique);
}

EmbeddingResult embed_d3_deg2(const Mat& m, const CaseTag& tag, const Tolerances& tol, const DecideOptions& opt) {
  double l = tag.eigen.lambda;
  if (std::abs(l) <= tol.nonneg) return not_embeddable(Reason::DET_NONPOSITIVE);
  if (l < 0) return not_embeddable(Reason::NONPOSITIVE_EIGENVALUE);
  if (!(l < 1)) return not_embeddable(Reason::UNIT_CIRCLE);
  Mat q = (-std::log(l) / (1 - l)) * a_of(m);
  auto g = verify_candidate(m, q, 0, Construction::POLY_SMT, tol);
  if (!g) return undecided(Reason::ILL_CONDITIONED, "closed-form generator failed verification");
  if (tag.pattern == Pattern::D3_DEG2_1_1_L) return embeddable({*g}, Uniqueness::Unique);
  return with_extra_branches(m, *g, l, opt.all_branches, tol);
}

double delta_min(double c1, double c2, double c3) {
  if (!(c1 > 0 && c2 > 0 && c3 > 0)) throw Error(ErrorCode::NonpositiveParameter, "c_i must be positive");
  double k = std::max({c1, c2, c3});
  return pi * k * std::sqrt(c1 + c2 + c3) / std::sqrt(c1 * c2 * c3);
}

std::pair<Mat, Mat> eq_input_extremal_generators(double c1, double c2, double c3) {
  if (!(c1 > 0 && c2 > 0 && c3 > 0)) throw Error(ErrorCode::NonpositiveParameter, "c_i must be positive");
  double c = c1 + c2 + c3, k = std::max({c1, c2, c3});
  double f = pi / std::sqrt(c * c1 * c2 * c3);
  auto make = [&](double s) {
    Mat q(3, 3);
    q << -k * (c2 + c3), c2 * (k + s * c3), c3 * (k - s * c2),  //
        c1 * (k - s * c3), -k * (c1 + c3), c3 * (k + s * c1),   //
        c1 * (k + s * c2), c2 * (k - s * c1), -k * (c1 + c2);
    return Mat(f * q);
  };
  return {make(1), make(-1)};
}

EmbeddingResult embed_d3_eq_input_neg(const Mat& m, const Tolerances& tol) {
  check_mat(m);
  if (m.rows() != 3) throw Error(ErrorCode::RejectsDimension, "needs a 3x3 matrix");
  auto p = recognize_equal_input(m, {tol.spec_cluster, tol.nonneg, 1e-8, tol.residual, tol.rank});
  if (!p) return undecided(Reason::ILL_CONDITIONED, "double negative eigenvalue without equal-input shape");
  double c1 = p->c_vec[0], c2 = p->c_vec[1], c3 = p->c_vec[2];
  double c = p->c();
  if (!(c > 1)) return undecided(Reason::ILL_CONDITIONED, "summatory parameter not above 1");
  if (!(c1 > 0 && c2 > 0 && c3 > 0)) return not_embeddable(Reason::ZERO_DIAGONAL);
  double cmax = 1 + std::exp(-delta_min(c1, c2, c3));
  if (c > cmax + tol.nonneg) return not_embeddable(Reason::EQUAL_INPUT_BEYOND_MAX);
  auto [qp, qm] = eq_input_extremal_generators(c1, c2, c3);
  if (c < cmax - tol.nonneg) {
    // commuting deformation by the equal-input generator with summatory parameter cmax
    double tau = -std::log((c - 1) / (cmax - 1)) / cmax;
    Mat qc(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) qc(i, j) = cmax * p->c_vec[j] / c - (i == j ? cmax : 0.0);
    qp += tau * qc;
    qm += tau * qc;
  }
  std::vector<GeneratorCandidate> gens;
  if (auto g = verify_candidate(m, qp, 0, Construction::EQ_INPUT_EXTREMAL_PLUS, tol)) gens.push_back(*g);
  if (auto g = verify_candidate(m, qm, 0, Construction::EQ_INPUT_EXTREMAL_MINUS, tol)) gens.push_back(*g);
  if (gens.empty()) return undecided(Reason::ILL_CONDITIONED, "extremal generators failed verification");
  return embeddable(gens, gens.size() > 1 ? Uniqueness::MultipleKnown : Uniqueness::PossiblyMore);
}

EmbeddingResult embed_d3_cyclic_real(const Mat& m, const CaseTag& tag, const Tolerances& tol) {
  if (tag.pattern == Pattern::D3_SIMPLE_REAL) {
    for (double l : {tag.eigen.lambda1, tag.eigen.lambda2}) {
      if (l < -tol.nonneg) return not_embeddable(Reason::NEGATIVE_EIGENVALUE_CULVER);
      if (!(l > tol.nonneg)) return not_embeddable(Reason::DET_NONPOSITIVE);
    }
  } else {
    if (!(tag.eigen.lambda > tol.nonneg)) return not_embeddable(Reason::NONPOSITIVE_EIGENVALUE);
  }
  return principal_only(m, tag, tol);
}

EmbeddingResult embed_d3_complex(const Mat& m, const CaseTag& tag, const Tolerances& tol) {
  return complex_case(m, tag, tol);
}

EmbeddingResult embed_d4(const Mat& m, const CaseTag& tag, const Tolerances& tol, const DecideOptions& opt) {
  const auto& e = tag.eigen;
  auto scalar_case = [&](double l) -> std::optional<GeneratorCandidate> {
    return verify_candidate(m, (-std::log(l) / (1 - l)) * a_of(m), 0, Construction::POLY_SMT, tol);
  };
  switch (tag.pattern) {
    case Pattern::D4_IDENTITY: {
      auto g = verify_candidate(m, Mat::Zero(4, 4), 0, Construction::PRINCIPAL_LOG, tol);
      if (!g) return undecided(Reason::ILL_CONDITIONED);
      return embeddable({*g}, Uniqueness::Unique);
    }
    case Pattern::D4_DEG2_TRIPLE_ONE:
    case Pattern::D4_DEG2_TRIPLE_L: {
      if (!positive_unit(e.lambda)) return not_embeddable(Reason::NONPOSITIVE_EIGENVALUE);
      auto g = scalar_case(e.lambda);
      if (!g) return undecided(Reason::ILL_CONDITIONED, "closed-form generator failed verification");
      // rotations inside the eigenspace of 1 have zero real part and violate the cone bound
      if (tag.pattern == Pattern::D4_DEG2_TRIPLE_ONE) return embeddable({*g}, Uniqueness::Unique);
      bool more = std::abs(std::log(e.lambda)) >= 2 * pi;
      return embeddable({*g}, more ? Uniqueness::PossiblyMore : Uniqueness::Unique);
    }
    case Pattern::D4_DEG2_DOUBLE_POS: {
      if (!positive_unit(e.lambda)) return not_embeddable(Reason::NONPOSITIVE_EIGENVALUE);
      auto g = scalar_case(e.lambda);
      if (!g) {
        // the principal branch failed; only rotated branches remain
        auto scan = scan_pair_branches(m, e.lambda, false, true, tol);
        if (!scan.found.empty())
          return embeddable(scan.found,
                            scan.found.size() > 1 ? Uniqueness::MultipleKnown : Uniqueness::PossiblyMore);
        if (scan.inconclusive) return undecided(Reason::SEARCH_INCONCLUSIVE);
        return not_embeddable(scan.any_admissible ? Reason::NO_BRANCH_FEASIBLE : Reason::LOG_NOT_GENERATOR);
      }
      return with_extra_branches(m, *g, e.lambda, opt.all_branches, tol);
    }
    case Pattern::D4_DEG2_DOUBLE_NEG: return negative_pair(m, e.lambda, tol);
    case Pattern::D4_DEG3_TWO_ONES_DISTINCT:
      if (!(e.lambda1 > 0 && e.lambda2 > 0)) return not_embeddable(Reason::NEGATIVE_EIGENVALUE_CULVER);
      return principal_only(m, tag, tol);
    case Pattern::D4_DEG3_TWO_ONES_JORDAN:
    case Pattern::D4_DEG3_L_JORDAN_L:
    case Pattern::D4_JORDAN3:
      if (!(e.lambda > 0)) return not_embeddable(Reason::NEGATIVE_EIGENVALUE_CULVER);
      return principal_only(m, tag, tol);
    case Pattern::D4_MIXED_JORDAN2:
      if (!(e.lambda1 > 0 && e.lambda2 > 0)) return not_embeddable(Reason::NEGATIVE_EIGENVALUE_CULVER);
      return principal_only(m, tag, tol);
    case Pattern::D4_SIMPLE_REAL:
      if (!(e.lambda1 > 0 && e.lambda2 > 0 && e.lambda3 > 0))
        return not_embeddable(Reason::NEGATIVE_EIGENVALUE_CULVER);
      return principal_only(m, tag, tol);
    case Pattern::D4_DEG3_DOUBLE_L2_POS: {
      if (!positive_unit(e.lambda1)) return not_embeddable(Reason::NEGATIVE_EIGENVALUE_CULVER);
      auto principal = principal_only(m, tag, tol);
      if (principal.verdict == Verdict::Embeddable)
        return with_extra_branches(m, principal.generators[0], e.lambda2, opt.all_branches, tol);
      if (principal.verdict == Verdict::Undecided) return principal;
      auto scan = scan_pair_branches(m, e.lambda2, false, true, tol);
      if (!scan.found.empty())
        return embeddable(scan.found, scan.found.size() > 1 ? Uniqueness::MultipleKnown : Uniqueness::PossiblyMore);
      if (scan.inconclusive) return undecided(Reason::SEARCH_INCONCLUSIVE);
      return principal;
    }
    case Pattern::D4_DEG3_DOUBLE_L2_NEG:
      if (!positive_unit(e.lambda1)) return not_embeddable(Reason::NEGATIVE_EIGENVALUE_CULVER);
      return negative_pair(m, e.lambda2, tol);
    case Pattern::D4_DEG3_COMPLEX:
    case Pattern::D4_SIMPLE_COMPLEX: return complex_case(m, tag, tol);
    default: throw Error(ErrorCode::InvalidArgument, "embed_d4 received a non-d4 case");
  }
}

EmbeddingResult decide(const Mat& m, const Tolerances& tol, const DecideOptions& opt) {
  check_mat(m);
  tol.validate();
  if (!is_markov(m, tol)) throw Error(ErrorCode::NotMarkov, "input is not a Markov matrix");
  const int n = static_cast<int>(m.rows());

  auto nec = necessary_checks(m, tol);
  if (!nec.diag_positive) return not_embeddable(Reason::ZERO_DIAGONAL);
  if (!nec.det_positive) return not_embeddable(Reason::DET_NONPOSITIVE);
  if (!nec.culver_ok) return not_embeddable(Reason::NEGATIVE_EIGENVALUE_CULVER);
  if (!nec.unit_circle_ok) return not_embeddable(Reason::UNIT_CIRCLE);
  if (!nec.transitivity_ok) return not_embeddable(Reason::TRANSITIVITY);

  CaseTag tag;
  try {
    tag = classify(m, tol);
  } catch (const Error& err) {
    return undecided(Reason::ILL_CONDITIONED, err.what());
  }
  EmbeddingResult res;
  try {
    switch (tag.pattern) {
      case Pattern::D2_IDENTITY:
      case Pattern::D3_IDENTITY: {
        auto g = verify_candidate(m, Mat::Zero(n, n), 0, Construction::PRINCIPAL_LOG, tol);
        res = g ? embeddable({*g}, Uniqueness::Unique) : undecided(Reason::ILL_CONDITIONED);
        break;
      }
      case Pattern::D2_GENERIC: res = embed_d2(m, tol); break;
      case Pattern::D3_DEG2_1_1_L:
      case Pattern::D3_DEG2_1_L_L_POS: res = embed_d3_deg2(m, tag, tol, opt); break;
      case Pattern::D3_DEG2_1_L_L_NEG: res = embed_d3_eq_input_neg(m, tol); break;
      case Pattern::D3_SIMPLE_REAL:
      case Pattern::D3_JORDAN2: res = embed_d3_cyclic_real(m, tag, tol); break;
      case Pattern::D3_COMPLEX_PAIR: res = embed_d3_complex(m, tag, tol); break;
      default: res = embed_d4(m, tag, tol, opt); break;
    }
  } catch (const Error& err) {
    res = undecided(Reason::ILL_CONDITIONED, err.what());
  }
  if (res.verdict == Verdict::Embeddable && res.generators.size() == 1 &&
      (res.uniqueness == Uniqueness::PossiblyMore || res.uniqueness == Uniqueness::Unknown) &&
      uniqueness_certificates(m, res.generators[0].matrix) == Uniqueness::Unique)
    res.uniqueness = Uniqueness::Unique;
  res.tag = tag;
  return res;
}

}  // namespace membed
