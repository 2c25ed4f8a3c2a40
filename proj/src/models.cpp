#include "membed/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace membed {
namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

void fill_diagonal(Mat& m, double row_total) {
  for (int i = 0; i < m.rows(); ++i) {
    double s = 0;
    for (int j = 0; j < m.cols(); ++j)
      if (j != i) s += m(i, j);
    m(i, i) = row_total - s;
  }
}

// Reads the Tamura-Nei pattern off a matrix (Markov or generator); nullopt if the shape does not match.
std::optional<TNParams> tn_params_of(const Mat& m, double tol) {
  if (m.rows() != 4) return std::nullopt;
  TNParams p;
  if (!close(m(2, 0), m(3, 0), tol) || !close(m(2, 1), m(3, 1), tol) || !close(m(0, 2), m(1, 2), tol) ||
      !close(m(0, 3), m(1, 3), tol))
    return std::nullopt;
  p.a1 = m(2, 0), p.a2 = m(2, 1), p.a3 = m(0, 2), p.a4 = m(0, 3);
  auto kappa = [&](double ai, double aj, double mi, double mj, double& k) {
    double s = ai + aj;
    k = s > tol ? (mi + mj) / s : 1.0;
    return close(mi, k * ai, tol) && close(mj, k * aj, tol) && k >= -tol;
  };
  if (!kappa(p.a1, p.a2, m(1, 0), m(0, 1), p.kappa1)) return std::nullopt;
  if (!kappa(p.a3, p.a4, m(3, 2), m(2, 3), p.kappa2)) return std::nullopt;
  return p;
}

bool kappa_free(const TNParams& p, double tol, int which) {
  return which == 1 ? p.a1 + p.a2 <= tol : p.a3 + p.a4 <= tol;
}

std::optional<K3STParams> k3st_params_of(const Mat& m, double tol) {
  if (m.rows() != 4) return std::nullopt;
  const int xs[4][2] = {{0, 1}, {1, 0}, {2, 3}, {3, 2}};
  const int ys[4][2] = {{0, 2}, {2, 0}, {1, 3}, {3, 1}};
  const int zs[4][2] = {{0, 3}, {3, 0}, {1, 2}, {2, 1}};
  auto same = [&](const int (&idx)[4][2]) {
    for (auto& ij : idx)
      if (!close(m(ij[0], ij[1]), m(idx[0][0], idx[0][1]), tol)) return false;
    return true;
  };
  if (!same(xs) || !same(ys) || !same(zs)) return std::nullopt;
  return K3STParams{m(0, 1), m(0, 2), m(0, 3)};
}

EmbeddingResult model_result(Verdict v, Reason r = Reason::NONE) {
  EmbeddingResult res;
  res.verdict = v;
  res.reason = r;
  return res;
}

bool spectrum_simple(const std::array<double, 3>& l, double tol) {
  for (int i = 0; i < 3; ++i) {
    if (close(l[i], 1.0, tol)) return false;
    if (close(l[i], l[(i + 1) % 3], tol)) return false;
  }
  return true;
}

}  // namespace

const char* to_string(ModelTag t) {
  switch (t) {
    case ModelTag::EQUAL_INPUT: return "EQUAL_INPUT";
    case ModelTag::CONSTANT_INPUT: return "CONSTANT_INPUT";
    case ModelTag::TN: return "TN";
    case ModelTag::HKY: return "HKY";
    case ModelTag::K3ST: return "K3ST";
    case ModelTag::K2P: return "K2P";
  }
  return "?";
}

double EqualInputParams::c() const {
  double s = 0;
  for (double v : c_vec) s += v;
  return s;
}

Mat equal_input_matrix(const EqualInputParams& p) {
  const int n = static_cast<int>(p.c_vec.size());
  if (n < 2 || n > 4) throw Error(ErrorCode::RejectsDimension, "equal-input dimension must be 2, 3 or 4");
  double c = p.c();
  for (double ci : p.c_vec) {
    if (!(ci >= 0) || !std::isfinite(ci)) throw Error(ErrorCode::InfeasibleParams, "c_i must be nonnegative");
    if (c > 1 + ci) throw Error(ErrorCode::InfeasibleParams, "equal-input parameters violate the Markov condition");
  }
  Mat m = (1 - c) * identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) += p.c_vec[j];
  return m;
}

std::optional<EqualInputParams> recognize_equal_input(const Mat& m, const Tolerances& tol) {
  check_mat(m);
  const int n = static_cast<int>(m.rows());
  EqualInputParams p;
  p.c_vec.assign(n, 0.0);
  // column j off the diagonal must be constant and equal to c_j
  for (int j = 0; j < n; ++j) {
    int ref = j == 0 ? 1 : 0;
    p.c_vec[j] = m(ref, j);
    for (int i = 0; i < n; ++i)
      if (i != j && !close(m(i, j), p.c_vec[j], tol.rowsum)) return std::nullopt;
  }
  double c = p.c();
  for (int i = 0; i < n; ++i)
    if (!close(m(i, i), 1 - c + p.c_vec[i], tol.rowsum)) return std::nullopt;
  return p;
}

EmbeddingResult embed_equal_input(const EqualInputParams& p, int dim, const Tolerances& tol) {
  if (static_cast<int>(p.c_vec.size()) != dim) throw Error(ErrorCode::InfeasibleParams, "c_vec length must equal dim");
  Mat m = equal_input_matrix(p);
  double c = p.c();
  if (c == 0) {
    EmbeddingResult res = model_result(Verdict::Embeddable);
    res.generators.push_back({Mat::Zero(dim, dim), 0, Construction::MODEL_CLOSED_FORM, 0.0});
    res.uniqueness = Uniqueness::Unique;
    return res;
  }
  if (c < 1) {
    Mat q = (-std::log1p(-c) / c) * (m - identity(dim));
    auto g = verify_candidate(m, q, 0, Construction::MODEL_CLOSED_FORM, tol);
    if (!g) return model_result(Verdict::Undecided, Reason::ILL_CONDITIONED);
    EmbeddingResult res = model_result(Verdict::Embeddable);
    res.generators.push_back(*g);
    // other real logarithms rotate the repeated eigenvalue 1-c; the generator cone excludes them near 1
    double reach = -std::log1p(-c) / std::tan(std::numbers::pi / dim);
    bool more = dim > 2 && reach >= 2 * std::numbers::pi;
    res.uniqueness = more ? uniqueness_certificates(m, q) : Uniqueness::Unique;
    if (res.uniqueness == Uniqueness::Unknown) res.uniqueness = Uniqueness::PossiblyMore;
    return res;
  }
  if (c == 1) return model_result(Verdict::NotEmbeddable, Reason::DET_NONPOSITIVE);
  if (dim == 3) return embed_d3_eq_input_neg(m, tol);
  return model_result(Verdict::NotEmbeddable, dim == 2 ? Reason::DET_NONPOSITIVE : Reason::NONPOSITIVE_EIGENVALUE);
}

std::vector<Mat> commutant_basis_d3(double c1, double c2, double c3) {
  if (!(c1 > 0 && c2 > 0 && c3 > 0)) throw Error(ErrorCode::NonpositiveParameter, "c_i must be positive");
  double al = (c1 + c3) * (c2 + c3), be = (c1 + c2) * (c1 + c3), ga = (c1 + c2) * (c2 + c3);
  std::vector<Mat> b(4, Mat::Zero(3, 3));
  b[0](1, 2) = c3, b[0](2, 1) = c2;
  b[1](0, 2) = c3, b[1](2, 0) = c1;
  b[2](0, 1) = c2, b[2](1, 0) = c1;
  b[3](0, 1) = al, b[3](0, 2) = -ga;
  b[3](1, 0) = -al, b[3](1, 2) = be;
  b[3](2, 0) = ga, b[3](2, 1) = -be;
  for (auto& m : b) fill_diagonal(m, 0);
  return b;
}

Mat tn_matrix(const TNParams& p) {
  const double v[6] = {p.a1, p.a2, p.a3, p.a4, p.kappa1, p.kappa2};
  for (double x : v)
    if (!(x >= 0) || !std::isfinite(x)) throw Error(ErrorCode::InfeasibleParams, "TN parameters must be nonnegative");
  Mat m(4, 4);
  m << 0, p.a2 * p.kappa1, p.a3, p.a4,  //
      p.a1 * p.kappa1, 0, p.a3, p.a4,   //
      p.a1, p.a2, 0, p.a4 * p.kappa2,   //
      p.a1, p.a2, p.a3 * p.kappa2, 0;
  fill_diagonal(m, 1);
  for (int i = 0; i < 4; ++i)
    if (m(i, i) < 0) throw Error(ErrorCode::InfeasibleParams, "TN row off-diagonal sum exceeds 1");
  return m;
}

std::array<double, 3> tn_spectrum(const TNParams& p) {
  double s12 = p.a1 + p.a2, s34 = p.a3 + p.a4;
  return {1 - (s12 + s34), 1 - p.kappa1 * s12 - s34, 1 - s12 - p.kappa2 * s34};
}

bool tn_condition(const TNParams& p) {
  double s12 = p.a1 + p.a2, s34 = p.a3 + p.a4;
  double lo = std::min(1.0, p.kappa1) * s12 + std::min(1.0, p.kappa2) * s34;
  double hi = std::max(1.0, p.kappa1) * s12 + std::max(1.0, p.kappa2) * s34;
  return lo > 0 && hi < 1;
}

bool is_tn_shaped(const Mat& q, double tol) {
  if (q.rows() != 4) return false;
  for (int i = 0; i < 4; ++i)
    if (std::abs(q.row(i).sum()) > tol) return false;
  return tn_params_of(q, tol).has_value();
}

EmbeddingResult embed_tn(const TNParams& p, const Tolerances& tol) {
  Mat m = tn_matrix(p);
  auto l = tn_spectrum(p);
  // routing by the spectrum rather than parameter equality tolerates near-degenerate inputs
  if (!spectrum_simple(l, tol.spec_cluster)) return decide(m, tol);
  // the closed-form condition is neither necessary nor sufficient; decide from the spectrum and the log
  for (double x : l)
    if (!(x > 0)) {
      auto res = model_result(Verdict::NotEmbeddable, Reason::NONPOSITIVE_EIGENVALUE);
      res.note = "TN spectrum has a nonpositive eigenvalue";
      return res;
    }
  Mat q;
  try {
    q = principal_log(m, tol);
  } catch (const Error& e) {
    auto res = model_result(Verdict::Undecided, Reason::ILL_CONDITIONED);
    res.note = e.what();
    return res;
  }
  // a simple positive spectrum has exactly one real logarithm
  if (!is_generator(q, tol)) {
    auto res = model_result(Verdict::NotEmbeddable, Reason::LOG_NOT_GENERATOR);
    res.note = "the unique real logarithm has a negative rate";
    return res;
  }
  auto g = verify_candidate(m, q, 0, Construction::PRINCIPAL_LOG, tol);
  if (!g) return model_result(Verdict::Undecided, Reason::ILL_CONDITIONED);
  EmbeddingResult res = model_result(Verdict::Embeddable);
  res.generators.push_back(*g);
  res.uniqueness = Uniqueness::Unique;
  return res;
}

Mat k3st_matrix(const K3STParams& p) {
  for (double v : {p.x, p.y, p.z})
    if (!(v >= 0) || !std::isfinite(v)) throw Error(ErrorCode::InfeasibleParams, "K3ST parameters must be nonnegative");
  if (p.x + p.y + p.z > 1) throw Error(ErrorCode::InfeasibleParams, "K3ST parameters must satisfy x+y+z <= 1");
  Mat m(4, 4);
  m << 0, p.x, p.y, p.z,  //
      p.x, 0, p.z, p.y,   //
      p.y, p.z, 0, p.x,   //
      p.z, p.y, p.x, 0;
  fill_diagonal(m, 1);
  return m;
}

std::array<double, 3> k3st_spectrum(const K3STParams& p) {
  return {1 - 2 * (p.x + p.z), 1 - 2 * (p.y + p.z), 1 - 2 * (p.x + p.y)};
}

Mat k3st_generator(const K3STParams& p) {
  auto l = k3st_spectrum(p);
  for (double v : l)
    if (!(v > 0)) throw Error(ErrorCode::SpectrumOnCut, "K3ST eigenvalue not positive");
  double g1 = std::log(l[0]), g2 = std::log(l[1]), g3 = std::log(l[2]);
  double d = (g1 + g2 + g3) / 4;
  double qx = (-g1 + g2 - g3) / 4, qy = (g1 - g2 - g3) / 4, qz = (-g1 - g2 + g3) / 4;
  Mat q(4, 4);
  q << d, qx, qy, qz,  //
      qx, d, qz, qy,   //
      qy, qz, d, qx,   //
      qz, qy, qx, d;
  return q;
}

EmbeddingResult embed_k3st(const K3STParams& p, const Tolerances& tol) {
  Mat m = k3st_matrix(p);
  auto l = k3st_spectrum(p);
  if (!spectrum_simple(l, tol.spec_cluster)) return decide(m, tol);
  for (double v : l)
    if (!(v > 0)) return model_result(Verdict::NotEmbeddable, Reason::NONPOSITIVE_EIGENVALUE);
  bool products = l[0] >= l[1] * l[2] && l[1] >= l[0] * l[2] && l[2] >= l[0] * l[1];
  if (!products) return model_result(Verdict::NotEmbeddable, Reason::MODEL_CONDITION);
  Mat q = k3st_generator(p);
  // boundary points can leave an off-diagonal entry at -eps; clamp before verification
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j && q(i, j) < 0 && q(i, j) > -tol.nonneg) q(i, j) = 0;
  fill_diagonal(q, 0);
  auto g = verify_candidate(m, q, 0, Construction::MODEL_CLOSED_FORM, tol);
  if (!g) return model_result(Verdict::Undecided, Reason::ILL_CONDITIONED);
  EmbeddingResult res = model_result(Verdict::Embeddable);
  res.generators.push_back(*g);
  res.uniqueness = Uniqueness::Unique;
  return res;
}

std::set<ModelTag> model_recognize(const Mat& m, const Tolerances& tol) {
  std::set<ModelTag> tags;
  if (!is_markov(m, tol)) return tags;
  const double t = tol.rowsum;
  if (auto ei = recognize_equal_input(m, tol)) {
    tags.insert(ModelTag::EQUAL_INPUT);
    auto [lo, hi] = std::minmax_element(ei->c_vec.begin(), ei->c_vec.end());
    if (*hi - *lo <= t) tags.insert(ModelTag::CONSTANT_INPUT);
  }
  if (auto tn = tn_params_of(m, t)) {
    tags.insert(ModelTag::TN);
    if (kappa_free(*tn, t, 1) || kappa_free(*tn, t, 2) || close(tn->kappa1, tn->kappa2, t))
      tags.insert(ModelTag::HKY);
  }
  if (auto k = k3st_params_of(m, t)) {
    tags.insert(ModelTag::K3ST);
    if (close(k->y, k->z, t)) tags.insert(ModelTag::K2P);
  }
  return tags;
}

}  // namespace membed
