#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "membed/linalg.hpp"

namespace membed {
namespace {

using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

// Roots closer than this (relative) are merge candidates when a rank test agrees.
// Triple roots of a perturbed characteristic polynomial scatter like eps^(1/3).
constexpr double kLooseCluster = 1e-4;
constexpr double kDiscFallback = 1e-12;

double spectral_scale(const std::vector<cplx>& r) {
  double s = 1.0;
  for (auto z : r) s = std::max(s, std::abs(z));
  return s;
}

std::vector<cplx> raw_roots(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  auto c = char_poly(m);
  auto r = poly_roots(c);
  if (n >= 3) {
    double s = spectral_scale(r);
    double disc = 1.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) disc *= std::norm((r[i] - r[j]) / s);
    if (disc < kDiscFallback) {
      // near-multiple roots: QR iteration on M keeps semisimple clusters tight
      Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(m), false);
      if (es.info() == Eigen::Success) {
        r.clear();
        for (int i = 0; i < n; ++i) {
          cplx z = es.eigenvalues()[i];
          if (std::abs(z.imag()) <= 1e-15 * std::max(1.0, std::abs(z.real()))) z = z.real();
          r.push_back(z);
        }
      }
    }
  }
  return r;
}

struct Cluster {
  std::vector<cplx> members;
  cplx mean() const {
    cplx s = std::accumulate(members.begin(), members.end(), cplx(0.0));
    return s / static_cast<double>(members.size());
  }
  double spread() const {
    double d = 0;
    for (auto a : members)
      for (auto b : members) d = std::max(d, std::abs(a - b));
    return d;
  }
  bool conj_closed() const {
    for (auto a : members) {
      if (a.imag() == 0) continue;
      bool ok = std::any_of(members.begin(), members.end(),
                            [&](cplx b) { return std::abs(b - std::conj(a)) <= 1e-14 * (1 + std::abs(a)); });
      if (!ok) return false;
    }
    return true;
  }
};

// Rank sequence consistency for a candidate eigenvalue mu of multiplicity k.
bool rank_confirms(const Mat& m, double mu, int k, const Tolerances& tol) {
  const int n = static_cast<int>(m.rows());
  int prev = n, prev_drop = n;
  for (int p = 1; p <= k; ++p) {
    bool amb = false;
    int r = shifted_rank(m, mu, p, tol, &amb);
    if (amb) return false;
    int drop = prev - r;
    if ((p == 1 && drop < 1) || drop > prev_drop) return false;
    prev = r;
    prev_drop = drop;
  }
  return prev == n - k;
}

Mat shifted_power(const Mat& m, double mu, int p) {
  Mat b = m - mu * identity(static_cast<int>(m.rows()));
  Mat out = identity(static_cast<int>(m.rows()));
  for (int i = 0; i < p; ++i) out = out * b;
  return out;
}

}  // namespace

void Tolerances::validate() const {
  for (double v : {spec_cluster, nonneg, rowsum, residual, rank})
    if (!(v > 0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
}

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::RejectsDimension: return "RejectsDimension";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotMarkov: return "NotMarkov";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::SpectrumOnCut: return "SpectrumOnCut";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NonpositiveParameter: return "NonpositiveParameter";
    case ErrorCode::InfeasibleParams: return "InfeasibleParams";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NotTotallyPositive: return "NotTotallyPositive";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

int Spectrum::total_multiplicity() const {
  int s = 0;
  for (auto& r : roots) s += r.multiplicity;
  return s;
}

int EigenBlocks::algebraic() const { return std::accumulate(sizes.begin(), sizes.end(), 0); }

bool JordanStructure::cyclic() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const EigenBlocks& b) { return b.sizes.size() == 1; });
}

const EigenBlocks* JordanStructure::find(cplx lambda, double tol) const {
  for (auto& b : blocks)
    if (std::abs(b.eigenvalue - lambda) <= tol) return &b;
  return nullptr;
}

Mat identity(int dim) { return Mat::Identity(dim, dim); }

void check_mat(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() < 2 || m.rows() > 4)
    throw Error(ErrorCode::RejectsDimension, "matrix dimension must be 2, 3 or 4");
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
}

double inf_norm(const Mat& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

double scale(const Mat& m) { return std::max(1.0, inf_norm(m)); }

std::vector<double> char_poly(const Mat& m) {
  // Faddeev-LeVerrier
  const int n = static_cast<int>(m.rows());
  std::vector<double> c(n);
  Mat mk = Mat::Zero(n, n);
  double ck = 1.0;
  for (int k = 1; k <= n; ++k) {
    mk = m * mk + ck * identity(n);
    ck = -(m * mk).trace() / k;
    c[k - 1] = ck;
  }
  return c;
}

int shifted_rank(const Mat& m, cplx mu, int p, const Tolerances& tol, bool* ambiguous) {
  const int n = static_cast<int>(m.rows());
  CMat b = m.cast<cplx>() - mu * CMat::Identity(n, n);
  CMat pw = CMat::Identity(n, n);
  for (int i = 0; i < p; ++i) pw = pw * b;
  Eigen::JacobiSVD<CMat> svd(pw);
  const auto& sv = svd.singularValues();
  double thr = tol.rank * std::max(sv(0), 1.0);
  int rank = 0;
  bool amb = false;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) >= thr) ++rank;
    if (sv(i) > thr / 10 && sv(i) < thr * 10) amb = true;
  }
  if (ambiguous) *ambiguous = amb;
  return rank;
}

Spectrum eigenvalues(const Mat& m, const Tolerances& tol) {
  check_mat(m);
  auto raw = raw_roots(m);
  const double s = spectral_scale(raw);
  const double strict = tol.spec_cluster * s;
  const double loose = std::max(kLooseCluster, tol.spec_cluster) * s;

  std::vector<Cluster> cl;
  for (auto z : raw) cl.push_back({{z}});
  bool merged_any = false;
  auto owner = [&](cplx z) -> size_t {
    for (size_t i = 0; i < cl.size(); ++i)
      for (auto w : cl[i].members)
        if (std::abs(w - z) <= 1e-14 * (1 + std::abs(z))) return i;
    return cl.size();
  };
  // agglomerative, closest pair first; a merge pulls in conjugate partners and
  // needs a rank confirmation when its spread exceeds the strict threshold
  std::vector<std::pair<size_t, size_t>> rejected;
  for (;;) {
    double best = INFINITY;
    size_t bi = 0, bj = 0;
    for (size_t i = 0; i < cl.size(); ++i)
      for (size_t j = i + 1; j < cl.size(); ++j) {
        double d = std::abs(cl[i].mean() - cl[j].mean());
        bool rej = std::find(rejected.begin(), rejected.end(), std::make_pair(i, j)) != rejected.end();
        if (!rej && d < best) best = d, bi = i, bj = j;
      }
    if (best > loose) break;
    std::vector<size_t> ids{bi, bj};
    for (size_t t = 0; t < ids.size(); ++t)
      for (auto z : cl[ids[t]].members) {
        size_t o = owner(std::conj(z));
        if (o < cl.size() && std::find(ids.begin(), ids.end(), o) == ids.end()) ids.push_back(o);
      }
    Cluster u;
    for (auto id : ids) u.members.insert(u.members.end(), cl[id].members.begin(), cl[id].members.end());
    double spread = u.spread();
    bool ok = spread <= strict ||
              (spread <= loose && rank_confirms(m, u.mean().real(), static_cast<int>(u.members.size()), tol));
    if (ok) {
      std::sort(ids.rbegin(), ids.rend());
      for (auto id : ids) cl.erase(cl.begin() + static_cast<long>(id));
      cl.push_back(u);
      rejected.clear();
      merged_any = true;
    } else {
      rejected.emplace_back(bi, bj);
    }
  }
  const auto& fin = cl;

  Spectrum sp;
  sp.clustered = merged_any;
  for (auto& c : fin) {
    cplx v = c.mean();
    if (c.members.size() > 1 && c.conj_closed()) v = v.real();
    sp.roots.push_back({v, static_cast<int>(c.members.size())});
  }
  if (is_markov(m, tol)) {
    auto it = std::min_element(sp.roots.begin(), sp.roots.end(), [](const Root& a, const Root& b) {
      return std::abs(a.value - 1.0) < std::abs(b.value - 1.0);
    });
    it->value = 1.0;
  }
  std::sort(sp.roots.begin(), sp.roots.end(), [](const Root& a, const Root& b) {
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });
  return sp;
}

JordanStructure jordan_structure(const Mat& m, const Tolerances& tol) {
  auto sp = eigenvalues(m, tol);
  const int n = static_cast<int>(m.rows());
  JordanStructure js;
  for (auto& r : sp.roots) {
    EigenBlocks eb{r.value, {}};
    if (r.multiplicity == 1) {
      eb.sizes = {1};
    } else {
      std::vector<int> ranks{n};
      for (int p = 1; p <= r.multiplicity; ++p) {
        bool amb = false;
        ranks.push_back(shifted_rank(m, r.value, p, tol, &amb));
        if (amb) throw Error(ErrorCode::IllConditioned, "rank decision within 10x of the rank threshold");
      }
      // blocks of size >= p: ranks[p-1] - ranks[p]
      std::vector<int> ge(r.multiplicity + 2, 0);
      for (int p = 1; p <= r.multiplicity; ++p) ge[p] = ranks[p - 1] - ranks[p];
      for (int p = r.multiplicity; p >= 1; --p)
        for (int k = 0; k < ge[p] - ge[p + 1]; ++k) eb.sizes.push_back(p);
      if (eb.algebraic() != r.multiplicity)
        throw Error(ErrorCode::IllConditioned, "rank sequence inconsistent with clustered multiplicity");
      std::sort(eb.sizes.rbegin(), eb.sizes.rend());
    }
    js.min_poly_degree += eb.largest();
    js.blocks.push_back(eb);
  }
  return js;
}

Mat mat_exp(const Mat& a) {
  check_mat(a);
  const int n = static_cast<int>(a.rows());
  // shift so the core is entrywise nonnegative when A is Metzler (exact Markov output for generators)
  bool metzler = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && a(i, j) < 0) metzler = false;
  double mu = metzler ? a.diagonal().minCoeff() : a.trace() / n;
  Mat b = a - mu * identity(n);
  double nb = b.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (nb > 0.25) s = static_cast<int>(std::ceil(std::log2(nb / 0.25)));
  b /= std::ldexp(1.0, s);
  // Taylor to 18 terms: 0.25^19/19! is far below unit roundoff
  Mat term = identity(n), sum = identity(n);
  for (int k = 1; k <= 18; ++k) {
    term = term * b / k;
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return std::exp(mu) * sum;
}

Mat mat_sqrt(const Mat& m) {
  // product form of the Denman-Beavers iteration
  const int n = static_cast<int>(m.rows());
  Mat x = m, mk = m;
  const Mat id = identity(n);
  for (int it = 0; it < 100; ++it) {
    Eigen::PartialPivLU<Mat> lu(mk);
    Mat inv = lu.inverse();
    double g = std::pow(std::abs(lu.determinant()), -1.0 / (2.0 * n));
    if (!std::isfinite(g) || g == 0) g = 1;
    Mat xn = 0.5 * g * x * (id + inv / (g * g));
    mk = 0.5 * (id + 0.5 * (g * g * mk + inv / (g * g)));
    double diff = (xn - x).cwiseAbs().maxCoeff();
    x = xn;
    if ((mk - id).cwiseAbs().maxCoeff() < 1e-15 && diff < 1e-14 * x.cwiseAbs().maxCoeff()) break;
  }
  return x;
}

Mat principal_log(const Mat& m, const Tolerances& tol) {
  check_mat(m);
  const int n = static_cast<int>(m.rows());
  auto sp = eigenvalues(m, tol);
  for (auto& r : sp.roots) {
    bool on_axis = std::abs(r.value.imag()) <= tol.spec_cluster * std::max(1.0, std::abs(r.value));
    if (on_axis && r.value.real() <= tol.nonneg)
      throw Error(ErrorCode::SpectrumOnCut, "eigenvalue on the closed negative real axis");
  }
  const Mat id = identity(n);
  Mat x = m;
  int k = 0;
  while ((x - id).cwiseAbs().rowwise().sum().maxCoeff() > 0.2 && k < 60) {
    x = mat_sqrt(x);
    ++k;
  }
  // Gauss-Legendre partial fractions: log(I+E) = sum w_j E (I + t_j E)^-1
  static const std::array<double, 8> nodes = {0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                              0.4082826787521751,   0.5917173212478249,  0.7627662049581645,
                                              0.8983332387068134,   0.9801449282487681};
  static const std::array<double, 8> weights = {0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                                                0.18134189168918100, 0.18134189168918100, 0.15685332293894363,
                                                0.11119051722668724, 0.05061426814518813};
  Mat e = x - id;
  Mat l = Mat::Zero(n, n);
  for (size_t j = 0; j < nodes.size(); ++j) l += weights[j] * (id + nodes[j] * e).partialPivLu().solve(e);
  l *= std::ldexp(1.0, k);
  double res = inf_norm(mat_exp(l) - m);
  if (!(res <= tol.residual * scale(m)))
    throw Error(ErrorCode::IllConditioned, "principal logarithm failed its residual check");
  return l;
}

Mat poly_in(std::span<const double> coeffs, const Mat& a) {
  const int n = static_cast<int>(a.rows());
  Mat out = Mat::Zero(n, n), pw = a;
  for (double c : coeffs) {
    out += c * pw;
    pw = pw * a;
  }
  return out;
}

bool is_markov(const Mat& m, const Tolerances& tol) {
  if (!m.allFinite()) return false;
  if ((m.array() < -tol.nonneg).any()) return false;
  for (int i = 0; i < m.rows(); ++i)
    if (std::abs(m.row(i).sum() - 1.0) > tol.rowsum) return false;
  return true;
}

bool is_generator(const Mat& q, const Tolerances& tol) {
  if (!q.allFinite()) return false;
  for (int i = 0; i < q.rows(); ++i) {
    for (int j = 0; j < q.cols(); ++j)
      if (i != j && q(i, j) < -tol.nonneg) return false;
    if (std::abs(q.row(i).sum()) > tol.rowsum) return false;
  }
  return true;
}

RealJordan real_jordan(const Mat& m, const Tolerances& tol) {
  const int n = static_cast<int>(m.rows());
  auto js = jordan_structure(m, tol);
  auto blocks = js.blocks;
  // canonical ordering: eigenvalue 1 first, then by multiplicity, real before complex, descending value
  std::stable_sort(blocks.begin(), blocks.end(), [](const EigenBlocks& a, const EigenBlocks& b) {
    bool a1 = a.eigenvalue == 1.0, b1 = b.eigenvalue == 1.0;
    if (a1 != b1) return a1;
    bool ac = a.eigenvalue.imag() != 0, bc = b.eigenvalue.imag() != 0;
    if (ac != bc) return !ac;
    if (a.algebraic() != b.algebraic()) return a.algebraic() < b.algebraic();
    return a.eigenvalue.real() > b.eigenvalue.real();
  });

  RealJordan rj;
  rj.T = Mat::Zero(n, n);
  rj.canonical = Mat::Zero(n, n);
  int col = 0;
  for (auto& eb : blocks) {
    cplx lam = eb.eigenvalue;
    if (lam.imag() < 0) continue;  // handled with its conjugate
    if (lam.imag() > 0) {
      CMat b = m.cast<cplx>() - lam * CMat::Identity(n, n);
      Eigen::JacobiSVD<CMat> svd(b, Eigen::ComputeFullV);
      Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, 4, 1> v = svd.matrixV().col(n - 1);
      // rotate the phase so real and imaginary parts are orthogonal
      cplx vv = v.transpose() * v;
      v *= std::exp(cplx(0, -0.5 * std::arg(vv)));
      Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1> vr = v.real(), vi = v.imag();
      rj.T.col(col) = vr / vr.norm();
      rj.T.col(col + 1) = vi / vr.norm();
      rj.canonical(col, col) = lam.real();
      rj.canonical(col + 1, col + 1) = lam.real();
      rj.canonical(col, col + 1) = lam.imag();
      rj.canonical(col + 1, col) = -lam.imag();
      col += 2;
      continue;
    }
    double mu = lam.real();
    const int alg = eb.algebraic();
    if (eb.largest() == 1) {
      Mat b = m - mu * identity(n);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(b), Eigen::ComputeFullV);
      for (int k = 0; k < alg; ++k) {
        rj.T.col(col) = svd.matrixV().col(n - 1 - k);
        rj.canonical(col, col) = mu;
        ++col;
      }
      continue;
    }
    // defective: chains v, Nv, ..., N^{s-1}v for each block, largest first
    Mat nmat = m - mu * identity(n);
    std::vector<Eigen::VectorXd> chosen;
    for (int s : eb.sizes) {
      Mat ps = shifted_power(m, mu, s);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(ps), Eigen::ComputeFullV);
      int null_dim = n - shifted_rank(m, mu, s, tol);
      bool placed = false;
      for (int k = 0; k < null_dim && !placed; ++k) {
        Eigen::VectorXd v = svd.matrixV().col(n - 1 - k);
        std::vector<Eigen::VectorXd> chain(s);
        chain[s - 1] = v;
        for (int t = s - 2; t >= 0; --t) chain[t] = Eigen::VectorXd(nmat * chain[t + 1]);
        Eigen::MatrixXd all(n, chosen.size() + s);
        for (size_t t = 0; t < chosen.size(); ++t) all.col(static_cast<long>(t)) = chosen[t];
        for (int t = 0; t < s; ++t) all.col(static_cast<long>(chosen.size()) + t) = chain[t];
        Eigen::JacobiSVD<Eigen::MatrixXd> chk(all);
        auto sv = chk.singularValues();
        if (sv(sv.size() - 1) > 1e-6 * sv(0)) {
          double nrm = chain[0].norm();
          for (int t = 0; t < s; ++t) {
            rj.T.col(col + t) = chain[t] / nrm;
            rj.canonical(col + t, col + t) = mu;
            if (t > 0) rj.canonical(col + t - 1, col + t) = 1.0;
          }
          // rescaling every chain vector by nrm keeps the superdiagonal equal to 1
          for (auto& c : chain) chosen.push_back(c);
          col += s;
          placed = true;
        }
      }
      if (!placed) throw Error(ErrorCode::IllConditioned, "could not build a Jordan chain");
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(rj.T));
  auto sv = svd.singularValues();
  rj.cond = sv(n - 1) > 0 ? sv(0) / sv(n - 1) : INFINITY;
  rj.ill_conditioned = !(rj.cond <= 1e8);
  return rj;
}

}  // namespace membed
