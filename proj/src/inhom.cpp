#include "membed/inhom.hpp"

#include <algorithm>
#include <cmath>

namespace membed {
namespace {

constexpr double kZeroRowSum = 1e-10;

// Grid index of time t inside a sampled segment; t must sit on the grid.
int grid_index(const SampledSegment& s, double t) {
  double r = t / s.step;
  long j = std::lround(r);
  if (std::abs(r - static_cast<double>(j)) > 1e-9 * std::max(1.0, r))
    throw Error(ErrorCode::InvalidArgument, "evaluation time must lie on the sampling grid");
  return static_cast<int>(j);
}

// Schedule restricted to [0, t].
Schedule truncate(const Schedule& s, double t) {
  if (t < 0 || t > s.span() * (1 + 1e-12) + 1e-12)
    throw Error(ErrorCode::InvalidArgument, "time outside the schedule span");
  Schedule out;
  double left = t;
  for (auto& seg : s.segments) {
    if (left <= 0) break;
    if (auto* c = std::get_if<ConstantSegment>(&seg)) {
      double d = std::min(c->duration, left);
      out.segments.push_back(ConstantSegment{c->Q, d});
      left -= c->duration;
    } else {
      auto& sm = std::get<SampledSegment>(seg);
      if (left >= sm.duration()) {
        out.segments.push_back(sm);
        left -= sm.duration();
      } else {
        int j = grid_index(sm, left);
        if (j > 0) {
          SampledSegment part{{sm.samples.begin(), sm.samples.begin() + j + 1}, sm.step};
          out.segments.push_back(part);
        }
        left = 0;
      }
    }
  }
  return out;
}

// Cumulative integral of tabulated values f_0..f_N on a uniform grid:
// composite Simpson at even nodes, a three-point rule for the last odd interval.
template <class T>
std::vector<T> cumulative_simpson(const std::vector<T>& f, double h) {
  const size_t n = f.size();
  std::vector<T> out(n);
  out[0] = f[0] * 0.0;
  if (n == 1) return out;
  if (n == 2) {
    out[1] = (f[0] + f[1]) * (h / 2);
    return out;
  }
  for (size_t j = 1; j < n; ++j) {
    if (j % 2 == 0)
      out[j] = out[j - 2] + (f[j - 2] + f[j - 1] * 4.0 + f[j]) * (h / 3);
    else if (j == 1)
      out[j] = (f[0] * 5.0 + f[1] * 8.0 - f[2]) * (h / 12);
    else
      out[j] = out[j - 1] + (f[j - 2] * -1.0 + f[j - 1] * 8.0 + f[j] * 5.0) * (h / 12);
  }
  return out;
}

// One iterate of the series, stored per segment: polynomial coefficients in the local
// time for constant segments, node values for sampled ones.
struct Iterate {
  std::vector<std::vector<Mat>> parts;
};

Mat poly_eval(const std::vector<Mat>& c, double u) {
  Mat r = c.back();
  for (size_t k = c.size() - 1; k-- > 0;) r = r * u + c[k];
  return r;
}

Mat end_value(const Schedule& s, const Iterate& it, size_t i) {
  if (auto* c = std::get_if<ConstantSegment>(&s.segments[i])) return poly_eval(it.parts[i], c->duration);
  return it.parts[i].back();
}

void check_zero_rows(const Mat& m) {
  for (int i = 0; i < m.rows(); ++i)
    if (std::abs(m.row(i).sum()) > kZeroRowSum * std::max(1.0, m.cwiseAbs().maxCoeff()))
      throw Error(ErrorCode::IllConditioned, "Peano-Baker iterate lost the zero row sum property");
}

}  // namespace

const char* to_string(GVerdict v) {
  switch (v) {
    case GVerdict::GEmbeddable: return "GEmbeddable";
    case GVerdict::NotGEmbeddable: return "NotGEmbeddable";
    case GVerdict::Undecided: return "Undecided";
  }
  return "?";
}

int Schedule::dim() const {
  if (segments.empty()) throw Error(ErrorCode::InvalidArgument, "empty schedule");
  if (auto* c = std::get_if<ConstantSegment>(&segments[0])) return static_cast<int>(c->Q.rows());
  return static_cast<int>(std::get<SampledSegment>(segments[0]).samples.at(0).rows());
}

double Schedule::span() const {
  double t = 0;
  for (auto& seg : segments) {
    if (auto* c = std::get_if<ConstantSegment>(&seg))
      t += c->duration;
    else
      t += std::get<SampledSegment>(seg).duration();
  }
  return t;
}

void Schedule::validate(const Tolerances& tol) const {
  const int n = dim();
  auto check_q = [&](const Mat& q) {
    check_mat(q);
    if (q.rows() != n) throw Error(ErrorCode::InvalidArgument, "generators in a schedule must share one dimension");
    if (!is_generator(q, tol)) throw Error(ErrorCode::InvalidArgument, "schedule entry is not a generator");
  };
  for (auto& seg : segments) {
    if (auto* c = std::get_if<ConstantSegment>(&seg)) {
      check_q(c->Q);
      if (!(c->duration > 0) || !std::isfinite(c->duration))
        throw Error(ErrorCode::InvalidArgument, "segment durations must be positive");
    } else {
      auto& sm = std::get<SampledSegment>(seg);
      if (sm.samples.size() < 2) throw Error(ErrorCode::InvalidArgument, "sampled segment needs two samples");
      if (!(sm.step > 0) || !std::isfinite(sm.step)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
      for (auto& q : sm.samples) check_q(q);
    }
  }
}

Mat evolve(const Schedule& s) {
  s.validate();
  const int n = s.dim();
  Mat m = identity(n);
  for (auto& seg : s.segments) {
    if (auto* c = std::get_if<ConstantSegment>(&seg)) {
      m = m * mat_exp(c->duration * c->Q);
    } else {
      // exponential midpoint rule: each factor is the exponential of a generator
      auto& sm = std::get<SampledSegment>(seg);
      for (size_t j = 0; j + 1 < sm.samples.size(); ++j)
        m = m * mat_exp((0.5 * sm.step) * (sm.samples[j] + sm.samples[j + 1]));
    }
  }
  return m;
}

Mat peano_baker(const Schedule& full, double t, int max_terms, double tol) {
  full.validate();
  const int n = full.dim();
  Schedule s = truncate(full, t);
  if (s.segments.empty()) return identity(n);
  const size_t ns = s.segments.size();

  Iterate cur;
  for (auto& seg : s.segments) {
    if (std::holds_alternative<ConstantSegment>(seg))
      cur.parts.push_back({identity(n)});
    else
      cur.parts.push_back(std::vector<Mat>(std::get<SampledSegment>(seg).samples.size(), identity(n)));
  }
  Mat sum = identity(n);
  for (int term = 1; term <= max_terms; ++term) {
    Iterate next;
    next.parts.resize(ns);
    Mat start = Mat::Zero(n, n);
    double size = 0;
    for (size_t i = 0; i < ns; ++i) {
      if (auto* c = std::get_if<ConstantSegment>(&s.segments[i])) {
        auto& p = cur.parts[i];
        std::vector<Mat> q(p.size() + 1);
        q[0] = start;
        for (size_t k = 0; k < p.size(); ++k) q[k + 1] = (p[k] * c->Q) / static_cast<double>(k + 1);
        next.parts[i] = std::move(q);
      } else {
        auto& sm = std::get<SampledSegment>(s.segments[i]);
        std::vector<Mat> f(sm.samples.size());
        for (size_t j = 0; j < f.size(); ++j) f[j] = cur.parts[i][j] * sm.samples[j];
        auto integ = cumulative_simpson(f, sm.step);
        for (auto& v : integ) {
          v += start;
          size = std::max(size, inf_norm(v));
        }
        next.parts[i] = std::move(integ);
      }
      start = end_value(s, next, i);
      size = std::max(size, inf_norm(start));
      check_zero_rows(start);
    }
    sum += start;
    cur = std::move(next);
    if (size < tol) return sum;
  }
  throw Error(ErrorCode::NotConverged, "Peano-Baker series did not converge within the term budget");
}

double liouville_det(const Schedule& full, double t) {
  full.validate();
  Schedule s = truncate(full, t);
  double integral = 0;
  for (auto& seg : s.segments) {
    if (auto* c = std::get_if<ConstantSegment>(&seg)) {
      integral += c->duration * c->Q.trace();
    } else {
      auto& sm = std::get<SampledSegment>(seg);
      std::vector<double> tr;
      for (auto& q : sm.samples) tr.push_back(q.trace());
      integral += cumulative_simpson(tr, sm.step).back();
    }
  }
  return std::exp(integral);
}

Mat poisson_matrix(const PoissonFactor& f, int dim) {
  if (dim < 2 || dim > 4) throw Error(ErrorCode::RejectsDimension, "dimension must be 2, 3 or 4");
  if (f.i == f.j || f.i < 0 || f.j < 0 || f.i >= dim || f.j >= dim)
    throw Error(ErrorCode::InvalidArgument, "Poisson factor needs distinct indices in range");
  if (!(f.a >= 0 && f.a <= 1)) throw Error(ErrorCode::InvalidArgument, "Poisson parameter must lie in [0,1]");
  Mat m = identity(dim);
  m(f.i, f.i) -= f.a;
  m(f.i, f.j) += f.a;
  return m;
}

Mat bangbang_product(const std::vector<PoissonFactor>& fs, int dim) {
  Mat m = identity(dim);
  for (auto& f : fs) m = m * poisson_matrix(f, dim);
  return m;
}

bool g_necessary(const Mat& m, double tol) {
  check_mat(m);
  double det = m.determinant();
  return m.diagonal().prod() >= det - tol && det > 0;
}

double b_quantity(const Mat& m) {
  check_mat(m);
  if (m.rows() != 3) throw Error(ErrorCode::RejectsDimension, "B_M is only defined for d=3");
  if (!(m.minCoeff() > 0)) throw Error(ErrorCode::NotTotallyPositive, "B_M needs a totally positive matrix");
  double best = -INFINITY;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int r0 = i == 0 ? 1 : 0, r1 = i == 2 ? 1 : 2;
      int c0 = j == 0 ? 1 : 0, c1 = j == 2 ? 1 : 2;
      double minor = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
      // 1-based exponent i+j+delta_ij-1
      int e = (i + 1) + (j + 1) + (i == j ? 1 : 0) - 1;
      double sign = e % 2 == 0 ? 1.0 : -1.0;
      best = std::max(best, m(i, i) * m(j, j) / m(i, j) * sign * minor);
    }
  return best;
}

GReport g_embed_d3(const Mat& m, const Tolerances& tol) {
  check_mat(m);
  if (m.rows() != 3) throw Error(ErrorCode::RejectsDimension, "g-embeddability tests are d=3 only");
  if (!is_markov(m, tol)) throw Error(ErrorCode::NotMarkov, "input is not a Markov matrix");
  GReport r;
  double det = m.determinant();
  // slack for rounding in det and the diagonal product
  r.necessary_ok = g_necessary(m, tol.residual * scale(m));
  if (!(det > 0)) {
    r.verdict = GVerdict::NotGEmbeddable;
    r.note = "determinant not positive";
    return r;
  }
  bool zero_offdiag = false;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j && std::abs(m(i, j)) <= tol.nonneg) zero_offdiag = true;
  if (zero_offdiag) {
    r.verdict = r.necessary_ok ? GVerdict::GEmbeddable : GVerdict::NotGEmbeddable;
    if (r.necessary_ok) r.factor_bound = 5;
    r.note = "zero off-diagonal entry";
    return r;
  }
  if (!r.necessary_ok) {
    r.verdict = GVerdict::NotGEmbeddable;
    r.note = "diagonal product below determinant";
    return r;
  }
  r.b_quantity = b_quantity(m);
  if (*r.b_quantity >= det) {
    r.verdict = GVerdict::GEmbeddable;
    r.factor_bound = 6;
    r.note = "B_M at least det";
    return r;
  }
  if (det >= 1.0 / 8) {
    // a g-embeddable matrix with det >= 1/8 always has B_M >= det
    r.verdict = GVerdict::NotGEmbeddable;
    r.note = "B_M below det with det at least 1/8";
    return r;
  }
  r.verdict = GVerdict::Undecided;
  r.note = "B_M below det; the remaining conditions are not implemented";
  int bound = 6 * static_cast<int>(std::ceil(std::log(det) / std::log(0.5)));
  // 1/8^k <= det < 1/8^(k-1) for some k >= 2
  int k = static_cast<int>(std::floor(-std::log(det) / std::log(8.0))) + 1;
  if (k >= 2) {
    double split = 1 / (2 * std::pow(8.0, k - 1));
    bound = std::min(bound, det >= split ? 5 * k - 2 : 5 * k - 1);
  }
  r.factor_bound = bound;
  return r;
}

Mat star_point(int dim) {
  if (dim < 2 || dim > 4) throw Error(ErrorCode::RejectsDimension, "dimension must be 2, 3 or 4");
  return Mat::Constant(dim, dim, 1.0 / dim);
}

}  // namespace membed
