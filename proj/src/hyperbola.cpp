// Feasibility search over the real square roots I_xyz of -1 (yz - x^2 = 1, z > 0).
//
// The sheet is parametrised by (a, b) in R^2 via x = sinh a, y = cosh a e^-b,
// z = cosh a e^b. Dividing every constraint by cosh a cosh b and substituting
// u = tanh a, v = tanh b gives functions on the closed square [-1,1]^2:
//   G = r0 su sv + theta (bx u sv + by (1 - v) + bz (1 + v)),
// su = sqrt(1-u^2), sv = sqrt(1-v^2). The square's boundary is the sheet's
// behaviour at infinity, so interval bounds on boxes give infeasibility
// certificates for the whole unbounded sheet.

#include <algorithm>
#include <cmath>
#include <queue>

#include "membed/embed.hpp"

namespace membed {
namespace {

struct Iv {
  double lo, hi;
};

Iv mul(Iv a, Iv b) {
  double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Iv sqrt1m(Iv u) {
  // sqrt(1 - u^2): largest where |u| is smallest
  double amin = (u.lo <= 0 && u.hi >= 0) ? 0 : std::min(std::abs(u.lo), std::abs(u.hi));
  double amax = std::max(std::abs(u.lo), std::abs(u.hi));
  return {std::sqrt(std::max(0.0, 1 - amax * amax)), std::sqrt(std::max(0.0, 1 - amin * amin))};
}

struct Constraint {
  double r0, bx, by, bz;  // g = r0 + theta (bx x + by y + bz z)
};

struct Problem {
  std::vector<Constraint> cons;
  double theta;

  // worst violation max(-g) at a sheet point, in matrix units
  double violation(double x, double y, double z) const {
    double v = -INFINITY;
    for (auto& c : cons) v = std::max(v, -(c.r0 + theta * (c.bx * x + c.by * y + c.bz * z)));
    return v;
  }
  double violation_uv(double u, double v) const {
    double su = std::sqrt(std::max(0.0, 1 - u * u)), sv = std::sqrt(std::max(0.0, 1 - v * v));
    if (su == 0 || sv == 0) return INFINITY;
    double nrm = 1 / (su * sv);
    return violation(u * sv * nrm, (1 - v) * nrm, (1 + v) * nrm);
  }
  // lower bound of max(-G) over a box, in compact units
  double lower_bound(Iv u, Iv v) const {
    Iv su = sqrt1m(u), sv = sqrt1m(v);
    Iv susv = mul(su, sv), usv = mul(u, sv);
    Iv ym = {1 - v.hi, 1 - v.lo}, zp = {1 + v.lo, 1 + v.hi};
    double best = -INFINITY;
    for (auto& c : cons) {
      Iv t0 = mul({c.r0, c.r0}, susv);
      Iv t1 = mul({theta * c.bx, theta * c.bx}, usv);
      Iv t2 = mul({theta * c.by, theta * c.by}, ym);
      Iv t3 = mul({theta * c.bz, theta * c.bz}, zp);
      double ghi = t0.hi + t1.hi + t2.hi + t3.hi;
      best = std::max(best, -ghi);
    }
    return best;
  }
};

HyperbolaPoint point_from_uv(double u, double v) {
  double su = std::sqrt(1 - u * u), sv = std::sqrt(1 - v * v);
  double nrm = 1 / (su * sv);
  HyperbolaPoint p;
  p.x = u * sv * nrm;
  p.z = (1 + v) * nrm;
  p.y = (1 + p.x * p.x) / p.z;
  return p;
}

struct Box {
  double u0, u1, v0, v1, lb;
  bool operator<(const Box& o) const { return lb > o.lb; }  // min-heap on lower bound
};

}  // namespace

const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return "Found";
    case SearchStatus::Infeasible: return "Infeasible";
    case SearchStatus::Inconclusive: return "Inconclusive";
  }
  return "?";
}

Mat hyperbola_generator(const RealJordan& t, const Mat& fixed_log, double log_modulus, double angle,
                        const HyperbolaPoint& p) {
  const int n = static_cast<int>(t.T.rows());
  Mat c = Mat::Zero(n, n);
  c.topLeftCorner(n - 2, n - 2) = fixed_log;
  c(n - 2, n - 2) = log_modulus + angle * p.x;
  c(n - 2, n - 1) = -angle * p.z;
  c(n - 1, n - 2) = angle * p.y;
  c(n - 1, n - 1) = log_modulus - angle * p.x;
  return t.T * c * t.T.inverse();
}

HyperbolaResult hyperbola_search(const RealJordan& t, const Mat& fixed_log, double log_modulus, double angle,
                                 const Tolerances& tol) {
  if (t.ill_conditioned) throw Error(ErrorCode::IllConditioned, "similarity transform is ill-conditioned");
  const int n = static_cast<int>(t.T.rows());
  if (fixed_log.rows() != n - 2 || fixed_log.cols() != n - 2)
    throw Error(ErrorCode::InvalidArgument, "fixed block must have dimension n-2");
  Mat tinv = t.T.inverse();
  auto build = [&](int which) {
    Mat c = Mat::Zero(n, n);
    if (which == 0) {
      c.topLeftCorner(n - 2, n - 2) = fixed_log;
      c(n - 2, n - 2) = c(n - 1, n - 1) = log_modulus;
    } else if (which == 1) {
      c(n - 2, n - 2) = 1, c(n - 1, n - 1) = -1;
    } else if (which == 2) {
      c(n - 1, n - 2) = 1;
    } else {
      c(n - 2, n - 1) = -1;
    }
    return Mat(t.T * c * tinv);
  };
  Mat r0 = build(0), bx = build(1), by = build(2), bz = build(3);
  Problem pb;
  pb.theta = angle;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) pb.cons.push_back({r0(i, j), bx(i, j), by(i, j), bz(i, j)});

  HyperbolaResult res;
  res.best_violation = INFINITY;
  auto consider = [&](double u, double v) {
    double viol = pb.violation_uv(u, v);
    if (viol < res.best_violation) {
      res.best_violation = viol;
      res.point = point_from_uv(u, v);
    }
    return viol <= tol.nonneg;
  };
  auto found = [&] {
    res.status = SearchStatus::Found;
    return res;
  };

  // base grid: logarithmic in |x| and z
  constexpr int kGrid = 200;
  std::vector<double> xs, zs;
  for (int i = 0; i < kGrid; ++i) {
    double e = -3.0 + 6.0 * i / (kGrid - 1);
    zs.push_back(std::pow(10.0, e));
  }
  for (int i = 0; i < kGrid / 2; ++i) {
    double e = -3.0 + 6.0 * i / (kGrid / 2 - 1);
    xs.push_back(std::pow(10.0, e));
    xs.push_back(-std::pow(10.0, e));
  }
  double bx0 = 0, bz0 = 1;
  for (double x : xs)
    for (double z : zs) {
      double viol = pb.violation(x, (1 + x * x) / z, z);
      if (viol < res.best_violation) {
        res.best_violation = viol;
        res.point = HyperbolaPoint{x, (1 + x * x) / z, z};
        bx0 = x, bz0 = z;
      }
    }
  if (res.best_violation <= tol.nonneg) return found();

  // local refinement: compass search in (asinh x, log z)
  {
    double a = std::asinh(bx0), lz = std::log(bz0), step = 0.5;
    auto f = [&](double aa, double ll) {
      double x = std::sinh(aa), z = std::exp(ll);
      return pb.violation(x, (1 + x * x) / z, z);
    };
    double cur = f(a, lz);
    while (step > 1e-12) {
      bool moved = false;
      const double d[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (auto& dd : d) {
        double val = f(a + step * dd[0], lz + step * dd[1]);
        if (val < cur) {
          cur = val, a += step * dd[0], lz += step * dd[1], moved = true;
          break;
        }
      }
      if (!moved) step /= 2;
      if (cur <= tol.nonneg) break;
    }
    if (cur < res.best_violation) {
      double x = std::sinh(a), z = std::exp(lz);
      res.best_violation = cur;
      res.point = HyperbolaPoint{x, (1 + x * x) / z, z};
    }
    if (res.best_violation <= tol.nonneg) return found();
  }

  // branch and bound on the compactified square
  const double margin = 10 * tol.nonneg;
  constexpr int kMaxBoxes = 200000;
  constexpr double kMinWidth = 1e-9;
  std::priority_queue<Box> heap;
  heap.push({-1, 1, -1, 1, pb.lower_bound({-1, 1}, {-1, 1})});
  int processed = 0;
  bool unresolved = false;
  while (!heap.empty()) {
    Box b = heap.top();
    heap.pop();
    if (b.lb > margin) continue;
    if (++processed > kMaxBoxes || std::max(b.u1 - b.u0, b.v1 - b.v0) < kMinWidth) {
      unresolved = true;
      continue;
    }
    double um = 0.5 * (b.u0 + b.u1), vm = 0.5 * (b.v0 + b.v1);
    if (consider(um, vm)) return found();
    const Box kids[4] = {{b.u0, um, b.v0, vm, 0}, {um, b.u1, b.v0, vm, 0}, {b.u0, um, vm, b.v1, 0},
                         {um, b.u1, vm, b.v1, 0}};
    for (auto k : kids) {
      k.lb = pb.lower_bound({k.u0, k.u1}, {k.v0, k.v1});
      if (k.lb <= margin) heap.push(k);
    }
  }
  res.status = unresolved ? SearchStatus::Inconclusive : SearchStatus::Infeasible;
  return res;
}

}  // namespace membed
