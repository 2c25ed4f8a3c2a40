// Closed-form roots of monic polynomials of degree <= 4.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "membed/linalg.hpp"

namespace membed {
namespace {

using std::numbers::pi;

std::vector<cplx> quadratic(double b, double c) {
  // x^2 + b x + c
  double disc = b * b - 4 * c;
  if (disc >= 0) {
    double s = std::sqrt(disc);
    double q = -0.5 * (b + std::copysign(s, b));
    if (q == 0) return {0.0, 0.0};
    return {q, c / q};
  }
  double re = -0.5 * b, im = 0.5 * std::sqrt(-disc);
  return {cplx(re, im), cplx(re, -im)};
}

std::vector<cplx> cubic(double a, double b, double c) {
  // x^3 + a x^2 + b x + c, depressed t^3 + p t + q with x = t - a/3
  double p = b - a * a / 3;
  double q = 2 * a * a * a / 27 - a * b / 3 + c;
  double shift = -a / 3;
  double h = q * q / 4 + p * p * p / 27;
  if (p == 0 && q == 0) return {shift, shift, shift};
  if (h <= 0 && p < 0) {
    double r = std::sqrt(-p / 3);
    double arg = std::clamp(-q / (2 * r * r * r), -1.0, 1.0);
    double phi = std::acos(arg) / 3;
    return {shift + 2 * r * std::cos(phi), shift + 2 * r * std::cos(phi - 2 * pi / 3),
            shift + 2 * r * std::cos(phi + 2 * pi / 3)};
  }
  double sh = std::sqrt(std::max(h, 0.0));
  double u = std::cbrt(-q / 2 + std::copysign(sh, -q / 2));
  double v = (u == 0) ? std::cbrt(-q) : -p / (3 * u);
  double t1 = u + v;
  double re = -t1 / 2, im = std::sqrt(3.0) / 2 * (u - v);
  return {shift + t1, cplx(shift + re, std::abs(im)), cplx(shift + re, -std::abs(im))};
}

std::vector<cplx> quartic(double a, double b, double c, double d) {
  // Ferrari: x = y - a/4, y^4 + p y^2 + q y + r
  double a2 = a * a;
  double p = b - 3 * a2 / 8;
  double q = c - a * b / 2 + a2 * a / 8;
  double r = d - a * c / 4 + a2 * b / 16 - 3 * a2 * a2 / 256;
  double shift = -a / 4;
  std::vector<cplx> ys;
  double sc = std::max({1.0, std::abs(p), std::sqrt(std::abs(r))});
  if (std::abs(q) <= 1e-14 * sc * std::sqrt(sc)) {
    for (cplx w : quadratic(p, r)) {
      cplx s = std::sqrt(w);
      ys.push_back(s);
      ys.push_back(-s);
    }
  } else {
    // resolvent 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0 has a positive root
    auto res = cubic(p, (p * p / 4 - r), -q * q / 8);
    double m = 0;
    for (cplx z : res)
      if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z.real())) && z.real() > m) m = z.real();
    double s = std::sqrt(2 * m);
    for (cplx y : quadratic(-s, p / 2 + m + q / (2 * s))) ys.push_back(y);
    for (cplx y : quadratic(s, p / 2 + m - q / (2 * s))) ys.push_back(y);
  }
  for (auto& y : ys) y += shift;
  return ys;
}

cplx horner(std::span<const double> c, cplx x, cplx* deriv) {
  cplx p = 1.0, dp = 0.0;
  for (double ci : c) {
    dp = dp * x + p;
    p = p * x + ci;
  }
  *deriv = dp;
  return p;
}

}  // namespace

std::vector<cplx> poly_roots(std::span<const double> c) {
  std::vector<cplx> r;
  switch (c.size()) {
    case 1: r = {-c[0]}; break;
    case 2: r = quadratic(c[0], c[1]); break;
    case 3: r = cubic(c[0], c[1], c[2]); break;
    case 4: r = quartic(c[0], c[1], c[2], c[3]); break;
    default: throw Error(ErrorCode::RejectsDimension, "polynomial degree must be 1..4");
  }
  // Newton polishing; stop on any non-improving step (multiple roots stall here)
  for (auto& x : r) {
    for (int it = 0; it < 4; ++it) {
      cplx d;
      cplx f = horner(c, x, &d);
      if (f == 0.0 || std::abs(d) < 1e-8) break;
      cplx nx = x - f / d;
      cplx d2;
      if (std::abs(horner(c, nx, &d2)) >= std::abs(f)) break;
      x = nx;
    }
  }
  // restore exact conjugate symmetry
  for (auto& x : r)
    if (std::abs(x.imag()) <= 1e-15 * std::max(1.0, std::abs(x.real()))) x = x.real();
  return r;
}

}  // namespace membed
