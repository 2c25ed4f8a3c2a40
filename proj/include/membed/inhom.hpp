#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "membed/linalg.hpp"

namespace membed {

// Flows follow dM/dt = M Q(t): segments are applied left to right in time order.

struct ConstantSegment {
  Mat Q;
  double duration = 0;
};

// Generator-valued function tabulated at t0 + j*step, j = 0..samples.size()-1.
struct SampledSegment {
  std::vector<Mat> samples;
  double step = 0;
  double duration() const { return step * static_cast<double>(samples.size() - 1); }
};

using Segment = std::variant<ConstantSegment, SampledSegment>;

struct Schedule {
  std::vector<Segment> segments;
  int dim() const;
  double span() const;
  void validate(const Tolerances& tol = {}) const;
};

struct PoissonFactor {
  int i = 0, j = 1;
  double a = 0;
};

enum class GVerdict { GEmbeddable, NotGEmbeddable, Undecided };
const char* to_string(GVerdict v);

struct GReport {
  bool necessary_ok = false;
  std::optional<double> b_quantity;
  GVerdict verdict = GVerdict::Undecided;
  std::optional<int> factor_bound;
  std::optional<std::vector<PoissonFactor>> factors;  // explicit factor search is not implemented
  std::string note;
};

Mat evolve(const Schedule& s);
Mat peano_baker(const Schedule& s, double t, int max_terms = 200, double tol = 1e-12);
double liouville_det(const Schedule& s, double t);

Mat poisson_matrix(const PoissonFactor& f, int dim);
Mat bangbang_product(const std::vector<PoissonFactor>& fs, int dim);

bool g_necessary(const Mat& m, double tol = 0);
double b_quantity(const Mat& m);
GReport g_embed_d3(const Mat& m, const Tolerances& tol = {});
Mat star_point(int dim);

}  // namespace membed
