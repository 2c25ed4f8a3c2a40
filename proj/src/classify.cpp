#include "membed/classify.hpp"

#include <algorithm>
#include <cmath>

namespace membed {
namespace {

// A zero entry only contradicts transitivity when the two-step path through k
// is clearly positive; entries of size ~ tol can legitimately sit next to
// path products of the same order.
constexpr double kTransitivityMargin = 1e4;

bool is_one(cplx z) { return z == cplx(1.0, 0.0); }

struct Parts {
  int ones = 0;
  std::vector<const EigenBlocks*> real_other;
  std::vector<const EigenBlocks*> complex_upper;
};

Parts split(const JordanStructure& js) {
  Parts p;
  for (auto& b : js.blocks) {
    if (is_one(b.eigenvalue)) {
      p.ones = b.algebraic();
      if (b.largest() > 1) throw Error(ErrorCode::IllConditioned, "nontrivial Jordan block at eigenvalue 1");
    } else if (b.eigenvalue.imag() == 0) {
      p.real_other.push_back(&b);
    } else if (b.eigenvalue.imag() > 0) {
      p.complex_upper.push_back(&b);
    }
  }
  std::stable_sort(p.real_other.begin(), p.real_other.end(), [](auto a, auto b) {
    if (a->algebraic() != b->algebraic()) return a->algebraic() < b->algebraic();
    return a->eigenvalue.real() > b->eigenvalue.real();
  });
  return p;
}

Pattern classify_d3(const Parts& p, EigenData& e) {
  if (p.ones == 3) return Pattern::D3_IDENTITY;
  if (p.ones == 2) {
    e.lambda = p.real_other.at(0)->eigenvalue.real();
    return Pattern::D3_DEG2_1_1_L;
  }
  if (!p.complex_upper.empty()) {
    e.theta = p.complex_upper[0]->eigenvalue;
    return Pattern::D3_COMPLEX_PAIR;
  }
  if (p.real_other.size() == 2) {
    e.lambda1 = p.real_other[0]->eigenvalue.real();
    e.lambda2 = p.real_other[1]->eigenvalue.real();
    if (e.lambda1 < e.lambda2) std::swap(e.lambda1, e.lambda2);
    return Pattern::D3_SIMPLE_REAL;
  }
  const EigenBlocks& b = *p.real_other.at(0);
  e.lambda = b.eigenvalue.real();
  if (b.largest() == 2) return Pattern::D3_JORDAN2;
  return e.lambda > 0 ? Pattern::D3_DEG2_1_L_L_POS : Pattern::D3_DEG2_1_L_L_NEG;
}

Pattern classify_d4(const Parts& p, EigenData& e) {
  if (p.ones == 4) return Pattern::D4_IDENTITY;
  if (p.ones == 3) {
    e.lambda = p.real_other.at(0)->eigenvalue.real();
    return Pattern::D4_DEG2_TRIPLE_ONE;
  }
  if (p.ones == 2) {
    if (!p.complex_upper.empty()) {
      e.theta = p.complex_upper[0]->eigenvalue;
      return Pattern::D4_DEG3_COMPLEX;
    }
    if (p.real_other.size() == 2) {
      e.lambda1 = p.real_other[0]->eigenvalue.real();
      e.lambda2 = p.real_other[1]->eigenvalue.real();
      if (e.lambda1 < e.lambda2) std::swap(e.lambda1, e.lambda2);
      return Pattern::D4_DEG3_TWO_ONES_DISTINCT;
    }
    const EigenBlocks& b = *p.real_other.at(0);
    e.lambda = b.eigenvalue.real();
    if (b.largest() == 2) return Pattern::D4_DEG3_TWO_ONES_JORDAN;
    return e.lambda > 0 ? Pattern::D4_DEG2_DOUBLE_POS : Pattern::D4_DEG2_DOUBLE_NEG;
  }
  // a single eigenvalue 1, three further eigenvalues
  if (!p.complex_upper.empty()) {
    e.lambda = p.real_other.at(0)->eigenvalue.real();
    e.theta = p.complex_upper[0]->eigenvalue;
    return Pattern::D4_SIMPLE_COMPLEX;
  }
  if (p.real_other.size() == 3) {
    double l[3] = {p.real_other[0]->eigenvalue.real(), p.real_other[1]->eigenvalue.real(),
                   p.real_other[2]->eigenvalue.real()};
    std::sort(l, l + 3, std::greater<>());
    e.lambda1 = l[0], e.lambda2 = l[1], e.lambda3 = l[2];
    return Pattern::D4_SIMPLE_REAL;
  }
  if (p.real_other.size() == 2) {
    // sorted by multiplicity: [0] simple, [1] double
    e.lambda1 = p.real_other[0]->eigenvalue.real();
    e.lambda2 = p.real_other[1]->eigenvalue.real();
    if (p.real_other[1]->largest() == 2) return Pattern::D4_MIXED_JORDAN2;
    return e.lambda2 > 0 ? Pattern::D4_DEG3_DOUBLE_L2_POS : Pattern::D4_DEG3_DOUBLE_L2_NEG;
  }
  const EigenBlocks& b = *p.real_other.at(0);
  e.lambda = b.eigenvalue.real();
  switch (b.largest()) {
    case 1: return Pattern::D4_DEG2_TRIPLE_L;
    case 2: return Pattern::D4_DEG3_L_JORDAN_L;
    default: return Pattern::D4_JORDAN3;
  }
}

}  // namespace

const char* to_string(Pattern p) {
  switch (p) {
    case Pattern::D2_IDENTITY: return "D2_IDENTITY";
    case Pattern::D2_GENERIC: return "D2_GENERIC";
    case Pattern::D3_IDENTITY: return "D3_IDENTITY";
    case Pattern::D3_DEG2_1_1_L: return "D3_DEG2_1_1_L";
    case Pattern::D3_DEG2_1_L_L_POS: return "D3_DEG2_1_L_L_POS";
    case Pattern::D3_DEG2_1_L_L_NEG: return "D3_DEG2_1_L_L_NEG";
    case Pattern::D3_SIMPLE_REAL: return "D3_SIMPLE_REAL";
    case Pattern::D3_JORDAN2: return "D3_JORDAN2";
    case Pattern::D3_COMPLEX_PAIR: return "D3_COMPLEX_PAIR";
    case Pattern::D4_IDENTITY: return "D4_IDENTITY";
    case Pattern::D4_DEG2_TRIPLE_ONE: return "D4_DEG2_TRIPLE_ONE";
    case Pattern::D4_DEG2_TRIPLE_L: return "D4_DEG2_TRIPLE_L";
    case Pattern::D4_DEG2_DOUBLE_POS: return "D4_DEG2_DOUBLE_POS";
    case Pattern::D4_DEG2_DOUBLE_NEG: return "D4_DEG2_DOUBLE_NEG";
    case Pattern::D4_DEG3_TWO_ONES_DISTINCT: return "D4_DEG3_TWO_ONES_DISTINCT";
    case Pattern::D4_DEG3_TWO_ONES_JORDAN: return "D4_DEG3_TWO_ONES_JORDAN";
    case Pattern::D4_DEG3_L_JORDAN_L: return "D4_DEG3_L_JORDAN_L";
    case Pattern::D4_DEG3_DOUBLE_L2_POS: return "D4_DEG3_DOUBLE_L2_POS";
    case Pattern::D4_DEG3_DOUBLE_L2_NEG: return "D4_DEG3_DOUBLE_L2_NEG";
    case Pattern::D4_DEG3_COMPLEX: return "D4_DEG3_COMPLEX";
    case Pattern::D4_SIMPLE_REAL: return "D4_SIMPLE_REAL";
    case Pattern::D4_SIMPLE_COMPLEX: return "D4_SIMPLE_COMPLEX";
    case Pattern::D4_JORDAN3: return "D4_JORDAN3";
    case Pattern::D4_MIXED_JORDAN2: return "D4_MIXED_JORDAN2";
  }
  return "UNKNOWN";
}

CaseTag classify(const Mat& m, const Tolerances& tol) {
  check_mat(m);
  if (!is_markov(m, tol)) throw Error(ErrorCode::NotMarkov, "input is not a Markov matrix");
  CaseTag tag;
  tag.dim = static_cast<int>(m.rows());
  if (tag.dim == 2) {
    // Kendall's dichotomy needs no spectral machinery
    tag.eigen.lambda = 1.0 - m(0, 1) - m(1, 0);
    bool ident = m(0, 1) == 0 && m(1, 0) == 0;
    tag.pattern = ident ? Pattern::D2_IDENTITY : Pattern::D2_GENERIC;
    tag.min_poly_degree = ident ? 1 : 2;
    tag.jordan.blocks = ident ? std::vector<EigenBlocks>{{1.0, {1, 1}}}
                              : std::vector<EigenBlocks>{{1.0, {1}}, {tag.eigen.lambda, {1}}};
    tag.jordan.min_poly_degree = tag.min_poly_degree;
    return tag;
  }
  tag.jordan = jordan_structure(m, tol);
  tag.min_poly_degree = tag.jordan.min_poly_degree;
  Parts p = split(tag.jordan);
  tag.pattern = tag.dim == 3 ? classify_d3(p, tag.eigen) : classify_d4(p, tag.eigen);
  return tag;
}

NecessaryReport necessary_checks(const Mat& m, const Tolerances& tol) {
  check_mat(m);
  const int n = static_cast<int>(m.rows());
  NecessaryReport r;
  for (int i = 0; i < n; ++i)
    if (!(m(i, i) > tol.nonneg)) r.diag_positive = false;
  double det = m.determinant();
  r.det_positive = det > 0;

  auto sp = eigenvalues(m, tol);
  for (auto& root : sp.roots)
    if (!is_one(root.value) && !(std::abs(root.value) < 1 - tol.nonneg)) r.unit_circle_ok = false;

  bool singular = det == 0;
  for (auto& root : sp.roots)
    if (std::abs(root.value) <= tol.nonneg) singular = true;
  r.culver_ok = !singular;
  JordanStructure js;
  bool have_js = true;
  try {
    js = jordan_structure(m, tol);
  } catch (const Error&) {
    have_js = false;
  }
  for (auto& root : sp.roots) {
    if (root.value.imag() != 0 || root.value.real() >= 0) continue;
    if (!have_js) {
      if (root.multiplicity % 2 != 0) r.culver_ok = false;
      continue;
    }
    const EigenBlocks* b = js.find(root.value, 0.0);
    if (!b) continue;
    for (int s : b->sizes)
      if (std::count(b->sizes.begin(), b->sizes.end(), s) % 2 != 0) r.culver_ok = false;
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || m(i, j) > tol.nonneg) continue;
      for (int k = 0; k < n; ++k)
        if (k != i && k != j && m(i, k) * m(k, j) > kTransitivityMargin * tol.nonneg) r.transitivity_ok = false;
    }
  return r;
}

}  // namespace membed
