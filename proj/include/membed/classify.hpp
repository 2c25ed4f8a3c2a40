#pragma once

#include <string>

#include "membed/linalg.hpp"

namespace membed {

enum class Pattern {
  D2_IDENTITY,
  D2_GENERIC,
  D3_IDENTITY,
  D3_DEG2_1_1_L,
  D3_DEG2_1_L_L_POS,
  D3_DEG2_1_L_L_NEG,
  D3_SIMPLE_REAL,
  D3_JORDAN2,
  D3_COMPLEX_PAIR,
  D4_IDENTITY,
  D4_DEG2_TRIPLE_ONE,
  D4_DEG2_TRIPLE_L,
  D4_DEG2_DOUBLE_POS,
  D4_DEG2_DOUBLE_NEG,
  D4_DEG3_TWO_ONES_DISTINCT,
  D4_DEG3_TWO_ONES_JORDAN,
  D4_DEG3_L_JORDAN_L,
  D4_DEG3_DOUBLE_L2_POS,
  D4_DEG3_DOUBLE_L2_NEG,
  D4_DEG3_COMPLEX,
  D4_SIMPLE_REAL,
  D4_SIMPLE_COMPLEX,
  D4_JORDAN3,
  D4_MIXED_JORDAN2,
};

const char* to_string(Pattern p);

// Named eigenvalues in the convention of the case tables. Which fields are
// meaningful depends on the pattern: lambda for single repeated or lone
// eigenvalues, lambda1/lambda2(/lambda3) for distinct or mixed real ones
// (lambda2 is the repeated one in the DOUBLE_L2 and MIXED rows), theta for a
// complex eigenvalue with positive imaginary part.
struct EigenData {
  double lambda = 0;
  double lambda1 = 0, lambda2 = 0, lambda3 = 0;
  cplx theta{0, 0};
};

struct CaseTag {
  int dim = 0;
  int min_poly_degree = 0;
  Pattern pattern = Pattern::D2_GENERIC;
  EigenData eigen;
  JordanStructure jordan;
};

struct NecessaryReport {
  bool diag_positive = true;
  bool det_positive = true;
  bool unit_circle_ok = true;
  bool culver_ok = true;
  bool transitivity_ok = true;

  bool all() const { return diag_positive && det_positive && unit_circle_ok && culver_ok && transitivity_ok; }
};

CaseTag classify(const Mat& m, const Tolerances& tol = {});
NecessaryReport necessary_checks(const Mat& m, const Tolerances& tol = {});

}  // namespace membed
