#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "membed/classify.hpp"
#include "membed/linalg.hpp"

namespace membed {

enum class Verdict { Embeddable, NotEmbeddable, Undecided };
enum class Uniqueness { Unique, MultipleKnown, PossiblyMore, Unknown };
enum class Construction {
  PRINCIPAL_LOG,
  POLY_SMT,
  HYPERBOLA,
  EQ_INPUT_EXTREMAL_PLUS,
  EQ_INPUT_EXTREMAL_MINUS,
  MODEL_CLOSED_FORM,
};
enum class Reason {
  NONE,
  ZERO_DIAGONAL,
  DET_NONPOSITIVE,
  NEGATIVE_EIGENVALUE_CULVER,
  UNIT_CIRCLE,
  TRANSITIVITY,
  NONPOSITIVE_EIGENVALUE,
  LOG_NOT_GENERATOR,
  NO_BRANCH_FEASIBLE,
  K_RANGE_EMPTY,
  EQUAL_INPUT_BEYOND_MAX,
  MODEL_CONDITION,
  SEARCH_INCONCLUSIVE,
  ILL_CONDITIONED,
};

const char* to_string(Verdict v);
const char* to_string(Uniqueness u);
const char* to_string(Construction c);
const char* to_string(Reason r);

struct GeneratorCandidate {
  Mat matrix;
  int branch = 0;
  Construction construction = Construction::PRINCIPAL_LOG;
  double residual = 0;
};

struct EmbeddingResult {
  Verdict verdict = Verdict::Undecided;
  std::vector<GeneratorCandidate> generators;
  Uniqueness uniqueness = Uniqueness::Unknown;
  Reason reason = Reason::NONE;
  std::optional<CaseTag> tag;
  std::string note;
};

struct DecideOptions {
  // also search non-principal branches when the principal one already works
  bool all_branches = false;
};

struct HyperbolaPoint {
  double x = 0, y = 1, z = 1;
};

enum class SearchStatus { Found, Infeasible, Inconclusive };
const char* to_string(SearchStatus s);

struct HyperbolaResult {
  SearchStatus status = SearchStatus::Inconclusive;
  std::optional<HyperbolaPoint> point;
  double best_violation = 0;  // in matrix units at the best point seen
};

EmbeddingResult decide(const Mat& m, const Tolerances& tol = {}, const DecideOptions& opt = {});

EmbeddingResult embed_d2(const Mat& m, const Tolerances& tol = {});

// Coefficients (alpha, beta[, gamma]) of the branch-k logarithm as a polynomial in A = M - I.
std::vector<double> smt_coeffs(Pattern p, const EigenData& e, int k = 0, const Tolerances& tol = {});

EmbeddingResult embed_d3_deg2(const Mat& m, const CaseTag& tag, const Tolerances& tol = {},
                              const DecideOptions& opt = {});
double delta_min(double c1, double c2, double c3);
std::pair<Mat, Mat> eq_input_extremal_generators(double c1, double c2, double c3);
EmbeddingResult embed_d3_eq_input_neg(const Mat& m, const Tolerances& tol = {});
EmbeddingResult embed_d3_cyclic_real(const Mat& m, const CaseTag& tag, const Tolerances& tol = {});
EmbeddingResult embed_d3_complex(const Mat& m, const CaseTag& tag, const Tolerances& tol = {});
EmbeddingResult embed_d4(const Mat& m, const CaseTag& tag, const Tolerances& tol = {}, const DecideOptions& opt = {});

// Largest number of admissible complex branches for a given determinant.
int complex_branch_bound(double det, int dim);
// Branch indices k admitted by the eigenvalue-cone bound for a complex eigenvalue theta.
std::pair<int, int> complex_branch_window(cplx theta, int dim);
// Candidate for one complex branch, verified; nullopt when it is not a generator.
std::optional<GeneratorCandidate> complex_branch(const Mat& m, const CaseTag& tag, int k, const Tolerances& tol = {});

// R = T (fixed_log ⊕ (log_modulus·1 + angle·I_xyz)) T^-1 for the last two canonical coordinates.
Mat hyperbola_generator(const RealJordan& t, const Mat& fixed_log, double log_modulus, double angle,
                        const HyperbolaPoint& p);
HyperbolaResult hyperbola_search(const RealJordan& t, const Mat& fixed_log, double log_modulus, double angle,
                                 const Tolerances& tol = {});

Uniqueness uniqueness_certificates(const Mat& m, const Mat& q);

// Verified candidate or nullopt (generator check plus exp residual).
std::optional<GeneratorCandidate> verify_candidate(const Mat& m, const Mat& q, int branch, Construction c,
                                                   const Tolerances& tol);

}  // namespace membed
