#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "membed/embed.hpp"

namespace membed {

// State order (A, G, C, T) throughout.

struct EqualInputParams {
  std::vector<double> c_vec;
  double c() const;
};

struct TNParams {
  double a1 = 0, a2 = 0, a3 = 0, a4 = 0;
  double kappa1 = 1, kappa2 = 1;
};

struct K3STParams {
  double x = 0, y = 0, z = 0;
};

enum class ModelTag { EQUAL_INPUT, CONSTANT_INPUT, TN, HKY, K3ST, K2P };
const char* to_string(ModelTag t);

Mat equal_input_matrix(const EqualInputParams& p);
std::optional<EqualInputParams> recognize_equal_input(const Mat& m, const Tolerances& tol = {});
EmbeddingResult embed_equal_input(const EqualInputParams& p, int dim, const Tolerances& tol = {});
std::vector<Mat> commutant_basis_d3(double c1, double c2, double c3);

Mat tn_matrix(const TNParams& p);
std::array<double, 3> tn_spectrum(const TNParams& p);
bool tn_condition(const TNParams& p);
EmbeddingResult embed_tn(const TNParams& p, const Tolerances& tol = {});
bool is_tn_shaped(const Mat& q, double tol);

Mat k3st_matrix(const K3STParams& p);
std::array<double, 3> k3st_spectrum(const K3STParams& p);
Mat k3st_generator(const K3STParams& p);
EmbeddingResult embed_k3st(const K3STParams& p, const Tolerances& tol = {});

std::set<ModelTag> model_recognize(const Mat& m, const Tolerances& tol = {});

}  // namespace membed
