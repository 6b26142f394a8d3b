#pragma once

#include "peglue/fields.hpp"

#include <string>
#include <utility>
#include <vector>

namespace peglue {

struct IndicialSpectrum {
  int n = 0;
  double zeta1_plus = 0, zeta1_minus = 0;  // normal block and pure trace
  double zeta2_plus = 0, zeta2_minus = 0;  // mixed block
  double zeta3_plus = 0, zeta3_minus = 0;  // tangential trace-free block
  double mu_minus = 0, mu_plus = 0;
};

IndicialSpectrum indicial_roots(int n);

// Constant coefficients a_{j,0}, j = 0,1,2, of a uniformly degenerate
// operator restricted to one block; I(zeta) = sum_j a_j zeta^j.
struct OpSpec {
  std::string block;
  Eigen::MatrixXd a0, a1, a2;
};

Eigen::MatrixXd indicial_apply(const OpSpec& op, double zeta);

// Scalar hyperbolic Laplacian: I(zeta) = zeta^2 - n zeta.
OpSpec laplacian_op_spec(int n);
// L_{g0} per block: normal, mixed, tangential (trace-free), trace.
std::vector<OpSpec> l_g0_op_spec(int n);
// L_{g0} on the trace-free pair (h00, h_ij) restricted to h_ij = c delta_ij
// and a fixed trace-free tangential direction: shows the -2 h00 delta_ij
// coupling, block upper-triangular.
OpSpec l_g0_coupled_op_spec(int n);

// Frame components (ds/s, du_i/s) of a trace-free symmetric 2-tensor.
using TraceFreeBlockTensor = SymTensor2Field;

// Block action of L_{g0} on trace-free tensors in the upper half space,
// Delta = s^2 d_s^2 + (1-n) s d_s + s^2 Lap_u:
//   00: -Delta h00 + 2n h00 - 4 s d_i h0i
//   0i: -Delta h0i + (n+1) h0i - 2 s d_j hij + 2 s d_i h00
//   ij: -Delta hij + 2 s (d_j h0i + d_i h0j) - 2 h00 delta_ij
SymTensor2Field normal_operator_apply(const TraceFreeBlockTensor& h);

// Admissible weight interval (mu_-, mu_+) = (0, n).
std::pair<double, double> fredholm_window(int n);
bool weight_admissible(int n, double mu);

}  // namespace peglue
