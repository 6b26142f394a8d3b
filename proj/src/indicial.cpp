#include "peglue/indicial.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <stdexcept>

namespace peglue {

namespace {
// real roots of a2 z^2 + a1 z + a0 for a scalar block, larger first
std::pair<double, double> block_roots(const OpSpec& op) {
  const double a = op.a2(0, 0), b = op.a1(0, 0), c = op.a0(0, 0);
  const double disc = b * b - 4 * a * c;
  if (disc < 0) throw std::domain_error("complex indicial roots");
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double r1 = q / a + 0.0, r2 = (q != 0 ? c / q : 0.0) + 0.0;
  if (r1 < r2) std::swap(r1, r2);
  return {r1, r2};
}
}  // namespace

IndicialSpectrum indicial_roots(int n) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  const auto blocks = l_g0_op_spec(n);
  IndicialSpectrum s;
  s.n = n;
  std::tie(s.zeta1_plus, s.zeta1_minus) = block_roots(blocks[0]);
  std::tie(s.zeta2_plus, s.zeta2_minus) = block_roots(blocks[1]);
  std::tie(s.zeta3_plus, s.zeta3_minus) = block_roots(blocks[2]);
  s.mu_minus = std::max({s.zeta1_minus, s.zeta2_minus, s.zeta3_minus}) + 0.0;
  s.mu_plus = std::min({s.zeta1_plus, s.zeta2_plus, s.zeta3_plus});
  return s;
}

Eigen::MatrixXd indicial_apply(const OpSpec& op, double z) { return op.a0 + z * op.a1 + z * z * op.a2; }

namespace {
OpSpec scalar_block(const std::string& name, double c0, double c1, double c2) {
  OpSpec o;
  o.block = name;
  o.a0 = Eigen::MatrixXd::Constant(1, 1, c0);
  o.a1 = Eigen::MatrixXd::Constant(1, 1, c1);
  o.a2 = Eigen::MatrixXd::Constant(1, 1, c2);
  return o;
}
}  // namespace

OpSpec laplacian_op_spec(int n) { return scalar_block("laplacian", 0, -n, 1); }

std::vector<OpSpec> l_g0_op_spec(int n) {
  // -Delta contributes -(zeta^2 - n zeta)
  return {scalar_block("normal", 2.0 * n, n, -1), scalar_block("mixed", n + 1.0, n, -1),
          scalar_block("tangential", 0, n, -1), scalar_block("trace", 2.0 * n, n, -1)};
}

OpSpec l_g0_coupled_op_spec(int n) {
  // unknowns (h00, c) with h_ij = c delta_ij; the ij row picks up -2 h00
  OpSpec o;
  o.block = "normal+tangential";
  o.a0 = Eigen::MatrixXd::Zero(2, 2);
  o.a1 = Eigen::MatrixXd::Zero(2, 2);
  o.a2 = Eigen::MatrixXd::Zero(2, 2);
  o.a0(0, 0) = 2.0 * n;
  o.a0(1, 0) = -2.0;
  o.a1(0, 0) = o.a1(1, 1) = n;
  o.a2(0, 0) = o.a2(1, 1) = -1;
  return o;
}

SymTensor2Field normal_operator_apply(const TraceFreeBlockTensor& h) {
  const Grid& G = *h.grid;
  if (!G.has_x()) throw std::invalid_argument("normal operator needs a half-space grid");
  const int d = G.dim();
  const int n = d - 1;
  std::vector<Eigen::MatrixXd> d1(d), d2(d);
  for (int a = 0; a < d; ++a) {
    d1[a] = diff_columns(G, h.c, a, 1);
    d2[a] = diff_columns(G, h.c, a, 2);
  }
  SymTensor2Field out(h.grid);
  for (long k = 0; k < G.size(); ++k) {
    const double s = G.x(k);
    auto lap = [&](int c) {
      double v = s * s * d2[0](k, c) + (1 - n) * s * d1[0](k, c);
      for (int a = 1; a < d; ++a) v += s * s * d2[a](k, c);
      return v;
    };
    auto D = [&](int axis, int i, int j) { return d1[axis](k, sym_index(i, j, d)); };
    const int c00 = sym_index(0, 0, d);
    double r00 = -lap(c00) + 2.0 * n * h.c(k, c00);
    for (int i = 1; i < d; ++i) r00 -= 4 * s * D(i, 0, i);
    out.c(k, c00) = r00;
    for (int i = 1; i < d; ++i) {
      const int c = sym_index(0, i, d);
      double r = -lap(c) + (n + 1.0) * h.c(k, c) + 2 * s * D(i, 0, 0);
      for (int j = 1; j < d; ++j) r -= 2 * s * D(j, i, j);
      out.c(k, c) = r;
      for (int j = i; j < d; ++j) {
        const int cij = sym_index(i, j, d);
        double q = -lap(cij) + 2 * s * (D(j, 0, i) + D(i, 0, j));
        if (i == j) q -= 2 * h.c(k, c00);
        out.c(k, cij) = q;
      }
    }
  }
  return out;
}

std::pair<double, double> fredholm_window(int n) {
  const IndicialSpectrum s = indicial_roots(n);
  return {s.mu_minus, s.mu_plus};
}

bool weight_admissible(int n, double mu) {
  const auto [lo, hi] = fredholm_window(n);
  return mu > lo && mu < hi;
}

}  // namespace peglue
