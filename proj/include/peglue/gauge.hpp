#pragma once

#include "peglue/metric.hpp"

namespace peglue {

// Background data at one node, frame components.
struct NodeGeometry {
  SmallMat ginv;
  SmallMat ricci;
  std::array<SmallMat, kMaxDim> omega;
  Tensor4 riemann;
};

struct GaugeContext {
  CCMetric g;
  int n = 0;
  std::vector<NodeGeometry> geo;

  GridPtr grid() const { return g.grid(); }
};

GaugeContext make_context(const CCMetric& g);

// Frame components of (nabla k)(e_c; e_a, e_b) for every c, packed as
// D fields of nodes x sym_count.
std::vector<Eigen::MatrixXd> covariant_derivative(const GaugeContext& ctx, const SymTensor2Field& k);

// B^g(k) = delta^g k + 1/2 d tr^g k, delta = -div.
OneFormField bianchi(const GaugeContext& ctx, const SymTensor2Field& k);
// (delta^g)^* w = sym nabla w, with the Levi-Civita connection of `g`.
SymTensor2Field divergence_adjoint(const CCMetric& g, const OneFormField& w);

// N_g(k) = Ric(g+k) + n(g+k) + (delta^{g+k})^* B^g(k).
SymTensor2Field gauged_residual(const GaugeContext& ctx, const SymTensor2Field& k);

// L_g k = nabla^* nabla k - 2 Rc k + Ric o k + k o Ric + 2n k, where
// (Rc k)_ab = Rm_apqb k^pq. Note L = 2 DN: the linearization of N is L/2.
// The rough Laplacian composes two first covariant derivatives.
SymTensor2Field linearized(const GaugeContext& ctx, const SymTensor2Field& kappa);

// Q(k) = N(k) - N(0) - (L/2) k, node by node from the same 2-jets of k, so
// that the linear part cancels exactly.
SymTensor2Field quadratic_remainder(const GaugeContext& ctx, const SymTensor2Field& k);

// Same operator at one point, from the coordinate jet of kappa (value, d,
// dd) and the background frame geometry (needs riemann and e_omega).
// Independent of the field path above: the product rule is expanded
// analytically, so this is what the sparse assembly discretizes.
SmallMat linearized_at(const FrameGeometry& f, int n, const MetricJet& kappa);

// B^g(k) and its frame derivatives eB(d, b) = e_d B_b at one point, from the
// 2-jet of k and the background jet (f needs e_omega).
struct BianchiJet {
  SmallVec B;
  SmallMat eB;
};
BianchiJet bianchi_at(const FrameGeometry& f, const MetricJet& gbar, const MetricJet& kappa);
// N_g(k) at one point from the 2-jet of k; its derivative in k is exactly
// linearized_at / 2. Throws std::domain_error if gbar + k is not positive.
SmallMat gauged_residual_at(const FrameGeometry& f, const MetricJet& gbar, const MetricJet& kappa);

// pointwise |.|_g of a frame tensor field against the background
ScalarField pointwise_norm(const CCMetric& g, const SymTensor2Field& k);
ScalarField pointwise_norm(const CCMetric& g, const OneFormField& w);

}  // namespace peglue
