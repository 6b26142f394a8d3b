#pragma once

#include "peglue/metric.hpp"
#include "peglue/models.hpp"

#include <vector>

namespace peglue {

// Quintic smoothstep, 0 for r <= 1/2, 1 for r >= 2.
double cutoff(double r);
// w / |w|^2
Eigen::VectorXd inversion(const Eigen::VectorXd& w);

// Symmetric tensors given in closed form share the metric interface; the
// positivity of a metric is not assumed by the operations below.
using AnalyticTensor = AnalyticMetric;
using TensorPtr = MetricPtr;

// Boundary normal form metric re-expressed in Riemann normal coordinates of
// h0 at the boundary point p: y = p + A z - 1/2 Gamma(p)(Az, Az) with
// A = h0(p)^{-1/2}. x is untouched, so normal form is preserved.
MetricPtr normal_chart(MetricPtr g, const std::vector<double>& p);

struct DiscrepancyTensor {
  TensorPtr k;                 // tangential block of gbar - delta in normal coordinates
  double growth_exponent = 0;  // log-log slope of sup_{|w|=r} |k|
  double constant = 0;         // fitted C in |k| <= C |w|^2
};

DiscrepancyTensor discrepancy(MetricPtr g, const std::vector<double>& p);

// k(eps w); the singular frame is invariant under dilation.
TensorPtr rescale_pullback(TensorPtr k, double eps);
// Frame law of the inversion: J k(I(w)) J with J = 1 - 2 w w^T / |w|^2.
TensorPtr inversion_pullback(TensorPtr k);
// k1 - k2
TensorPtr difference(TensorPtr a, TensorPtr b);
// the constant tensor c * delta restricted to the tangential block
TensorPtr tangential_constant(int n, double c);

struct GluedAtlas {
  int n = 0;
  double eps = 0;
  MetricPtr g1, g2;   // unrescaled charts in boundary normal form about p_j = 0
  MetricPtr glued;    // frame components of g_eps in the rescaled chart w
};

// g_eps = chi(r) g1(eps w) + (1 - chi(r)) I^*(g2(eps .)).
GluedAtlas glue_metrics(MetricPtr g1, MetricPtr g2, double eps);

// Frame representative of the glued conformal infinity in the rescaled
// boundary chart t = y/eps, normalized by eps^2 so that the ends carry the
// unrescaled round metrics: eps^2 [chi h1(eps t) + (1 - chi) J h2(eps I t) J].
// Meaningful on |t| >= 1/2; the remaining part is covered by the second
// chart, where the representative is h2 itself.
MetricPtr glue_boundary(MetricPtr h1, MetricPtr h2, double eps);

// Polar samples of a shell r in [r0, r1] (log-uniform) over the half-space.
std::vector<Eigen::VectorXd> shell_samples(int n, double r0, double r1, int nr, int nang);

double sup_norm(const AnalyticTensor& k, const std::vector<Eigen::VectorXd>& pts);

struct ResidualRow {
  double eps = 0;
  double sup_residual = 0;   // sup over A of |N(0)|_g / x
  double sup_outside = 0;    // sup of |N(0)|_g / x off A
  double slope_so_far = 0;   // NaN until two rows exist
};

std::vector<ResidualRow> residual_study(MetricPtr g1, MetricPtr g2, const std::vector<double>& eps_list,
                                        int nr = 12, int nang = 16);
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace peglue
