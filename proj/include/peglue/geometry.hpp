#pragma once

// Pointwise curvature kernels. Everything here acts on the jet (value,
// first and second coordinate derivatives) of a metric at one point.

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace peglue {

constexpr int kMaxDim = 4;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

struct MetricJet {
  int d = 0;
  SmallMat g;
  std::array<SmallMat, kMaxDim> dg;                          // dg[m] = d_m g
  std::array<std::array<SmallMat, kMaxDim>, kMaxDim> ddg;    // ddg[m][l] = d_m d_l g

  static MetricJet zero(int d);
};

MetricJet operator+(const MetricJet& a, const MetricJet& b);

// Rank-4 array with dimension d per index.
struct Tensor4 {
  int d = 0;
  std::vector<double> v;
  explicit Tensor4(int dim = 0) : d(dim), v(static_cast<size_t>(dim * dim * dim * dim), 0.0) {}
  double& operator()(int i, int j, int k, int l) { return v[((i * d + j) * d + k) * d + l]; }
  double operator()(int i, int j, int k, int l) const { return v[((i * d + j) * d + k) * d + l]; }
};

// Levi-Civita data of a (non-singular) metric from its jet.
struct CoordinateCurvature {
  int d = 0;
  SmallMat ginv;
  std::array<SmallMat, kMaxDim> gamma;                        // gamma[k](i,j) = Gamma^k_ij
  std::array<std::array<SmallMat, kMaxDim>, kMaxDim> dgamma;  // dgamma[m][k](i,j)
  SmallMat ricci;
  double scalar = 0;
};

// Throws std::domain_error if the metric is not positive definite.
CoordinateCurvature coordinate_curvature(const MetricJet& jet);

// Rm(i,j,k,l) = <R(d_i,d_j)d_k, d_l>, so Rm(X,Y,Y,X) is sectional curvature
// and Ric_jk = g^{il} Rm_ijkl.
Tensor4 coordinate_riemann(const MetricJet& jet, const CoordinateCurvature& cc);

// Geometry of g = x^-2 gbar in the singular frame e_a = x d_a. Frame
// components of g are the coordinate components of gbar, so raising uses
// gbar^{-1}. All powers of 1/x are cancelled analytically.
struct FrameGeometry {
  int d = 0;
  double x = 1;
  SmallMat g, ginv;
  std::array<SmallMat, kMaxDim> omega;                        // nabla_{e_i} e_j = omega[k](i,j) e_k
  std::array<std::array<SmallMat, kMaxDim>, kMaxDim> e_omega; // e_omega[m][k](i,j) = e_m(omega^k_ij)
  SmallMat ricci;                                             // Ric^g, frame components
  SmallMat einstein;                                          // Ric^g + n g
  Tensor4 riemann;                                            // only if requested
  bool has_riemann = false;
  bool has_e_omega = false;
};

FrameGeometry frame_geometry(double x, const MetricJet& jet, bool with_riemann = false,
                             bool with_e_omega = false);

// Frame Ricci via the conformal-change identity with f = -log x:
// x^2 Ric(gbar) - (n-1) x Gamma^0 - x (gbar^{pq} Gamma^0_pq) gbar - n gbar^{00} gbar.
SmallMat ricci_cc_point(double x, const MetricJet& jet, const CoordinateCurvature& cc);

// Conformal identity for g = e^{2f} gbar with a general f (jet: df, Hess f in
// coordinates): Ric(g) = Ric(gbar) - (n-1)(Hess f - df df) - (Lap f + (n-1)|df|^2) gbar.
SmallMat conformal_ricci(const MetricJet& jet, const CoordinateCurvature& cc, const SmallVec& df,
                         const SmallMat& hess_f);

// |T|_g for a symmetric 2-tensor with g^{-1} given.
double tensor_norm(const SmallMat& t, const SmallMat& ginv);
double oneform_norm(const SmallVec& v, const SmallMat& ginv);

}  // namespace peglue
