#pragma once

// Closed-form metrics. Each model evaluates the coordinate components of
// gbar (or, for boundary models, of h) and gets exact first and second
// derivatives through nested forward-mode autodiff.

#include "peglue/geometry.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <functional>
#include <memory>
#include <string>

namespace peglue {

using AD1 = Eigen::AutoDiffScalar<SmallVec>;
using AD1Vec = Eigen::Matrix<AD1, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using AD2 = Eigen::AutoDiffScalar<AD1Vec>;

class AnalyticMetric {
 public:
  virtual ~AnalyticMetric() = default;
  virtual int dim() const = 0;
  // out: dim x dim symmetric, row-major
  virtual void eval(const double* w, double* out) const = 0;
  virtual void eval(const AD2* w, AD2* out) const = 0;
  virtual std::string name() const = 0;

  SmallMat value(const double* w) const;
  MetricJet jet(const double* w) const;
};

using MetricPtr = std::shared_ptr<const AnalyticMetric>;

// Implements both eval overloads from a single template member `metric`.
template <class Derived>
class ModelBase : public AnalyticMetric {
 public:
  void eval(const double* w, double* out) const override { static_cast<const Derived*>(this)->metric(w, out); }
  void eval(const AD2* w, AD2* out) const override { static_cast<const Derived*>(this)->metric(w, out); }
};

// Scalar functions with the same two evaluation paths (perturbations, rho).
class AnalyticScalar {
 public:
  virtual ~AnalyticScalar() = default;
  virtual double eval(const double* w) const = 0;
  virtual AD2 eval(const AD2* w) const = 0;
  virtual std::string name() const = 0;
};
using ScalarPtr = std::shared_ptr<const AnalyticScalar>;

// value, gradient and Hessian of a scalar at w
void scalar_jet(const AnalyticScalar& f, int d, const double* w, double& value, SmallVec& grad, SmallMat& hess);

// gbar = dx^2 + dy^2
MetricPtr hyperbolic_half_space(int n);
// Unit-ball hyperbolic metric in geodesic normal x and stereographic y:
// gbar = dx^2 + (1 - x^2/4)^2 (1 + |y|^2/4)^-2 dy^2, for 0 < x < 2.
MetricPtr poincare_ball_chart(int n);
// gbar = dx^2 + (1 + a1 x + a2 x^2) dy^2
MetricPtr polynomial_tangential(int n, double a1, double a2);
// exp(2 a phi) * base
MetricPtr perturbed(MetricPtr base, ScalarPtr phi, double amplitude);
// base + t * sym(u v^T) evaluated pointwise; used for generic test metrics.
MetricPtr generic_test_metric(int n, double amplitude);

// Gaussian bump exp(-|w - c|^2 / s^2).
ScalarPtr gaussian_bump(std::vector<double> center, double width);
// sum of low Fourier modes with fixed coefficients; smooth and bounded
ScalarPtr smooth_wave(int d, double scale);
// The coordinate w_axis.
ScalarPtr coordinate_function(int axis);

// Boundary metrics (no x axis).
MetricPtr flat_boundary(int n);
// Unit round sphere in stereographic coordinates: (1 + |y|^2/4)^-2 dy^2.
MetricPtr round_sphere_boundary(int n);

}  // namespace peglue
