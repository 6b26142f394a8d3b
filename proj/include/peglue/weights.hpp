#pragma once

#include "peglue/fields.hpp"

namespace peglue {

struct WeightSpec {
  double mu = 0.5;
  double nu = 0.5;
  double eps = 0.1;
  double width = 0.3;  // smoothing width, in units of cosh s / cosh s_eps
  double alpha = 0.5;  // Holder exponent of the difference-quotient proxy

  double s_eps() const;
};

// Throws std::invalid_argument unless mu, nu in (0, n), eps in (0, 1), width > 0.
void validate(const WeightSpec& spec, int n);

// C^2 ramp: 0 for v <= -delta, v for v >= delta, convex in between.
double smooth_ramp(double v, double delta);

// Neck weight at radius r = |w| of the rescaled chart (s = log r):
// cosh s / cosh s_eps inside the neck, 1 once cosh s / cosh s_eps >= 1 + width.
double neck_weight_value(double r, const WeightSpec& spec);
// x/r in the neck; eps x and eps x / r^2 in the unrescaled charts.
double defining_value(double x, double r, double eps);

// Both fields assume a half-space grid in the rescaled chart w.
ScalarField neck_weight(GridPtr grid, const WeightSpec& spec);
ScalarField defining_function(GridPtr grid, double eps);
// rho^mu w^nu
ScalarField weight_field(GridPtr grid, const WeightSpec& spec);

// Discrete proxy of the weighted Holder norm of order 0, 1 or 2:
// v = field / weight, sum over j <= order of sup |(x d)^j v| plus the
// alpha difference quotient of the top derivatives between adjacent nodes
// at coordinate distance <= x/2 (measured in units of x).
double weighted_norm(const ScalarField& field, const ScalarField& weight, int order, double alpha = 0.5);
double weighted_norm(const SymTensor2Field& field, const ScalarField& weight, int order, double alpha = 0.5);

}  // namespace peglue
