#include "peglue/weights.hpp"
#include "peglue/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace peglue {

double WeightSpec::s_eps() const { return -std::log(eps); }

void validate(const WeightSpec& spec, int n) {
  if (!(spec.mu > 0 && spec.mu < n)) throw std::invalid_argument("mu outside (0, n)");
  if (!(spec.nu > 0 && spec.nu < n)) throw std::invalid_argument("nu outside (0, n)");
  if (!(spec.eps > 0 && spec.eps < 1)) throw std::invalid_argument("eps outside (0, 1)");
  if (!(spec.width > 0)) throw std::invalid_argument("smoothing width must be positive");
  if (!(spec.alpha > 0 && spec.alpha < 1)) throw std::invalid_argument("alpha outside (0, 1)");
}

double smooth_ramp(double v, double delta) {
  if (v <= -delta) return 0.0;
  if (v >= delta) return v;
  // integral of the quintic smoothstep over [-delta, v]
  const double u = (v + delta) / (2 * delta);
  const double u4 = u * u * u * u;
  return 2 * delta * u4 * (2.5 + u * (-3 + u));
}

double neck_weight_value(double r, const WeightSpec& spec) {
  const double c = std::cosh(std::log(r)) / std::cosh(spec.s_eps());
  return 1.0 - smooth_ramp(1.0 - c, spec.width);
}

double defining_value(double x, double r, double eps) {
  // smooth max of 1, eps r and eps / r; equal to 1 while both stay below 0.8
  const double m = 1.0 + smooth_ramp(eps * r - 1.0, 0.2) + smooth_ramp(eps / r - 1.0, 0.2);
  return x / r * m;
}

namespace {
double radius(const Grid& g, long k) {
  double w[8];
  g.coords(k, w);
  double r2 = 0;
  for (int a = 0; a < g.dim(); ++a) r2 += w[a] * w[a];
  return std::sqrt(r2);
}

void require_half_space(const Grid& g) {
  if (!g.has_x()) throw std::invalid_argument("weights need a half-space grid");
}
}  // namespace

ScalarField neck_weight(GridPtr grid, const WeightSpec& spec) {
  require_half_space(*grid);
  ScalarField f(grid);
  for (long k = 0; k < grid->size(); ++k) f.v[k] = neck_weight_value(radius(*grid, k), spec);
  return f;
}

ScalarField defining_function(GridPtr grid, double eps) {
  require_half_space(*grid);
  ScalarField f(grid);
  for (long k = 0; k < grid->size(); ++k) f.v[k] = defining_value(grid->x(k), radius(*grid, k), eps);
  return f;
}

ScalarField weight_field(GridPtr grid, const WeightSpec& spec) {
  const ScalarField rho = defining_function(grid, spec.eps);
  const ScalarField w = neck_weight(grid, spec);
  ScalarField f(grid);
  for (long k = 0; k < grid->size(); ++k) f.v[k] = std::pow(rho.v[k], spec.mu) * std::pow(w.v[k], spec.nu);
  return f;
}

namespace {

// Per-node norm of a block of columns; `offdiag` marks columns counted twice.
double node_norm(const Eigen::MatrixXd& m, long k, const std::vector<double>& mult) {
  double s = 0;
  for (long c = 0; c < m.cols(); ++c) s += mult[c] * m(k, c) * m(k, c);
  return std::sqrt(s);
}

double sup_of(const Eigen::MatrixXd& m, const std::vector<double>& mult) {
  double s = 0;
  for (long k = 0; k < m.rows(); ++k) s = std::max(s, node_norm(m, k, mult));
  return s;
}

Eigen::MatrixXd scaled(const Grid& g, const Eigen::MatrixXd& v, int axis) {
  Eigen::MatrixXd d = diff_columns(g, v, axis, 1);
  for (long k = 0; k < g.size(); ++k) d.row(k) *= g.x(k);
  return d;
}

double holder_quotient(const Grid& g, const Eigen::MatrixXd& m, const std::vector<double>& mult, double alpha) {
  double best = 0;
  for (int a = 0; a < g.dim(); ++a) {
    const long st = g.stride(a);
    for (long k = 0; k < g.size(); ++k) {
      const int i = g.index_along(k, a);
      if (i + 1 >= g.count(a)) continue;
      const double x0 = g.x(k);
      const double dist = std::abs(g.axis(a)[i + 1] - g.axis(a)[i]);
      if (dist > 0.5 * x0) continue;
      const Eigen::RowVectorXd diff = m.row(k + st) - m.row(k);
      double s = 0;
      for (long c = 0; c < m.cols(); ++c) s += mult[c] * diff[c] * diff[c];
      best = std::max(best, std::sqrt(s) / std::pow(dist / x0, alpha));
    }
  }
  return best;
}

double norm_impl(const Grid& g, Eigen::MatrixXd v, const ScalarField& weight, int order, double alpha,
                 const std::vector<double>& mult) {
  if (order < 0 || order > 2) throw std::invalid_argument("norm order must be 0, 1 or 2");
  if (weight.v.size() != g.size()) throw std::invalid_argument("weight does not match grid");
  for (long k = 0; k < g.size(); ++k) {
    if (!(weight.v[k] > 0)) throw std::invalid_argument("weight must be positive");
    v.row(k) /= weight.v[k];
  }
  if (!v.allFinite()) throw std::invalid_argument("field is not finite");
  if (order == 0) return sup_of(v, mult);

  double total = sup_of(v, mult);
  std::vector<Eigen::MatrixXd> first(g.dim());
  for (int a = 0; a < g.dim(); ++a) first[a] = scaled(g, v, a);
  double top = 0, seminorm = 0;
  for (int a = 0; a < g.dim(); ++a) top = std::max(top, sup_of(first[a], mult));
  total += top;
  if (order == 1) {
    for (int a = 0; a < g.dim(); ++a) seminorm = std::max(seminorm, holder_quotient(g, first[a], mult, alpha));
    return total + seminorm;
  }
  top = 0;
  for (int a = 0; a < g.dim(); ++a)
    for (int b = 0; b < g.dim(); ++b) {
      const Eigen::MatrixXd second = scaled(g, first[b], a);
      top = std::max(top, sup_of(second, mult));
      seminorm = std::max(seminorm, holder_quotient(g, second, mult, alpha));
    }
  return total + top + seminorm;
}

}  // namespace

double weighted_norm(const ScalarField& field, const ScalarField& weight, int order, double alpha) {
  return norm_impl(*field.grid, field.v, weight, order, alpha, {1.0});
}

double weighted_norm(const SymTensor2Field& field, const ScalarField& weight, int order, double alpha) {
  const int d = field.dim();
  std::vector<double> mult(sym_count(d), 2.0);
  for (int i = 0; i < d; ++i) mult[sym_index(i, i, d)] = 1.0;
  return norm_impl(*field.grid, field.c, weight, order, alpha, mult);
}

}  // namespace peglue
