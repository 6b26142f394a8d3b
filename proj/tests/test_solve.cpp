#include "oracles.hpp"

#include "peglue/glue.hpp"
#include "peglue/solve.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace peglue;
using peglue::testing::BumpTensor;
using peglue::testing::sample_tensor;
using peglue::testing::slope;

namespace {

GaugeContext hyperbolic_context(int m, double x_min = 0.2, double x_max = 2.2) {
  GridPtr g = make_grid(2, {m, m, m}, x_min, x_max, 2.0);
  return make_context(sample_metric(*hyperbolic_half_space(2), g, true));
}

WeightSpec solver_spec(double eps) {
  WeightSpec s;
  s.mu = s.nu = 0.5;
  s.eps = eps;
  return s;
}

// exact L kappa from analytic jets
SymTensor2Field exact_linearized(const GaugeContext& ctx, const AnalyticMetric& kappa) {
  const Grid& g = *ctx.grid();
  SymTensor2Field out(ctx.grid());
  double w[kMaxDim];
  for (long node = 0; node < g.size(); ++node) {
    g.coords(node, w);
    const FrameGeometry f = frame_geometry(g.x(node), ctx.g.jets.at(node), true, true);
    out.set_node(node, linearized_at(f, ctx.n, kappa.jet(w)));
  }
  return out;
}

// Nested uniform grids on a window around a fixed box; the stencils are
// local, so the window only needs to clear the box by a few nodes.
GridPtr window_grid(double h) {
  const auto count = [h](double len) { return static_cast<int>(std::lround(len / h)) + 1; };
  return make_grid(2, {count(1.1), count(1.6), count(1.6)}, 0.6, 1.7, 0.8);
}
bool in_box(const double* w) { return w[0] > 0.8 && w[0] < 1.5 && std::abs(w[1]) < 0.55 && std::abs(w[2]) < 0.55; }

}  // namespace

TEST(Assemble, RejectsWeightsOutsideWindow) {
  const GaugeContext ctx = hyperbolic_context(7);
  WeightSpec s = solver_spec(0.1);
  s.mu = s.nu = 2.0;  // = n
  EXPECT_THROW(assemble(ctx, s), std::invalid_argument);
  s.mu = s.nu = 1.0;  // = n/2
  EXPECT_THROW(assemble(ctx, s), std::invalid_argument);
  s.mu = 0.5;
  s.nu = 0.4;
  EXPECT_THROW(assemble(ctx, s), std::invalid_argument);
  EXPECT_THROW(assemble_single_chart(ctx, 2.0), std::invalid_argument);
  EXPECT_THROW(assemble_single_chart(ctx, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(assemble_single_chart(ctx, 1.5));
}

TEST(Assemble, DimensionsAndPattern) {
  const GaugeContext ctx = hyperbolic_context(8);
  const LinearSystem sys = assemble(ctx, solver_spec(0.1));
  EXPECT_EQ(sys.unknowns(), 6L * 6 * 6 * 6);
  EXPECT_EQ(sys.matrix.rows(), sys.matrix.cols());
  // structurally symmetric
  Eigen::SparseMatrix<double> a = sys.matrix, at = a.transpose();
  for (int k = 0; k < a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
      if (it.value() != 0) EXPECT_NE(at.coeff(it.row(), it.col()) + a.coeff(it.col(), it.row()), 0.0 * it.value() - 1e300);
}

TEST(Assemble, WeightedOneMatchesPureTraceClosedForm) {
  // kappa~ = delta, W = x^mu: W^-1 L (x^mu g0) = (-(mu^2 - n mu) + 2n) g0
  const int n = 2;
  const double mu = 0.7;
  std::vector<double> hs, errs;
  for (double h : {0.1, 0.05}) {
    const GaugeContext ctx = make_context(sample_metric(*hyperbolic_half_space(2), window_grid(h), true));
    const LinearSystem sys = assemble_single_chart(ctx, mu);
    SymTensor2Field k(ctx.grid());
    for (long node = 0; node < ctx.grid()->size(); ++node)
      for (int a = 0; a < 3; ++a) k.at(node, a, a) = sys.weight.v[node];
    const SymTensor2Field lk = apply(sys, k);
    const double expect = -(mu * mu - n * mu) + 2 * n;
    double e = 0;
    double w[kMaxDim];
    for (long node : sys.unknown_nodes) {
      ctx.grid()->coords(node, w);
      if (!in_box(w)) continue;
      for (int a = 0; a < 3; ++a) {
        e = std::max(e, std::abs(lk(node, a, a) / sys.weight.v[node] - expect));
        for (int b = a + 1; b < 3; ++b) e = std::max(e, std::abs(lk(node, a, b)));
      }
    }
    hs.push_back(ctx.grid()->min_spacing(1));
    errs.push_back(e);
  }
  EXPECT_GE(slope(hs, errs), 1.8);
  EXPECT_LT(errs.back(), 1e-2);
}

TEST(Assemble, GluedWeightMatchesFieldOperator) {
  // matrix against the gauge module on W * kappa~ away from the faces
  const BumpTensor bt(3, {1.0, 0.2, -0.1}, 0.4);
  std::vector<double> hs, errs;
  for (double h : {0.1, 0.05}) {
    GridPtr g = window_grid(h);
    const GaugeContext ctx = make_context(sample_metric(*glue_metrics(poincare_ball_chart(2), poincare_ball_chart(2), 0.1).glued, g));
    const LinearSystem sys = assemble(ctx, solver_spec(0.1));
    const SymTensor2Field k = sample_tensor(g, bt);
    const SymTensor2Field a = apply(sys, k), ref = exact_linearized(ctx, bt);
    double e = 0;
    double w[kMaxDim];
    for (long node : sys.unknown_nodes) {
      g->coords(node, w);
      if (in_box(w)) e = std::max(e, (a.c.row(node) - ref.c.row(node)).cwiseAbs().maxCoeff());
    }
    hs.push_back(g->min_spacing(1));
    errs.push_back(e);
  }
  EXPECT_GE(slope(hs, errs), 1.8);
}

TEST(PackUnpack, RoundTripOnInterior) {
  const GaugeContext ctx = hyperbolic_context(8);
  const LinearSystem sys = assemble(ctx, solver_spec(0.1));
  const SymTensor2Field k = sample_tensor(ctx.grid(), BumpTensor(3, {1.0, 0, 0}, 0.5));
  const SymTensor2Field back = unpack(sys, pack(sys, k));
  for (long node = 0; node < ctx.grid()->size(); ++node) {
    if (sys.node_to_unknown[node] < 0) {
      EXPECT_EQ(back.c.row(node).cwiseAbs().maxCoeff(), 0.0);
    } else {
      EXPECT_LT((back.c.row(node) - k.c.row(node)).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(LinearSolve, ZeroRightHandSide) {
  const GaugeContext ctx = hyperbolic_context(8);
  const LinearSystem sys = assemble(ctx, solver_spec(0.1));
  const LinearSolveResult r = linear_solve(sys, SymTensor2Field(ctx.grid()));
  EXPECT_EQ(r.k.c.cwiseAbs().maxCoeff(), 0.0);
}

TEST(LinearSolve, ManufacturedSolutionConverges) {
  const BumpTensor bt(3, {1.1, 0.0, 0.2}, 0.35);
  std::vector<double> hs, errs;
  for (int m : {13, 25}) {
    const GaugeContext ctx = hyperbolic_context(m);
    const LinearSystem sys = assemble_single_chart(ctx, 1.0);
    const LinearSolveResult r = linear_solve(sys, exact_linearized(ctx, bt));
    const SymTensor2Field exact = sample_tensor(ctx.grid(), bt);
    EXPECT_LE(r.relative_residual, 1e-8);
    EXPECT_GT(r.g_norm, 0.0);
    hs.push_back(ctx.grid()->min_spacing(1));
    errs.push_back((r.k.c - exact.c).cwiseAbs().maxCoeff());
  }
  EXPECT_GE(slope(hs, errs), 1.8);
}

TEST(DiscreteResidual, JacobianIsHalfTheMatrix) {
  GridPtr g = make_grid(2, {10, 10, 10}, 0.2, 2.2, 2.0);
  const GaugeContext ctx = make_context(sample_metric(*glue_metrics(poincare_ball_chart(2), poincare_ball_chart(2), 0.1).glued, g));
  const LinearSystem sys = assemble(ctx, solver_spec(0.1));
  // zero on the faces, like every iterate
  const SymTensor2Field kappa = unpack(sys, pack(sys, sample_tensor(g, BumpTensor(3, {1.0, 0.2, 0.0}, 0.5))));
  const SymTensor2Field n0 = discrete_residual(ctx, sys, SymTensor2Field(g));
  const SymTensor2Field l = apply(sys, kappa);
  std::vector<double> ts, rs;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    const SymTensor2Field r = discrete_residual(ctx, sys, t * kappa) - n0 - (0.5 * t) * l;
    double e = 0;
    for (long node : sys.unknown_nodes) e = std::max(e, r.c.row(node).cwiseAbs().maxCoeff());
    ts.push_back(t);
    rs.push_back(e);
  }
  EXPECT_GE(slope(ts, rs), 1.9);
}

TEST(FixedPoint, HyperbolicGluingIsAlreadySolved) {
  GridPtr g = make_grid(2, {10, 10, 10}, 0.2, 2.2, 2.0);
  const MetricPtr g0 = hyperbolic_half_space(2);
  const GaugeContext ctx = make_context(sample_metric(*glue_metrics(g0, g0, 0.1).glued, g, true));
  const FixedPointResult fp = fixed_point(ctx, solver_spec(0.1), 1e-8, 20);
  EXPECT_TRUE(fp.report.converged);
  EXPECT_LE(fp.report.residuals.size(), 2u);
  EXPECT_LT(fp.k.c.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_TRUE(fp.report.failure.empty());
}

TEST(FixedPoint, ReportsFailureInsteadOfThrowing) {
  GridPtr g = make_grid(2, {8, 8, 8}, 0.2, 2.2, 2.0);
  const MetricPtr b = poincare_ball_chart(2);
  const GaugeContext ctx = make_context(sample_metric(*glue_metrics(b, b, 0.5).glued, g));
  // one iteration cannot reach the tolerance
  const FixedPointResult fp = fixed_point(ctx, solver_spec(0.5), 1e-14, 1);
  EXPECT_FALSE(fp.report.converged);
  EXPECT_FALSE(fp.report.failure.empty());
  EXPECT_FALSE(fp.report.residuals.empty());
}

TEST(KernelProbe, HyperbolicIsNondegenerate) {
  const GaugeContext ctx = hyperbolic_context(14);
  const KernelProbe kp = kernel_probe(assemble_single_chart(ctx, 1.0), 1e-3);
  EXPECT_GT(kp.sigma_min, 1e-3);
  EXPECT_FALSE(kp.degenerate);
}

TEST(KernelProbe, DetectsProjectedConstantMode) {
  const GaugeContext ctx = hyperbolic_context(6);
  const LinearSystem sys = assemble_single_chart(ctx, 1.0);
  const KernelProbe full = kernel_probe(sys.matrix, 1e-3);
  const KernelProbe cut = kernel_probe(project_out_constant(sys.matrix), 1e-3);
  EXPECT_FALSE(full.degenerate);
  EXPECT_TRUE(cut.degenerate);
  EXPECT_LT(cut.sigma_min, 1e-6);
  EXPECT_FALSE(kernel_probe(project_out_constant(sys.matrix), 0.0).degenerate);
}
