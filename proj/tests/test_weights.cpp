#include "oracles.hpp"

#include "peglue/weights.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace peglue;
using peglue::testing::sample;

TEST(SmoothRamp, PiecesAndContinuity) {
  const double delta = 0.3;
  EXPECT_EQ(smooth_ramp(-0.5, delta), 0.0);
  EXPECT_EQ(smooth_ramp(-delta, delta), 0.0);
  EXPECT_EQ(smooth_ramp(0.7, delta), 0.7);
  EXPECT_NEAR(smooth_ramp(delta, delta), delta, 1e-15);
  // first and second differences stay bounded across the joins
  const double h = 1e-4;
  for (double v : {-delta, delta}) {
    const double d1l = (smooth_ramp(v, delta) - smooth_ramp(v - h, delta)) / h;
    const double d1r = (smooth_ramp(v + h, delta) - smooth_ramp(v, delta)) / h;
    EXPECT_NEAR(d1l, d1r, 1e-3);
    const double d2 = (smooth_ramp(v + h, delta) - 2 * smooth_ramp(v, delta) + smooth_ramp(v - h, delta)) / (h * h);
    EXPECT_LT(std::abs(d2), 1e-2);
  }
  // convex
  for (double v = -delta; v < delta; v += 0.01)
    EXPECT_GE(smooth_ramp(v + 0.01, delta) - 2 * smooth_ramp(v, delta) + smooth_ramp(v - 0.01, delta), -1e-15);
}

TEST(NeckWeight, CenterValue) {
  for (double eps : {0.2, 0.1, 0.05}) {
    WeightSpec s;
    s.eps = eps;
    EXPECT_NEAR(neck_weight_value(1.0, s), 2 * eps / (1 + eps * eps), 1e-14);
  }
}

TEST(NeckWeight, OneOutsideNeck) {
  WeightSpec s;
  s.eps = 0.1;
  const double cs = std::cosh(s.s_eps());
  // cosh s >= (1 + width) cosh s_eps
  const double s_edge = std::acosh((1 + s.width) * cs);
  for (double sv : {s_edge, s_edge + 0.5, s_edge + 3.0}) {
    EXPECT_EQ(neck_weight_value(std::exp(sv), s), 1.0);
    EXPECT_EQ(neck_weight_value(std::exp(-sv), s), 1.0);
  }
}

TEST(NeckWeight, MonotoneAndBounded) {
  WeightSpec s;
  s.eps = 0.05;
  const double lo = 1 / std::cosh(s.s_eps());
  double prev = 0;
  for (double sv = 0; sv < 6; sv += 0.01) {
    const double w = neck_weight_value(std::exp(sv), s);
    EXPECT_GE(w, prev - 1e-15);
    EXPECT_GE(w, lo - 1e-15);
    EXPECT_LE(w, 1.0);
    EXPECT_NEAR(w, neck_weight_value(std::exp(-sv), s), 1e-14);
    prev = w;
  }
}

TEST(DefiningFunction, OneOnAxisInNeck) {
  for (double r : {0.5, 1.0, 3.0}) EXPECT_NEAR(defining_value(r, r, 0.1), 1.0, 1e-15);
}

TEST(DefiningFunction, EquivalentToChartFunctions) {
  const double eps = 0.1;
  // chart 1: x1 = eps x for eps r >= 1; chart 2: x2 = eps x / r^2 for eps / r >= 1
  for (double r : {15.0, 30.0, 100.0})
    for (double t : {0.1, 0.5, 1.0}) {
      const double x = t * r;
      const double q1 = defining_value(x, r, eps) / (eps * x);
      const double q2 = defining_value(x / (r * r), 1 / r, eps) / (eps * x);
      EXPECT_GT(q1, 0.5);
      EXPECT_LT(q1, 2.0);
      EXPECT_GT(q2, 0.5);
      EXPECT_LT(q2, 2.0);
    }
}

TEST(DefiningFunction, PositiveAwayFromBoundary) {
  GridPtr g = make_grid(2, {9, 9, 9}, 0.5, 3.0, 3.0);
  const ScalarField rho = defining_function(g, 0.1);
  for (long k = 0; k < g->size(); ++k) EXPECT_GE(rho.v[k], 0.5 * g->x(k) / 4.5);
}

TEST(WeightedNorm, WeightItselfHasNormOne) {
  GridPtr g = make_grid(2, {12, 12, 12}, 0.1, 3.0, 3.0);
  WeightSpec s;
  const ScalarField w = weight_field(g, s);
  EXPECT_NEAR(weighted_norm(w, w, 0), 1.0, 1e-15);
  EXPECT_NEAR(weighted_norm(w, w, 1), 1.0, 1e-12);
  EXPECT_NEAR(weighted_norm(w, w, 2), 1.0, 1e-12);
}

TEST(WeightedNorm, Homogeneity) {
  GridPtr g = make_grid(2, {12, 12, 12}, 0.1, 3.0, 3.0);
  WeightSpec s;
  const ScalarField rho = defining_function(g, s.eps);
  const ScalarField wn = neck_weight(g, s);
  ScalarField f(g);
  double expect = 0;
  for (long k = 0; k < g->size(); ++k) {
    f.v[k] = 2 * std::pow(rho.v[k], s.mu);
    expect = std::max(expect, 2 * std::pow(wn.v[k], -s.nu));
  }
  EXPECT_NEAR(weighted_norm(f, weight_field(g, s), 0), expect, 1e-12 * expect);
}

TEST(WeightedNorm, MonotoneUnderDomination) {
  GridPtr g = make_grid(2, {8, 8, 8}, 0.1, 2.0, 2.0);
  const ScalarField w = weight_field(g, WeightSpec{});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1), t(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField a(g), b(g);
    for (long k = 0; k < g->size(); ++k) {
      b.v[k] = u(rng);
      a.v[k] = t(rng) * b.v[k];
    }
    EXPECT_LE(weighted_norm(a, w, 0), weighted_norm(b, w, 0));
  }
}

TEST(WeightedNorm, OffDiagonalCountsTwice) {
  GridPtr g = make_grid(2, {6, 6, 6}, 0.1, 1.0, 1.0);
  const ScalarField one = sample(g, [](const double*) { return 1.0; });
  SymTensor2Field k(g);
  k.c.col(sym_index(0, 1, 3)).setConstant(1.0);
  EXPECT_NEAR(weighted_norm(k, one, 0), std::sqrt(2.0), 1e-15);
  k.c.col(sym_index(0, 0, 3)).setConstant(1.0);
  EXPECT_NEAR(weighted_norm(k, one, 0), std::sqrt(3.0), 1e-15);
}

TEST(WeightedNorm, ScaleInvariantInABoundaryChart) {
  const double mu = 0.7, lambda = 3.0;
  GridPtr g = make_grid(2, {14, 10, 10}, 0.05, 1.0, 1.0, 1.2);
  std::vector<std::vector<double>> axes;
  for (int a = 0; a < 3; ++a) {
    std::vector<double> ax = g->axis(a);
    for (double& v : ax) v *= lambda;
    axes.push_back(ax);
  }
  GridPtr gs = make_grid_from_axes(2, true, axes);
  auto u = [&](const double* w) { return std::pow(w[0], mu) * std::sin(w[0] + w[1]) * std::exp(-w[2] * w[2]); };
  const ScalarField f = sample(g, u);
  const ScalarField fs = sample(gs, [&](const double* w) {
    double v[3] = {w[0] / lambda, w[1] / lambda, w[2] / lambda};
    return std::pow(lambda, mu) * u(v);
  });
  const ScalarField wg = sample(g, [&](const double* w) { return std::pow(w[0], mu); });
  const ScalarField ws = sample(gs, [&](const double* w) { return std::pow(w[0], mu); });
  for (int order : {0, 1, 2}) {
    const double a = weighted_norm(f, wg, order), b = weighted_norm(fs, ws, order);
    EXPECT_NEAR(a, b, 1e-9 * a) << order;
  }
}

TEST(WeightedNorm, EquivalenceUnderChangeOfDefiningFunction) {
  const double mu = 0.5;
  GridPtr g = make_grid(2, {10, 10, 10}, 0.1, 2.0, 2.0);
  const ScalarField rho = sample(g, [](const double* w) { return w[0]; });
  const ScalarField rho2 = sample(g, [](const double* w) { return w[0] * (1.2 + 0.3 * std::sin(w[1])); });
  ScalarField w1(g), w2(g);
  double ratio = 0;
  for (long k = 0; k < g->size(); ++k) {
    w1.v[k] = std::pow(rho.v[k], mu);
    w2.v[k] = std::pow(rho2.v[k], mu);
    ratio = std::max(ratio, std::max(rho2.v[k] / rho.v[k], rho.v[k] / rho2.v[k]));
  }
  const ScalarField f = sample(g, [](const double* w) { return std::cos(w[0] * w[1]) * w[0]; });
  const double a = weighted_norm(f, w1, 0), b = weighted_norm(f, w2, 0);
  EXPECT_LE(std::max(a / b, b / a), std::pow(ratio, mu) + 1e-12);
}

TEST(WeightedNorm, RejectsBadInput) {
  GridPtr g = make_grid(2, {6, 6, 6}, 0.1, 1.0, 1.0);
  ScalarField f(g), w(g);
  EXPECT_THROW(weighted_norm(f, w, 0), std::invalid_argument);
  w.v.setConstant(1.0);
  EXPECT_THROW(weighted_norm(f, w, 3), std::invalid_argument);
  f.v[0] = std::nan("");
  EXPECT_THROW(weighted_norm(f, w, 0), std::invalid_argument);
}

TEST(WeightSpec, Validation) {
  WeightSpec s;
  EXPECT_NO_THROW(validate(s, 2));
  s.mu = 2.0;
  EXPECT_THROW(validate(s, 2), std::invalid_argument);
  s = WeightSpec{};
  s.width = 0;
  EXPECT_THROW(validate(s, 2), std::invalid_argument);
  s = WeightSpec{};
  s.eps = 1.0;
  EXPECT_THROW(validate(s, 2), std::invalid_argument);
}
