// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.

#include "oracles.hpp"

#include "peglue/gauge.hpp"
#include "peglue/glue.hpp"
#include "peglue/solve.hpp"
#include "peglue/tensor_calculus.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace peglue;
using peglue::testing::BumpTensor;
using peglue::testing::slope;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

MetricJet scaled(const MetricJet& j, double t) {
  MetricJet out = MetricJet::zero(j.d);
  out.g = t * j.g;
  for (int a = 0; a < j.d; ++a) {
    out.dg[a] = t * j.dg[a];
    for (int b = 0; b < j.d; ++b) out.ddg[a][b] = t * j.ddg[a][b];
  }
  return out;
}

Outcome indicial_closed_forms() {
  bool ok = true;
  double worst = 0;
  for (int n = 2; n <= 6; ++n) {
    const IndicialSpectrum s = indicial_roots(n);
    const double r1 = std::sqrt(n * n + 8.0 * n);
    const double r2 = std::sqrt(n * n + 4.0 * n + 4.0);
    const double expect[6] = {(n + r1) / 2, (n - r1) / 2, (n + r2) / 2, (n - r2) / 2, double(n), 0.0};
    const double got[6] = {s.zeta1_plus, s.zeta1_minus, s.zeta2_plus, s.zeta2_minus, s.zeta3_plus, s.zeta3_minus};
    for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(got[i] - expect[i]));
    ok = ok && s.zeta2_plus == n + 1 && s.zeta2_minus == -1;
    ok = ok && s.mu_minus == 0 && s.mu_plus == n;
  }
  ok = ok && worst <= 1e-12;
  return {ok, "max root error " + fmt("%.2e", worst) + " over n=2..6"};
}

Outcome hyperbolic_einstein() {
  GridPtr g = make_grid(2, {32, 32, 32}, 0.01, 2.0, 2.0);
  const CCMetric cm = sample_metric(*hyperbolic_half_space(2), g, true);
  SymTensor2Field e = ricci_cc(cm);
  e.c += 2.0 * cm.gbar.c;
  const double err = max_abs(e.c);
  return {err <= 1e-10, "max |Ric + n g0| " + fmt("%.2e", err) + " on 32^3"};
}

Outcome conformal_identity() {
  const MetricPtr gb = generic_test_metric(2, 0.1);
  const ScalarPtr f = smooth_wave(3, 1.0);
  // e^{2f} gbar sampled exactly
  const MetricPtr direct = perturbed(gb, f, 1.0);
  std::vector<double> hs, errs;
  for (int m : {17, 33, 65}) {
    GridPtr g = make_grid(2, {m, m, m}, 0.5, 1.5, 1.0);
    const ScalarField fs = peglue::testing::sample(g, [&](const double* w) { return f->eval(w); });
    const SymTensor2Field r = conformal_ricci(sample_metric(*gb, g), fs);
    double w[kMaxDim];
    double err = 0;
    for (long k = 0; k < g->size(); ++k) {
      g->coords(k, w);
      const SmallMat ric = coordinate_curvature(direct->jet(w)).ricci;
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) err = std::max(err, std::abs(r(k, i, j) - ric(i, j)));
    }
    hs.push_back(g->min_spacing(1));
    errs.push_back(err);
  }
  const double p = slope(hs, errs);
  return {p >= 1.8, "order " + fmt("%.3f", p) + ", errors " + fmt("%.2e", errs[0]) + " " + fmt("%.2e", errs[1]) +
                        " " + fmt("%.2e", errs[2])};
}

Outcome indicial_cancellation() {
  bool ok = true;
  std::ostringstream os;
  for (int n : {2, 3}) {
    const IndicialSpectrum s = indicial_roots(n);
    const double roots[3] = {s.zeta1_plus, s.zeta2_plus, s.zeta3_plus};
    for (int b = 0; b < 3; ++b) {
      const double p = peglue::testing::indicial_decay(n, b, roots[b]);
      ok = ok && p >= roots[b] + 0.9;
      os << "n=" << n << " block " << b + 1 << ": " << fmt("%.3f", p - roots[b]) << "; ";
    }
  }
  return {ok, "exponent minus zeta: " + os.str()};
}

Outcome residual_decay() {
  const MetricPtr b = poincare_ball_chart(2);
  const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
  const auto rows = residual_study(b, b, eps);
  std::vector<double> sups;
  double outside = 0;
  bool finite = true;
  for (const auto& r : rows) {
    sups.push_back(r.sup_residual);
    outside = std::max(outside, r.sup_outside);
    finite = finite && std::isfinite(r.sup_residual) && r.sup_residual > 0;
  }
  const double p = finite ? slope(eps, sups) : NAN;
  return {finite && p >= 1.85 && p <= 2.15 && outside <= 1e-10,
          "slope " + fmt("%.3f", p) + ", sup at 0.025 " + fmt("%.2e", sups.back()) + ", outside A " +
              fmt("%.2e", outside)};
}

Outcome linearization_consistency() {
  // exact 2-jets of random smooth kappa on the glued ball pair
  const GluedAtlas atlas = glue_metrics(poincare_ball_chart(2), poincare_ball_chart(2), 0.1);
  std::mt19937 rng(20240917);
  std::uniform_real_distribution<double> ux(0.3, 2.0), uy(-1.5, 1.5), useed(0.1, 2.0);
  const std::vector<double> ts = {1e-2, 3e-3, 1e-3, 3e-4};
  double worst = INFINITY;
  for (int trial = 0; trial < 4; ++trial) {
    const BumpTensor kappa(3, {ux(rng), uy(rng), uy(rng)}, 0.5, useed(rng));
    std::vector<double> rs(ts.size(), 0.0);
    for (int p = 0; p < 6; ++p) {
      const double w[3] = {ux(rng), uy(rng), uy(rng)};
      const MetricJet gj = atlas.glued->jet(w);
      const FrameGeometry f = frame_geometry(w[0], gj, true, true);
      const MetricJet kj = kappa.jet(w);
      const SmallMat n0 = gauged_residual_at(f, gj, MetricJet::zero(3));
      const SmallMat l = linearized_at(f, 2, kj);
      for (size_t i = 0; i < ts.size(); ++i) {
        const SmallMat r = gauged_residual_at(f, gj, scaled(kj, ts[i])) - n0 - 0.5 * ts[i] * l;
        rs[i] = std::max(rs[i], tensor_norm(r, f.ginv));
      }
    }
    worst = std::min(worst, slope(ts, rs));
  }
  // the solver's discrete N against its matrix
  GridPtr g = make_grid(2, {12, 12, 12}, 0.2, 2.2, 2.0);
  const GaugeContext ctx = make_context(sample_metric(*atlas.glued, g));
  WeightSpec spec;
  spec.mu = spec.nu = 0.5;
  spec.eps = 0.1;
  const LinearSystem sys = assemble(ctx, spec);
  const SymTensor2Field kappa =
      unpack(sys, pack(sys, peglue::testing::sample_tensor(g, BumpTensor(3, {1.1, 0.3, -0.2}, 0.5, 0.9))));
  const SymTensor2Field n0 = discrete_residual(ctx, sys, SymTensor2Field(g));
  const SymTensor2Field l = apply(sys, kappa);
  std::vector<double> rs;
  for (double t : ts) {
    const SymTensor2Field r = discrete_residual(ctx, sys, t * kappa) - n0 - (0.5 * t) * l;
    double e = 0;
    for (long node : sys.unknown_nodes) e = std::max(e, r.c.row(node).cwiseAbs().maxCoeff());
    rs.push_back(e);
  }
  const double discrete = slope(ts, rs);
  return {worst >= 1.9 && discrete >= 1.9,
          "exponent " + fmt("%.3f", worst) + " (pointwise, worst of 4 kappa), " + fmt("%.3f", discrete) + " (discrete)"};
}

struct SolveRun {
  double eps = 0;
  SolveReport report;
  double sup_outside = 0;  // sup_{r >= 2} |k|_g
  double seconds = 0;
};

SolveRun solve_at(double eps) {
  const auto t0 = std::chrono::steady_clock::now();
  GridPtr g = make_grid(2, {32, 32, 32}, 0.2, 2.2, 2.0);
  const GluedAtlas atlas = glue_metrics(poincare_ball_chart(2), poincare_ball_chart(2), eps);
  const GaugeContext ctx = make_context(sample_metric(*atlas.glued, g, true));
  WeightSpec spec;
  spec.mu = spec.nu = 0.5;
  spec.eps = eps;
  const FixedPointResult fp = fixed_point(ctx, spec, 1e-8, 20);
  SolveRun run;
  run.eps = eps;
  run.report = fp.report;
  const ScalarField kn = pointwise_norm(ctx.g, fp.k);
  double w[kMaxDim];
  for (long k = 0; k < g->size(); ++k) {
    g->coords(k, w);
    if (w[0] * w[0] + w[1] * w[1] + w[2] * w[2] >= 4) run.sup_outside = std::max(run.sup_outside, kn.v[k]);
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

Outcome uniform_inverse(const std::vector<SolveRun>& runs) {
  double lo = INFINITY, hi = 0;
  std::ostringstream os;
  for (const auto& r : runs) {
    lo = std::min(lo, r.report.g_norm);
    hi = std::max(hi, r.report.g_norm);
    os << fmt("%.3f", r.report.g_norm) << " ";
  }
  return {lo > 0 && hi / lo <= 2.0, "G-norm proxy " + os.str() + "ratio " + fmt("%.3f", hi / lo)};
}

Outcome contraction(const SolveRun& run, double tol) {
  const SolveReport& r = run.report;
  const double drop = r.residuals.front() / r.residuals.back();
  double late = 0;
  for (size_t i = 2; i < r.contraction.size(); ++i) late = std::max(late, r.contraction[i]);
  const bool ok_drop = drop >= 1e3 && r.residuals.size() <= 21;
  const bool ok_rate = late <= 0.5;
  const bool ok_bianchi = r.bianchi_norm <= 10 * tol;
  return {ok_drop && ok_rate && ok_bianchi,
          "drop " + fmt("%.2e", drop) + " in " + std::to_string(r.residuals.size() - 1) + " iterations, max factor after 2 " +
              fmt("%.3f", late) + ", Bianchi proxy " + fmt("%.2e", r.bianchi_norm) + " vs " + fmt("%.1e", 10 * tol) +
              (r.failure.empty() ? "" : ", " + r.failure)};
}

Outcome away_from_neck(const std::vector<SolveRun>& runs) {
  std::vector<double> es, sups;
  bool monotone = true;
  std::ostringstream os;
  for (size_t i = 0; i < runs.size(); ++i) {
    es.push_back(runs[i].eps);
    sups.push_back(runs[i].sup_outside);
    if (i > 0) monotone = monotone && runs[i].sup_outside < runs[i - 1].sup_outside;
    os << fmt("%.2e", runs[i].sup_outside) << " ";
  }
  const double p = slope(es, sups);
  return {monotone && p > 0, "sup_{r>=2} |k| " + os.str() + "rate " + fmt("%.3f", p)};
}

Outcome positive_scalar_curvature() {
  // n = 3; for n = 2 the glued neck goes negative at any eps
  const int n = 3;
  const double single = n * (n - 1);
  const MetricPtr h = round_sphere_boundary(n);
  bool ok = true;
  std::ostringstream os;
  for (double eps : {0.1, 0.05, 0.025}) {
    GridPtr grid = make_boundary_grid(n, {25, 25, 25}, 4.0);
    const ScalarField R = scalar_curvature(sample_metric(*glue_boundary(h, h, eps), grid));
    double mn = INFINITY, far = INFINITY;
    double t[kMaxDim];
    for (long k = 0; k < grid->size(); ++k) {
      grid->coords(k, t);
      const double r2 = t[0] * t[0] + t[1] * t[1] + t[2] * t[2];
      // r < 1/2 is the inverted copy of r > 2
      if (r2 < 0.25) continue;
      mn = std::min(mn, R.v[k]);
      if (r2 >= 4) far = std::min(far, R.v[k]);
    }
    ok = ok && mn > 0 && std::abs(far - single) <= 0.05 * single;
    os << "eps " << eps << ": min " << fmt("%.3f", mn) << ", far " << fmt("%.3f", far) << "; ";
  }
  return {ok, "n=3 " + os.str()};
}

int failures = 0;

void report(int id, const Outcome& o, double seconds) {
  if (!o.pass) ++failures;
  std::printf("criterion %2d: %s  %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds);
  std::fflush(stdout);
}

void timed(int id, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  report(id, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

}  // namespace

int main() {
  timed(1, indicial_closed_forms);
  timed(2, hyperbolic_einstein);
  timed(3, conformal_identity);
  timed(4, indicial_cancellation);
  timed(5, residual_decay);
  timed(6, linearization_consistency);

  // criteria 7 to 9 share one solve per eps
  std::vector<SolveRun> runs;
  try {
    for (double eps : {0.2, 0.1, 0.05}) runs.push_back(solve_at(eps));
  } catch (const std::exception& e) {
    for (int id : {7, 8, 9}) report(id, {false, std::string("solve threw: ") + e.what()}, 0);
    timed(10, positive_scalar_curvature);
    return 1;
  }
  double total = 0;
  for (const auto& r : runs) total += r.seconds;
  report(7, uniform_inverse(runs), total);
  report(8, contraction(runs[1], 1e-8), runs[1].seconds);
  report(9, away_from_neck(runs), total);
  timed(10, positive_scalar_curvature);
  return failures == 0 ? 0 : 1;
}
