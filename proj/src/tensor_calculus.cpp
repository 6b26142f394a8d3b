#include "peglue/tensor_calculus.hpp"
#include "peglue/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace peglue {

namespace {

void store(SymTensor2Field& out, long k, const SmallMat& m) {
  const int d = out.dim();
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out.c(k, sym_index(i, j, d)) = m(i, j);
}

}  // namespace

ChristoffelField christoffel(const CCMetric& g) {
  const int d = g.dim();
  ChristoffelField out;
  out.grid = g.grid();
  out.gamma.assign(d, Eigen::MatrixXd(g.grid()->size(), sym_count(d)));
  parallel_for(g.grid()->size(), [&](long b, long e) {
    for (long k = b; k < e; ++k) {
      const CoordinateCurvature c = coordinate_curvature(g.jets.at(k));
      for (int m = 0; m < d; ++m)
        for (int i = 0; i < d; ++i)
          for (int j = i; j < d; ++j) out.gamma[m](k, sym_index(i, j, d)) = c.gamma[m](i, j);
    }
  });
  return out;
}

SymTensor2Field ricci_compactified(const CCMetric& g) {
  SymTensor2Field out(g.grid());
  parallel_for(g.grid()->size(), [&](long b, long e) {
    for (long k = b; k < e; ++k) store(out, k, coordinate_curvature(g.jets.at(k)).ricci);
  });
  return out;
}

SymTensor2Field ricci_cc(const CCMetric& g) {
  if (!g.grid()->has_x()) throw std::invalid_argument("ricci_cc needs a half-space grid");
  SymTensor2Field out(g.grid());
  parallel_for(g.grid()->size(), [&](long b, long e) {
    for (long k = b; k < e; ++k) {
      const MetricJet j = g.jets.at(k);
      store(out, k, ricci_cc_point(g.grid()->x(k), j, coordinate_curvature(j)));
    }
  });
  return out;
}

SymTensor2Field einstein_deviation(const CCMetric& g) {
  SymTensor2Field out = ricci_cc(g);
  out.c += g.n() * g.gbar.c;
  return out;
}

SymTensor2Field conformal_ricci(const CCMetric& g, const ScalarField& f) {
  const Grid& G = *g.grid();
  const int d = G.dim();
  std::vector<Eigen::VectorXd> df(d);
  std::vector<Eigen::VectorXd> hf(sym_count(d));
  for (int m = 0; m < d; ++m) df[m] = diff_columns(G, f.v, m, 1);
  for (int m = 0; m < d; ++m)
    for (int l = m; l < d; ++l)
      hf[sym_index(m, l, d)] = m == l ? diff_columns(G, f.v, m, 2) : diff_columns(G, df[m], l, 1);
  SymTensor2Field out(g.grid());
  parallel_for(G.size(), [&](long b, long e) {
    for (long k = b; k < e; ++k) {
      const MetricJet j = g.jets.at(k);
      SmallVec v(d);
      SmallMat h(d, d);
      for (int m = 0; m < d; ++m) {
        v[m] = df[m][k];
        for (int l = 0; l < d; ++l) h(m, l) = hf[sym_index(m, l, d)][k];
      }
      store(out, k, conformal_ricci(j, coordinate_curvature(j), v, h));
    }
  });
  return out;
}

GridPtr boundary_grid_of(const Grid& g) {
  if (!g.has_x()) throw std::invalid_argument("grid has no x axis");
  std::vector<std::vector<double>> axes;
  for (int a = 1; a < g.dim(); ++a) axes.push_back(g.axis(a));
  return make_grid_from_axes(g.n(), false, std::move(axes));
}

Eigen::MatrixXd extrapolate_to_boundary(const Grid& g, const Eigen::MatrixXd& values, GridPtr& boundary) {
  boundary = boundary_grid_of(g);
  std::vector<double> xs(g.axis(0).begin(), g.axis(0).begin() + 5);
  const Eigen::MatrixXd w = fornberg_weights(0.0, xs, 0);
  const long layer = g.stride(0);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(layer, values.cols());
  for (int q = 0; q < 5; ++q) out += w(q, 0) * values.middleRows(q * layer, layer);
  return out;
}

NormalFormResult normal_form(const AnalyticMetric& gbar, const AnalyticScalar& rho, GridPtr grid,
                             const std::function<double(const double* y)>& u0) {
  const Grid& G = *grid;
  if (!G.has_x()) throw std::invalid_argument("normal_form needs a half-space grid");
  const int d = G.dim();
  GridPtr bgrid = boundary_grid_of(G);
  const long layer = G.stride(0);

  // right-hand side u_x = F(x, u, lagged u_y) per tangential node
  auto slope = [&](double x, long j, double /*u*/, const SmallVec& q) {
    const double xe = std::max(x, 1e-4);
    double w[kMaxDim];
    w[0] = xe;
    for (int a = 1; a < d; ++a) w[a] = G.coord(j, a);  // j indexes the first layer
    double r;
    SmallVec dr;
    SmallMat hr;
    scalar_jet(rho, d, w, r, dr, hr);
    if (!(r > 0)) throw std::domain_error("defining function not positive");
    const SmallMat gi = gbar.value(w).inverse();
    const double drho2 = dr.dot(gi * dr);
    if (!(drho2 > 0)) throw std::domain_error("|d rho| vanishes");
    // unknown p = u_x; q_0 unused
    SmallVec e0 = SmallVec::Zero(d);
    e0[0] = 1;
    SmallVec qt = q;
    qt[0] = 0;
    const double A = r * gi(0, 0);
    const double B = 2 * e0.dot(gi * dr) + 2 * r * e0.dot(gi * qt);
    const double C = 2 * qt.dot(gi * dr) + r * qt.dot(gi * qt) - ((r / xe) * (r / xe) - drho2) / r;
    const double disc = B * B - 4 * A * C;
    if (disc < 0 || B <= 0) throw std::domain_error("marching instability");
    return -2 * C / (B + std::sqrt(disc));
  };

  Eigen::VectorXd u(layer);
  {
    double y[kMaxDim];
    for (long j = 0; j < layer; ++j) {
      for (int a = 1; a < d; ++a) y[a - 1] = G.coord(j, a);
      u[j] = u0(y);
    }
  }
  auto tangential = [&](const Eigen::VectorXd& v) {
    std::vector<Eigen::VectorXd> q(d - 1);
    for (int a = 0; a < d - 1; ++a) q[a] = diff_columns(*bgrid, v, a, 1);
    return q;
  };

  Eigen::MatrixXd U(G.size(), 1);
  double hy = G.min_spacing(1);
  for (int a = 2; a < d; ++a) hy = std::min(hy, G.min_spacing(a));
  double x = 0;
  for (int i = 0; i < G.count(0); ++i) {
    const double target = G.axis(0)[i];
    const int steps = std::max(1, static_cast<int>(std::ceil((target - x) / (0.5 * hy))));
    const double h = (target - x) / steps;
    for (int s = 0; s < steps; ++s) {
      const auto q = tangential(u);
      Eigen::VectorXd next(layer);
      parallel_for(layer, [&](long b, long e) {
        for (long j = b; j < e; ++j) {
          SmallVec qj = SmallVec::Zero(d);
          for (int a = 1; a < d; ++a) qj[a] = q[a - 1][j];
          const double k1 = slope(x, j, u[j], qj);
          const double k2 = slope(x + h / 2, j, u[j] + h / 2 * k1, qj);
          const double k3 = slope(x + h / 2, j, u[j] + h / 2 * k2, qj);
          const double k4 = slope(x + h, j, u[j] + h * k3, qj);
          next[j] = u[j] + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
      });
      u = next;
      x += h;
    }
    U.middleRows(static_cast<long>(i) * layer, layer) = u;
  }

  NormalFormResult res;
  res.u = ScalarField(grid, U.col(0));
  Eigen::VectorXd xh(G.size());
  Eigen::MatrixXd gh(G.size(), sym_count(d));
  for (long k = 0; k < G.size(); ++k) {
    double w[kMaxDim];
    G.coords(k, w);
    xh[k] = std::exp(U(k, 0)) * rho.eval(w);
    const SmallMat gk = gbar.value(w);
    const double f = xh[k] / G.x(k);
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) gh(k, sym_index(a, b, d)) = f * f * gk(a, b);
  }
  res.xhat = ScalarField(grid, xh);
  res.gbar_hat = metric_from_field(SymTensor2Field(grid, gh));
  std::vector<Eigen::VectorXd> dx(d);
  for (int m = 0; m < d; ++m) dx[m] = diff_columns(G, xh, m, 1);
  res.defect = ScalarField(grid);
  for (long k = 0; k < G.size(); ++k) {
    double w[kMaxDim];
    G.coords(k, w);
    const SmallMat gi = gbar.value(w).inverse();
    SmallVec v(d);
    for (int m = 0; m < d; ++m) v[m] = dx[m][k];
    const double s = G.x(k) / xh[k];
    res.defect.v[k] = s * s * v.dot(gi * v) - 1.0;
  }
  return res;
}

BoundaryExpansion boundary_expansion(const CCMetric& g) {
  const Grid& G = *g.grid();
  if (!G.has_x()) throw std::invalid_argument("boundary_expansion needs a half-space grid");
  constexpr int layers = 8, degree = 3;
  if (G.count(0) < layers) throw std::invalid_argument("ill-conditioned fit: too few x-layers");
  const int d = G.dim();
  const int n = d - 1;
  GridPtr bgrid = boundary_grid_of(G);
  const long layer = G.stride(0);

  Eigen::MatrixXd V(layers, degree + 1);
  for (int i = 0; i < layers; ++i)
    for (int p = 0; p <= degree; ++p) V(i, p) = std::pow(G.axis(0)[i], p);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
  const double cond = svd.singularValues()(0) / svd.singularValues()(degree);
  if (!(cond < 1e12)) throw std::invalid_argument("ill-conditioned fit");

  BoundaryExpansion out{SymTensor2Field(bgrid), SymTensor2Field(bgrid), SymTensor2Field(bgrid), 0.0};
  for (long j = 0; j < layer; ++j)
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        Eigen::VectorXd rhs(layers);
        for (int i = 0; i < layers; ++i) rhs[i] = g.gbar(i * layer + j, a + 1, b + 1);
        const Eigen::VectorXd c = qr.solve(rhs);
        out.fit_residual = std::max(out.fit_residual, (V * c - rhs).cwiseAbs().maxCoeff());
        out.h0.at(j, a, b) = c[0];
        out.h1.at(j, a, b) = c[1];
        out.h2.at(j, a, b) = c[2];
      }
  return out;
}

ScalarField scalar_curvature(const BoundaryMetric& h) {
  ScalarField out(h.grid());
  parallel_for(h.grid()->size(), [&](long b, long e) {
    for (long k = b; k < e; ++k) out.v[k] = coordinate_curvature(h.jets.at(k)).scalar;
  });
  return out;
}

}  // namespace peglue
