#include "peglue/gauge.hpp"
#include "peglue/parallel.hpp"

#include <stdexcept>
#include <string>

namespace peglue {

namespace {

SmallMat node_tensor(const Eigen::MatrixXd& c, long k, int d) {
  SmallMat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) m(i, j) = m(j, i) = c(k, sym_index(i, j, d));
  return m;
}

void store(Eigen::MatrixXd& c, long k, const SmallMat& m) {
  const int d = static_cast<int>(m.rows());
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) c(k, sym_index(i, j, d)) = m(i, j);
}

Eigen::MatrixXd scaled(const Grid& G, const Eigen::MatrixXd& v, int axis) {
  Eigen::MatrixXd d = diff_columns(G, v, axis, 1);
  for (long k = 0; k < G.size(); ++k) d.row(k) *= G.x(k);
  return d;
}

// (nabla k)_cab given the connection and frame derivatives e_c k_ab
SmallMat nabla_c(const std::array<SmallMat, kMaxDim>& omega, const SmallMat& K, const SmallMat& eK, int c) {
  const int d = static_cast<int>(K.rows());
  SmallMat r = eK;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int p = 0; p < d; ++p) r(a, b) -= omega[p](c, a) * K(p, b) + omega[p](c, b) * K(a, p);
  return r;
}

// -2 Rc k + Ric o k + k o Ric + 2n k
SmallMat curvature_terms(const SmallMat& ginv, const SmallMat& ric, const Tensor4& rm, int n, const SmallMat& K) {
  const int d = static_cast<int>(K.rows());
  const SmallMat Kup = ginv * K * ginv;
  SmallMat r = ric * ginv * K;
  r += r.transpose().eval();
  r += 2.0 * n * K;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double s = 0;
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) s += rm(a, p, q, b) * Kup(p, q);
      r(a, b) -= 2 * s;
    }
  return r;
}

}  // namespace

GaugeContext make_context(const CCMetric& g) {
  if (!g.grid()->has_x()) throw std::invalid_argument("gauge context needs a half-space grid");
  GaugeContext ctx;
  ctx.g = g;
  ctx.n = g.n();
  ctx.geo.resize(g.grid()->size());
  parallel_for(g.grid()->size(), [&](long b, long e) {
    for (long k = b; k < e; ++k) {
      const FrameGeometry f = frame_geometry(g.grid()->x(k), g.jets.at(k), true, false);
      NodeGeometry& ng = ctx.geo[k];
      ng.ginv = f.ginv;
      ng.ricci = f.ricci;
      ng.omega = f.omega;
      ng.riemann = f.riemann;
    }
  });
  return ctx;
}

std::vector<Eigen::MatrixXd> covariant_derivative(const GaugeContext& ctx, const SymTensor2Field& k) {
  const Grid& G = *ctx.grid();
  const int d = G.dim();
  std::vector<Eigen::MatrixXd> eK(d), out(d, Eigen::MatrixXd(G.size(), sym_count(d)));
  for (int c = 0; c < d; ++c) eK[c] = scaled(G, k.c, c);
  parallel_for(G.size(), [&](long b, long e) {
    for (long node = b; node < e; ++node) {
      const SmallMat K = node_tensor(k.c, node, d);
      for (int c = 0; c < d; ++c)
        store(out[c], node, nabla_c(ctx.geo[node].omega, K, node_tensor(eK[c], node, d), c));
    }
  });
  return out;
}

OneFormField bianchi(const GaugeContext& ctx, const SymTensor2Field& k) {
  const Grid& G = *ctx.grid();
  const int d = G.dim();
  const auto nk = covariant_derivative(ctx, k);
  Eigen::VectorXd tr(G.size());
  for (long node = 0; node < G.size(); ++node)
    tr[node] = ctx.geo[node].ginv.cwiseProduct(node_tensor(k.c, node, d)).sum();
  OneFormField B(ctx.grid());
  for (int b = 0; b < d; ++b) {
    const Eigen::MatrixXd dtr = scaled(G, tr, b);
    for (long node = 0; node < G.size(); ++node) {
      const SmallMat& gi = ctx.geo[node].ginv;
      double div = 0;
      for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) div += gi(a, c) * nk[c](node, sym_index(a, b, d));
      B.c(node, b) = -div + 0.5 * dtr(node, 0);
    }
  }
  return B;
}

namespace {

SmallMat sym_nabla(const std::array<SmallMat, kMaxDim>& omega, const SmallVec& w, const SmallMat& ew) {
  // ew(a,b) = e_a(w_b)
  const int d = static_cast<int>(w.size());
  SmallMat r(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double s = ew(a, b);
      for (int p = 0; p < d; ++p) s -= omega[p](a, b) * w[p];
      r(a, b) = s;
    }
  return 0.5 * (r + r.transpose());
}

std::vector<Eigen::MatrixXd> frame_gradient(const Grid& G, const OneFormField& w) {
  std::vector<Eigen::MatrixXd> ew(G.dim());
  for (int a = 0; a < G.dim(); ++a) ew[a] = scaled(G, w.c, a);
  return ew;
}

}  // namespace

SymTensor2Field divergence_adjoint(const CCMetric& g, const OneFormField& w) {
  const Grid& G = *g.grid();
  const int d = G.dim();
  const auto ew = frame_gradient(G, w);
  SymTensor2Field out(g.grid());
  parallel_for(G.size(), [&](long b, long e) {
    for (long node = b; node < e; ++node) {
      const FrameGeometry f = frame_geometry(G.x(node), g.jets.at(node));
      SmallMat E(d, d);
      for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) E(a, c) = ew[a](node, c);
      store(out.c, node, sym_nabla(f.omega, w.c.row(node).transpose(), E));
    }
  });
  return out;
}

SymTensor2Field gauged_residual(const GaugeContext& ctx, const SymTensor2Field& k) {
  const Grid& G = *ctx.grid();
  const int d = G.dim();
  const CCMetric gk = add_perturbation(ctx.g, k);
  const OneFormField B = bianchi(ctx, k);
  const auto eB = frame_gradient(G, B);
  SymTensor2Field out(ctx.grid());
  parallel_for(G.size(), [&](long b, long e) {
    for (long node = b; node < e; ++node) {
      FrameGeometry f;
      try {
        f = frame_geometry(G.x(node), gk.jets.at(node));
      } catch (const std::domain_error&) {
        throw std::domain_error("g+k is not a metric at node " + std::to_string(node));
      }
      SmallMat E(d, d);
      for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) E(a, c) = eB[a](node, c);
      store(out.c, node, f.einstein + sym_nabla(f.omega, B.c.row(node).transpose(), E));
    }
  });
  return out;
}

SymTensor2Field linearized(const GaugeContext& ctx, const SymTensor2Field& kappa) {
  const Grid& G = *ctx.grid();
  const int d = G.dim();
  const auto nk = covariant_derivative(ctx, kappa);
  // e_d of each (nabla k)_c
  std::vector<std::vector<Eigen::MatrixXd>> enk(d, std::vector<Eigen::MatrixXd>(d));
  for (int dd = 0; dd < d; ++dd)
    for (int c = 0; c < d; ++c) enk[dd][c] = scaled(G, nk[c], dd);
  SymTensor2Field out(ctx.grid());
  parallel_for(G.size(), [&](long b, long e) {
    for (long node = b; node < e; ++node) {
      const NodeGeometry& ng = ctx.geo[node];
      const auto& om = ng.omega;
      std::array<SmallMat, kMaxDim> N;
      for (int c = 0; c < d; ++c) N[c] = node_tensor(nk[c], node, d);
      SmallMat rough = SmallMat::Zero(d, d);
      for (int dd = 0; dd < d; ++dd)
        for (int c = 0; c < d; ++c) {
          const double gdc = ng.ginv(dd, c);
          if (gdc == 0) continue;
          SmallMat h = node_tensor(enk[dd][c], node, d);
          for (int f = 0; f < d; ++f) {
            h -= om[f](dd, c) * N[f];
            for (int a = 0; a < d; ++a)
              for (int bb = 0; bb < d; ++bb) h(a, bb) -= om[f](dd, a) * N[c](f, bb) + om[f](dd, bb) * N[c](a, f);
          }
          rough -= gdc * h;
        }
      const SmallMat K = node_tensor(kappa.c, node, d);
      store(out.c, node, rough + curvature_terms(ng.ginv, ng.ricci, ng.riemann, ctx.n, K));
    }
  });
  return out;
}

SymTensor2Field quadratic_remainder(const GaugeContext& ctx, const SymTensor2Field& k) {
  const Grid& G = *ctx.grid();
  const int d = G.dim();
  const JetField kj = fd_jets(k);
  const MetricJet zero = MetricJet::zero(d);
  SymTensor2Field q(ctx.grid());
  parallel_for(G.size(), [&](long b, long e) {
    for (long node = b; node < e; ++node) {
      const MetricJet gj = ctx.g.jets.at(node);
      const FrameGeometry f = frame_geometry(G.x(node), gj, true, true);
      const MetricJet j = kj.at(node);
      SmallMat r;
      try {
        r = gauged_residual_at(f, gj, j);
      } catch (const std::domain_error&) {
        throw std::domain_error("g+k is not a metric at node " + std::to_string(node));
      }
      store(q.c, node, r - gauged_residual_at(f, gj, zero) - 0.5 * linearized_at(f, ctx.n, j));
    }
  });
  return q;
}

namespace {

// e_dd of (nabla k)_c by the product rule, from the 2-jet of k
SmallMat e_nabla(const FrameGeometry& f, const MetricJet& kj, int dd, int c) {
  const int d = f.d;
  const double x = f.x;
  const auto& om = f.omega;
  const SmallMat& K = kj.g;
  SmallMat h = x * x * kj.ddg[dd][c];
  if (dd == 0) h += x * kj.dg[c];
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int p = 0; p < d; ++p)
        h(a, b) -= f.e_omega[dd][p](c, a) * K(p, b) + om[p](c, a) * x * kj.dg[dd](p, b) +
                   f.e_omega[dd][p](c, b) * K(a, p) + om[p](c, b) * x * kj.dg[dd](a, p);
  return h;
}

double contract(const SmallMat& a, const SmallMat& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

SmallMat linearized_at(const FrameGeometry& f, int n, const MetricJet& kj) {
  const int d = f.d;
  const double x = f.x;
  const auto& om = f.omega;
  const SmallMat& K = kj.g;
  std::array<SmallMat, kMaxDim> N;  // (nabla k)_c
  for (int c = 0; c < d; ++c) N[c] = nabla_c(om, K, x * kj.dg[c], c);
  SmallMat rough = SmallMat::Zero(d, d);
  for (int dd = 0; dd < d; ++dd)
    for (int c = 0; c < d; ++c) {
      const double gdc = f.ginv(dd, c);
      if (gdc == 0) continue;
      SmallMat h = e_nabla(f, kj, dd, c);
      for (int ff = 0; ff < d; ++ff) {
        h -= om[ff](dd, c) * N[ff];
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) h(a, b) -= om[ff](dd, a) * N[c](ff, b) + om[ff](dd, b) * N[c](a, ff);
      }
      rough -= gdc * h;
    }
  return rough + curvature_terms(f.ginv, f.ricci, f.riemann, n, K);
}

BianchiJet bianchi_at(const FrameGeometry& f, const MetricJet& gj, const MetricJet& kj) {
  const int d = f.d;
  const double x = f.x;
  const SmallMat& G = f.ginv;
  std::array<SmallMat, kMaxDim> N, dG;
  for (int c = 0; c < d; ++c) {
    N[c] = nabla_c(f.omega, kj.g, x * kj.dg[c], c);
    dG[c] = -G * gj.dg[c] * G;
  }
  SmallVec dtr(d);
  for (int b = 0; b < d; ++b) dtr[b] = contract(dG[b], kj.g) + contract(G, kj.dg[b]);
  BianchiJet out;
  out.B = SmallVec::Zero(d);
  out.eB = SmallMat::Zero(d, d);
  for (int b = 0; b < d; ++b) {
    double s = 0.5 * x * dtr[b];
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) s -= G(a, c) * N[c](a, b);
    out.B[b] = s;
  }
  for (int dd = 0; dd < d; ++dd) {
    std::array<SmallMat, kMaxDim> H;
    for (int c = 0; c < d; ++c) H[c] = e_nabla(f, kj, dd, c);
    for (int b = 0; b < d; ++b) {
      const SmallMat ddG = G * (gj.dg[dd] * G * gj.dg[b] + gj.dg[b] * G * gj.dg[dd] - gj.ddg[dd][b]) * G;
      const double ddtr = contract(ddG, kj.g) + contract(dG[b], kj.dg[dd]) + contract(dG[dd], kj.dg[b]) +
                          contract(G, kj.ddg[dd][b]);
      double s = 0.5 * x * x * ddtr + (dd == 0 ? 0.5 * x * dtr[b] : 0.0);
      for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) s -= x * dG[dd](a, c) * N[c](a, b) + G(a, c) * H[c](a, b);
      out.eB(dd, b) = s;
    }
  }
  return out;
}

SmallMat gauged_residual_at(const FrameGeometry& f, const MetricJet& gj, const MetricJet& kj) {
  const BianchiJet bj = bianchi_at(f, gj, kj);
  const FrameGeometry fk = frame_geometry(f.x, gj + kj);
  return fk.einstein + sym_nabla(fk.omega, bj.B, bj.eB);
}

ScalarField pointwise_norm(const CCMetric& g, const SymTensor2Field& k) {
  const int d = g.dim();
  ScalarField out(g.grid());
  for (long node = 0; node < g.grid()->size(); ++node) {
    const SmallMat gi = node_tensor(g.gbar.c, node, d).inverse();
    out.v[node] = tensor_norm(node_tensor(k.c, node, d), gi);
  }
  return out;
}

ScalarField pointwise_norm(const CCMetric& g, const OneFormField& w) {
  const int d = g.dim();
  ScalarField out(g.grid());
  for (long node = 0; node < g.grid()->size(); ++node) {
    const SmallMat gi = node_tensor(g.gbar.c, node, d).inverse();
    out.v[node] = oneform_norm(w.c.row(node).transpose(), gi);
  }
  return out;
}

}  // namespace peglue
