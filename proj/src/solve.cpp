#include "peglue/solve.hpp"
#include "peglue/grid.hpp"
#include "peglue/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <cmath>
#include <algorithm>
#include <limits>
#include <vector>

namespace peglue {

// Sparse LU of the weighted scalar operator
// W^-1 (-x^2 gbar^{dc} d_d d_c + (n-1) x d_x + 2n) W, applied to each component.
class ScalarPreconditioner {
 public:
  ScalarPreconditioner(const SpMat& p, int comps) : comps_(comps) {
    Eigen::SparseMatrix<double> colmajor = p;
    lu_.analyzePattern(colmajor);
    lu_.factorize(colmajor);
    if (lu_.info() != Eigen::Success) throw NumericalFailure("preconditioner factorization failed");
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    const long m = b.size() / comps_;
    Eigen::Map<const Eigen::MatrixXd> B(b.data(), comps_, m);
    Eigen::MatrixXd rhs = B.transpose();
    Eigen::MatrixXd x = lu_.solve(rhs);
    Eigen::VectorXd out(b.size());
    Eigen::Map<Eigen::MatrixXd>(out.data(), comps_, m) = x.transpose();
    return out;
  }

 private:
  int comps_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

namespace {

// Adapter with the interface Eigen's iterative solvers expect.
class BlockPrecond {
 public:
  BlockPrecond() = default;
  template <class M>
  explicit BlockPrecond(const M&) {}
  void set(std::shared_ptr<const ScalarPreconditioner> p) { p_ = std::move(p); }
  template <class M>
  BlockPrecond& analyzePattern(const M&) { return *this; }
  template <class M>
  BlockPrecond& factorize(const M&) { return *this; }
  template <class M>
  BlockPrecond& compute(const M&) { return *this; }
  template <class V>
  Eigen::VectorXd solve(const V& b) const {
    if (!p_) return b;
    return p_->solve(b);
  }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  std::shared_ptr<const ScalarPreconditioner> p_;
};

using Coefs = std::vector<Eigen::MatrixXd>;  // [0] value, [1..D] first, then packed second m <= l

int pair_slot(int m, int l, int d) {
  if (m > l) std::swap(m, l);
  return 1 + d + m * d - m * (m - 1) / 2 + (l - m);
}

int cube_size(int d) {
  int c = 1;
  for (int a = 0; a < d; ++a) c *= 3;
  return c;
}

// Position of a neighbour in the 3^d cube; axis a moved by qa - 1, axis b by qb - 1.
int cube_code(int d, int a, int qa, int b, int qb) {
  int c = 0, mul = 1;
  for (int e = 0; e < d; ++e) {
    int q = 1;
    if (e == a) q = qa;
    if (e == b) q = qb;
    c += q * mul;
    mul *= 3;
  }
  return c;
}

long cube_node(const Grid& G, long node, int code) {
  for (int a = 0; a < G.dim(); ++a) {
    node += (code % 3 - 1) * G.stride(a);
    code /= 3;
  }
  return node;
}

// Rows of one interior node of the unweighted operator, then conjugated by W.
void node_rows(const Grid& G, const ThreePoint& tp, int S, const Coefs& C, const ScalarField& W,
               const std::vector<long>& to_unknown, long node, std::vector<Eigen::Triplet<double>>& out) {
  const int d = G.dim();
  const int cube = cube_size(d);
  std::vector<Eigen::MatrixXd> blocks(cube, Eigen::MatrixXd::Zero(S, S));
  std::vector<int> idx(d);
  for (int a = 0; a < d; ++a) idx[a] = G.index_along(node, a);
  blocks[cube_code(d, -1, 1, -1, 1)] += C[0];
  for (int a = 0; a < d; ++a) {
    const auto& a1 = tp.d1[a][idx[a]];
    const auto& a2 = tp.d2[a][idx[a]];
    for (int q = 0; q < 3; ++q) blocks[cube_code(d, a, q, -1, 1)] += a1[q] * C[1 + a] + a2[q] * C[pair_slot(a, a, d)];
    for (int b = a + 1; b < d; ++b) {
      const Eigen::MatrixXd& cab = C[pair_slot(a, b, d)];
      if (cab.isZero(0)) continue;
      const auto& b1 = tp.d1[b][idx[b]];
      for (int qa = 0; qa < 3; ++qa)
        for (int qb = 0; qb < 3; ++qb) blocks[cube_code(d, a, qa, b, qb)] += a1[qa] * b1[qb] * cab;
    }
  }
  const long row0 = to_unknown[node] * S;
  const double wr = W.v[node];
  for (int c = 0; c < cube; ++c) {
    if (blocks[c].isZero(0)) continue;
    const long nb = cube_node(G, node, c);
    const long u = to_unknown[nb];
    if (u < 0) continue;
    const double scale = W.v[nb] / wr;
    for (int r = 0; r < S; ++r)
      for (int s = 0; s < S; ++s)
        if (blocks[c](r, s) != 0) out.emplace_back(row0 + r, u * S + s, scale * blocks[c](r, s));
  }
}

SpMat build(int S, long unknowns, const std::vector<long>& nodes,
            const std::function<void(long, std::vector<Eigen::Triplet<double>>&)>& node_rows) {
  std::vector<std::vector<Eigen::Triplet<double>>> per(nodes.size());
  parallel_for(static_cast<long>(nodes.size()), [&](long b, long e) {
    for (long i = b; i < e; ++i) node_rows(nodes[i], per[i]);
  });
  size_t total = 0;
  for (const auto& v : per) total += v.size();
  std::vector<Eigen::Triplet<double>> all;
  all.reserve(total);
  for (auto& v : per) {
    all.insert(all.end(), v.begin(), v.end());
    std::vector<Eigen::Triplet<double>>().swap(v);
  }
  SpMat m(unknowns * S, unknowns * S);
  m.setFromTriplets(all.begin(), all.end());
  return m;
}

// Coefficients of L_g at one node from unit jets of the components.
Coefs operator_coefs(const GaugeContext& ctx, long node) {
  const Grid& G = *ctx.grid();
  const int d = G.dim();
  const int S = sym_count(d);
  const int npair = d * (d + 1) / 2;
  const FrameGeometry f = frame_geometry(G.x(node), ctx.g.jets.at(node), true, true);
  Coefs C(1 + d + npair, Eigen::MatrixXd::Zero(S, S));
  auto put = [&](int slot, int s, const SmallMat& out) {
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) C[slot](sym_index(i, j, d), s) = out(i, j);
  };
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const int s = sym_index(i, j, d);
      SmallMat unit = SmallMat::Zero(d, d);
      unit(i, j) = unit(j, i) = 1;
      MetricJet kj = MetricJet::zero(d);
      kj.g = unit;
      put(0, s, linearized_at(f, ctx.n, kj));
      for (int m = 0; m < d; ++m) {
        MetricJet k1 = MetricJet::zero(d);
        k1.dg[m] = unit;
        put(1 + m, s, linearized_at(f, ctx.n, k1));
        for (int l = m; l < d; ++l) {
          MetricJet k2 = MetricJet::zero(d);
          k2.ddg[m][l] = unit;
          k2.ddg[l][m] = unit;
          put(pair_slot(m, l, d), s, linearized_at(f, ctx.n, k2));
        }
      }
    }
  return C;
}

Coefs scalar_coefs(const GaugeContext& ctx, long node) {
  const Grid& G = *ctx.grid();
  const int d = G.dim();
  const double x = G.x(node);
  const SmallMat ginv = ctx.geo[node].ginv;
  Coefs C(1 + d + d * (d + 1) / 2, Eigen::MatrixXd::Zero(1, 1));
  C[0](0, 0) = 2.0 * ctx.n;
  C[1](0, 0) = (ctx.n - 1) * x;
  for (int m = 0; m < d; ++m)
    for (int l = m; l < d; ++l) C[pair_slot(m, l, d)](0, 0) = -x * x * ginv(m, l) * (m == l ? 1 : 2);
  return C;
}

LinearSystem assemble_with(const GaugeContext& ctx, ScalarField weight) {
  const Grid& G = *ctx.grid();
  if (!G.has_x()) throw std::invalid_argument("assembly needs a half-space grid");
  const int d = G.dim();
  LinearSystem sys;
  sys.grid = ctx.grid();
  sys.n = ctx.n;
  sys.comps = sym_count(d);
  sys.weight = std::move(weight);
  sys.node_to_unknown.assign(G.size(), -1);
  for (long k = 0; k < G.size(); ++k)
    if (!G.near_face(k, 1)) {
      sys.node_to_unknown[k] = static_cast<long>(sys.unknown_nodes.size());
      sys.unknown_nodes.push_back(k);
    }
  const long m = static_cast<long>(sys.unknown_nodes.size());
  if (m == 0) throw std::invalid_argument("grid has no interior nodes");

  sys.stencils = ThreePoint(G);
  sys.matrix = build(sys.comps, m, sys.unknown_nodes, [&](long node, auto& out) {
    node_rows(G, sys.stencils, sys.comps, operator_coefs(ctx, node), sys.weight, sys.node_to_unknown, node, out);
  });
  const SpMat p = build(1, m, sys.unknown_nodes, [&](long node, auto& out) {
    node_rows(G, sys.stencils, 1, scalar_coefs(ctx, node), sys.weight, sys.node_to_unknown, node, out);
  });
  sys.precond = std::make_shared<const ScalarPreconditioner>(p, sys.comps);
  sys.rhs = Eigen::VectorXd::Zero(m * sys.comps);
  return sys;
}

}  // namespace

ThreePoint::ThreePoint(const Grid& G) {
  const int d = G.dim();
  d1.resize(d);
  d2.resize(d);
  for (int a = 0; a < d; ++a) {
    const auto& ax = G.axis(a);
    d1[a].assign(ax.size(), {0, 0, 0});
    d2[a].assign(ax.size(), {0, 0, 0});
    for (size_t i = 1; i + 1 < ax.size(); ++i) {
      const Eigen::MatrixXd f = fornberg_weights(ax[i], {ax[i - 1], ax[i], ax[i + 1]}, 2);
      for (int q = 0; q < 3; ++q) {
        d1[a][i][q] = f(q, 1);
        d2[a][i][q] = f(q, 2);
      }
    }
  }
}

MetricJet discrete_jet(const LinearSystem& sys, const SymTensor2Field& k, long node) {
  const Grid& G = *sys.grid;
  const int d = G.dim();
  const ThreePoint& tp = sys.stencils;
  auto at = [&](long nb) {
    SmallMat m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) m(i, j) = m(j, i) = k.c(nb, sym_index(i, j, d));
    return m;
  };
  MetricJet j = MetricJet::zero(d);
  j.g = at(node);
  for (int a = 0; a < d; ++a) {
    const int i = G.index_along(node, a);
    for (int q = 0; q < 3; ++q) {
      const SmallMat v = at(cube_node(G, node, cube_code(d, a, q, -1, 1)));
      j.dg[a] += tp.d1[a][i][q] * v;
      j.ddg[a][a] += tp.d2[a][i][q] * v;
    }
    for (int b = a + 1; b < d; ++b) {
      const int ib = G.index_along(node, b);
      for (int qa = 0; qa < 3; ++qa)
        for (int qb = 0; qb < 3; ++qb)
          j.ddg[a][b] += tp.d1[a][i][qa] * tp.d1[b][ib][qb] * at(cube_node(G, node, cube_code(d, a, qa, b, qb)));
      j.ddg[b][a] = j.ddg[a][b];
    }
  }
  return j;
}

SymTensor2Field discrete_residual(const GaugeContext& ctx, const LinearSystem& sys, const SymTensor2Field& k) {
  const Grid& G = *sys.grid;
  SymTensor2Field out(sys.grid);
  const long m = static_cast<long>(sys.unknown_nodes.size());
  parallel_for(m, [&](long b, long e) {
    for (long u = b; u < e; ++u) {
      const long node = sys.unknown_nodes[u];
      const MetricJet gj = ctx.g.jets.at(node);
      const FrameGeometry f = frame_geometry(G.x(node), gj, false, true);
      SmallMat r;
      try {
        r = gauged_residual_at(f, gj, discrete_jet(sys, k, node));
      } catch (const std::domain_error&) {
        throw std::domain_error("g+k is not a metric at node " + std::to_string(node));
      }
      for (int i = 0; i < G.dim(); ++i)
        for (int j = i; j < G.dim(); ++j) out.at(node, i, j) = r(i, j);
    }
  });
  return out;
}

OneFormField discrete_bianchi(const GaugeContext& ctx, const LinearSystem& sys, const SymTensor2Field& k) {
  const Grid& G = *sys.grid;
  OneFormField out(sys.grid);
  for (long node : sys.unknown_nodes) {
    const MetricJet gj = ctx.g.jets.at(node);
    const FrameGeometry f = frame_geometry(G.x(node), gj, false, true);
    out.c.row(node) = bianchi_at(f, gj, discrete_jet(sys, k, node)).B.transpose();
  }
  return out;
}

LinearSystem assemble(const GaugeContext& ctx, const WeightSpec& spec) {
  const int n = ctx.n;
  validate(spec, n);
  if (spec.mu != spec.nu) throw std::invalid_argument("solver weights need mu = nu");
  if (!(spec.mu < 0.5 * n && spec.mu <= 2.0)) throw std::invalid_argument("mu outside (0, min(2, n/2))");
  LinearSystem sys = assemble_with(ctx, weight_field(ctx.grid(), spec));
  sys.spec = spec;
  return sys;
}

LinearSystem assemble_single_chart(const GaugeContext& ctx, double mu) {
  if (!(mu > 0 && mu < ctx.n)) throw std::invalid_argument("mu outside (0, n)");
  const Grid& G = *ctx.grid();
  ScalarField w(ctx.grid());
  for (long k = 0; k < G.size(); ++k) w.v[k] = std::pow(G.x(k), mu);
  LinearSystem sys = assemble_with(ctx, std::move(w));
  sys.spec.mu = sys.spec.nu = mu;
  sys.single_chart = true;
  return sys;
}

Eigen::VectorXd pack(const LinearSystem& sys, const SymTensor2Field& k) {
  Eigen::VectorXd v(sys.unknowns());
  for (size_t u = 0; u < sys.unknown_nodes.size(); ++u) {
    const long node = sys.unknown_nodes[u];
    for (int s = 0; s < sys.comps; ++s) v[u * sys.comps + s] = k.c(node, s) / sys.weight.v[node];
  }
  return v;
}

SymTensor2Field unpack(const LinearSystem& sys, const Eigen::VectorXd& kt) {
  SymTensor2Field k(sys.grid);
  for (size_t u = 0; u < sys.unknown_nodes.size(); ++u) {
    const long node = sys.unknown_nodes[u];
    for (int s = 0; s < sys.comps; ++s) k.c(node, s) = kt[u * sys.comps + s] * sys.weight.v[node];
  }
  return k;
}

SymTensor2Field apply(const LinearSystem& sys, const SymTensor2Field& k) {
  const Eigen::VectorXd y = sys.matrix * pack(sys, k);
  return unpack(sys, y);
}

double interior_norm(const LinearSystem& sys, const SymTensor2Field& f, int order) {
  SymTensor2Field g(sys.grid);
  for (long node : sys.unknown_nodes) g.c.row(node) = f.c.row(node);
  return weighted_norm(g, sys.weight, order);
}

LinearSolveResult linear_solve(const LinearSystem& sys, const SymTensor2Field& rhs, double tol, int max_iter) {
  LinearSolveResult res;
  const Eigen::VectorXd b = pack(sys, rhs);
  if (!b.allFinite()) throw std::invalid_argument("right-hand side is not finite");
  if (b.norm() == 0) {
    res.k = SymTensor2Field(sys.grid);
    return res;
  }
  Eigen::BiCGSTAB<SpMat, BlockPrecond> solver;
  solver.preconditioner().set(sys.precond);
  solver.setTolerance(tol);
  solver.setMaxIterations(max_iter);
  solver.compute(sys.matrix);
  const Eigen::VectorXd x = solver.solve(b);
  res.iterations = static_cast<int>(solver.iterations());
  res.relative_residual = (sys.matrix * x - b).norm() / b.norm();
  if (!x.allFinite() || res.relative_residual > 10 * tol)
    throw NumericalFailure("linear solver stagnated after " + std::to_string(res.iterations) +
                           " iterations, relative residual " + std::to_string(res.relative_residual));
  res.k = unpack(sys, x);
  res.g_norm = weighted_norm(res.k, sys.weight, 2) / interior_norm(sys, rhs, 0);
  return res;
}

FixedPointResult fixed_point(const GaugeContext& ctx, const WeightSpec& spec, double tol, int max_iter) {
  FixedPointResult out;
  SolveReport& rep = out.report;
  const LinearSystem sys = assemble(ctx, spec);
  out.k = SymTensor2Field(ctx.grid());
  for (int it = 0;; ++it) {
    SymTensor2Field N;
    try {
      N = discrete_residual(ctx, sys, out.k);
    } catch (const std::domain_error& e) {
      rep.failure = std::string("positivity loss: ") + e.what();
      break;
    }
    const double r = interior_norm(sys, N, 0);
    if (!std::isfinite(r)) {
      rep.failure = "non-finite residual";
      break;
    }
    rep.residuals.push_back(r);
    rep.iterate_norms.push_back(weighted_norm(out.k, sys.weight, 2));
    if (rep.iterate_norms.back() > 1) rep.stayed_in_unit_ball = false;
    if (it == 0) rep.initial_residual = r;
    if (it > 0) {
      const double f = r / rep.residuals[it - 1];
      rep.contraction.push_back(f);
      if (f >= 1 && r > tol) {
        rep.failure = "contraction failure at iteration " + std::to_string(it);
        break;
      }
    }
    if (r <= tol) {
      rep.converged = true;
      break;
    }
    if (it >= max_iter) {
      rep.failure = "iteration limit reached";
      break;
    }
    try {
      // DN = L/2, so the correction solves (L/2) dk = N
      const LinearSolveResult ls = linear_solve(sys, 2.0 * N);
      rep.linear_iterations.push_back(ls.iterations);
      if (it == 0) rep.g_norm = ls.g_norm;
      out.k.c -= ls.k.c;
    } catch (const NumericalFailure& e) {
      rep.failure = e.what();
      break;
    }
  }
  const OneFormField B = discrete_bianchi(ctx, sys, out.k);
  double bn = 0;
  for (long node : sys.unknown_nodes) bn = std::max(bn, B.c.row(node).norm() / sys.weight.v[node]);
  rep.bianchi_norm = bn;
  return out;
}

namespace {

// Lanczos on the symmetric operator (A^T A)^-1, applied as two solves. Its
// top Ritz value is 1/sigma_min^2; full reorthogonalization keeps the basis
// honest when the small singular values cluster.
template <class Solve, class SolveT>
KernelProbe inverse_lanczos(long size, double threshold, int max_iter, double rtol, Solve solve, SolveT solve_t) {
  KernelProbe kp;
  // deterministic start vector
  Eigen::VectorXd v(size);
  for (long i = 0; i < size; ++i) v[i] = 1.0 + 0.5 * std::sin(0.37 * static_cast<double>(i));
  v.normalize();
  const int steps = static_cast<int>(std::min<long>(max_iter, size));
  Eigen::MatrixXd basis(size, steps);
  std::vector<double> alpha, beta;
  double lambda = 0;
  for (int it = 0; it < steps; ++it) {
    basis.col(it) = v;
    Eigen::VectorXd z = solve_t(solve(v));
    kp.iterations = it + 1;
    if (!z.allFinite()) {
      kp.sigma_min = 0;
      kp.degenerate = threshold > 0;
      return kp;
    }
    alpha.push_back(v.dot(z));
    for (int pass = 0; pass < 2; ++pass) z -= basis.leftCols(it + 1) * (basis.leftCols(it + 1).transpose() * z);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(it + 1, it + 1);
    for (int i = 0; i <= it; ++i) {
      t(i, i) = alpha[i];
      if (i < it) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    const double next = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    const double b = z.norm();
    // converged, or the Krylov space is invariant
    const bool done = (it > 0 && std::abs(next - lambda) <= rtol * next) || b <= 1e-14 * next;
    lambda = next;
    if (done) break;
    if (it + 1 == steps) {
      if (steps == size) break;
      throw NumericalFailure("inverse iteration did not converge");
    }
    beta.push_back(b);
    v = z / b;
  }
  kp.sigma_min = lambda > 0 ? 1.0 / std::sqrt(lambda) : std::numeric_limits<double>::infinity();
  kp.degenerate = kp.sigma_min < threshold;
  return kp;
}

}  // namespace

KernelProbe kernel_probe(const SpMat& matrix, double threshold, int max_iter, double rtol) {
  Eigen::SparseMatrix<double> a = matrix;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    KernelProbe kp;
    kp.degenerate = threshold > 0;
    return kp;
  }
  Eigen::SparseMatrix<double> at = a.transpose();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lut;
  lut.compute(at);
  if (lut.info() != Eigen::Success) {
    KernelProbe kp;
    kp.degenerate = threshold > 0;
    return kp;
  }
  return inverse_lanczos(
      matrix.rows(), threshold, max_iter, rtol, [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return lu.solve(v); },
      [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return lut.solve(v); });
}

KernelProbe kernel_probe(const LinearSystem& sys, double threshold) {
  const SpMat at = sys.matrix.transpose();
  auto krylov = [&](const SpMat& m) {
    return [&m, &sys](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      Eigen::BiCGSTAB<SpMat, BlockPrecond> s;
      s.preconditioner().set(sys.precond);
      s.setTolerance(1e-10);
      s.setMaxIterations(5000);
      s.compute(m);
      Eigen::VectorXd x = s.solve(v);
      if ((m * x - v).norm() > 1e-6 * v.norm()) throw NumericalFailure("inner solve did not converge");
      return x;
    };
  };
  return inverse_lanczos(sys.unknowns(), threshold, 60, 1e-6, krylov(sys.matrix), krylov(at));
}

SpMat project_out_constant(const SpMat& a) {
  const long m = a.cols();
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)));
  const Eigen::VectorXd av = a * v;
  Eigen::MatrixXd dense = Eigen::MatrixXd(a);
  dense -= av * v.transpose();
  return dense.sparseView();
}

}  // namespace peglue
