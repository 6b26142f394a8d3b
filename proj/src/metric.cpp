#include "peglue/metric.hpp"
#include "peglue/parallel.hpp"

#include <stdexcept>
#include <string>

namespace peglue {

MetricJet JetField::at(long node) const {
  const int d = grid->dim();
  MetricJet j = MetricJet::zero(d);
  auto fill = [&](const Eigen::MatrixXd& src, SmallMat& m) {
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) m(a, b) = m(b, a) = src(node, sym_index(a, b, d));
  };
  fill(g, j.g);
  for (int m = 0; m < d; ++m) fill(dg[m], j.dg[m]);
  for (int m = 0; m < d; ++m)
    for (int l = m; l < d; ++l) {
      fill(ddg[sym_index(m, l, d)], j.ddg[m][l]);
      j.ddg[l][m] = j.ddg[m][l];
    }
  return j;
}

JetField fd_jets(const SymTensor2Field& f) {
  const Grid& G = *f.grid;
  const int d = G.dim();
  JetField j;
  j.grid = f.grid;
  j.g = f.c;
  j.dg.resize(d);
  j.ddg.resize(sym_count(d));
  for (int m = 0; m < d; ++m) j.dg[m] = diff_columns(G, f.c, m, 1);
  for (int m = 0; m < d; ++m)
    for (int l = m; l < d; ++l)
      j.ddg[sym_index(m, l, d)] = m == l ? diff_columns(G, f.c, m, 2) : diff_columns(G, j.dg[m], l, 1);
  return j;
}

JetField operator+(const JetField& a, const JetField& b) {
  JetField r = a;
  r.g += b.g;
  for (size_t m = 0; m < r.dg.size(); ++m) r.dg[m] += b.dg[m];
  for (size_t m = 0; m < r.ddg.size(); ++m) r.ddg[m] += b.ddg[m];
  return r;
}

CCMetric sample_metric(const AnalyticMetric& model, GridPtr grid, bool einstein_expected) {
  const int d = grid->dim();
  if (model.dim() != d) throw std::invalid_argument("model dimension does not match grid");
  const int S = sym_count(d);
  CCMetric g;
  g.einstein_expected = einstein_expected;
  g.jets.grid = grid;
  g.jets.g.resize(grid->size(), S);
  g.jets.dg.assign(d, Eigen::MatrixXd(grid->size(), S));
  g.jets.ddg.assign(S, Eigen::MatrixXd(grid->size(), S));
  parallel_for(grid->size(), [&](long b, long e) {
    double w[kMaxDim];
    for (long k = b; k < e; ++k) {
      grid->coords(k, w);
      const MetricJet j = model.jet(w);
      for (int p = 0; p < d; ++p)
        for (int q = p; q < d; ++q) {
          const int c = sym_index(p, q, d);
          g.jets.g(k, c) = j.g(p, q);
          for (int m = 0; m < d; ++m) g.jets.dg[m](k, c) = j.dg[m](p, q);
          for (int m = 0; m < d; ++m)
            for (int l = m; l < d; ++l) g.jets.ddg[sym_index(m, l, d)](k, c) = j.ddg[m][l](p, q);
        }
    }
  });
  g.gbar = SymTensor2Field(grid, g.jets.g);
  return g;
}

CCMetric metric_from_field(SymTensor2Field gbar, bool einstein_expected) {
  CCMetric g;
  g.jets = fd_jets(gbar);
  g.gbar = std::move(gbar);
  g.einstein_expected = einstein_expected;
  return g;
}

CCMetric add_perturbation(const CCMetric& g, const SymTensor2Field& k) {
  CCMetric r;
  r.gbar = g.gbar + k;
  r.jets = g.jets + fd_jets(k);
  r.einstein_expected = false;
  return r;
}

void check_positive(const CCMetric& g) {
  for (long k = 0; k < g.grid()->size(); ++k) {
    Eigen::LLT<Eigen::MatrixXd> llt(g.gbar.at_node(k));
    if (llt.info() != Eigen::Success) throw std::domain_error("metric not positive definite at node " + std::to_string(k));
  }
}

}  // namespace peglue
