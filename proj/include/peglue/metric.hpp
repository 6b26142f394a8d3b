#pragma once

#include "peglue/fields.hpp"
#include "peglue/geometry.hpp"
#include "peglue/models.hpp"

namespace peglue {

// Per-node jets of a sampled symmetric tensor: values, first and second
// coordinate derivatives (ddg packed over m <= l).
struct JetField {
  GridPtr grid;
  Eigen::MatrixXd g;
  std::vector<Eigen::MatrixXd> dg;
  std::vector<Eigen::MatrixXd> ddg;

  MetricJet at(long node) const;
};

// 4th-order finite-difference jets of a field.
JetField fd_jets(const SymTensor2Field& f);
JetField operator+(const JetField& a, const JetField& b);

// Conformally compact metric g = x^-2 gbar. gbar holds coordinate components
// of the compactified metric; jets are either exact (analytic model) or
// finite-difference.
struct CCMetric {
  SymTensor2Field gbar;
  JetField jets;
  bool einstein_expected = false;

  GridPtr grid() const { return gbar.grid; }
  int dim() const { return gbar.dim(); }
  int n() const { return gbar.grid->n(); }
};

// A metric on an n-dimensional boundary grid; same storage, x == 1.
using BoundaryMetric = CCMetric;

CCMetric sample_metric(const AnalyticMetric& model, GridPtr grid, bool einstein_expected = false);
CCMetric metric_from_field(SymTensor2Field gbar, bool einstein_expected = false);
// gbar + k; jets of k come from finite differences, jets of gbar are kept.
CCMetric add_perturbation(const CCMetric& g, const SymTensor2Field& k);

// Throws std::domain_error naming the first node where gbar is not positive definite.
void check_positive(const CCMetric& g);

}  // namespace peglue
