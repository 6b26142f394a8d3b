#pragma once

#include "peglue/grid.hpp"

#include <Eigen/Dense>

namespace peglue {

// Symmetric index pair (i <= j) <-> packed component number.
inline int sym_count(int d) { return d * (d + 1) / 2; }
inline int sym_index(int i, int j, int d) {
  if (i > j) std::swap(i, j);
  return i * d - i * (i - 1) / 2 + (j - i);
}

struct ScalarField {
  GridPtr grid;
  Eigen::VectorXd v;

  ScalarField() = default;
  explicit ScalarField(GridPtr g) : grid(std::move(g)), v(Eigen::VectorXd::Zero(grid->size())) {}
  ScalarField(GridPtr g, Eigen::VectorXd values);
};

// Components against the singular coframe dw_i/x (x = 1 on boundary grids,
// where these are plain coordinate components). Only i <= j is stored.
struct SymTensor2Field {
  GridPtr grid;
  Eigen::MatrixXd c;  // nodes x sym_count(dim)

  SymTensor2Field() = default;
  explicit SymTensor2Field(GridPtr g);
  SymTensor2Field(GridPtr g, Eigen::MatrixXd comps);

  int dim() const { return grid->dim(); }
  double operator()(long node, int i, int j) const { return c(node, sym_index(i, j, dim())); }
  double& at(long node, int i, int j) { return c(node, sym_index(i, j, dim())); }
  Eigen::MatrixXd at_node(long node) const;
  void set_node(long node, const Eigen::MatrixXd& m);
};

struct OneFormField {
  GridPtr grid;
  Eigen::MatrixXd c;  // nodes x dim

  OneFormField() = default;
  explicit OneFormField(GridPtr g) : grid(std::move(g)), c(Eigen::MatrixXd::Zero(grid->size(), grid->dim())) {}
};

ScalarField diff(const ScalarField& f, int axis, int order);
// x * d/dw_axis: the uniformly degenerate derivatives.
ScalarField scaled_diff(const ScalarField& f, int axis);
SymTensor2Field operator+(const SymTensor2Field& a, const SymTensor2Field& b);
SymTensor2Field operator-(const SymTensor2Field& a, const SymTensor2Field& b);
SymTensor2Field operator*(double s, const SymTensor2Field& a);

}  // namespace peglue
