#pragma once

#include "peglue/metric.hpp"

#include <functional>

namespace peglue {

struct ChristoffelField {
  GridPtr grid;
  std::vector<Eigen::MatrixXd> gamma;  // gamma[k]: nodes x sym_count, entry (i<=j) is Gamma^k_ij
  double operator()(long node, int k, int i, int j) const {
    return gamma[k](node, sym_index(i, j, grid->dim()));
  }
};

ChristoffelField christoffel(const CCMetric& gbar);
// Coordinate Ricci of the compactified metric gbar.
SymTensor2Field ricci_compactified(const CCMetric& gbar);
// Frame components of Ric^g, g = x^-2 gbar.
SymTensor2Field ricci_cc(const CCMetric& g);
// Ric^g + n g, frame components.
SymTensor2Field einstein_deviation(const CCMetric& g);
// Coordinate Ricci of e^{2f} gbar through the conformal identity with
// finite-difference df and Hess f of a sampled f.
SymTensor2Field conformal_ricci(const CCMetric& gbar, const ScalarField& f);

// Values at x = 0 from the first five x-layers (4th-order extrapolation),
// returned on the boundary grid.
Eigen::MatrixXd extrapolate_to_boundary(const Grid& g, const Eigen::MatrixXd& values, GridPtr& boundary);
GridPtr boundary_grid_of(const Grid& g);

struct NormalFormResult {
  ScalarField u;
  ScalarField xhat;
  CCMetric gbar_hat;       // (xhat/x)^2 gbar in the original coordinates
  ScalarField defect;      // |d xhat|^2_{xhat^2 g} - 1
};

// Special defining function: solves 2<drho,du> + rho|du|^2 = (1 - |drho|^2)/rho
// (norms in rho^2 g) by RK4 marching in x from x = 0, with tangential
// derivatives of u lagged one step. u0 is sampled on the tangential nodes.
NormalFormResult normal_form(const AnalyticMetric& gbar, const AnalyticScalar& rho, GridPtr grid,
                             const std::function<double(const double* y)>& u0);

struct BoundaryExpansion {
  SymTensor2Field h0, h1, h2;  // tangential blocks on the boundary grid
  double fit_residual = 0;     // max least-squares residual over y-nodes
};

// Degree-3 least-squares fit in x of the tangential block over the first
// eight x-layers at every y-node.
BoundaryExpansion boundary_expansion(const CCMetric& g);

ScalarField scalar_curvature(const BoundaryMetric& h);

}  // namespace peglue
