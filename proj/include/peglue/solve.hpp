#pragma once

#include "peglue/gauge.hpp"
#include "peglue/weights.hpp"

#include <Eigen/Sparse>

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace peglue {

// Raised when an iterative method stagnates or a contraction fails.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class ScalarPreconditioner;

// Three-point Fornberg weights per axis and node index (zero on the faces).
struct ThreePoint {
  ThreePoint() = default;
  explicit ThreePoint(const Grid& g);
  std::vector<std::vector<std::array<double, 3>>> d1, d2;
};

// Second-order stencil of W^-1 L_g (W .) on interior nodes, W = rho^mu w^nu;
// unknowns are the weighted components kappa~ = k / W, zero on all faces.
struct LinearSystem {
  GridPtr grid;
  int n = 0;
  int comps = 0;
  WeightSpec spec;
  bool single_chart = false;
  ScalarField weight;
  std::vector<long> unknown_nodes;   // interior nodes in grid order
  std::vector<long> node_to_unknown; // -1 on faces
  ThreePoint stencils;
  SpMat matrix;
  Eigen::VectorXd rhs;
  std::shared_ptr<const ScalarPreconditioner> precond;

  long unknowns() const { return static_cast<long>(matrix.rows()); }
};

// Glued case: mu = nu in (0, n/2), weight (rho w_eps)^mu. The single-chart
// form (a summand on its own half-space chart) uses W = x^mu, mu in (0, n).
LinearSystem assemble(const GaugeContext& ctx, const WeightSpec& spec);
LinearSystem assemble_single_chart(const GaugeContext& ctx, double mu);

// k / W at the unknowns, and the inverse map (zero on faces).
Eigen::VectorXd pack(const LinearSystem& sys, const SymTensor2Field& k);
SymTensor2Field unpack(const LinearSystem& sys, const Eigen::VectorXd& kt);
// Apply the assembled operator to an unweighted field: returns L k on interior nodes.
SymTensor2Field apply(const LinearSystem& sys, const SymTensor2Field& k);

// 2-jet of k at an interior node from the same stencils as the matrix.
MetricJet discrete_jet(const LinearSystem& sys, const SymTensor2Field& k, long node);
// N_g(k) and B^g(k) on the unknown nodes, discretized consistently with
// the matrix: the Jacobian of discrete_residual at 0 is matrix / 2 (up to W).
SymTensor2Field discrete_residual(const GaugeContext& ctx, const LinearSystem& sys, const SymTensor2Field& k);
OneFormField discrete_bianchi(const GaugeContext& ctx, const LinearSystem& sys, const SymTensor2Field& k);

struct LinearSolveResult {
  SymTensor2Field k;
  double g_norm = 0;          // |k|_{2,mu,mu} / |rhs|_{0,mu,mu}
  int iterations = 0;
  double relative_residual = 0;
};

// Solves L k = rhs with BiCGSTAB, blockwise scalar preconditioner.
LinearSolveResult linear_solve(const LinearSystem& sys, const SymTensor2Field& rhs, double tol = 1e-9,
                               int max_iter = 3000);

struct SolveReport {
  std::vector<double> residuals;     // weighted |N(k_i)|, i = 0, 1, ...
  std::vector<double> contraction;   // residuals[i+1] / residuals[i]
  std::vector<int> linear_iterations;
  std::vector<double> iterate_norms; // |k_i|_{2,mu,mu}
  double bianchi_norm = 0;           // weighted |B^g(k)| at the last iterate
  double initial_residual = 0;
  double g_norm = 0;                 // from the first linear solve
  bool converged = false;
  bool stayed_in_unit_ball = true;
  std::string failure;
};

struct FixedPointResult {
  SymTensor2Field k;
  SolveReport report;
};

// Picard map k <- k - G N(k), G the inverse of the assembled L/2. Never
// throws for numerical reasons: failures end the loop and are reported.
FixedPointResult fixed_point(const GaugeContext& ctx, const WeightSpec& spec, double tol, int max_iter);

// Weighted sup of a field restricted to the unknown nodes.
double interior_norm(const LinearSystem& sys, const SymTensor2Field& f, int order);

struct KernelProbe {
  double sigma_min = 0;
  int iterations = 0;
  bool degenerate = false;
};

// Inverse Lanczos on A^T A for the smallest singular value of the
// weighted matrix; flags sigma_min < threshold.
KernelProbe kernel_probe(const SpMat& matrix, double threshold, int max_iter = 60, double rtol = 1e-6);
KernelProbe kernel_probe(const LinearSystem& sys, double threshold);

// A (I - v v^T) with v the normalized constant vector.
SpMat project_out_constant(const SpMat& a);

}  // namespace peglue
