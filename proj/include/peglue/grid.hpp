#pragma once

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <vector>

namespace peglue {

// Finite-difference weights on arbitrary nodes (Fornberg). Column m holds
// the weights of the m-th derivative at z.
Eigen::MatrixXd fornberg_weights(double z, const std::vector<double>& nodes, int max_order);

// Five-point stencil for one node along one axis.
struct Stencil {
  int start = 0;
  std::array<double, 5> d1{};
  std::array<double, 5> d2{};
};

// Tensor-product grid. Axis 0 is x (the boundary-defining direction) when
// has_x is set; otherwise every axis is tangential (boundary grids).
// Storage is row-major with axis 0 slowest.
class Grid {
 public:
  Grid(int n, bool has_x, std::vector<std::vector<double>> axes);

  int n() const { return n_; }
  bool has_x() const { return has_x_; }
  int dim() const { return static_cast<int>(axes_.size()); }
  long size() const { return size_; }
  int count(int axis) const { return static_cast<int>(axes_[axis].size()); }
  const std::vector<double>& axis(int a) const { return axes_[a]; }
  long stride(int a) const { return strides_[a]; }

  int index_along(long node, int a) const { return static_cast<int>((node / strides_[a]) % count(a)); }
  double coord(long node, int a) const { return axes_[a][index_along(node, a)]; }
  // Value of the defining function x at a node; 1 on boundary grids.
  double x(long node) const { return has_x_ ? coord(node, 0) : 1.0; }
  void coords(long node, double* w) const;
  long node(const std::vector<int>& idx) const;
  // True if the node lies within `layers` nodes of some face.
  bool near_face(long node, int layers) const;

  const Stencil& stencil(int a, int i) const { return stencils_[a][i]; }
  double min_spacing(int a) const;

 private:
  int n_;
  bool has_x_;
  std::vector<std::vector<double>> axes_;
  std::vector<long> strides_;
  long size_;
  std::vector<std::vector<Stencil>> stencils_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Half-space grid: x in [x_min, x_max] (geometric grading with ratio
// x_ratio > 1 refines toward x_min), y in [-Y, Y]^n.
GridPtr make_grid(int n, const std::vector<int>& counts, double x_min, double x_max, double y_extent,
                  double x_ratio = 1.0);
// Boundary grid on [-Y, Y]^n with no x axis.
GridPtr make_boundary_grid(int n, const std::vector<int>& counts, double y_extent);
GridPtr make_grid_from_axes(int n, bool has_x, std::vector<std::vector<double>> axes);

// Apply d/dw_axis (order 1 or 2) to each column of `values`.
Eigen::MatrixXd diff_columns(const Grid& g, const Eigen::MatrixXd& values, int axis, int order);

}  // namespace peglue
