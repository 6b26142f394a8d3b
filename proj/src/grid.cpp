#include "peglue/grid.hpp"
#include "peglue/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace peglue {

Eigen::MatrixXd fornberg_weights(double z, const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, m + 1);
  double c1 = 1.0, c4 = x[0] - z;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c;
}

Grid::Grid(int n, bool has_x, std::vector<std::vector<double>> axes)
    : n_(n), has_x_(has_x), axes_(std::move(axes)) {
  const int d = dim();
  strides_.assign(d, 1);
  for (int a = d - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * count(a + 1);
  size_ = strides_[0] * count(0);
  stencils_.resize(d);
  for (int a = 0; a < d; ++a) {
    const auto& ax = axes_[a];
    const int N = static_cast<int>(ax.size());
    if (N < 5) throw std::invalid_argument("counts too small");
    for (int i = 1; i < N; ++i)
      if (!(ax[i] > ax[i - 1])) throw std::invalid_argument("axis nodes must be strictly increasing");
    stencils_[a].resize(N);
    for (int i = 0; i < N; ++i) {
      Stencil s;
      s.start = std::clamp(i - 2, 0, N - 5);
      std::vector<double> pts(ax.begin() + s.start, ax.begin() + s.start + 5);
      Eigen::MatrixXd w = fornberg_weights(ax[i], pts, 2);
      for (int k = 0; k < 5; ++k) {
        s.d1[k] = w(k, 1);
        s.d2[k] = w(k, 2);
      }
      stencils_[a][i] = s;
    }
  }
}

void Grid::coords(long node, double* w) const {
  for (int a = 0; a < dim(); ++a) w[a] = coord(node, a);
}

long Grid::node(const std::vector<int>& idx) const {
  long k = 0;
  for (int a = 0; a < dim(); ++a) k += idx[a] * strides_[a];
  return k;
}

bool Grid::near_face(long node, int layers) const {
  for (int a = 0; a < dim(); ++a) {
    const int i = index_along(node, a);
    if (i < layers || i >= count(a) - layers) return true;
  }
  return false;
}

double Grid::min_spacing(int a) const {
  double h = axes_[a][1] - axes_[a][0];
  for (size_t i = 2; i < axes_[a].size(); ++i) h = std::min(h, axes_[a][i] - axes_[a][i - 1]);
  return h;
}

static std::vector<double> uniform(int count, double lo, double hi) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * i / (count - 1);
  return v;
}

GridPtr make_grid(int n, const std::vector<int>& counts, double x_min, double x_max, double y_extent,
                  double x_ratio) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (static_cast<int>(counts.size()) != n + 1) throw std::invalid_argument("need one count per axis");
  if (!(x_min > 0)) throw std::invalid_argument("non-positive x_min");
  if (!(x_max > x_min)) throw std::invalid_argument("x_max must exceed x_min");
  if (!(y_extent > 0)) throw std::invalid_argument("non-positive y extent");
  if (!(x_ratio >= 1.0)) throw std::invalid_argument("grading ratio must be >= 1");
  for (int c : counts)
    if (c < 5) throw std::invalid_argument("counts too small");
  std::vector<std::vector<double>> axes;
  const int nx = counts[0];
  if (x_ratio == 1.0) {
    axes.push_back(uniform(nx, x_min, x_max));
  } else {
    // spacing h_i = h0 * ratio^i, summing to the interval length
    std::vector<double> xs(nx);
    const double total = (std::pow(x_ratio, nx - 1) - 1.0) / (x_ratio - 1.0);
    const double h0 = (x_max - x_min) / total;
    xs[0] = x_min;
    double h = h0;
    for (int i = 1; i < nx; ++i, h *= x_ratio) xs[i] = xs[i - 1] + h;
    xs[nx - 1] = x_max;
    axes.push_back(xs);
  }
  for (int a = 1; a <= n; ++a) axes.push_back(uniform(counts[a], -y_extent, y_extent));
  return std::make_shared<const Grid>(n, true, std::move(axes));
}

GridPtr make_boundary_grid(int n, const std::vector<int>& counts, double y_extent) {
  if (static_cast<int>(counts.size()) != n) throw std::invalid_argument("need one count per axis");
  if (!(y_extent > 0)) throw std::invalid_argument("non-positive y extent");
  for (int c : counts)
    if (c < 5) throw std::invalid_argument("counts too small");
  std::vector<std::vector<double>> axes;
  for (int a = 0; a < n; ++a) axes.push_back(uniform(counts[a], -y_extent, y_extent));
  return std::make_shared<const Grid>(n, false, std::move(axes));
}

GridPtr make_grid_from_axes(int n, bool has_x, std::vector<std::vector<double>> axes) {
  if (has_x && !(axes.at(0).front() > 0)) throw std::invalid_argument("non-positive x_min");
  return std::make_shared<const Grid>(n, has_x, std::move(axes));
}

Eigen::MatrixXd diff_columns(const Grid& g, const Eigen::MatrixXd& values, int axis, int order) {
  if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("invalid axis");
  if (order != 1 && order != 2) throw std::invalid_argument("derivative order must be 1 or 2");
  Eigen::MatrixXd out(values.rows(), values.cols());
  const long st = g.stride(axis);
  for (long k = 0; k < g.size(); ++k) {
    const int i = g.index_along(k, axis);
    const Stencil& s = g.stencil(axis, i);
    const auto& w = order == 1 ? s.d1 : s.d2;
    const long base = k + (s.start - i) * st;
    auto row = out.row(k);
    row = w[0] * values.row(base);
    for (int q = 1; q < 5; ++q) row += w[q] * values.row(base + q * st);
  }
  return out;
}

ScalarField::ScalarField(GridPtr g, Eigen::VectorXd values) : grid(std::move(g)), v(std::move(values)) {
  if (v.size() != grid->size()) throw std::invalid_argument("value count does not match grid");
}

SymTensor2Field::SymTensor2Field(GridPtr g)
    : grid(std::move(g)), c(Eigen::MatrixXd::Zero(grid->size(), sym_count(grid->dim()))) {}

SymTensor2Field::SymTensor2Field(GridPtr g, Eigen::MatrixXd comps) : grid(std::move(g)), c(std::move(comps)) {
  if (c.rows() != grid->size() || c.cols() != sym_count(grid->dim()))
    throw std::invalid_argument("component array shape does not match grid");
}

Eigen::MatrixXd SymTensor2Field::at_node(long node) const {
  const int d = dim();
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) m(i, j) = m(j, i) = (*this)(node, i, j);
  return m;
}

void SymTensor2Field::set_node(long node, const Eigen::MatrixXd& m) {
  const int d = dim();
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) at(node, i, j) = 0.5 * (m(i, j) + m(j, i));
}

ScalarField diff(const ScalarField& f, int axis, int order) {
  return ScalarField(f.grid, diff_columns(*f.grid, f.v, axis, order));
}

ScalarField scaled_diff(const ScalarField& f, int axis) {
  ScalarField d = diff(f, axis, 1);
  for (long k = 0; k < d.v.size(); ++k) d.v[k] *= f.grid->x(k);
  return d;
}

SymTensor2Field operator+(const SymTensor2Field& a, const SymTensor2Field& b) {
  return SymTensor2Field(a.grid, a.c + b.c);
}
SymTensor2Field operator-(const SymTensor2Field& a, const SymTensor2Field& b) {
  return SymTensor2Field(a.grid, a.c - b.c);
}
SymTensor2Field operator*(double s, const SymTensor2Field& a) { return SymTensor2Field(a.grid, s * a.c); }

}  // namespace peglue
