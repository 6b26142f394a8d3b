#include "peglue/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace peglue {

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

std::vector<std::string> sym_names(int d, const std::string& prefix) {
  std::vector<std::string> out;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out.push_back(prefix + std::to_string(i) + std::to_string(j));
  return out;
}

void write_field_csv(std::ostream& os, const Grid& g, const Eigen::MatrixXd& values,
                     const std::vector<std::string>& names) {
  os << "# n=" << g.n() << " counts=";
  for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << g.count(a);
  if (g.has_x()) os << " x_range=" << sci(g.axis(0).front()) << "," << sci(g.axis(0).back());
  os << " y_extent=" << sci(g.axis(g.dim() - 1).back()) << "\n";
  for (int a = 0; a < g.dim(); ++a) {
    if (g.has_x()) os << (a == 0 ? "x" : "y" + std::to_string(a)) << ",";
    else os << "y" << a + 1 << ",";
  }
  for (size_t c = 0; c < names.size(); ++c) os << names[c] << (c + 1 < names.size() ? "," : "\n");
  std::vector<double> w(g.dim());
  for (long k = 0; k < g.size(); ++k) {
    g.coords(k, w.data());
    for (double v : w) os << sci(v) << ",";
    for (long c = 0; c < values.cols(); ++c) os << sci(values(k, c)) << (c + 1 < values.cols() ? "," : "\n");
  }
}

template <class T>
static void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
static T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("truncated field file");
  return v;
}

void write_field_binary(std::ostream& os, const Grid& g, const Eigen::MatrixXd& values) {
  os.write("PEGF", 4);
  put<std::int32_t>(os, g.n());
  put<std::int32_t>(os, g.has_x() ? 1 : 0);
  put<std::int32_t>(os, g.dim());
  for (int a = 0; a < g.dim(); ++a) put<std::int32_t>(os, g.count(a));
  for (int a = 0; a < g.dim(); ++a)
    for (double v : g.axis(a)) put(os, v);
  put<std::int64_t>(os, values.cols());
  for (long k = 0; k < values.rows(); ++k)
    for (long c = 0; c < values.cols(); ++c) put(os, values(k, c));
}

Eigen::MatrixXd read_field_binary(std::istream& is, GridPtr& grid) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "PEGF") throw std::runtime_error("not a field file");
  const int n = get<std::int32_t>(is);
  const bool has_x = get<std::int32_t>(is) != 0;
  const int d = get<std::int32_t>(is);
  std::vector<int> counts(d);
  for (auto& c : counts) c = get<std::int32_t>(is);
  std::vector<std::vector<double>> axes(d);
  for (int a = 0; a < d; ++a) {
    axes[a].resize(counts[a]);
    for (auto& v : axes[a]) v = get<double>(is);
  }
  grid = make_grid_from_axes(n, has_x, std::move(axes));
  const auto cols = get<std::int64_t>(is);
  Eigen::MatrixXd values(grid->size(), cols);
  for (long k = 0; k < values.rows(); ++k)
    for (long c = 0; c < cols; ++c) values(k, c) = get<double>(is);
  return values;
}

void save(const std::string& path, const SymTensor2Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_field_binary(os, *f.grid, f.c);
}

SymTensor2Field load_sym_tensor(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  GridPtr g;
  Eigen::MatrixXd v = read_field_binary(is, g);
  return SymTensor2Field(g, std::move(v));
}

}  // namespace peglue
