#pragma once

#include "peglue/fields.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace peglue {

// Full-precision scientific notation used for every numeric output.
std::string sci(double v);

// Field layout shared by CSV and binary forms: a header carrying n, the
// axis counts, the x range and the y extent, then row-major node values.
void write_field_csv(std::ostream& os, const Grid& g, const Eigen::MatrixXd& values,
                     const std::vector<std::string>& names);
void write_field_binary(std::ostream& os, const Grid& g, const Eigen::MatrixXd& values);
// Reads a binary field; the grid is rebuilt from the stored axes.
Eigen::MatrixXd read_field_binary(std::istream& is, GridPtr& grid);

void save(const std::string& path, const SymTensor2Field& f);
SymTensor2Field load_sym_tensor(const std::string& path);

std::vector<std::string> sym_names(int d, const std::string& prefix);

}  // namespace peglue
