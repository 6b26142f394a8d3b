#pragma once

#include "peglue/models.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace peglue {

// Bad parameter values or malformed files.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
// A referenced file or manifest entry does not exist.
struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  int n = 2;
  std::vector<int> grid{32, 32, 32};
  double x_min = 0.2;
  double x_max = 2.2;
  double y_extent = 2.0;
  std::vector<double> eps{0.1};
  double mu = 0.5;
  double tol = 1e-8;
  int max_iter = 20;
  double kernel_threshold = 1e-3;
  std::string out_dir = ".";
  // model manifests, JSON text; empty selects the Poincare ball chart
  std::string summand1, summand2;
};

// Reads a JSON config. Keys mirror RunConfig; models go under
// "summand1"/"summand2" as manifests such as
//   {"type": "perturbed", "base": {"type": "poincare_ball_chart"},
//    "bump": {"center": [0.5, 0, 0], "width": 0.3}, "amplitude": 0.05}
// Keys absent from the file keep their values from base.
RunConfig load_config(const std::string& path, RunConfig base = {});
void merge_config(RunConfig& cfg, const std::string& json_text);

// Throws InvalidArgument for out-of-range values.
void check_config(const RunConfig& cfg);

// Builds a model from a manifest, given inline or as a JSON string holding a
// file path; throws MissingInput for unknown types and missing files.
MetricPtr model_from_manifest(const std::string& json_text, int n);
// Boundary summands: round_sphere_boundary (the default) or flat_boundary.
MetricPtr boundary_from_manifest(const std::string& json_text, int n);

}  // namespace peglue
