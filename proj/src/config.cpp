#include "peglue/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace peglue {

using nlohmann::json;

namespace {

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config key '") + key + "': " + e.what());
  }
}

MetricPtr build(const json& m, int n) {
  if (!m.is_object() || !m.contains("type")) throw InvalidArgument("model manifest needs a \"type\"");
  const std::string type = m.at("type").get<std::string>();
  if (type == "hyperbolic_half_space") return hyperbolic_half_space(n);
  if (type == "poincare_ball_chart") return poincare_ball_chart(n);
  if (type == "polynomial_tangential") return polynomial_tangential(n, m.value("a1", 0.0), m.value("a2", 0.0));
  if (type == "generic_test_metric") return generic_test_metric(n, m.value("amplitude", 0.05));
  if (type == "perturbed") {
    if (!m.contains("base")) throw MissingInput("perturbed model without \"base\"");
    const MetricPtr base = build(m.at("base"), n);
    ScalarPtr phi;
    if (m.contains("bump")) {
      const json& b = m.at("bump");
      std::vector<double> center = b.value("center", std::vector<double>(n + 1, 0.0));
      if (static_cast<int>(center.size()) != n + 1) throw InvalidArgument("bump center needs n+1 entries");
      phi = gaussian_bump(center, b.value("width", 0.3));
    } else {
      phi = smooth_wave(n + 1, m.value("scale", 1.0));
    }
    return perturbed(base, phi, m.value("amplitude", 0.05));
  }
  throw MissingInput("unknown model type '" + type + "'");
}

}  // namespace

void merge_config(RunConfig& cfg, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  take(j, "command", cfg.command);
  take(j, "n", cfg.n);
  take(j, "grid", cfg.grid);
  take(j, "x_min", cfg.x_min);
  take(j, "x_max", cfg.x_max);
  take(j, "y_extent", cfg.y_extent);
  take(j, "eps", cfg.eps);
  take(j, "mu", cfg.mu);
  take(j, "tol", cfg.tol);
  take(j, "max_iter", cfg.max_iter);
  take(j, "kernel_threshold", cfg.kernel_threshold);
  take(j, "out", cfg.out_dir);
  if (j.contains("summand1")) cfg.summand1 = j.at("summand1").dump();
  if (j.contains("summand2")) cfg.summand2 = j.at("summand2").dump();
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw MissingInput("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  merge_config(base, ss.str());
  return base;
}

void check_config(const RunConfig& cfg) {
  if (cfg.n < 1 || cfg.n > 3) throw InvalidArgument("n must be 1, 2 or 3");
  for (int c : cfg.grid)
    if (c < 5) throw InvalidArgument("grid counts must be at least 5");
  if (!(cfg.x_min > 0 && cfg.x_max > cfg.x_min)) throw InvalidArgument("need 0 < x_min < x_max");
  if (!(cfg.y_extent > 0)) throw InvalidArgument("y_extent must be positive");
  for (double e : cfg.eps)
    if (!(e > 0 && e <= 0.5)) throw InvalidArgument("eps values must lie in (0, 0.5]");
  if (!(cfg.tol > 0)) throw InvalidArgument("tol must be positive");
  if (cfg.max_iter < 1) throw InvalidArgument("max_iter must be positive");
}

namespace {

// Inline manifest object, or a JSON string naming a manifest file.
json manifest_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("model manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_string()) return j;
  const std::string path = j.get<std::string>();
  std::ifstream in(path);
  if (!in) throw MissingInput("cannot open model manifest '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("model manifest '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

MetricPtr model_from_manifest(const std::string& text, int n) {
  if (text.empty()) return poincare_ball_chart(n);
  const json j = manifest_json(text);
  try {
    return build(j, n);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("model manifest: ") + e.what());
  }
}

MetricPtr boundary_from_manifest(const std::string& text, int n) {
  if (text.empty()) return round_sphere_boundary(n);
  const json j = manifest_json(text);
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw InvalidArgument("boundary manifest needs a \"type\"");
  const std::string type = j.at("type").get<std::string>();
  if (type == "round_sphere_boundary") return round_sphere_boundary(n);
  if (type == "flat_boundary") return flat_boundary(n);
  throw MissingInput("unknown boundary model type '" + type + "'");
}

}  // namespace peglue
