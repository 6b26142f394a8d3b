#include "peglue/config.hpp"
#include "peglue/gauge.hpp"
#include "peglue/glue.hpp"
#include "peglue/indicial.hpp"
#include "peglue/io.hpp"
#include "peglue/solve.hpp"
#include "peglue/tensor_calculus.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace peglue;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kMissing = 3, kNumerical = 4 };

struct Flags {
  std::string config;
  std::string out;
  int n = 0;
  std::vector<double> eps;
  double mu = 0;
  std::string grid;
  double xmin = 0;
  CLI::Option *o_out{}, *o_n{}, *o_eps{}, *o_mu{}, *o_grid{}, *o_xmin{};
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file");
  f.o_out = cmd->add_option("--out", f.out, "output directory");
  f.o_n = cmd->add_option("--n", f.n, "boundary dimension");
  f.o_eps = cmd->add_option("--eps", f.eps, "gluing parameter (repeatable)");
  f.o_mu = cmd->add_option("--mu", f.mu, "weight exponent");
  f.o_grid = cmd->add_option("--grid", f.grid, "grid counts NX,NY[,NZ]");
  f.o_xmin = cmd->add_option("--xmin", f.xmin, "lower x face");
}

std::vector<int> parse_counts(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("bad --grid entry '" + item + "'");
    }
  }
  return out;
}

RunConfig resolve(const std::string& command, const Flags& f) {
  RunConfig cfg;
  if (command == "normform") {
    // marching needs a thin collar starting close to the boundary
    cfg.grid = {17, 9};
    cfg.x_min = 0.01;
    cfg.x_max = 0.3;
    cfg.y_extent = 0.6;
  }
  if (!f.config.empty()) cfg = load_config(f.config, cfg);
  cfg.command = command;
  if (f.o_out->count()) cfg.out_dir = f.out;
  if (f.o_n->count()) cfg.n = f.n;
  if (f.o_eps->count()) cfg.eps = f.eps;
  if (f.o_mu->count()) cfg.mu = f.mu;
  if (f.o_xmin->count()) cfg.x_min = f.xmin;
  if (f.o_grid->count()) cfg.grid = parse_counts(f.grid);
  check_config(cfg);
  return cfg;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = (std::filesystem::path(cfg.out_dir) / name).string();
  std::ofstream os(path);
  if (!os) throw MissingInput("cannot write '" + path + "'");
  return os;
}

// Missing trailing counts repeat the last one, so "--grid 16" is a cube.
std::vector<int> volume_counts(const RunConfig& cfg) {
  std::vector<int> c = cfg.grid;
  if (c.empty() || static_cast<int>(c.size()) > cfg.n + 1)
    throw InvalidArgument("--grid needs between 1 and n+1 counts");
  c.resize(cfg.n + 1, c.back());
  return c;
}

int run_indicial(const RunConfig& cfg, std::string&) {
  const IndicialSpectrum s = indicial_roots(cfg.n);
  auto os = open_out(cfg, "indicial.csv");
  std::ostringstream window;
  window << "(" << s.mu_minus << "," << s.mu_plus << ")";
  os << "n,zeta1_minus,zeta1_plus,zeta2_minus,zeta2_plus,zeta3_minus,zeta3_plus,mu_minus,mu_plus,window\n";
  os << cfg.n << "," << sci(s.zeta1_minus) << "," << sci(s.zeta1_plus) << "," << sci(s.zeta2_minus) << ","
     << sci(s.zeta2_plus) << "," << sci(s.zeta3_minus) << "," << sci(s.zeta3_plus) << "," << sci(s.mu_minus) << ","
     << sci(s.mu_plus) << ",\"" << window.str() << "\"\n";
  std::cout << "indicial: n=" << cfg.n << " window=(" << s.mu_minus << "," << s.mu_plus << ")\n";
  return kOk;
}

int run_residual(const RunConfig& cfg, std::string&) {
  const MetricPtr g1 = model_from_manifest(cfg.summand1, cfg.n);
  const MetricPtr g2 = model_from_manifest(cfg.summand2, cfg.n);
  const auto rows = residual_study(g1, g2, cfg.eps);
  auto os = open_out(cfg, "residual.csv");
  os << "eps,sup_residual,sup_outside,slope_so_far\n";
  for (const auto& r : rows)
    os << sci(r.eps) << "," << sci(r.sup_residual) << "," << sci(r.sup_outside) << ","
       << (std::isfinite(r.slope_so_far) ? sci(r.slope_so_far) : std::string("n/a")) << "\n";
  std::cout << "residual: " << rows.size() << " eps values, slope=" << rows.back().slope_so_far << "\n";
  return kOk;
}

int run_solve(const RunConfig& cfg, std::string& note) {
  const MetricPtr g1 = model_from_manifest(cfg.summand1, cfg.n);
  const MetricPtr g2 = model_from_manifest(cfg.summand2, cfg.n);
  GridPtr grid = make_grid(cfg.n, volume_counts(cfg), cfg.x_min, cfg.x_max, cfg.y_extent);
  auto summary = open_out(cfg, "solve.csv");
  summary << "eps,initial_residual,final_residual,iterations,converged,bianchi,g_norm,sup_k_outside\n";
  bool all_ok = true;
  for (double eps : cfg.eps) {
    const GluedAtlas atlas = glue_metrics(g1, g2, eps);
    const GaugeContext ctx = make_context(sample_metric(*atlas.glued, grid, true));
    WeightSpec spec;
    spec.mu = spec.nu = cfg.mu;
    spec.eps = eps;
    const FixedPointResult fp = fixed_point(ctx, spec, cfg.tol, cfg.max_iter);
    const SolveReport& rep = fp.report;
    const ScalarField kn = pointwise_norm(ctx.g, fp.k);
    double outside = 0;
    for (long k = 0; k < grid->size(); ++k) {
      double w[kMaxDim];
      grid->coords(k, w);
      double r2 = 0;
      for (int a = 0; a < grid->dim(); ++a) r2 += w[a] * w[a];
      if (r2 >= 4) outside = std::max(outside, kn.v[k]);
    }
    std::ostringstream tag;
    tag << "solve_eps_" << eps;
    auto hist = open_out(cfg, tag.str() + ".csv");
    hist << "iteration,residual,contraction,linear_iterations,iterate_norm\n";
    for (size_t i = 0; i < rep.residuals.size(); ++i) {
      hist << i << "," << sci(rep.residuals[i]) << ","
           << (i > 0 ? sci(rep.contraction[i - 1]) : std::string("nan")) << ","
           << (i < rep.linear_iterations.size() ? std::to_string(rep.linear_iterations[i]) : std::string("0")) << ","
           << sci(rep.iterate_norms[i]) << "\n";
    }
    save((std::filesystem::path(cfg.out_dir) / (tag.str() + ".field")).string(), fp.k);
    summary << sci(eps) << "," << sci(rep.initial_residual) << "," << sci(rep.residuals.back()) << ","
            << rep.residuals.size() - 1 << "," << (rep.converged ? 1 : 0) << "," << sci(rep.bianchi_norm) << ","
            << sci(rep.g_norm) << "," << sci(outside) << "\n";
    std::cout << "solve: eps=" << eps << (rep.converged ? " converged" : " failed: " + rep.failure)
              << " residual " << rep.initial_residual << " -> " << rep.residuals.back() << "\n";
    if (!rep.converged) note += (note.empty() ? "" : "; ") + ("eps=" + sci(eps) + ": " + rep.failure);
    all_ok = all_ok && rep.converged;
  }
  return all_ok ? kOk : kNumerical;
}

int run_boundary(const RunConfig& cfg, std::string&) {
  const MetricPtr h1 = boundary_from_manifest(cfg.summand1, cfg.n);
  const MetricPtr h2 = boundary_from_manifest(cfg.summand2, cfg.n);
  const std::vector<int> counts(cfg.n, cfg.grid.back());
  auto os = open_out(cfg, "boundary.csv");
  os << "eps,min_scalar_neck,min_scalar_far,max_abs_dev_far,max_rel_dev_far\n";
  for (double eps : cfg.eps) {
    // t-box reaching well into the unglued part of chart 1
    GridPtr grid = make_boundary_grid(cfg.n, counts, 4.0);
    const ScalarField R = scalar_curvature(sample_metric(*glue_boundary(h1, h2, eps), grid));
    // the summand alone in the same chart: h1(eps t) has curvature eps^2 R1
    ScalarField ref = scalar_curvature(sample_metric(*rescale_pullback(h1, eps), grid));
    ref.v /= eps * eps;
    double mn = INFINITY, far = INFINITY, dev = 0, scale = 0;
    for (long k = 0; k < grid->size(); ++k) {
      double t[kMaxDim];
      grid->coords(k, t);
      double r2 = 0;
      for (int a = 0; a < cfg.n; ++a) r2 += t[a] * t[a];
      if (r2 < 0.25) continue;
      mn = std::min(mn, R.v[k]);
      if (r2 >= 4) {
        far = std::min(far, R.v[k]);
        dev = std::max(dev, std::abs(R.v[k] - ref.v[k]));
        scale = std::max(scale, std::abs(ref.v[k]));
      }
    }
    os << sci(eps) << "," << sci(mn) << "," << sci(far) << "," << sci(dev) << ","
       << (scale > 0 ? sci(dev / scale) : std::string("n/a")) << "\n";
    std::ostringstream tag;
    tag << "boundary_eps_" << eps << ".csv";
    auto nodes = open_out(cfg, tag.str());
    write_field_csv(nodes, *grid, R.v, {"scalar_curvature"});
    std::cout << "boundary: eps=" << eps << " min R=" << mn << " far min R=" << far << "\n";
  }
  return kOk;
}

int run_normform(const RunConfig& cfg, std::string&) {
  const std::string manifest = cfg.summand1.empty()
                                   ? R"({"type":"perturbed","base":{"type":"poincare_ball_chart"},"amplitude":0.05})"
                                   : cfg.summand1;
  const MetricPtr g = model_from_manifest(manifest, cfg.n);
  GridPtr grid = make_grid(cfg.n, volume_counts(cfg), cfg.x_min, cfg.x_max, cfg.y_extent);
  const NormalFormResult nf = normal_form(*g, *coordinate_function(0), grid, [](const double*) { return 0.0; });
  Eigen::MatrixXd vals(grid->size(), 3);
  vals.col(0) = nf.u.v;
  vals.col(1) = nf.xhat.v;
  vals.col(2) = nf.defect.v;
  auto os = open_out(cfg, "normform.csv");
  write_field_csv(os, *grid, vals, {"u", "xhat", "defect"});
  double worst = 0;
  for (long k = 0; k < grid->size(); ++k)
    if (!grid->near_face(k, 2)) worst = std::max(worst, std::abs(nf.defect.v[k]));
  std::cout << "normform: max interior defect " << worst << "\n";
  return kOk;
}

int run_linprobe(const RunConfig& cfg, std::string&) {
  const std::string manifest = cfg.summand1.empty() ? R"({"type":"hyperbolic_half_space"})" : cfg.summand1;
  const MetricPtr g = model_from_manifest(manifest, cfg.n);
  GridPtr grid = make_grid(cfg.n, volume_counts(cfg), cfg.x_min, cfg.x_max, cfg.y_extent);
  const GaugeContext ctx = make_context(sample_metric(*g, grid, true));
  const LinearSystem sys = assemble_single_chart(ctx, cfg.mu);
  const KernelProbe kp = kernel_probe(sys, cfg.kernel_threshold);
  auto os = open_out(cfg, "linprobe.csv");
  os << "sigma_min,iterations,degenerate\n" << sci(kp.sigma_min) << "," << kp.iterations << ","
     << (kp.degenerate ? 1 : 0) << "\n";
  std::cout << "linprobe: sigma_min=" << kp.sigma_min << (kp.degenerate ? " (degenerate)" : "") << "\n";
  return kOk;
}

void write_status(const std::string& dir, const std::string& cmd, int code, const std::string& msg) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream os(std::filesystem::path(dir) / (cmd + ".status"));
  if (os) os << "command=" << cmd << "\nexit=" << code << "\nmessage=" << msg << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peglue: gluing of conformally compact Einstein metrics"};
  app.require_subcommand(1);
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, std::string&);
  };
  const Entry entries[] = {
      {"indicial", "indicial roots and weight window", run_indicial},
      {"residual", "residual of the approximate solution vs eps", run_residual},
      {"solve", "fixed-point solve for the Einstein correction", run_solve},
      {"boundary", "scalar curvature of the glued boundary metric", run_boundary},
      {"normform", "special defining function by marching", run_normform},
      {"linprobe", "smallest singular value of the linearized operator", run_linprobe},
  };
  constexpr size_t kCommands = std::size(entries);
  std::array<Flags, kCommands> flags;
  std::vector<CLI::App*> cmds;
  for (size_t i = 0; i < kCommands; ++i) {
    CLI::App* c = app.add_subcommand(entries[i].name, entries[i].help);
    add_common(c, flags[i]);
    cmds.push_back(c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  for (size_t i = 0; i < cmds.size(); ++i) {
    if (!cmds[i]->parsed()) continue;
    const std::string name = entries[i].name;
    std::string out_dir = flags[i].out;
    int code = kOk;
    std::string msg = "ok";
    try {
      const RunConfig cfg = resolve(name, flags[i]);
      out_dir = cfg.out_dir;
      std::string note;
      code = entries[i].fn(cfg, note);
      if (code != kOk) msg = note.empty() ? "numerical failure" : note;
    } catch (const MissingInput& e) {
      code = kMissing;
      msg = e.what();
    } catch (const std::invalid_argument& e) {
      code = kInvalid;
      msg = e.what();
    } catch (const std::exception& e) {
      code = kNumerical;
      msg = e.what();
    }
    if (code != kOk) std::cerr << name << ": " << msg << "\n";
    write_status(out_dir, name, code, msg);
    return code;
  }
  return kInvalid;
}
