// Command-line front end: spectrum | solve | sweep | validate | plot.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 validation
// mismatch.

#include "plasmon/errors.hpp"
#include "plasmon/harness.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace plasmon;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitMismatch = 4;

struct GeometryArgs {
  std::string name = "ellipse";
  double radius = 1.0;
  double semi_a = 2.0;
  double semi_b = 1.0;
  double scale = 1.0;
  int resolution = 0;

  void attach(CLI::App* app) {
    app->add_option("--geometry", name, "circle, ellipse, kite or sphere");
    app->add_option("--radius", radius, "circle or sphere radius");
    app->add_option("--semi-a", semi_a, "ellipse semi-axis along x1");
    app->add_option("--semi-b", semi_b, "ellipse semi-axis along x2");
    app->add_option("--curve-scale", scale, "overall dilation");
    app->add_option("-n,--resolution", resolution, "nodes (2D) or harmonic degree (3D); 0 picks 256 or 16");
  }

  Discretization build() const {
    CurveParams p;
    p.radius = radius;
    p.semi_a = semi_a;
    p.semi_b = semi_b;
    p.scale = scale;
    CurveKind kind;
    try {
      kind = curve_kind_from_string(name);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    const auto curve = make_curve(kind, p);
    return discretize(curve, resolution > 0 ? resolution : (kind == CurveKind::sphere ? 16 : 256));
  }
};

Vec3 parse_vec(const std::vector<double>& v, const char* what) {
  if (v.size() < 2 || v.size() > 3) throw ConfigError(std::string(what) + " takes 2 or 3 components");
  return Vec3(v[0], v[1], v.size() == 3 ? v[2] : 0.0);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

int cmd_spectrum(const GeometryArgs& g, int count, const std::string& out) {
  const auto disc = g.build();
  const auto& spec = *disc.spectrum;
  const auto ids = multiplicity_clusters(spec.eigenvalues);
  const int n = count > 0 ? std::min(count, spec.size()) : spec.size();
  std::string text = "n,lambda,cluster\n";
  char buf[96];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%d\n", i, spec.eigenvalues[i], ids[i]);
    text += buf;
  }
  write_text(out, text);
  return 0;
}

struct SolveArgs {
  int dim = 0;
  double eps_c = -2.0, eps_m = 1.0, delta = 1e-2, scale = 1e-4, omega0 = 1.0;
  std::vector<double> dipole_a, dipole_z;
  std::string solver = "direct";
};

int cmd_solve(GeometryArgs g, const SolveArgs& a) {
  if (a.dim == 3 && g.name != "sphere") g.name = "sphere";
  const auto disc = g.build();
  if (a.dim != 0 && a.dim != disc.dimension) throw ConfigError("--dim does not match --geometry");
  TransmissionProblem p;
  p.dimension = disc.dimension;
  p.eps_c = a.eps_c;
  p.eps_m = a.eps_m;
  p.delta = a.delta;
  p.scale = a.scale;
  p.omega0 = a.omega0;
  p.dipole_a = disc.dimension == 3 ? Vec3::UnitZ() : Vec3::UnitX();
  p.dipole_z = disc.dimension == 3 ? Vec3(0, 0, 3) : Vec3(3, 0, 0);
  if (!a.dipole_a.empty()) p.dipole_a = parse_vec(a.dipole_a, "--dipole-a");
  if (!a.dipole_z.empty()) p.dipole_z = parse_vec(a.dipole_z, "--dipole-z");
  const auto choice = solver_from_string(a.solver);
  const auto sp = scaled_parameters(p);

  nlohmann::json out;
  out["geometry"] = disc.id;
  out["lambda_eps"] = plasmon_lambda(sp.eps);
  auto report = [&](const SolutionPair& s) {
    const cplx h0 = coeffs_hat(s.phi, *disc.spectrum)[0];
    return nlohmann::json{{"energy_norm", std::sqrt(std::max(0.0, gradient_energy(s.phi, sp.kc, disc)))},
                          {"phi0_hat", {h0.real(), h0.imag()}},
                          {"residual", s.residual}};
  };
  SolutionPair direct, spectral;
  if (choice != SolverChoice::spectral) {
    direct = solve_direct(p, disc);
    out["direct"] = report(direct);
  }
  if (choice != SolverChoice::direct) {
    spectral = solve_spectral(p, disc);
    out["spectral"] = report(spectral);
  }
  if (choice == SolverChoice::both) out["relative_difference"] = solution_difference(direct, spectral, *disc.spectrum);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& csv, const std::string& svg, int threads) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  auto config = sweep_config_from_json(j);
  if (!csv.empty()) config.csv_path = csv;
  if (!svg.empty()) config.svg_path = svg;
  if (threads > 0) config.threads = threads;
  const auto r = run_sweep(config);
  nlohmann::json out{{"verdict", to_string(r.verdict)},
                     {"rows", r.rows.size()},
                     {"invalid_fraction", r.invalid_fraction},
                     {"energy_ratio", r.energy_ratio},
                     {"modes", r.modes}};
  if (r.fit) {
    out["slope"] = r.fit->slope;
    out["interval"] = {r.fit->slope - r.fit->half_width, r.fit->slope + r.fit->half_width};
  }
  if (config.csv_path.empty()) std::cout << sweep_csv(r);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_validate(const std::string& suite, const std::string& out) {
  const auto checks = validate_suite(suite);
  const auto rep = validation_report(checks);
  write_text(out, rep.dump(2) + "\n");
  return rep["all_pass"].get<bool>() ? 0 : kExitMismatch;
}

int cmd_plot(const std::string& csv, const std::string& out) {
  std::vector<SweepRow> rows;
  try {
    rows = read_sweep_csv(read_text(csv));
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  std::string svg;
  try {
    svg = plot_svg(rows);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  write_text(out, svg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plasmon resonance solver for small dielectric inclusions"};
  app.require_subcommand(1);

  GeometryArgs geo_spec, geo_solve;
  int count = 0;
  std::string spec_out;
  auto* spectrum = app.add_subcommand("spectrum", "NP eigenvalues as CSV (n,lambda,cluster)");
  geo_spec.attach(spectrum);
  spectrum->add_option("--count", count, "number of eigenvalues to print");
  spectrum->add_option("-o,--out", spec_out, "output file (default stdout)");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "single transmission solve");
  geo_solve.attach(solve);
  solve->add_option("--dim", sa.dim, "2 or 3");
  solve->add_option("--eps-c", sa.eps_c, "inclusion permittivity (negative)");
  solve->add_option("--eps-m", sa.eps_m, "matrix permittivity");
  solve->add_option("--delta", sa.delta, "loss parameter");
  solve->add_option("--scale", sa.scale, "inclusion scale s");
  solve->add_option("--omega0", sa.omega0, "reference frequency");
  solve->add_option("--dipole-a", sa.dipole_a, "dipole direction")->delimiter(',');
  solve->add_option("--dipole-z", sa.dipole_z, "dipole location")->delimiter(',');
  solve->add_option("--solver", sa.solver, "direct, spectral or both");

  std::string config, csv, svg;
  int threads = 0;
  auto* sweep = app.add_subcommand("sweep", "delta sweep from a JSON config");
  sweep->add_option("config", config, "config file")->required();
  sweep->add_option("--csv", csv, "CSV output path");
  sweep->add_option("--svg", svg, "SVG output path");
  sweep->add_option("--threads", threads, "worker count");

  std::string suite = "all", report_out;
  auto* validate = app.add_subcommand("validate", "run oracle checks and print a JSON report");
  validate->add_option("suite", suite, "specfun, spectrum, sphere, layer, c0, energy, transmission or all");
  validate->add_option("-o,--out", report_out, "report path (default stdout)");

  std::string plot_csv, plot_out;
  auto* plot = app.add_subcommand("plot", "log-log SVG of a sweep CSV");
  plot->add_option("csv", plot_csv, "sweep CSV")->required();
  plot->add_option("-o,--out", plot_out, "SVG path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*spectrum) return cmd_spectrum(geo_spec, count, spec_out);
    if (*solve) return cmd_solve(geo_solve, sa);
    if (*sweep) return cmd_sweep(config, csv, svg, threads);
    if (*validate) return cmd_validate(suite, report_out);
    if (*plot) return cmd_plot(plot_csv, plot_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
