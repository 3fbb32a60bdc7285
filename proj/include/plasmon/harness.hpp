#pragma once

#include "plasmon/transmission.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace plasmon {

enum class SolverChoice { direct, spectral, both };

std::string to_string(SolverChoice s);
SolverChoice solver_from_string(const std::string& name);

/// A delta sweep. The problem template's delta and scale are overwritten
/// per grid point; s follows the coupling rule s = c delta (3D) or
/// s^2 |ln s| = c delta (2D).
struct SweepConfig {
  TransmissionProblem problem;
  CurveKind geometry = CurveKind::ellipse;
  CurveParams curve{1.0, 2.0, 1.0, 1.0};
  int resolution = 256;
  double delta_max = 1e-2;
  double delta_min = 1e-5;
  int points_per_decade = 4;
  double coupling_c = 0.01;
  SolverChoice solver = SolverChoice::direct;
  std::string csv_path;
  std::string svg_path;
  int threads = 0;  // 0: hardware concurrency
  bool record_timing = false;

  std::vector<double> delta_grid() const;
  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Strict JSON reader: unknown keys and wrong types raise ConfigError.
SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepConfig& config);

/// Default sweep for a geometry: ellipse 2:1 with a = e1, z = (3, 0), N = 256;
/// unit sphere with a = e3, z = (0, 0, 3), L = 16.
SweepConfig default_sweep(CurveKind geometry, double eps_c);

/// Inclusion scale for the coupling rule at loss delta.
double coupled_scale(int dimension, double c, double delta);

struct SweepRow {
  double delta = 0.0;
  double s = 0.0;
  double omega = 0.0;
  double energy_norm = 0.0;  // ||grad u_delta||_{L^2(Omega)}
  double phi0_hat_abs = 0.0;
  std::vector<double> an_abs;  // one entry per resonant (or nearest) mode
  double an_norm = 0.0;
  std::string solver;
  double residual = 0.0;
  double quasi_static_diff = -1.0;  // set when both solvers ran
  double quasi_static_bound = 0.0;  // s/delta (3D) or s^2 |ln s| / delta (2D)
  double wall_time_ms = 0.0;
  bool valid = false;
  std::string error;
};

enum class Verdict { resonant, bounded, inconclusive };
std::string to_string(Verdict v);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;  // 95% interval is slope +- half_width
  int rows = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // delta descending
  std::vector<int> modes;
  std::optional<SlopeFit> fit;
  Verdict verdict = Verdict::inconclusive;
  double energy_ratio = 0.0;  // max / min over valid rows
  double invalid_fraction = 0.0;
};

/// Solves every grid point on a worker pool and assembles rows in grid
/// order. Writes csv_path / svg_path when they are set.
SweepResult run_sweep(const SweepConfig& config);

/// Ordinary least squares of ln energy on ln delta over (delta, energy)
/// pairs. Needs at least 5 points spanning 2 decades; throws
/// std::invalid_argument otherwise.
SlopeFit fit_blowup_rate(const std::vector<double>& delta, const std::vector<double>& energy);
SlopeFit fit_blowup_rate(const std::vector<SweepRow>& rows);

Verdict classify(const SweepResult& result);

std::string sweep_csv(const SweepResult& result);

/// Parses a sweep CSV back into rows; throws std::runtime_error when the
/// header or a field is malformed.
std::vector<SweepRow> read_sweep_csv(const std::string& text);

/// Log-log SVG of energy against delta with the fitted slope printed to
/// three decimals when at least five rows are present.
std::string plot_svg(const std::vector<SweepRow>& rows);

/// One oracle comparison in a validation report.
struct CheckResult {
  std::string suite;
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Suites: specfun, spectrum, sphere, layer, c0, energy, transmission, or all.
std::vector<CheckResult> validate_suite(const std::string& suite);
nlohmann::json validation_report(const std::vector<CheckResult>& checks);

std::vector<std::string> validation_suites();

}  // namespace plasmon
