#include "plasmon/harness.hpp"

#include "plasmon/errors.hpp"
#include "plasmon/parallel.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace plasmon {

namespace {

constexpr double kSlopeLow = -1.15;
constexpr double kSlopeHigh = -0.85;
constexpr double kBoundedRatio = 2.0;
constexpr double kMaxInvalidFraction = 0.3;

const char* kCsvHeader = "delta,s,omega,energy_norm,phi0_hat_abs,a_n_abs,solver,residual,wall_time_ms";

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

Vec3 read_vec3(const nlohmann::json& v, const char* key) {
  if (!v.is_array() || v.size() < 2 || v.size() > 3) throw ConfigError(std::string(key) + " must be an array of 2 or 3 numbers");
  Vec3 out = Vec3::Zero();
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(std::string(key) + " must be an array of numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

}  // namespace

std::string to_string(SolverChoice s) {
  switch (s) {
    case SolverChoice::direct: return "direct";
    case SolverChoice::spectral: return "spectral";
    case SolverChoice::both: return "both";
  }
  return "direct";
}

SolverChoice solver_from_string(const std::string& name) {
  if (name == "direct") return SolverChoice::direct;
  if (name == "spectral") return SolverChoice::spectral;
  if (name == "both") return SolverChoice::both;
  throw ConfigError("unknown solver '" + name + "' (direct, spectral, both)");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::resonant: return "resonant";
    case Verdict::bounded: return "bounded";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::vector<double> SweepConfig::delta_grid() const {
  const double decades = std::log10(delta_max / delta_min);
  const int n = int(std::lround(decades * points_per_decade)) + 1;
  std::vector<double> grid;
  grid.reserve(n);
  for (int i = 0; i < n; ++i) grid.push_back(delta_max * std::pow(10.0, -double(i) / points_per_decade));
  return grid;
}

double coupled_scale(int dimension, double c, double delta) {
  const double target = c * delta;
  if (!(target > 0.0)) throw ConfigError("coupling product c * delta must be positive");
  if (dimension == 3) return target;
  // s^2 |ln s| increases on (0, e^{-1/2})
  double hi = std::exp(-0.5);
  if (target >= hi * hi * 0.5) throw ConfigError("c * delta too large for the 2D coupling rule");
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * mid * std::abs(std::log(mid)) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

void SweepConfig::validate() const {
  const int dim = geometry == CurveKind::sphere ? 3 : 2;
  if (problem.dimension != dim) throw ConfigError("dimension does not match the geometry");
  if (!(delta_min > 0.0) || !(delta_max > delta_min)) throw ConfigError("need 0 < delta_min < delta_max");
  if (points_per_decade < 1) throw ConfigError("points_per_decade must be at least 1");
  if (!(coupling_c > 0.0) || coupling_c > 0.1) throw ConfigError("coupling_c must lie in (0, 0.1]");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  if (dim == 2 && resolution < kMinNodes) throw ConfigError("resolution below the minimum node count");
  if (dim == 3 && resolution < kMinSphereDegree) throw ConfigError("sphere degree below the minimum");
  const auto grid = delta_grid();
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] < grid[i - 1])) throw ConfigError("delta grid is not strictly decreasing");
  const auto c = make_curve(geometry, curve);
  const Vec3& z = problem.dipole_z;
  if (dim == 3 && z.norm() < 1.05 * c.sphere_radius()) throw ConfigError("dipole location must satisfy |z| >= 1.05 R");
  if (dim == 2 && (contains(c, Vec2(z.x(), z.y())) || distance_to_curve(c, Vec2(z.x(), z.y())) < 1e-3))
    throw ConfigError("dipole location must lie outside the inclusion");
  for (double d : grid) {
    TransmissionProblem p = problem;
    p.delta = d;
    p.scale = coupled_scale(dim, coupling_c, d);
    if (p.scale * p.omega0 > kOmegaCeiling) throw ConfigError("omega = s omega0 exceeds the frequency ceiling");
    scaled_parameters(p);
  }
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "dimension", "geometry", "radius", "semi_a", "semi_b", "curve_scale", "resolution", "eps_c", "eps_m",
      "omega0", "dipole_a", "dipole_z", "delta_max", "delta_min", "points_per_decade", "coupling_c", "solver",
      "csv_path", "svg_path", "threads", "record_timing"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");

  auto num = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
    return j[key].get<double>();
  };
  auto integer = [&](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    return j[key].get<int>();
  };
  auto str = [&](const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) throw ConfigError(std::string(key) + " must be a string");
    return j[key].get<std::string>();
  };

  CurveKind kind;
  try {
    kind = curve_kind_from_string(str("geometry", "ellipse"));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  SweepConfig c = default_sweep(kind, num("eps_c", -2.0));
  if (j.contains("dimension") && integer("dimension", 0) != c.problem.dimension)
    throw ConfigError("dimension does not match the geometry");
  c.curve.radius = num("radius", c.curve.radius);
  c.curve.semi_a = num("semi_a", c.curve.semi_a);
  c.curve.semi_b = num("semi_b", c.curve.semi_b);
  c.curve.scale = num("curve_scale", c.curve.scale);
  c.resolution = integer("resolution", c.resolution);
  c.problem.eps_m = num("eps_m", c.problem.eps_m);
  c.problem.omega0 = num("omega0", c.problem.omega0);
  if (j.contains("dipole_a")) c.problem.dipole_a = read_vec3(j["dipole_a"], "dipole_a");
  if (j.contains("dipole_z")) c.problem.dipole_z = read_vec3(j["dipole_z"], "dipole_z");
  c.delta_max = num("delta_max", c.delta_max);
  c.delta_min = num("delta_min", c.delta_min);
  c.points_per_decade = integer("points_per_decade", c.points_per_decade);
  c.coupling_c = num("coupling_c", c.coupling_c);
  c.solver = solver_from_string(str("solver", to_string(c.solver)));
  c.csv_path = str("csv_path", c.csv_path);
  c.svg_path = str("svg_path", c.svg_path);
  c.threads = integer("threads", c.threads);
  if (j.contains("record_timing")) {
    if (!j["record_timing"].is_boolean()) throw ConfigError("record_timing must be a boolean");
    c.record_timing = j["record_timing"].get<bool>();
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const SweepConfig& c) {
  auto vec = [](const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); };
  return {{"dimension", c.problem.dimension},
          {"geometry", to_string(c.geometry)},
          {"radius", c.curve.radius},
          {"semi_a", c.curve.semi_a},
          {"semi_b", c.curve.semi_b},
          {"curve_scale", c.curve.scale},
          {"resolution", c.resolution},
          {"eps_c", c.problem.eps_c},
          {"eps_m", c.problem.eps_m},
          {"omega0", c.problem.omega0},
          {"dipole_a", vec(c.problem.dipole_a)},
          {"dipole_z", vec(c.problem.dipole_z)},
          {"delta_max", c.delta_max},
          {"delta_min", c.delta_min},
          {"points_per_decade", c.points_per_decade},
          {"coupling_c", c.coupling_c},
          {"solver", to_string(c.solver)},
          {"csv_path", c.csv_path},
          {"svg_path", c.svg_path},
          {"threads", c.threads},
          {"record_timing", c.record_timing}};
}

SweepConfig default_sweep(CurveKind geometry, double eps_c) {
  SweepConfig c;
  c.geometry = geometry;
  c.problem.eps_c = eps_c;
  if (geometry == CurveKind::sphere) {
    c.problem.dimension = 3;
    c.curve = CurveParams{};
    c.resolution = 16;
    c.problem.dipole_a = Vec3::UnitZ();
    c.problem.dipole_z = Vec3(0.0, 0.0, 3.0);
  } else {
    c.problem.dimension = 2;
    if (geometry != CurveKind::ellipse) c.curve = CurveParams{};
    c.resolution = 256;
    c.problem.dipole_a = Vec3::UnitX();
    c.problem.dipole_z = Vec3(3.0, 0.0, 0.0);
  }
  return c;
}

namespace {

SweepRow solve_row(const SweepConfig& config, const Discretization& disc, OperatorCache& cache,
                   const std::vector<int>& modes, double delta) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.delta = delta;
  const int dim = config.problem.dimension;
  row.s = coupled_scale(dim, config.coupling_c, delta);
  row.omega = row.s * config.problem.omega0;
  row.quasi_static_bound = dim == 3 ? row.s / delta : row.s * row.s * std::abs(std::log(row.s)) / delta;
  row.solver = to_string(config.solver);
  TransmissionProblem p = config.problem;
  p.delta = delta;
  p.scale = row.s;
  try {
    const auto sp = scaled_parameters(p);
    SolutionPair sol;
    if (config.solver == SolverChoice::spectral) {
      sol = solve_spectral(p, disc);
    } else {
      sol = solve_direct(p, disc, &cache);
      if (config.solver == SolverChoice::both)
        row.quasi_static_diff = solution_difference(sol, solve_spectral(p, disc), *disc.spectrum);
    }
    row.residual = sol.residual;
    row.energy_norm = std::sqrt(std::max(0.0, gradient_energy(sol.phi, sp.kc, disc, &cache)));
    row.phi0_hat_abs = std::abs(coeffs_hat(sol.phi, *disc.spectrum)[0]);
    double an2 = 0.0;
    for (int n : modes) {
      const double a = sp.source_factor * std::abs(coupling_an(p.dipole_z, p.dipole_a, n, disc, sp.omega).an);
      row.an_abs.push_back(a);
      an2 += a * a;
    }
    row.an_norm = std::sqrt(an2);
    row.valid = std::isfinite(row.energy_norm) && row.residual < kDirectResidualTol;
    if (!row.valid) row.error = "residual above tolerance";
  } catch (const std::exception& e) {
    row.valid = false;
    row.error = e.what();
    row.energy_norm = std::numeric_limits<double>::quiet_NaN();
    row.residual = std::numeric_limits<double>::quiet_NaN();
  }
  if (config.record_timing)
    row.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const auto curve = make_curve(config.geometry, config.curve);
  const Discretization disc = discretize(curve, config.resolution);
  OperatorCache cache;
  const auto grid = config.delta_grid();

  SweepResult result;
  const double eps = config.problem.eps_c / config.problem.eps_m;
  result.modes = resonant_modes(*disc.spectrum, eps);
  if (result.modes.empty()) result.modes = {nearest_mode(*disc.spectrum, eps)};

  result.rows.resize(grid.size());
  const int threads = config.threads > 0 ? config.threads : default_threads();
  parallel_for(
      int(grid.size()), [&](int i) { result.rows[i] = solve_row(config, disc, cache, result.modes, grid[i]); },
      threads);

  int invalid = 0;
  double emax = 0.0, emin = std::numeric_limits<double>::infinity();
  for (const auto& r : result.rows) {
    if (!r.valid) {
      ++invalid;
      continue;
    }
    emax = std::max(emax, r.energy_norm);
    emin = std::min(emin, r.energy_norm);
  }
  result.invalid_fraction = grid.empty() ? 1.0 : double(invalid) / grid.size();
  result.energy_ratio = emin > 0.0 && std::isfinite(emin) ? emax / emin : std::numeric_limits<double>::infinity();
  try {
    result.fit = fit_blowup_rate(result.rows);
  } catch (const std::invalid_argument&) {
    result.fit.reset();
  }
  result.verdict = classify(result);

  if (!config.csv_path.empty()) write_file(config.csv_path, sweep_csv(result));
  if (!config.svg_path.empty()) write_file(config.svg_path, plot_svg(result.rows));
  return result;
}

SlopeFit fit_blowup_rate(const std::vector<double>& delta, const std::vector<double>& energy) {
  if (delta.size() != energy.size()) throw std::invalid_argument("fit_blowup_rate: size mismatch");
  const int n = int(delta.size());
  if (n < 5) throw std::invalid_argument("fit_blowup_rate: need at least 5 rows");
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(delta[i] > 0.0) || !(energy[i] > 0.0)) throw std::invalid_argument("fit_blowup_rate: non-positive data");
    dmin = std::min(dmin, delta[i]);
    dmax = std::max(dmax, delta[i]);
  }
  if (std::log10(dmax / dmin) < 2.0 - 1e-9) throw std::invalid_argument("fit_blowup_rate: rows span under 2 decades");

  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += std::log(delta[i]);
    my += std::log(energy[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = std::log(delta[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(energy[i]) - my);
  }
  SlopeFit fit;
  fit.rows = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = std::log(energy[i]) - fit.intercept - fit.slope * std::log(delta[i]);
    sse += r * r;
  }
  const double se = std::sqrt(sse / (n - 2) / sxx);
  const boost::math::students_t t(n - 2);
  fit.half_width = boost::math::quantile(t, 0.975) * se;
  return fit;
}

SlopeFit fit_blowup_rate(const std::vector<SweepRow>& rows) {
  std::vector<double> d, e;
  for (const auto& r : rows)
    if (r.valid && r.energy_norm > 0.0) {
      d.push_back(r.delta);
      e.push_back(r.energy_norm);
    }
  return fit_blowup_rate(d, e);
}

Verdict classify(const SweepResult& result) {
  if (result.rows.empty() || result.invalid_fraction > kMaxInvalidFraction) return Verdict::inconclusive;
  if (result.fit && result.fit->slope >= kSlopeLow && result.fit->slope <= kSlopeHigh) return Verdict::resonant;
  if (result.energy_ratio < kBoundedRatio) return Verdict::bounded;
  return Verdict::inconclusive;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : result.rows) {
    out += fmt("%.17g", r.delta) + ',' + fmt("%.17g", r.s) + ',' + fmt("%.17g", r.omega) + ',' +
           fmt("%.17g", r.energy_norm) + ',' + fmt("%.17g", r.phi0_hat_abs) + ',' + fmt("%.17g", r.an_norm) + ',' +
           r.solver + ',' + fmt("%.17g", r.residual) + ',' + fmt("%.3f", r.wall_time_ms) + '\n';
  }
  return out;
}

namespace {

double parse_field(const std::string& s, int line) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw std::runtime_error("malformed number '" + s + "' on CSV line " + std::to_string(line));
  return v;
}

}  // namespace

std::vector<SweepRow> read_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("unexpected CSV header");
  std::vector<SweepRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 9) throw std::runtime_error("expected 9 fields on CSV line " + std::to_string(lineno));
    SweepRow r;
    r.delta = parse_field(f[0], lineno);
    r.s = parse_field(f[1], lineno);
    r.omega = parse_field(f[2], lineno);
    r.energy_norm = parse_field(f[3], lineno);
    r.phi0_hat_abs = parse_field(f[4], lineno);
    r.an_norm = parse_field(f[5], lineno);
    r.solver = f[6];
    r.residual = parse_field(f[7], lineno);
    r.wall_time_ms = parse_field(f[8], lineno);
    r.valid = std::isfinite(r.energy_norm) && r.energy_norm > 0.0 && r.delta > 0.0 && r.residual < kDirectResidualTol;
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("CSV has no data rows");
  return rows;
}

std::string plot_svg(const std::vector<SweepRow>& rows) {
  std::vector<const SweepRow*> pts;
  for (const auto& r : rows)
    if (r.valid) pts.push_back(&r);
  if (pts.empty()) throw std::runtime_error("no valid rows to plot");

  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (auto* r : pts) {
    xlo = std::min(xlo, std::log10(r->delta));
    xhi = std::max(xhi, std::log10(r->delta));
    ylo = std::min(ylo, std::log10(r->energy_norm));
    yhi = std::max(yhi, std::log10(r->energy_norm));
  }
  xlo = std::floor(xlo);
  xhi = std::ceil(xhi);
  ylo = std::floor(ylo);
  yhi = std::ceil(yhi);
  if (xhi <= xlo) xhi = xlo + 1;
  if (yhi <= ylo) yhi = ylo + 1;

  const double W = 640, H = 440, L = 80, R = 20, T = 40, B = 60;
  auto px = [&](double lx) { return L + (lx - xlo) / (xhi - xlo) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - ylo) / (yhi - ylo) * (H - T - B); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\" viewBox=\"0 0 640 440\">\n";
  s += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
  s += "<g stroke=\"#444\" stroke-width=\"1\" fill=\"none\">\n";
  s += "<rect x=\"" + fmt("%.2f", L) + "\" y=\"" + fmt("%.2f", T) + "\" width=\"" + fmt("%.2f", W - L - R) +
       "\" height=\"" + fmt("%.2f", H - T - B) + "\"/>\n</g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">\n";
  for (double e = xlo; e <= xhi + 0.5; e += 1.0)
    s += "<text x=\"" + fmt("%.2f", px(e)) + "\" y=\"" + fmt("%.2f", H - B + 18) + "\" text-anchor=\"middle\">1e" +
         fmt("%.0f", e) + "</text>\n";
  for (double e = ylo; e <= yhi + 0.5; e += 1.0)
    s += "<text x=\"" + fmt("%.2f", L - 8) + "\" y=\"" + fmt("%.2f", py(e) + 4) + "\" text-anchor=\"end\">1e" +
         fmt("%.0f", e) + "</text>\n";
  s += "<text x=\"" + fmt("%.2f", (L + W - R) / 2) + "\" y=\"" + fmt("%.2f", H - 15) +
       "\" text-anchor=\"middle\">delta</text>\n";
  s += "<text x=\"20\" y=\"" + fmt("%.2f", (T + H - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
       fmt("%.2f", (T + H - B) / 2) + ")\">||grad u||</text>\n";
  s += "</g>\n";

  std::string poly;
  for (auto* r : pts) poly += fmt("%.2f", px(std::log10(r->delta))) + "," + fmt("%.2f", py(std::log10(r->energy_norm))) + " ";
  if (!poly.empty()) poly.pop_back();
  s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"" + poly + "\"/>\n";
  for (auto* r : pts)
    s += "<circle class=\"marker\" cx=\"" + fmt("%.2f", px(std::log10(r->delta))) + "\" cy=\"" +
         fmt("%.2f", py(std::log10(r->energy_norm))) + "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";

  try {
    const auto fit = fit_blowup_rate(rows);
    const double ln10 = std::log(10.0);
    auto fy = [&](double lx) { return (fit.intercept + fit.slope * lx * ln10) / ln10; };
    const double a = std::log10(pts.back()->delta), b = std::log10(pts.front()->delta);
    s += "<line x1=\"" + fmt("%.2f", px(a)) + "\" y1=\"" + fmt("%.2f", py(fy(a))) + "\" x2=\"" + fmt("%.2f", px(b)) +
         "\" y2=\"" + fmt("%.2f", py(fy(b))) + "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + fmt("%.2f", L + 10) + "\" y=\"" + fmt("%.2f", T - 12) +
         "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#d62728\">fitted slope " + fmt("%.3f", fit.slope) +
         " +- " + fmt("%.3f", fit.half_width) + "</text>\n";
  } catch (const std::invalid_argument&) {
  }
  s += "</svg>\n";
  return s;
}

}  // namespace plasmon
