#include "pluri/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pluri/stochastic.hpp"

namespace pluri {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits on commas and whitespace, dropping empty pieces.
std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& key, const std::string& s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x))
    throw ConfigError(key + ": '" + s + "' is not a finite number");
  return x;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& s) {
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(key + ": '" + s + "' is not an integer");
  return x;
}

std::vector<Vec2> parse_vertices(const std::string& key, const std::string& s, int n) {
  std::vector<Vec2> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto t = tokens(item);
    if (t.empty()) continue;
    if (static_cast<int>(t.size()) != n)
      throw ConfigError(key + ": each vertex needs " + std::to_string(n) + " coordinate(s)");
    out.push_back({parse_double(key, t[0]), n == 2 ? parse_double(key, t[1]) : 0.0});
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << body;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

std::filesystem::path make_dir(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory " + p.string() + ": " + ec.message());
  return p;
}

std::string field(const std::optional<double>& x) { return x ? format_number(*x) : ""; }

std::filesystem::path k_dir(const ExperimentConfig& cfg, int k) {
  return make_dir(std::filesystem::path(cfg.out_dir) / ("k" + std::to_string(k)));
}

double kn(const BergmanModel& m) { return std::pow(static_cast<double>(m.k()), m.n()); }

std::vector<Point> plane_points(const ExperimentConfig& cfg) { return plane_grid(cfg.grid_extent, cfg.grid_res).points; }

// k^{-n} B_k target: the model itself for l1.target = self, else the oracle density.
std::optional<std::function<double(const Point&)>> density_target(const ExperimentConfig& cfg, const BergmanModel& m,
                                                                   const std::optional<RadialEquilibrium>& eq) {
  if (cfg.l1_self) {
    const double scale = kn(m);
    return [&m, scale](const Point& z) { return bergman_function(m, z) / scale; };
  }
  if (!eq) return std::nullopt;
  return equilibrium_density(cfg.weight(), *eq);
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Weight ExperimentConfig::weight() const { return make_builtin(family, params, n); }

std::optional<Polytope> ExperimentConfig::polytope() const {
  if (!vertices) return std::nullopt;
  return Polytope(n, *vertices);
}

BuildOptions ExperimentConfig::build_options() const {
  BuildOptions o;
  o.log_tol = std::log(quad_tol);
  o.n_radial = quad_radial;
  o.n_angular = quad_angular;
  return o;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second) throw ConfigError("duplicate key " + key);
  }

  std::string vertex_text;
  for (const auto& [key, val] : kv) {
    if (key == "weight.family") {
      cfg.family = val;
    } else if (key == "weight.params") {
      cfg.params.clear();
      for (const auto& t : tokens(val)) cfg.params.push_back(parse_double(key, t));
    } else if (key == "space.n") {
      cfg.n = parse_int<int>(key, val);
    } else if (key == "space.k") {
      cfg.ks.clear();
      for (const auto& t : tokens(val)) cfg.ks.push_back(parse_int<int>(key, t));
    } else if (key == "quad.radial") {
      cfg.quad_radial = parse_int<int>(key, val);
    } else if (key == "quad.angular") {
      cfg.quad_angular = parse_int<int>(key, val);
    } else if (key == "quad.tol") {
      cfg.quad_tol = parse_double(key, val);
    } else if (key == "grid.extent") {
      cfg.grid_extent = parse_double(key, val);
    } else if (key == "grid.res") {
      cfg.grid_res = parse_int<int>(key, val);
    } else if (key == "polytope.vertices") {
      vertex_text = val;
    } else if (key == "stochastic.batches") {
      cfg.batches = parse_int<int>(key, val);
    } else if (key == "stochastic.seed") {
      cfg.seed = parse_int<std::uint64_t>(key, val);
    } else if (key == "out.dir") {
      cfg.out_dir = val;
    } else if (key == "l1.target") {
      if (val != "self" && val != "equilibrium") throw ConfigError("l1.target must be 'self' or 'equilibrium'");
      cfg.l1_self = val == "self";
    } else {
      throw ConfigError("unknown key " + key);
    }
  }

  if (cfg.n != 1 && cfg.n != 2) throw ConfigError("space.n must be 1 or 2");
  if (cfg.ks.empty()) throw ConfigError("space.k needs at least one degree");
  std::sort(cfg.ks.begin(), cfg.ks.end());
  cfg.ks.erase(std::unique(cfg.ks.begin(), cfg.ks.end()), cfg.ks.end());
  if (cfg.ks.front() < 1) throw ConfigError("space.k entries must be positive");
  if (cfg.quad_radial < 0 || cfg.quad_angular < 0) throw ConfigError("quad node counts must be >= 0");
  if (!(cfg.quad_tol > 0.0 && cfg.quad_tol < 1.0)) throw ConfigError("quad.tol must lie in (0, 1)");
  if (!(cfg.grid_extent > 0.0)) throw ConfigError("grid.extent must be positive");
  if (cfg.grid_res < 64) throw ConfigError("grid.res must be at least 64");
  if (cfg.batches < 0) throw ConfigError("stochastic.batches must be >= 0");
  if (cfg.out_dir.empty()) throw ConfigError("out.dir must not be empty");
  try {
    cfg.weight();
    if (!vertex_text.empty()) {
      cfg.vertices = parse_vertices("polytope.vertices", vertex_text, cfg.n);
      cfg.polytope();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("failed reading config " + path.string());
  return parse_config(ss.str());
}

BergmanModel build_experiment_model(const ExperimentConfig& cfg, int k) {
  const auto delta = cfg.polytope();
  const Basis basis = delta ? lattice_basis(*delta, k) : monomial_basis(cfg.n, k);
  if (basis.size() == 0) throw Error("no lattice points of k * polytope at k = " + std::to_string(k));
  return build_model(cfg.weight(), basis, cfg.build_options());
}

std::optional<RadialEquilibrium> experiment_equilibrium(const ExperimentConfig& cfg) {
  const Weight w = cfg.weight();
  if (cfg.n != 1 || !w.is_radial()) return std::nullopt;
  const auto delta = cfg.polytope();
  if (!delta) return RadialEquilibrium::for_weight(w);
  const RadialGrid g = default_radial_grid(w, LeftMode::Punctured);
  return RadialEquilibrium(*w.radial_profile, polytope_equilibrium(g, *delta));
}

namespace {

SummaryRow summarize_with(const ExperimentConfig& cfg, const BergmanModel& m,
                          const std::optional<RadialEquilibrium>& eq) {
  SummaryRow row;
  row.k = m.k();
  row.dim = m.dim();
  row.dim_residual = dimension_residual(m);
  row.offdiag_mass = offdiag_mass(m, 0.3);

  if (const auto target = density_target(cfg, m, eq)) {
    if (m.n() == 1) {
      // Panels split at the contact radii so the target's jumps sit on panel ends.
      const double R = m.rule().truncation_radius;
      std::vector<double> breaks{0.0};
      if (eq)
        for (double t : eq->contact_breaks_t())
          if (t > 0.0 && t < R * R) breaks.push_back(t);
      breaks.push_back(R * R);
      const int span = m.basis().max_exponent() - std::min(m.basis().min_exponent(), 0);
      const QuadRule rule = polar_rule_panels(breaks, m.k() + 32, 4 * std::max(span, 1) + 8);
      row.l1_error = l1_error(m, *target, rule);
    } else {
      row.l1_error = l1_error(m, *target, m.rule());
    }
  }

  if (eq) {
    double worst = 0.0;
    for (const Point& z : plane_points(cfg)) {
      const double d = std::abs(log_kernel_potential(m, z) - eq->at(z));
      if (std::isfinite(d)) worst = std::max(worst, d);
    }
    row.sup_potential_error = worst;

    double mass = 0.0;
    for (auto [lo, hi] : eq->contact_intervals()) {
      if (lo <= eq->envelope().v.front()) lo = -40.0;
      mass += band_mass_fraction(m, lo, hi);
    }
    row.mass_on_D = mass;
  }
  return row;
}

void write_grids(const ExperimentConfig& cfg, const BergmanModel& m, const std::optional<RadialEquilibrium>& eq,
                 const std::filesystem::path& dir) {
  const auto target = density_target(cfg, m, eq);
  const double scale = kn(m);
  std::string dens = "re,im,Bk_over_kn,target_density,abs_diff\n";
  std::string pot = "re,im,log_kernel_potential,phi_e_oracle,abs_err\n";
  for (const Point& z : plane_points(cfg)) {
    const std::string xy = format_number(z[0].real()) + "," + format_number(z[0].imag()) + ",";
    const double b = bergman_function(m, z) / scale;
    dens += xy + format_number(b);
    if (target) {
      const double t = (*target)(z);
      dens += "," + format_number(t) + "," + format_number(std::abs(b - t)) + "\n";
    } else {
      dens += ",,\n";
    }
    const double lk = log_kernel_potential(m, z);
    pot += xy + format_number(lk);
    if (eq) {
      const double pe = eq->at(z);
      pot += "," + format_number(pe) + "," + format_number(std::abs(lk - pe)) + "\n";
    } else {
      pot += ",,\n";
    }
  }
  write_file(dir / "bergman_density.csv", dens);
  write_file(dir / "potential.csv", pot);
}

void write_sample_file(const ExperimentConfig& cfg, const BergmanModel& m, const std::filesystem::path& dir) {
  std::string out = "re,im,batch,kind\n";
  const auto emit = [&out](const std::vector<SampleBatch>& batches, const char* kind) {
    for (const auto& b : batches)
      for (const cplx& z : b.points)
        out += format_number(z.real()) + "," + format_number(z.imag()) + "," + std::to_string(b.batch) + "," + kind + "\n";
  };
  emit(sample_batches(m, SampleKind::DppEigenvalues, cfg.seed, cfg.batches), "dpp");
  emit(sample_batches(m, SampleKind::PolynomialZeros, cfg.seed, cfg.batches), "zeros");
  write_file(dir / "samples.csv", out);
}

}  // namespace

SummaryRow summarize(const ExperimentConfig& cfg, const BergmanModel& m) {
  return summarize_with(cfg, m, experiment_equilibrium(cfg));
}

std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg) {
  const auto eq = experiment_equilibrium(cfg);
  make_dir(cfg.out_dir);
  std::vector<SummaryRow> rows;
  for (int k : cfg.ks) {
    const BergmanModel m = build_experiment_model(cfg, k);
    const auto dir = k_dir(cfg, k);
    write_grids(cfg, m, eq, dir);
    if (cfg.batches > 0 && cfg.n == 1) write_sample_file(cfg, m, dir);
    rows.push_back(summarize_with(cfg, m, eq));
  }
  std::string csv = "k,dim,dim_residual,l1_error,sup_potential_error,offdiag_mass_eta0p3,mass_on_D\n";
  for (const auto& r : rows)
    csv += std::to_string(r.k) + "," + std::to_string(r.dim) + "," + format_number(r.dim_residual) + "," +
           field(r.l1_error) + "," + field(r.sup_potential_error) + "," + format_number(r.offdiag_mass) + "," +
           field(r.mass_on_D) + "\n";
  write_file(std::filesystem::path(cfg.out_dir) / "summary.csv", csv);
  return rows;
}

std::string convergence_table(const ExperimentConfig& cfg) {
  const auto eq = experiment_equilibrium(cfg);
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%6s %14s %14s %14s %14s\n", "k", "sup_err", "err*k/ln(k)", "l1_error", "offdiag");
  out += buf;
  auto cell = [](const std::optional<double>& x) {
    char b[32];
    if (x)
      std::snprintf(b, sizeof b, "%14.6e", *x);
    else
      std::snprintf(b, sizeof b, "%14s", "-");
    return std::string(b);
  };
  std::vector<double> lnk, lnb;
  for (int k : cfg.ks) {
    const BergmanModel m = build_experiment_model(cfg, k);
    const SummaryRow r = summarize_with(cfg, m, eq);
    std::optional<double> scaled;
    if (r.sup_potential_error && k > 1) scaled = *r.sup_potential_error * k / std::log(static_cast<double>(k));
    std::snprintf(buf, sizeof buf, "%6d ", k);
    out += buf + cell(r.sup_potential_error) + " " + cell(scaled) + " " + cell(r.l1_error) + " " +
           cell(r.offdiag_mass) + "\n";
    lnk.push_back(std::log(static_cast<double>(k)));
    lnb.push_back(log_bergman_function(m, Point{}));
  }
  if (cfg.family == "hoelder" && lnk.size() >= 2) {
    std::snprintf(buf, sizeof buf, "fitted slope of ln B_k(0) vs ln k: %.6f\n", fitted_slope(lnk, lnb));
    out += buf;
  }
  return out;
}

void write_samples(const ExperimentConfig& cfg) {
  if (cfg.n != 1) throw Error("sampling is implemented for n = 1");
  if (cfg.batches < 1) throw ConfigError("stochastic.batches must be positive for sampling");
  make_dir(cfg.out_dir);
  for (int k : cfg.ks) write_sample_file(cfg, build_experiment_model(cfg, k), k_dir(cfg, k));
}

void write_envelope(const ExperimentConfig& cfg) {
  const auto eq = experiment_equilibrium(cfg);
  if (!eq) throw Error("envelope mode needs a radial weight with n = 1");
  const EnvelopeResult& env = eq->envelope();
  std::string out = "v,phi,phi_e,slope,contact\n";
  for (std::size_t i = 0; i < env.v.size(); ++i)
    out += format_number(env.v[i]) + "," + format_number(env.phi[i]) + "," + format_number(env.phi_e[i]) + "," +
           format_number(env.slopes[i]) + "," + (env.contact[i] ? "1" : "0") + "\n";
  make_dir(cfg.out_dir);
  write_file(std::filesystem::path(cfg.out_dir) / "envelope.csv", out);
}

}  // namespace pluri
