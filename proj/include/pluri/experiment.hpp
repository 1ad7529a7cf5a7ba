#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pluri/bergman.hpp"
#include "pluri/equilibrium.hpp"
#include "pluri/polytope.hpp"

namespace pluri {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Flat `key = value` configuration. Lines starting with '#' are comments.
///
///   weight.family      builtin family name
///   weight.params      numbers separated by commas or spaces
///   space.n            1 or 2
///   space.k            list of degrees, stored ascending
///   quad.radial        radial nodes per rule (0 = sized from k)
///   quad.angular       angular nodes per rule (0 = sized from k)
///   quad.tol           relative tail tolerance of the integration window
///   grid.extent        plane grid spans [-extent, extent]^2
///   grid.res           points per side, at least 64
///   polytope.vertices  "a; b" (n = 1) or "x y; x y; ..." (n = 2)
///   stochastic.batches sample batches per k (0 = none)
///   stochastic.seed    unsigned seed
///   out.dir            output directory
///   l1.target          "equilibrium" (default) or "self"
struct ExperimentConfig {
  std::string family = "gaussian";
  std::vector<double> params;
  int n = 1;
  std::vector<int> ks{16};
  int quad_radial = 0;
  int quad_angular = 0;
  double quad_tol = 2.8946403116483e-20;  // e^-45
  double grid_extent = 2.0;
  int grid_res = 101;
  std::optional<std::vector<Vec2>> vertices;
  int batches = 0;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool l1_self = false;

  Weight weight() const;
  std::optional<Polytope> polytope() const;
  BuildOptions build_options() const;
};

ExperimentConfig parse_config(const std::string& text);
/// Throws IoError when the file cannot be read, ConfigError when it does not parse.
ExperimentConfig load_config(const std::filesystem::path& path);

/// One summary.csv row. Empty optionals are written as empty fields.
struct SummaryRow {
  int k = 0;
  int dim = 0;
  double dim_residual = 0.0;
  std::optional<double> l1_error;
  std::optional<double> sup_potential_error;
  double offdiag_mass = 0.0;
  std::optional<double> mass_on_D;
};

/// Model for one k: lattice basis when a polytope is configured, else all
/// monomials of degree < k.
BergmanModel build_experiment_model(const ExperimentConfig& cfg, int k);

/// Radial equilibrium used as oracle, when the weight admits one (n = 1 radial).
std::optional<RadialEquilibrium> experiment_equilibrium(const ExperimentConfig& cfg);

SummaryRow summarize(const ExperimentConfig& cfg, const BergmanModel& m);

/// Writes the per-k CSVs under out.dir/k<k>/ and out.dir/summary.csv.
std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg);

/// Rows k, sup error, sup error * k / ln k, l1 error, off-diagonal mass; for the
/// hoelder family a trailing line with the fitted slope of ln B_k(0) against ln k.
std::string convergence_table(const ExperimentConfig& cfg);

/// Writes out.dir/k<k>/samples.csv with determinantal and zero samples.
void write_samples(const ExperimentConfig& cfg);

/// Writes out.dir/envelope.csv: v, phi, phi_e, slope, contact.
void write_envelope(const ExperimentConfig& cfg);

/// printf "%.17g": parses back to the same double.
std::string format_number(double x);

}  // namespace pluri
