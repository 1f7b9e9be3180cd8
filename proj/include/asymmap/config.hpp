#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "asymmap/ensembles.hpp"
#include "asymmap/errors.hpp"
#include "asymmap/model.hpp"
#include "asymmap/replica.hpp"
#include "asymmap/simulate.hpp"
#include "asymmap/sweep.hpp"

namespace asymmap {

/// Malformed or inconsistent configuration. `path` is the JSON field path
/// ("model.blocks[1].fraction"); `line` is set for syntax errors.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& message, std::size_t line = 0);
  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

struct EnsembleConfig {
  EnsembleKind kind = EnsembleKind::MarcenkoPastur;
  double alpha = 0.5;
  std::string eigenvalues_file;     ///< as written in the config
  std::vector<double> eigenvalues;  ///< inline list, or the loaded file
  bool operator==(const EnsembleConfig&) const = default;
};

struct TuneConfig {
  bool enabled = false;
  double log10_lo = -6.0;
  double log10_hi = 2.0;
  std::size_t prescan_points = 17;
  bool warm_start = false;
  bool operator==(const TuneConfig&) const = default;
};

struct SolverConfig {
  double damping = 0.5;
  double min_damping = 0.05;
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  std::optional<double> init_chi;
  std::optional<double> init_p;
  bool multi_start = false;
  std::size_t quadrature_nodes = 400;
  bool operator==(const SolverConfig&) const = default;
};

struct SweepConfig {
  std::string axis = "c";
  std::vector<double> grid;
  std::vector<std::size_t> c_blocks;
  double mse0_db = -25.0;
  double inv_alpha_lo = 1.0;
  double inv_alpha_hi = 64.0;
  double tolerance = 1e-3;
  std::size_t prescan_points = 8;
  bool operator==(const SweepConfig&) const = default;
};

struct SimulateConfig {
  std::size_t n = 2000;
  std::size_t trials = 20;
  SolverKind solver = SolverKind::Ridge;
  std::uint64_t seed = 1;
  std::size_t decoupled_samples = 1000000;
  std::size_t max_iter = 100000;
  double mse_relative = 0.02;
  double mse_sigmas = 3.0;
  double tv = 0.05;
  bool operator==(const SimulateConfig&) const = default;
};

struct OutputConfig {
  std::string path;            ///< empty: stdout
  std::string histograms_dir;  ///< empty: no histogram CSVs
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  SignalModel model;
  std::vector<PenaltySpec> penalties;
  EnsembleConfig ensemble;
  std::optional<double> lambda;
  TuneConfig tune;
  std::vector<DistortionSpec> distortions{{DistortionKind::SquaredError}};
  SolverConfig solver;
  std::optional<SweepConfig> sweep;
  std::optional<SimulateConfig> simulate;
  OutputConfig output;
  bool operator==(const RunConfig&) const = default;

  MatrixEnsemble make_ensemble() const;
  SolveOptions solve_options() const;
  TuneOptions tune_options() const;
  RateOptions rate_options() const;
  ValidationSpec validation_spec() const;
};

/// Parses and validates a config document. Relative file references resolve
/// against `base_dir`.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config: parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace asymmap
