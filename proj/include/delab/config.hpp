#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "delab/dynamics.hpp"

namespace delab {

/// Parse or validation failure with a 1-based source position.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, int column, const std::string& message);
  int line, column;
  std::string message;
};

/// One requested audit and its parameters. Unused parameters are ignored by
/// audits that do not read them.
struct AuditRequest {
  std::string id;     // canonical id
  std::string alias;  // as written
  double R = 0.75;
  double eps = 0.3;
  Point x0{0, 0};
  std::optional<std::size_t> ensemble_size;  // default depends on the audit
  std::optional<std::uint64_t> seed;
  double delta0 = 1e-4;
  std::array<int, 2> perturbation_mode{1, 2};
  std::vector<double> radii;  // empty: audit default
  std::size_t pairs = 100;
  std::vector<double> mus{0.4, 0.2, 0.1};
  int kernel_n = 256;
  std::size_t samples = 10;

  bool needs_seed() const;
  bool needs_checkpoints() const;
};

enum class OutputFormat { csv, ndjson, both };

struct ExperimentConfig {
  SimulationConfig simulation;
  std::vector<AuditRequest> audits;
  std::string output_dir = "delab_out";
  OutputFormat formats = OutputFormat::both;
  bool emit_plots = false;
};

/// Parses the TOML-style schema documented in README.md. Applies defaults,
/// rejects unknown keys and validates the simulation; throws ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
/// Reads the file first; an unreadable file throws std::ios_base::failure.
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& cfg);

std::string to_string(OutputFormat f);

}  // namespace delab
