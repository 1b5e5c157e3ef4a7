#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "isingmkt/coupling.hpp"
#include "isingmkt/market.hpp"
#include "isingmkt/series.hpp"
#include "isingmkt/xcorr.hpp"

namespace isingmkt::app {

/// Raised for anything wrong with the configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Preset { Paper, Desk };

Preset parse_preset(const std::string& name);

struct AnalysisParams {
  std::size_t max_lag = 500;
  std::size_t top_m = 5;
  HistogramSpec histogram{};
  double tau_c = 5.0;
};

struct ExperimentConfig {
  ModelParams model{};
  CouplingSpec coupling{};
  /// When set, the coupling matrix is loaded from here instead of generated.
  std::optional<std::string> coupling_path;
  /// When unset, derived from the master seed.
  std::optional<std::uint64_t> coupling_seed;
  WindowSpec window{};
  AnalysisParams analysis{};
  std::string output_dir = "out";
  bool write_csv = true;
  bool write_json = true;
  std::size_t threads = 0;  // 0: all hardware threads

  /// Coupling spec with n and seed resolved.
  CouplingSpec resolved_coupling() const;
  std::size_t resolved_threads() const;
};

/// Full-scale setup: 300 assets on 100 x 100 lattices, M = 400.
ExperimentConfig paper_preset();
/// Laptop-scale setup: 20 assets on 32 x 32 lattices, 1e4 sweeps, M = 200.
ExperimentConfig desk_preset();
ExperimentConfig preset(Preset p);

/// Applies a sectioned key/value file on top of `base`. Unknown sections
/// or keys are rejected.
ExperimentConfig load_config(const std::string& path, ExperimentConfig base);
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base);

/// Checks every downstream precondition that can be known before running.
/// `needs_simulation`: the collect length is the series length to check
/// windows and lags against. Throws ConfigError.
void validate_config(const ExperimentConfig& cfg, bool needs_simulation = true);

/// Canonical text form; parse_config(to_text(c), any) reproduces c.
std::string to_text(const ExperimentConfig& cfg);

/// FNV-1a 64 of to_text(cfg), as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace isingmkt::app
