#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "isingmkt/coupling.hpp"
#include "isingmkt/panel.hpp"
#include "isingmkt/thread_pool.hpp"

namespace isingmkt::app {

inline constexpr const char* kToolVersion = "0.1.0";

struct StageRecord {
  std::string name;
  std::string status = "ok";  // "ok" or "failed"
  std::vector<std::string> files;
  double seconds = 0.0;
  std::string message;
  double sweeps_per_second = 0.0;  // simulate only
};

struct RunManifest {
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string tool_version = kToolVersion;
  std::vector<StageRecord> stages;
  std::string failed_stage;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

/// Shared state of one CLI invocation: the resolved config, the worker
/// pool all modules draw from, and the stream progress goes to.
class Context {
public:
  Context(ExperimentConfig cfg, std::ostream& log);

  const ExperimentConfig& config() const noexcept { return cfg_; }
  ThreadPool& pool() noexcept { return *pool_; }
  std::ostream& log() noexcept { return log_; }

  /// `<output_dir>/<name>`
  std::string path(const std::string& name) const;

private:
  ExperimentConfig cfg_;
  std::unique_ptr<ThreadPool> pool_;
  std::ostream& log_;
};

/// Loads coupling.path when set, otherwise generates from the spec.
CouplingMatrix resolve_coupling(const ExperimentConfig& cfg);

StageRecord cmd_generate_coupling(Context& ctx);
StageRecord cmd_simulate(Context& ctx);
/// `panel_path` empty means `<out>/returns.csv`.
StageRecord cmd_analyze(Context& ctx, const std::string& panel_path = {});
StageRecord cmd_xcorr(Context& ctx, const std::string& panel_path = {});
StageRecord cmd_spectra(Context& ctx, const std::string& panel_path = {});

/// generate-coupling, simulate, analyze, spectra. Stops at the first
/// failing stage; the manifest records where. Rethrows that failure after
/// the manifest is written.
RunManifest cmd_pipeline(Context& ctx);

/// Merges one stage into `<out>/manifest.json` (replacing a previous
/// record of the same stage when the config hash matches).
void record_stage(Context& ctx, const StageRecord& stage);

}  // namespace isingmkt::app
