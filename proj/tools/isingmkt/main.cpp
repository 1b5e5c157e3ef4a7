// isingmkt: simulate coupled spin-lattice markets and analyze their returns.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "isingmkt/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace isingmkt::app;

  CLI::App app{"Multi-asset Ising market simulator and spectral analysis pipeline", "isingmkt"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string preset_name = "paper";
  std::optional<std::string> out_dir;
  app.add_option("--config", config_path, "Sectioned key/value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed (overrides model.seed)");
  app.add_option("--threads", threads, "Worker threads (0 = all hardware threads)");
  app.add_option("--preset", preset_name, "Base parameter set: paper or desk")
      ->check(CLI::IsMember({"paper", "desk"}));
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");

  std::string panel_path;
  bool dry_run = false;

  auto* gen = app.add_subcommand("generate-coupling", "Generate and validate the cross-asset coupling matrix");
  auto* sim = app.add_subcommand("simulate", "Run the spin market and write returns.csv");
  auto* ana = app.add_subcommand("analyze", "ACF, autocorrelation times, moments, histogram, volatility index");
  auto* xc = app.add_subcommand("xcorr", "Write rolling correlation matrices for both modes");
  auto* spe = app.add_subcommand("spectra", "CRF, IPR and Marchenko-Pastur outputs for both modes");
  auto* pipe = app.add_subcommand("pipeline", "generate-coupling, simulate, analyze and spectra in one run");
  auto* val = app.add_subcommand("validate", "Validate the configuration and print it");
  for (auto* sc : {ana, xc, spe}) {
    sc->add_option("--panel", panel_path, "Return panel CSV (default <out>/returns.csv)");
  }
  pipe->add_flag("--dry-run", dry_run, "Validate only; run nothing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  ExperimentConfig cfg;
  try {
    cfg = preset(parse_preset(preset_name));
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    if (seed) cfg.model.master_seed = *seed;
    if (threads) cfg.threads = *threads;
    if (out_dir) cfg.output_dir = *out_dir;
    const bool simulating = sim->parsed() || pipe->parsed() || val->parsed();
    validate_config(cfg, simulating);
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kExitConfig;
  }

  if (val->parsed() || (pipe->parsed() && dry_run)) {
    std::cout << to_text(cfg);
    fmt::print(std::cerr, "config ok (hash {})\n", config_hash(cfg));
    return kExitOk;
  }

  try {
    Context ctx(cfg, std::cerr);
    if (pipe->parsed()) {
      cmd_pipeline(ctx);
      return kExitOk;
    }
    StageRecord rec;
    if (gen->parsed()) rec = cmd_generate_coupling(ctx);
    if (sim->parsed()) rec = cmd_simulate(ctx);
    if (ana->parsed()) rec = cmd_analyze(ctx, panel_path);
    if (xc->parsed()) rec = cmd_xcorr(ctx, panel_path);
    if (spe->parsed()) rec = cmd_spectra(ctx, panel_path);
    record_stage(ctx, rec);
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
