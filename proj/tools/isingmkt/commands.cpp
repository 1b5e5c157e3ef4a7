#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "isingmkt/csv.hpp"
#include "isingmkt/error.hpp"
#include "isingmkt/market.hpp"
#include "isingmkt/series.hpp"
#include "isingmkt/spectra.hpp"
#include "isingmkt/xcorr.hpp"
#include "json.hpp"

namespace isingmkt::app {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

void write_config_snapshot(Context& ctx) {
  write_text(ctx.path("config.ini"), to_text(ctx.config()));
}

ReturnPanel load_input_panel(Context& ctx, const std::string& panel_path) {
  const std::string path = panel_path.empty() ? ctx.path("returns.csv") : panel_path;
  if (!fs::exists(path)) throw Error("return panel '" + path + "' not found; run simulate first");
  if (fs::exists(path + ".partial")) {
    throw Error("return panel '" + path + "' comes from an interrupted run (partial marker present)");
  }
  return load_panel_csv(path);
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// NaN-safe JSON number.
ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

}  // namespace

std::string RunManifest::to_json() const {
  ojson j;
  j["config_hash"] = config_hash;
  j["master_seed"] = master_seed;
  j["tool_version"] = tool_version;
  auto& arr = j["stages"] = ojson::array();
  for (const auto& s : stages) {
    ojson e;
    e["name"] = s.name;
    e["status"] = s.status;
    e["files"] = s.files;
    e["seconds"] = s.seconds;
    if (!s.message.empty()) e["message"] = s.message;
    if (s.sweeps_per_second > 0) e["sweeps_per_second"] = s.sweeps_per_second;
    arr.push_back(std::move(e));
  }
  j["failed_stage"] = failed_stage.empty() ? ojson(nullptr) : ojson(failed_stage);
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RunManifest m;
  m.config_hash = j.at("config_hash").get<std::string>();
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.tool_version = j.at("tool_version").get<std::string>();
  for (const auto& e : j.at("stages")) {
    StageRecord s;
    s.name = e.at("name").get<std::string>();
    s.status = e.at("status").get<std::string>();
    s.files = e.at("files").get<std::vector<std::string>>();
    s.seconds = e.at("seconds").get<double>();
    if (e.contains("message")) s.message = e["message"].get<std::string>();
    if (e.contains("sweeps_per_second")) s.sweeps_per_second = e["sweeps_per_second"].get<double>();
    m.stages.push_back(std::move(s));
  }
  if (!j.at("failed_stage").is_null()) m.failed_stage = j["failed_stage"].get<std::string>();
  return m;
}

Context::Context(ExperimentConfig cfg, std::ostream& log)
    : cfg_(std::move(cfg)), pool_(std::make_unique<ThreadPool>(cfg_.resolved_threads())), log_(log) {
  fs::create_directories(cfg_.output_dir);
}

std::string Context::path(const std::string& name) const { return (fs::path(cfg_.output_dir) / name).string(); }

CouplingMatrix resolve_coupling(const ExperimentConfig& cfg) {
  if (cfg.coupling_path) {
    CouplingMatrix g = load_coupling(*cfg.coupling_path);
    if (g.size() != cfg.model.N) {
      throw DimensionMismatch(fmt::format("coupling file '{}' is {}x{} but model.N is {}", *cfg.coupling_path,
                                          g.size(), g.size(), cfg.model.N));
    }
    return g;
  }
  return generate_coupling(cfg.resolved_coupling());
}

void record_stage(Context& ctx, const StageRecord& stage) {
  const std::string path = ctx.path("manifest.json");
  RunManifest m;
  const std::string hash = config_hash(ctx.config());
  if (fs::exists(path)) {
    try {
      std::ifstream in(path);
      std::stringstream ss;
      ss << in.rdbuf();
      m = RunManifest::from_json(ss.str());
    } catch (const std::exception&) {
      m = RunManifest{};
    }
    if (m.config_hash != hash) m = RunManifest{};
  }
  m.config_hash = hash;
  m.master_seed = ctx.config().model.master_seed;
  std::erase_if(m.stages, [&](const StageRecord& s) { return s.name == stage.name; });
  m.stages.push_back(stage);
  m.failed_stage = stage.status == "failed" ? stage.name : "";
  write_text(path, m.to_json());
}

StageRecord cmd_generate_coupling(Context& ctx) {
  Stopwatch clock;
  StageRecord rec;
  rec.name = "generate-coupling";
  write_config_snapshot(ctx);

  const CouplingMatrix gamma = resolve_coupling(ctx.config());
  const auto diag = validate_coupling(gamma);

  rec.files.push_back(ctx.path("coupling.csv"));
  save_coupling_dense(rec.files.back(), gamma);
  rec.files.push_back(ctx.path("coupling_sparse.txt"));
  save_coupling_sparse(rec.files.back(), gamma);
  if (ctx.config().write_json) {
    rec.files.push_back(ctx.path("coupling_diagnostics.json"));
    write_text(rec.files.back(), diagnostics_json(diag));
  }
  fmt::print(ctx.log(), "generate-coupling: n={} nonzeros={} mean={:.5f} diagonal_zero={}\n", diag.n,
             diag.nonzeros, diag.mean_nonzero, diag.diagonal_zero);
  if (!diag.ok()) throw Error("generated coupling failed validation");
  rec.seconds = clock.seconds();
  return rec;
}

StageRecord cmd_simulate(Context& ctx) {
  Stopwatch clock;
  StageRecord rec;
  rec.name = "simulate";
  write_config_snapshot(ctx);
  const auto& cfg = ctx.config();

  const CouplingMatrix gamma = resolve_coupling(cfg);
  const std::string out_path = ctx.path("returns.csv");
  const std::string marker = out_path + ".partial";
  write_text(marker, "simulation in progress\n");

  const std::size_t total = cfg.model.therm_sweeps + cfg.model.collect_sweeps;
  const std::size_t report_every = std::max<std::size_t>(1, total / 20);
  fmt::print(ctx.log(), "simulate: L={} N={} sweeps={} ({} discarded), threads={}\n", cfg.model.L, cfg.model.N,
             total, cfg.model.therm_sweeps, ctx.pool().size());

  Stopwatch sim_clock;
  const ReturnPanel panel =
      run_simulation(cfg.model, gamma, &ctx.pool(), [&](std::size_t s, const MarketState&) {
        if ((s + 1) % report_every == 0 || s + 1 == total) {
          fmt::print(ctx.log(), "  sweep {}/{} ({:.0f} sweeps/s)\n", s + 1, total,
                     static_cast<double>(s + 1) / std::max(sim_clock.seconds(), 1e-9));
        }
      });
  const double sim_seconds = sim_clock.seconds();
  rec.sweeps_per_second = static_cast<double>(total) / std::max(sim_seconds, 1e-9);

  save_panel_csv(out_path, panel);
  fs::remove(marker);
  rec.files.push_back(out_path);
  fmt::print(ctx.log(), "simulate: wrote {}x{} panel, {:.1f} sweeps/s\n", panel.assets(), panel.steps(),
             rec.sweeps_per_second);
  rec.seconds = clock.seconds();
  return rec;
}

namespace {

struct SeriesKind {
  const char* name;
  ReturnPanel panel;
};

}  // namespace

StageRecord cmd_analyze(Context& ctx, const std::string& panel_path) {
  Stopwatch clock;
  StageRecord rec;
  rec.name = "analyze";
  write_config_snapshot(ctx);
  const auto& cfg = ctx.config();
  const ReturnPanel panel = load_input_panel(ctx, panel_path);
  const std::size_t n = panel.assets();
  const std::size_t t_len = panel.steps();
  if (cfg.analysis.max_lag >= t_len) {
    throw ConfigError(fmt::format("analysis.max_lag = {} must be below the panel length {}", cfg.analysis.max_lag,
                                  t_len));
  }

  std::vector<SeriesKind> kinds{{"ret", panel}, {"abs", panel.absolute()}, {"sq", panel.squared()}};

  ojson moments;
  moments["assets"] = n;
  moments["steps"] = t_len;
  moments["noise_band"] = 1.96 / std::sqrt(static_cast<double>(t_len));

  // Degenerate assets: constant raw returns. Their |R| and R^2 may still vary
  // (alternating sign) but the asset is excluded everywhere for consistency.
  std::vector<std::size_t> degenerate;
  std::vector<std::size_t> live;
  for (std::size_t k = 0; k < n; ++k) {
    const auto r = panel.row(k);
    bool constant = true;
    for (double v : r) constant = constant && v == r.front();
    (constant ? degenerate : live).push_back(k);
  }
  moments["degenerate_assets"] = degenerate;
  for (auto k : degenerate) fmt::print(ctx.log(), "analyze: asset {} is degenerate (constant returns)\n", k);

  auto subset = [&](const ReturnPanel& p) {
    ReturnPanel s(live.size(), t_len);
    for (std::size_t i = 0; i < live.size(); ++i) {
      s.values().row(static_cast<Eigen::Index>(i)) = p.values().row(static_cast<Eigen::Index>(live[i]));
    }
    return s;
  };

  // ACF per kind, averaged over the live assets.
  std::vector<AcfCurve> curves;
  for (const auto& kind : kinds) {
    const ReturnPanel sub = subset(kind.panel);
    AcfCurve c;
    if (!live.empty()) {
      try {
        c = mean_acf(sub, cfg.analysis.max_lag);
      } catch (const DegenerateSeries&) {
        c = AcfCurve{};
      }
    }
    curves.push_back(std::move(c));
  }

  // Integrated autocorrelation times per asset and kind.
  ojson tau_failures = ojson::array();
  std::vector<std::vector<AutocorrTime>> taus(n, std::vector<AutocorrTime>(kinds.size(),
                                                                            AutocorrTime{nan(), nan(), 0}));
  std::vector<std::string> failures(n * kinds.size());
  ctx.pool().parallel_for(live.size(), [&](std::size_t i) {
    const std::size_t k = live[i];
    for (std::size_t q = 0; q < kinds.size(); ++q) {
      try {
        taus[k][q] = integrated_autocorr_time(kinds[q].panel.row(k), cfg.analysis.tau_c);
      } catch (const Error& e) {
        failures[k * kinds.size() + q] = e.what();
      }
    }
  });
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t q = 0; q < kinds.size(); ++q) {
      if (!failures[k * kinds.size() + q].empty()) {
        tau_failures.push_back({{"asset", k}, {"series", kinds[q].name}, {"error", failures[k * kinds.size() + q]}});
      }
    }
  }

  // Moments of normalized returns.
  ojson pooled = nullptr;
  ojson per_asset = ojson::array();
  Histogram hist;
  bool have_hist = false;
  if (!live.empty()) {
    const ReturnPanel z = normalize_returns(subset(panel));
    const auto ps = distribution_stats(z, true, cfg.analysis.histogram).front();
    pooled = {{"count", ps.count},
              {"mean", num(ps.mean)},
              {"variance", num(ps.variance)},
              {"skewness", num(ps.skewness)},
              {"kurtosis", num(ps.kurtosis)},
              {"underflow", ps.hist.underflow},
              {"overflow", ps.hist.overflow}};
    hist = ps.hist;
    have_hist = true;
    const auto each = distribution_stats(z, false, cfg.analysis.histogram);
    for (std::size_t i = 0; i < live.size(); ++i) {
      per_asset.push_back({{"asset", live[i]},
                           {"skewness", num(each[i].skewness)},
                           {"kurtosis", num(each[i].kurtosis)},
                           {"tau_abs", num(taus[live[i]][1].tau)},
                           {"tau_abs_error", num(taus[live[i]][1].error)}});
    }
  }
  moments["pooled"] = pooled;
  moments["per_asset"] = per_asset;
  moments["tau_failures"] = tau_failures;

  if (cfg.write_csv) {
    {
      rec.files.push_back(ctx.path("acf.csv"));
      auto out = open_out(rec.files.back());
      csv::Writer w(out);
      w.header({"lag", "rho_ret", "rho_abs", "rho_sq"});
      const bool ok = std::all_of(curves.begin(), curves.end(), [](const AcfCurve& c) { return !c.rho.empty(); });
      if (ok) {
        for (std::size_t l = 0; l <= cfg.analysis.max_lag; ++l) {
          w.row(static_cast<long long>(l), {curves[0].rho[l], curves[1].rho[l], curves[2].rho[l]});
        }
      }
    }
    {
      rec.files.push_back(ctx.path("tau.csv"));
      auto out = open_out(rec.files.back());
      csv::Writer w(out);
      w.header({"asset", "tau_ret", "err_ret", "tau_abs", "err_abs", "tau_sq", "err_sq"});
      for (auto k : live) {
        w.row(static_cast<long long>(k), {taus[k][0].tau, taus[k][0].error, taus[k][1].tau, taus[k][1].error,
                                          taus[k][2].tau, taus[k][2].error});
      }
    }
    {
      rec.files.push_back(ctx.path("histogram.csv"));
      auto out = open_out(rec.files.back());
      csv::Writer w(out);
      w.header({"bin_center", "density"});
      if (have_hist) {
        const auto dens = hist.density();
        for (std::size_t b = 0; b < dens.size(); ++b) w.row({hist.centers[b], dens[b]});
      }
    }
    {
      rec.files.push_back(ctx.path("volatility_index.csv"));
      auto out = open_out(rec.files.back());
      csv::Writer w(out);
      w.header({"t", "I"});
      const auto vi = volatility_index(panel);
      for (std::size_t t = 0; t < vi.size(); ++t) w.row(static_cast<long long>(t), {vi[t]});
    }
  }
  if (cfg.write_json) {
    rec.files.push_back(ctx.path("moments.json"));
    write_text(rec.files.back(), moments.dump(2) + "\n");
  }
  if (!pooled.is_null()) {
    fmt::print(ctx.log(), "analyze: pooled kurtosis {:.3f}, {} degenerate assets\n",
               pooled["kurtosis"].is_null() ? nan() : pooled["kurtosis"].get<double>(), degenerate.size());
  } else {
    fmt::print(ctx.log(), "analyze: every asset is degenerate; statistics are empty\n");
  }
  rec.seconds = clock.seconds();
  return rec;
}

namespace {

void check_window_against_panel(const ExperimentConfig& cfg, const ReturnPanel& panel) {
  if (cfg.window.window > panel.steps()) {
    throw ConfigError(fmt::format("window.M = {} exceeds the panel length {}", cfg.window.window, panel.steps()));
  }
  if (cfg.analysis.top_m > panel.assets()) {
    throw ConfigError(fmt::format("analysis.top_m = {} exceeds the panel's {} assets", cfg.analysis.top_m,
                                  panel.assets()));
  }
}

}  // namespace

StageRecord cmd_xcorr(Context& ctx, const std::string& panel_path) {
  Stopwatch clock;
  StageRecord rec;
  rec.name = "xcorr";
  write_config_snapshot(ctx);
  const ReturnPanel panel = load_input_panel(ctx, panel_path);
  check_window_against_panel(ctx.config(), panel);
  for (auto mode : {CorrelationMode::Return, CorrelationMode::AbsoluteReturn}) {
    WindowSpec spec = ctx.config().window;
    spec.mode = mode;
    const auto windows = rolling_correlations(panel, spec, &ctx.pool());
    const auto files = save_correlations(ctx.path("xcorr_" + std::string(to_string(mode))), windows, spec);
    rec.files.insert(rec.files.end(), files.begin(), files.end());
    std::size_t flagged = 0;
    for (const auto& w : windows) flagged += w.degenerate();
    fmt::print(ctx.log(), "xcorr: {} mode, {} windows, {} degenerate\n", to_string(mode), windows.size(), flagged);
  }
  rec.seconds = clock.seconds();
  return rec;
}

StageRecord cmd_spectra(Context& ctx, const std::string& panel_path) {
  Stopwatch clock;
  StageRecord rec;
  rec.name = "spectra";
  write_config_snapshot(ctx);
  const auto& cfg = ctx.config();
  const ReturnPanel panel = load_input_panel(ctx, panel_path);
  check_window_against_panel(cfg, panel);
  const std::size_t n = panel.assets();

  ojson flags;
  std::optional<MpReference> mp;
  if (cfg.window.window > n) {
    mp = mp_reference(cfg.window.window, n);
    flags["mp"] = {{"q", mp->q}, {"lambda_minus", mp->lambda_minus}, {"lambda_plus", mp->lambda_plus}};
  } else {
    flags["mp"] = nullptr;
    fmt::print(ctx.log(), "spectra: window M={} <= N={}, no Marchenko-Pastur reference\n", cfg.window.window, n);
  }

  std::size_t total_failures = 0;
  for (auto mode : {CorrelationMode::Return, CorrelationMode::AbsoluteReturn}) {
    WindowSpec spec = cfg.window;
    spec.mode = mode;
    const auto windows = rolling_correlations(panel, spec, &ctx.pool());
    const auto traj = spectral_trajectory(windows, cfg.analysis.top_m, spec.window, &ctx.pool());
    const std::string tag(to_string(mode));

    if (cfg.write_csv) {
      rec.files.push_back(ctx.path("crf_" + tag + ".csv"));
      save_crf_csv(rec.files.back(), traj);
      rec.files.push_back(ctx.path("ipr_" + tag + ".csv"));
      save_ipr_csv(rec.files.back(), traj);
      rec.files.push_back(ctx.path("scatter_" + tag + ".csv"));
      save_scatter_csv(rec.files.back(), traj);
    }

    ojson f;
    f["windows"] = windows.size();
    auto& fail = f["failures"] = ojson::array();
    for (const auto& e : traj.failures) fail.push_back({{"window_end", e.window_end}, {"message", e.message}});
    auto& deg = f["degenerate_windows"] = ojson::array();
    for (const auto& w : windows) {
      if (w.degenerate()) deg.push_back({{"window_end", w.window_end}, {"assets", w.degenerate_assets}});
    }
    auto& nu = f["non_unique"] = ojson::array();
    for (const auto& s : traj.windows) {
      for (std::size_t l = 0; l < traj.top_m; ++l) {
        if (s.non_unique[l]) nu.push_back({{"window_end", s.window_end}, {"l", l + 1}});
      }
    }
    flags[tag] = std::move(f);
    total_failures += traj.failures.size();
    fmt::print(ctx.log(), "spectra: {} mode, {} windows, {} failed\n", tag, windows.size(), traj.failures.size());
  }

  if (cfg.write_csv) {
    if (mp) {
      rec.files.push_back(ctx.path("mp_reference.csv"));
      save_mp_csv(rec.files.back(), *mp, 512);
    }
    rec.files.push_back(ctx.path("window_volatility.csv"));
    auto out = open_out(rec.files.back());
    csv::Writer w(out);
    w.header({"window_end", "I_mean"});
    const auto vi = volatility_index(panel);
    const std::size_t count = window_count(panel.steps(), cfg.window);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t end = cfg.window.window + i * cfg.window.stride;
      double s = 0.0;
      for (std::size_t t = end - cfg.window.window; t < end; ++t) s += vi[t];
      w.row(static_cast<long long>(end), {s / static_cast<double>(cfg.window.window)});
    }
  }
  if (cfg.write_json) {
    rec.files.push_back(ctx.path("spectra_flags.json"));
    write_text(rec.files.back(), flags.dump(2) + "\n");
  }
  if (total_failures) rec.message = fmt::format("{} windows failed to decompose", total_failures);
  rec.seconds = clock.seconds();
  return rec;
}

RunManifest cmd_pipeline(Context& ctx) {
  RunManifest m;
  m.config_hash = config_hash(ctx.config());
  m.master_seed = ctx.config().model.master_seed;

  using Stage = std::pair<const char*, std::function<StageRecord()>>;
  const std::vector<Stage> stages{
      {"generate-coupling", [&] { return cmd_generate_coupling(ctx); }},
      {"simulate", [&] { return cmd_simulate(ctx); }},
      {"analyze", [&] { return cmd_analyze(ctx); }},
      {"spectra", [&] { return cmd_spectra(ctx); }},
  };

  std::exception_ptr failure;
  for (const auto& [name, run] : stages) {
    Stopwatch clock;
    try {
      m.stages.push_back(run());
    } catch (const std::exception& e) {
      StageRecord rec;
      rec.name = name;
      rec.status = "failed";
      rec.message = e.what();
      rec.seconds = clock.seconds();
      m.stages.push_back(rec);
      m.failed_stage = name;
      failure = std::current_exception();
      fmt::print(ctx.log(), "pipeline: stage {} failed: {}\n", name, e.what());
      break;
    }
  }
  write_text(ctx.path("manifest.json"), m.to_json());
  if (failure) std::rethrow_exception(failure);
  return m;
}

}  // namespace isingmkt::app
