#include "config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "isingmkt/csv.hpp"
#include "isingmkt/error.hpp"
#include "isingmkt/rng.hpp"
#include "isingmkt/thread_pool.hpp"

namespace isingmkt::app {

namespace pt = boost::property_tree;

Preset parse_preset(const std::string& name) {
  if (name == "paper") return Preset::Paper;
  if (name == "desk") return Preset::Desk;
  throw ConfigError("unknown preset '" + name + "' (expected paper or desk)");
}

CouplingSpec ExperimentConfig::resolved_coupling() const {
  CouplingSpec s = coupling;
  s.n = model.N;
  s.seed = coupling_seed ? *coupling_seed : derive_seed(model.master_seed, streams::kCoupling);
  return s;
}

std::size_t ExperimentConfig::resolved_threads() const {
  return threads == 0 ? ThreadPool::hardware_threads() : threads;
}

ExperimentConfig paper_preset() { return ExperimentConfig{}; }

ExperimentConfig desk_preset() {
  ExperimentConfig c;
  c.model.L = 32;
  c.model.N = 20;
  c.model.therm_sweeps = 1000;
  c.model.collect_sweeps = 10000;
  c.window.window = 200;
  c.window.stride = 200;
  return c;
}

ExperimentConfig preset(Preset p) { return p == Preset::Desk ? desk_preset() : paper_preset(); }

namespace {

std::string key_name(const std::string& section, const std::string& key) { return section + "." + key; }

double as_double(const std::string& name, const std::string& v) {
  try {
    return csv::parse_double(v);
  } catch (const ParseError&) {
    throw ConfigError(name + ": expected a number, got '" + v + "'");
  }
}

std::uint64_t as_u64(const std::string& name, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(name + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::size_t as_size(const std::string& name, const std::string& v) {
  return static_cast<std::size_t>(as_u64(name, v));
}

bool as_bool(const std::string& name, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(name + ": expected true or false, got '" + v + "'");
}

void apply(ExperimentConfig& c, const std::string& section, const std::string& key, const std::string& v) {
  const std::string name = key_name(section, key);
  if (section == "model") {
    if (key == "L") return void(c.model.L = as_size(name, v));
    if (key == "N") return void(c.model.N = as_size(name, v));
    if (key == "J") return void(c.model.J = as_double(name, v));
    if (key == "alpha") return void(c.model.alpha = as_double(name, v));
    if (key == "beta") return void(c.model.beta = as_double(name, v));
    if (key == "therm_sweeps") return void(c.model.therm_sweeps = as_size(name, v));
    if (key == "collect_sweeps") return void(c.model.collect_sweeps = as_size(name, v));
    if (key == "seed") return void(c.model.master_seed = as_u64(name, v));
  } else if (section == "coupling") {
    if (key == "path") return void(c.coupling_path = v.empty() ? std::nullopt : std::optional(v));
    if (key == "density") return void(c.coupling.density = as_double(name, v));
    if (key == "mean") return void(c.coupling.mean = as_double(name, v));
    if (key == "variance") return void(c.coupling.variance = as_double(name, v));
    if (key == "symmetrize") return void(c.coupling.symmetrize = as_bool(name, v));
    if (key == "seed") {
      c.coupling_seed = v == "auto" ? std::nullopt : std::optional(as_u64(name, v));
      return;
    }
  } else if (section == "window") {
    if (key == "M") return void(c.window.window = as_size(name, v));
    if (key == "stride") return void(c.window.stride = as_size(name, v));
    if (key == "normalization") {
      try {
        c.window.normalization = parse_normalization(v);
      } catch (const InvalidArgument& e) {
        throw ConfigError(name + ": " + e.what());
      }
      return;
    }
  } else if (section == "analysis") {
    if (key == "max_lag") return void(c.analysis.max_lag = as_size(name, v));
    if (key == "top_m") return void(c.analysis.top_m = as_size(name, v));
    if (key == "hist_bins") return void(c.analysis.histogram.bins = as_size(name, v));
    if (key == "hist_min") return void(c.analysis.histogram.lo = as_double(name, v));
    if (key == "hist_max") return void(c.analysis.histogram.hi = as_double(name, v));
    if (key == "tau_c") return void(c.analysis.tau_c = as_double(name, v));
  } else if (section == "output") {
    if (key == "dir") return void(c.output_dir = v);
    if (key == "formats") {
      c.write_csv = v.find("csv") != std::string::npos;
      c.write_json = v.find("json") != std::string::npos;
      if (!c.write_csv && !c.write_json) throw ConfigError(name + ": expected csv, json or csv,json");
      return;
    }
  } else if (section == "run") {
    if (key == "threads") return void(c.threads = as_size(name, v));
  } else {
    throw ConfigError("unknown config section [" + section + "]");
  }
  throw ConfigError("unknown config key " + name);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("config key '" + section + "' is outside any [section]");
    for (const auto& [key, value] : body) apply(base, section, key, value.get_value<std::string>());
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void validate_config(const ExperimentConfig& c, bool needs_simulation) {
  try {
    validate_params(c.model);
    validate_spec(c.resolved_coupling());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (c.coupling_path && !std::filesystem::exists(*c.coupling_path)) {
    throw ConfigError("coupling.path '" + *c.coupling_path + "' does not exist");
  }
  if (c.window.window < 1) throw ConfigError("window.M must be at least 1");
  if (c.window.stride < 1) throw ConfigError("window.stride must be at least 1");
  if (c.analysis.max_lag < 1) throw ConfigError("analysis.max_lag must be at least 1");
  if (c.analysis.top_m < 1 || c.analysis.top_m > c.model.N) {
    throw ConfigError("analysis.top_m must lie in [1, model.N]");
  }
  if (c.analysis.histogram.bins < 1) throw ConfigError("analysis.hist_bins must be at least 1");
  if (!(c.analysis.histogram.hi > c.analysis.histogram.lo)) {
    throw ConfigError("analysis.hist_max must exceed analysis.hist_min");
  }
  if (!(c.analysis.tau_c > 0.0)) throw ConfigError("analysis.tau_c must be positive");
  if (needs_simulation) {
    const std::size_t t = c.model.collect_sweeps;
    if (c.window.window > t) {
      throw ConfigError(fmt::format("window.M = {} exceeds model.collect_sweeps = {}", c.window.window, t));
    }
    if (c.analysis.max_lag >= t) {
      throw ConfigError(fmt::format("analysis.max_lag = {} must be below model.collect_sweeps = {}",
                                    c.analysis.max_lag, t));
    }
  }
  if (c.output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

std::string to_text(const ExperimentConfig& c) {
  auto d = [](double v) { return csv::format_double(v); };
  std::string out;
  out += "[model]\n";
  out += fmt::format("L = {}\nN = {}\nJ = {}\nalpha = {}\nbeta = {}\n", c.model.L, c.model.N, d(c.model.J),
                     d(c.model.alpha), d(c.model.beta));
  out += fmt::format("therm_sweeps = {}\ncollect_sweeps = {}\nseed = {}\n\n", c.model.therm_sweeps,
                     c.model.collect_sweeps, c.model.master_seed);
  out += "[coupling]\n";
  out += fmt::format("path = {}\n", c.coupling_path.value_or(""));
  out += fmt::format("density = {}\nmean = {}\nvariance = {}\n", d(c.coupling.density), d(c.coupling.mean),
                     d(c.coupling.variance));
  out += fmt::format("seed = {}\n", c.coupling_seed ? std::to_string(*c.coupling_seed) : "auto");
  out += fmt::format("symmetrize = {}\n\n", c.coupling.symmetrize ? "true" : "false");
  out += "[window]\n";
  out += fmt::format("M = {}\nstride = {}\nnormalization = {}\n\n", c.window.window, c.window.stride,
                     to_string(c.window.normalization));
  out += "[analysis]\n";
  out += fmt::format("max_lag = {}\ntop_m = {}\nhist_bins = {}\nhist_min = {}\nhist_max = {}\ntau_c = {}\n\n",
                     c.analysis.max_lag, c.analysis.top_m, c.analysis.histogram.bins,
                     d(c.analysis.histogram.lo), d(c.analysis.histogram.hi), d(c.analysis.tau_c));
  out += "[output]\n";
  out += fmt::format("dir = {}\n", c.output_dir);
  std::string formats;
  if (c.write_csv) formats += "csv";
  if (c.write_json) formats += formats.empty() ? "json" : ",json";
  out += fmt::format("formats = {}\n", formats);
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.output_dir = "-";
  c.threads = 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_text(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace isingmkt::app
