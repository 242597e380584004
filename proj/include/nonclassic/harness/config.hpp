#pragma once

// Run configuration for the command-line harness. Configs are JSON objects;
// see README.md for the schema. Unknown keys are rejected.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nonclassic/error.hpp"
#include "nonclassic/evolution.hpp"
#include "nonclassic/fock.hpp"
#include "nonclassic/process.hpp"

namespace nonclassic::harness {

using json = nlohmann::ordered_json;

class ConfigError : public Error {
public:
  using Error::Error;
};

struct TimeGrid {
  double start = 0.125;
  double stop = 1.0;
  int count = 4;
  std::string spacing = "log";  // "linear" | "log"
  std::vector<double> values;   // explicit instants; overrides start/stop/count when non-empty

  [[nodiscard]] std::vector<double> resolve() const {
    if (!values.empty()) return values;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      double t = spacing == "log" ? start * std::pow(stop / start, f) : start + f * (stop - start);
      // drop the last-ulp noise of pow so grids such as 0.125..1 come out exact
      char buffer[32];
      std::snprintf(buffer, sizeof buffer, "%.15g", t);
      out[static_cast<std::size_t>(i)] = std::strtod(buffer, nullptr);
    }
    if (count > 1) out.back() = stop;
    return out;
  }
};

struct ProcessChoice {
  std::string preset = "five_wave_mixing";  // empty for an explicit (m, n)
  int m = 3;
  int n = 2;
  double omega1 = 1.0;
  double omega2 = 1.5;

  [[nodiscard]] ProcessSpec spec(double g) const {
    if (preset == "five_wave_mixing") return ProcessSpec::five_wave_mixing(g, omega1);
    if (preset == "third_harmonic") return ProcessSpec::third_harmonic(g, omega1);
    return ProcessSpec{omega1, omega2, g, m, n, "custom"};
  }
};

struct Outputs {
  std::string csv;
  std::string summary;
  std::string plot_script;
};

struct RunConfig {
  ProcessChoice process;
  double g = 1e-3;
  double alpha_sq = 1.0;
  TimeGrid times;
  std::optional<FockCutoffs> cutoffs;  // nullopt = "auto"
  int l_max = 3;
  std::vector<Mode> modes{Mode::A, Mode::B};
  Outputs outputs;
  std::uint64_t seed = 20240601;
  Method method = Method::EigenDecomposition;
  double tolerance = 1e-10;
  double order_window_low = 2.5;
  double order_window_high = 3.5;
  unsigned workers = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// Pump cutoff from the coherent heuristic plus m quanta of headroom; signal
/// cutoff n*4 + 10 (signal starts in vacuum and fills in steps of n).
inline FockCutoffs auto_cutoffs(double alpha_sq, int m, int n) {
  return FockCutoffs(suggest_max_a(alpha_sq) + m, n * 4 + 10);
}

inline FockCutoffs resolve_cutoffs(const RunConfig& config, const ProcessSpec& spec) {
  return config.cutoffs ? *config.cutoffs : auto_cutoffs(config.alpha_sq, spec.m, spec.n);
}

inline void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  require(std::isfinite(g) && g >= 0, "g must be finite and >= 0");
  require(std::isfinite(alpha_sq) && alpha_sq >= 0, "alpha_sq must be finite and >= 0");
  require(l_max >= 1 && l_max + 1 <= kMaxMomentOrder, "l_max must lie in [1, " + std::to_string(kMaxMomentOrder - 1) + "]");
  require(!modes.empty(), "modes must not be empty");
  require(std::isfinite(tolerance) && tolerance > 0, "tolerance must be > 0");
  require(order_window_low < order_window_high, "order_window must be [low, high] with low < high");
  if (times.values.empty()) {
    require(times.count >= 1, "times.count must be >= 1");
    require(times.spacing == "linear" || times.spacing == "log", "times.spacing must be linear or log");
    require(std::isfinite(times.start) && std::isfinite(times.stop) && times.start >= 0 && times.stop >= times.start,
            "times need 0 <= start <= stop");
    require(times.count == 1 || times.stop > times.start, "times.stop must exceed start when count > 1");
    require(times.spacing == "linear" || times.start > 0, "log spacing needs start > 0");
  }
  const auto resolved = times.resolve();
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    require(std::isfinite(resolved[i]) && resolved[i] >= 0, "times must be finite and >= 0");
    require(i == 0 || resolved[i] > resolved[i - 1], "times must be strictly increasing");
  }
  try {
    process.spec(g).validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

namespace detail {

inline Mode parse_mode(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "A") return Mode::A;
  if (s == "B") return Mode::B;
  throw ConfigError("config: unknown mode '" + s + "'");
}

inline Method parse_method(const std::string& s) {
  if (s == "eigen") return Method::EigenDecomposition;
  if (s == "expm") return Method::ScaledExpm;
  if (s == "ode") return Method::OdeAdaptive;
  throw ConfigError("config: unknown method '" + s + "' (eigen|expm|ode)");
}

inline void reject_unknown(const json& object, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

} // namespace detail

inline RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::reject_unknown(j, {"process", "g", "alpha_sq", "times", "cutoffs", "l_max", "modes", "outputs", "seed",
                             "method", "tolerance", "order_window", "workers"},
                         "config");
  RunConfig c;
  try {
    if (j.contains("process")) {
      const auto& p = j.at("process");
      if (p.is_string()) {
        c.process.preset = p.get<std::string>();
        if (c.process.preset != "five_wave_mixing" && c.process.preset != "third_harmonic")
          throw ConfigError("config: unknown process preset '" + c.process.preset + "'");
        if (c.process.preset == "third_harmonic") {
          c.process.m = 3;
          c.process.n = 1;
          c.process.omega2 = 3.0;
        }
      } else if (p.is_object()) {
        detail::reject_unknown(p, {"preset", "m", "n", "omega1", "omega2"}, "process");
        if (p.contains("preset")) {
          c.process.preset = p.at("preset").get<std::string>();
          if (c.process.preset != "five_wave_mixing" && c.process.preset != "third_harmonic")
            throw ConfigError("config: unknown process preset '" + c.process.preset + "'");
          if (p.contains("m") || p.contains("n") || p.contains("omega2"))
            throw ConfigError("config: a preset fixes m, n and omega2");
          c.process.omega1 = p.value("omega1", 1.0);
          const auto preset = c.process.spec(0.0);
          c.process.m = preset.m;
          c.process.n = preset.n;
          c.process.omega2 = preset.omega2;
        } else {
          c.process.preset.clear();
          c.process.m = p.at("m").get<int>();
          c.process.n = p.at("n").get<int>();
          c.process.omega1 = p.value("omega1", 1.0);
          c.process.omega2 = p.value("omega2", c.process.m * c.process.omega1 / c.process.n);
        }
      } else {
        throw ConfigError("config: process must be a preset name or an object");
      }
    }
    if (j.contains("g")) c.g = j.at("g").get<double>();
    if (j.contains("alpha_sq")) c.alpha_sq = j.at("alpha_sq").get<double>();
    if (j.contains("times")) {
      const auto& t = j.at("times");
      detail::reject_unknown(t, {"start", "stop", "count", "spacing", "values"}, "times");
      c.times.start = t.value("start", c.times.start);
      c.times.stop = t.value("stop", c.times.stop);
      c.times.count = t.value("count", c.times.count);
      c.times.spacing = t.value("spacing", c.times.spacing);
      if (t.contains("values")) c.times.values = t.at("values").get<std::vector<double>>();
    }
    if (j.contains("cutoffs")) {
      const auto& cut = j.at("cutoffs");
      if (cut.is_string()) {
        if (cut.get<std::string>() != "auto") throw ConfigError("config: cutoffs must be \"auto\" or an object");
      } else {
        detail::reject_unknown(cut, {"max_a", "max_b"}, "cutoffs");
        try {
          c.cutoffs = FockCutoffs(cut.at("max_a").get<int>(), cut.at("max_b").get<int>());
        } catch (const InvalidArgument& e) {
          throw ConfigError(std::string("config: ") + e.what());
        }
      }
    }
    if (j.contains("l_max")) c.l_max = j.at("l_max").get<int>();
    if (j.contains("modes")) {
      c.modes.clear();
      for (const auto& m : j.at("modes")) c.modes.push_back(detail::parse_mode(m));
    }
    if (j.contains("outputs")) {
      const auto& o = j.at("outputs");
      detail::reject_unknown(o, {"csv", "summary", "plot_script"}, "outputs");
      c.outputs.csv = o.value("csv", std::string());
      c.outputs.summary = o.value("summary", std::string());
      c.outputs.plot_script = o.value("plot_script", std::string());
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("method")) c.method = detail::parse_method(j.at("method").get<std::string>());
    if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<double>();
    if (j.contains("order_window")) {
      const auto w = j.at("order_window").get<std::vector<double>>();
      if (w.size() != 2) throw ConfigError("config: order_window must have two entries");
      c.order_window_low = w[0];
      c.order_window_high = w[1];
    }
    if (j.contains("workers")) c.workers = j.at("workers").get<unsigned>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return parse_config(j);
}

/// The fully resolved configuration (auto cutoffs and time grid expanded).
inline json resolved_json(const RunConfig& c, const std::vector<ProcessSpec>& specs) {
  json j;
  if (c.process.preset.empty())
    j["process"] = {{"m", c.process.m}, {"n", c.process.n}, {"omega1", c.process.omega1}, {"omega2", c.process.omega2}};
  else
    j["process"] = {{"preset", c.process.preset}, {"omega1", c.process.omega1}};
  j["g"] = c.g;
  j["alpha_sq"] = c.alpha_sq;
  j["times"] = {{"values", c.times.resolve()}};
  if (c.times.values.empty()) {
    j["times"]["start"] = c.times.start;
    j["times"]["stop"] = c.times.stop;
    j["times"]["count"] = c.times.count;
    j["times"]["spacing"] = c.times.spacing;
  }
  json cut = json::object();
  for (const auto& spec : specs) {
    const auto fc = resolve_cutoffs(c, spec);
    cut[spec.name.empty() ? "custom" : spec.name] = {{"max_a", fc.max_a()}, {"max_b", fc.max_b()}};
  }
  j["cutoffs"] = {{"requested", c.cutoffs ? "explicit" : "auto"}, {"resolved", cut}};
  j["l_max"] = c.l_max;
  j["modes"] = json::array();
  for (Mode m : c.modes) j["modes"].push_back(std::string(1, mode_name(m)));
  j["outputs"] = {{"csv", c.outputs.csv}, {"summary", c.outputs.summary}, {"plot_script", c.outputs.plot_script}};
  j["seed"] = c.seed;
  j["method"] = method_name(c.method);
  j["tolerance"] = c.tolerance;
  j["order_window"] = {c.order_window_low, c.order_window_high};
  j["workers"] = c.workers;
  return j;
}

} // namespace nonclassic::harness
