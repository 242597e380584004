#pragma once

// Subcommands of the `nonclassic` CLI. Each returns its CSV body, a text
// summary and an optional gnuplot script as strings; writing files and
// stamping metadata is left to harness/output.hpp so that bodies stay
// byte-identical across runs with the same config.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nonclassic/closed_forms.hpp"
#include "nonclassic/combinatorics.hpp"
#include "nonclassic/criteria.hpp"
#include "nonclassic/evolution.hpp"
#include "nonclassic/fock.hpp"
#include "nonclassic/harness/config.hpp"
#include "nonclassic/parallel.hpp"
#include "nonclassic/process.hpp"
#include "nonclassic/verify/oracles.hpp"

namespace nonclassic::harness {

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kNumericalFailure = 3, kClaimFailure = 4 };

struct CommandOutput {
  int exit_code = kSuccess;
  std::string csv;
  std::string summary;
  std::string plot_script;
  std::vector<std::string> warnings;
  std::vector<ProcessSpec> specs;  // processes that were run, for metadata
};

inline std::string format_real(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", x == 0 ? 0.0 : x);
  return buffer;
}

inline std::string format_optional(const std::optional<double>& x) {
  return x ? format_real(*x) : std::string("undefined");
}

/// Ratio a/b, undefined when |b| <= 1e-30.
inline std::optional<double> safe_ratio(double a, double b) {
  if (std::abs(b) <= 1e-30) return std::nullopt;
  return a / b;
}

/// Least-squares slope of log|y| against log x over points with x > 0 and y != 0.
inline std::optional<double> fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i)
    if (xs[i] > 0 && ys[i] != 0 && std::isfinite(ys[i])) pts.emplace_back(std::log(xs[i]), std::log(std::abs(ys[i])));
  if (pts.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0) return std::nullopt;
  return sxy / sxx;
}

inline unsigned worker_count(const RunConfig& config) {
  return config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
}

/// Exact trajectory of |alpha, 0> under one process, with conservation diagnostics.
struct ExactRun {
  ProcessSpec spec;
  HamiltonianMatrix hamiltonian;
  Trajectory trajectory;
  double energy_drift = 0.0;
  double charge_drift = 0.0;

  [[nodiscard]] FactorialMoments moments(std::size_t i, Mode mode, int k_max) const {
    return factorial_moments(trajectory.states[i], mode, k_max);
  }
};

inline ExactRun run_exact(const ProcessSpec& spec, const FockCutoffs& cutoffs, double alpha_sq,
                          const std::vector<double>& times, Method method = Method::EigenDecomposition,
                          double tolerance = 1e-10, unsigned workers = 1) {
  auto hamiltonian = build_hamiltonian(spec, cutoffs);
  const auto state0 = make_coherent_vacuum(std::sqrt(alpha_sq), cutoffs);
  EvolutionPlan plan{hamiltonian, times, method, tolerance};
  plan.workers = workers;
  auto trajectory = evolve(state0, plan);
  ExactRun run{spec, std::move(hamiltonian), std::move(trajectory)};
  run.energy_drift = relative_energy_drift(run.trajectory, run.hamiltonian);
  run.charge_drift = relative_charge_drift(run.trajectory, spec);
  return run;
}

namespace detail {

inline void append_diagnostics(std::ostringstream& s, const ExactRun& run) {
  s << "  cutoffs: max_a=" << run.hamiltonian.cutoffs().max_a() << " max_b=" << run.hamiltonian.cutoffs().max_b()
    << "\n";
  s << "  method: " << method_name(run.trajectory.method) << "\n";
  s << "  initial truncation tail: " << format_real(run.trajectory.initial.norm_deficit()) << "\n";
  s << "  max leakage: " << format_real(run.trajectory.max_leakage) << "\n";
  s << "  max norm drift: " << format_real(run.trajectory.max_norm_drift) << "\n";
  s << "  relative energy drift: " << format_real(run.energy_drift) << "\n";
  s << "  relative charge drift: " << format_real(run.charge_drift) << "\n";
}

inline std::vector<std::string> gather_warnings(const ExactRun& run) {
  std::vector<std::string> w;
  for (const auto& h : run.hamiltonian.warnings()) w.push_back(run.spec.name + ": " + h);
  if (run.trajectory.leakage_flagged)
    w.push_back(run.spec.name + ": truncation leakage " + format_real(run.trajectory.max_leakage) +
                " exceeds ceiling " + format_real(kLeakageCeiling));
  return w;
}

inline bool is_closed_form_process(const ProcessSpec& spec) {
  return spec.m == 3 && (spec.n == 2 || spec.n == 1);
}

struct ClosedCriteria {
  double d1, d2, D2;
};

inline ClosedCriteria closed_criteria(const ProcessSpec& spec, const ShortTimeInput& in) {
  if (spec.n == 2) return {d1_fwm(in), d2_fwm(in), D2_fwm(in)};
  return {d1_thg(in), d2_thg(in), D2_thg(in)};
}

struct ExactCriteria {
  double d1, d2, D2;
};

inline ExactCriteria exact_criteria(const FactorialMoments& pump) {
  return {hoa_d(pump, 1), hoa_d(pump, 2), hosps_D(pump, 3)};
}

} // namespace detail

// --------------------------------------------------------------------------
// criteria

inline CommandOutput cmd_criteria(const RunConfig& config) {
  config.validate();
  CommandOutput out;
  const auto spec = config.process.spec(config.g);
  const auto cutoffs = resolve_cutoffs(config, spec);
  const auto times = config.times.resolve();
  const auto run = run_exact(spec, cutoffs, config.alpha_sq, times, config.method, config.tolerance,
                             worker_count(config));
  out.specs = {spec};
  out.warnings = detail::gather_warnings(run);

  std::ostringstream csv;
  csv << "time,mode";
  for (int l = 1; l <= config.l_max; ++l) csv << ",d" << l;
  for (int l = 1; l < config.l_max; ++l) csv << ",D" << l;
  csv << ",leakage\n";

  struct Extremes {
    double max_d1 = -INFINITY;
    bool all_negative = true;
  };
  std::vector<Extremes> per_mode(config.modes.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t k = 0; k < config.modes.size(); ++k) {
      const Mode mode = config.modes[k];
      const auto rep = report(run.trajectory.states[i], mode, times[i], config.l_max);
      csv << format_real(times[i]) << ',' << mode_name(mode);
      for (const auto& [l, v] : rep.d_values) csv << ',' << format_real(v);
      for (const auto& [l, v] : rep.D_values) csv << ',' << format_real(v);
      csv << ',' << format_real(rep.leakage) << '\n';
      if (times[i] > 0) {
        per_mode[k].max_d1 = std::max(per_mode[k].max_d1, rep.d_values.at(1));
        for (const auto& [l, v] : rep.d_values) per_mode[k].all_negative &= v < 0;
        for (const auto& [l, v] : rep.D_values) per_mode[k].all_negative &= v < 0;
      }
    }
  }
  out.csv = csv.str();

  std::ostringstream s;
  s << "criteria: process " << spec.name << " (m=" << spec.m << ", n=" << spec.n << "), g=" << format_real(config.g)
    << ", alpha_sq=" << format_real(config.alpha_sq) << ", " << times.size() << " times\n";
  detail::append_diagnostics(s, run);
  for (std::size_t k = 0; k < config.modes.size(); ++k) {
    s << "  mode " << mode_name(config.modes[k]) << ": every criterion negative at t>0: "
      << (per_mode[k].all_negative ? "yes" : "no") << "; largest d1 at t>0: " << format_real(per_mode[k].max_d1)
      << "\n";
  }
  if (run.trajectory.leakage_flagged) {
    s << "FAIL: leakage ceiling breached\n";
    out.exit_code = kNumericalFailure;
  }
  out.summary = s.str();

  const std::string data = config.outputs.csv.empty() ? "criteria.csv" : config.outputs.csv;
  std::ostringstream plot;
  plot << "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n"
       << "set xlabel 't'\nset ylabel 'criterion value'\n";
  plot << "plot ";
  bool first = true;
  for (Mode mode : config.modes) {
    const int columns = 2 * config.l_max - 1;
    for (int c = 0; c < columns; ++c) {
      if (!first) plot << ", \\\n     ";
      first = false;
      plot << "'" << data << "' using 1:(stringcolumn(2) eq '" << mode_name(mode) << "' ? $" << (3 + c)
           << " : 1/0) with linespoints title columnhead(" << (3 + c) << ").' (" << mode_name(mode) << ")'";
    }
  }
  plot << "\n";
  out.plot_script = plot.str();
  return out;
}

// --------------------------------------------------------------------------
// compare

struct ComparisonRecord {
  double time = 0.0;
  std::string criterion;  // d1 | d2 | D2
  double exact = 0.0;
  double closed_form = 0.0;
  double abs_deviation = 0.0;
  std::optional<double> rel_deviation;  // undefined when |closed_form| <= 1e-30
  double leakage = 0.0;
};

struct ConvergenceFit {
  std::string criterion;
  std::optional<double> order;
  bool inside_window = false;
};

struct CompareResult {
  std::vector<ComparisonRecord> records;
  std::vector<ConvergenceFit> fits;
  ExactRun run;
};

inline CompareResult compare_against_closed_forms(const ProcessSpec& spec, const FockCutoffs& cutoffs, double alpha_sq,
                                                  double g, const std::vector<double>& times, double window_low,
                                                  double window_high, Method method = Method::EigenDecomposition,
                                                  double tolerance = 1e-10, unsigned workers = 1) {
  if (!detail::is_closed_form_process(spec))
    throw ConfigError("compare: closed forms exist only for five_wave_mixing (3:2) and third_harmonic (3:1)");
  CompareResult result{{}, {}, run_exact(spec, cutoffs, alpha_sq, times, method, tolerance, workers)};
  const char* names[] = {"d1", "d2", "D2"};
  std::vector<double> residuals[3];
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto exact = detail::exact_criteria(result.run.moments(i, Mode::A, 3));
    const auto closed = detail::closed_criteria(spec, ShortTimeInput{alpha_sq, g, times[i]});
    const double e[] = {exact.d1, exact.d2, exact.D2};
    const double c[] = {closed.d1, closed.d2, closed.D2};
    for (int k = 0; k < 3; ++k) {
      ComparisonRecord r;
      r.time = times[i];
      r.criterion = names[k];
      r.exact = e[k];
      r.closed_form = c[k];
      r.abs_deviation = std::abs(e[k] - c[k]);
      if (std::abs(c[k]) > 1e-30) r.rel_deviation = r.abs_deviation / std::abs(c[k]);
      r.leakage = result.run.trajectory.states[i].leakage();
      residuals[k].push_back(r.abs_deviation);
      result.records.push_back(std::move(r));
    }
  }
  for (int k = 0; k < 3; ++k) {
    ConvergenceFit fit{names[k], fit_power_law(times, residuals[k])};
    fit.inside_window = fit.order && *fit.order >= window_low && *fit.order <= window_high;
    result.fits.push_back(fit);
  }
  return result;
}

inline CommandOutput cmd_compare(const RunConfig& config) {
  config.validate();
  const auto spec = config.process.spec(config.g);
  if (!detail::is_closed_form_process(spec))
    throw ConfigError("compare: process must be five_wave_mixing or third_harmonic");
  CommandOutput out;
  const auto times = config.times.resolve();
  const auto result = compare_against_closed_forms(spec, resolve_cutoffs(config, spec), config.alpha_sq, config.g,
                                                   times, config.order_window_low, config.order_window_high,
                                                   config.method, config.tolerance, worker_count(config));
  out.specs = {spec};
  out.warnings = detail::gather_warnings(result.run);
  const ShortTimeInput last{config.alpha_sq, config.g, times.back()};
  if (last.outside_validity())
    out.warnings.push_back("g t alpha_sq^{3/2} = " + format_real(last.expansion_parameter()) +
                           " exceeds the short-time validity threshold " + format_real(last.gt_warn));

  std::ostringstream csv;
  csv << "time,criterion,exact,closed_form,abs_deviation,rel_deviation,leakage\n";
  for (const auto& r : result.records)
    csv << format_real(r.time) << ',' << r.criterion << ',' << format_real(r.exact) << ','
        << format_real(r.closed_form) << ',' << format_real(r.abs_deviation) << ','
        << format_optional(r.rel_deviation) << ',' << format_real(r.leakage) << '\n';
  out.csv = csv.str();

  std::ostringstream s;
  s << "compare: process " << spec.name << ", g=" << format_real(config.g) << ", alpha_sq="
    << format_real(config.alpha_sq) << "\n";
  detail::append_diagnostics(s, result.run);
  s << "  required convergence order window: [" << format_real(config.order_window_low) << ", "
    << format_real(config.order_window_high) << "]\n";
  bool claims_hold = true;
  for (const auto& fit : result.fits) {
    s << "  " << fit.criterion << ": fitted residual order p = " << format_optional(fit.order);
    if (fit.order) {
      s << (fit.inside_window ? " (inside window)" : " (OUTSIDE window)");
      claims_hold &= fit.inside_window;
    } else {
      s << " (too few nonzero residuals to fit)";
      out.warnings.push_back("compare: no convergence order for " + fit.criterion);
    }
    s << "\n";
  }
  for (const auto& r : result.records)
    if (r.time == times.back())
      s << "  " << r.criterion << " at t=" << format_real(r.time)
        << ": relative deviation " << format_optional(r.rel_deviation) << "\n";
  if (result.run.trajectory.leakage_flagged) {
    s << "FAIL: leakage ceiling breached\n";
    out.exit_code = kNumericalFailure;
  } else if (!claims_hold) {
    s << "FAIL: convergence order outside the required window\n";
    out.exit_code = kClaimFailure;
  }
  out.summary = s.str();

  const std::string data = config.outputs.csv.empty() ? "compare.csv" : config.outputs.csv;
  std::ostringstream plot;
  plot << "set datafile separator ','\nset datafile commentschars '#'\nset logscale xy\n"
       << "set xlabel 't'\nset ylabel '|exact - closed form|'\n";
  plot << "plot ";
  for (int k = 0; k < 3; ++k) {
    const char* name = k == 0 ? "d1" : (k == 1 ? "d2" : "D2");
    if (k) plot << ", \\\n     ";
    plot << "'" << data << "' using 1:(stringcolumn(2) eq '" << name << "' && $5 > 0 ? $5 : 1/0) with linespoints title '"
         << name << "'";
  }
  plot << "\n";
  out.plot_script = plot.str();
  return out;
}

// --------------------------------------------------------------------------
// depth

struct DepthRow {
  double time = 0.0;
  std::string quantity;
  double fwm_closed = 0.0, thg_closed = 0.0;
  std::optional<double> closed_ratio;
  double fwm_exact = 0.0, thg_exact = 0.0;
  std::optional<double> exact_ratio;
  bool degenerate = false;
  bool fwm_deeper = true;
};

inline CommandOutput cmd_depth(const RunConfig& config) {
  config.validate();
  CommandOutput out;
  const auto times = config.times.resolve();
  const auto fwm_spec = ProcessSpec::five_wave_mixing(config.g, config.process.omega1);
  const auto thg_spec = ProcessSpec::third_harmonic(config.g, config.process.omega1);
  FockCutoffs shared = config.cutoffs ? *config.cutoffs : auto_cutoffs(config.alpha_sq, 3, 2);
  if (!config.cutoffs) {
    const auto other = auto_cutoffs(config.alpha_sq, 3, 1);
    shared = FockCutoffs(std::max(shared.max_a(), other.max_a()), std::max(shared.max_b(), other.max_b()));
  }
  RunConfig shared_config = config;
  shared_config.cutoffs = shared;

  const ProcessSpec specs[] = {fwm_spec, thg_spec};
  std::vector<std::optional<ExactRun>> runs(2);
  parallel_for(2, [&](std::size_t p) {
    runs[p] = run_exact(specs[p], shared, config.alpha_sq, times, config.method, config.tolerance, 1);
  }, worker_count(config));
  out.specs = {fwm_spec, thg_spec};
  for (const auto& r : runs)
    for (auto& w : detail::gather_warnings(*r)) out.warnings.push_back(std::move(w));

  const bool degenerate_input = config.alpha_sq == 0 || config.g == 0;
  if (degenerate_input) out.warnings.push_back("depth: alpha_sq or g is zero; comparison is degenerate");

  std::vector<DepthRow> rows;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const ShortTimeInput in{config.alpha_sq, config.g, times[i]};
    const auto fc = detail::closed_criteria(fwm_spec, in);
    const auto tc = detail::closed_criteria(thg_spec, in);
    const auto fe = detail::exact_criteria(runs[0]->moments(i, Mode::A, 3));
    const auto te = detail::exact_criteria(runs[1]->moments(i, Mode::A, 3));
    const char* names[] = {"d1", "d2", "D2"};
    const double fcv[] = {fc.d1, fc.d2, fc.D2}, tcv[] = {tc.d1, tc.d2, tc.D2};
    const double fev[] = {fe.d1, fe.d2, fe.D2}, tev[] = {te.d1, te.d2, te.D2};
    for (int k = 0; k < 3; ++k) {
      DepthRow row{times[i], names[k], fcv[k], tcv[k], safe_ratio(fcv[k], tcv[k]), fev[k], tev[k],
                   safe_ratio(fev[k], tev[k])};
      row.degenerate = degenerate_input || times[i] == 0 || tcv[k] == 0;
      if (!row.degenerate)
        row.fwm_deeper = std::abs(fcv[k]) > std::abs(tcv[k]) && std::abs(fev[k]) > std::abs(tev[k]);
      rows.push_back(std::move(row));
    }
  }

  std::ostringstream csv;
  csv << "time,quantity,fwm_closed,thg_closed,closed_ratio,fwm_exact,thg_exact,exact_ratio\n";
  for (const auto& r : rows)
    csv << format_real(r.time) << ',' << r.quantity << ',' << format_real(r.fwm_closed) << ','
        << format_real(r.thg_closed) << ',' << format_optional(r.closed_ratio) << ',' << format_real(r.fwm_exact)
        << ',' << format_real(r.thg_exact) << ',' << format_optional(r.exact_ratio) << '\n';
  out.csv = csv.str();

  std::ostringstream s;
  s << "depth: five_wave_mixing vs third_harmonic at g=" << format_real(config.g)
    << ", alpha_sq=" << format_real(config.alpha_sq) << "\n";
  for (const auto& r : runs) {
    s << " " << r->spec.name << ":\n";
    detail::append_diagnostics(s, *r);
  }
  bool deeper = true;
  for (const auto& r : rows) {
    if (r.degenerate) continue;
    deeper &= r.fwm_deeper;
    s << "  t=" << format_real(r.time) << " " << r.quantity << ": |fwm|/|thg| closed "
      << format_optional(r.closed_ratio) << ", exact " << format_optional(r.exact_ratio)
      << (r.fwm_deeper ? "" : "  <-- five-wave not deeper") << "\n";
  }
  if (degenerate_input) s << "  degenerate comparison (all criteria vanish)\n";
  if (runs[0]->trajectory.leakage_flagged || runs[1]->trajectory.leakage_flagged) {
    s << "FAIL: leakage ceiling breached\n";
    out.exit_code = kNumericalFailure;
  } else if (!deeper) {
    s << "FAIL: five-wave mixing is not deeper for every quantity\n";
    out.exit_code = kClaimFailure;
  }
  out.summary = s.str();

  const std::string data = config.outputs.csv.empty() ? "depth.csv" : config.outputs.csv;
  std::ostringstream plot;
  plot << "set datafile separator ','\nset datafile commentschars '#'\nset xlabel 't'\n"
       << "set ylabel 'five-wave / third-harmonic'\n";
  plot << "plot '" << data << "' using 1:(stringcolumn(2) eq 'd1' ? $8 : 1/0) with linespoints title 'd1', \\\n"
       << "     '" << data << "' using 1:(stringcolumn(2) eq 'd2' ? $8 : 1/0) with linespoints title 'd2', \\\n"
       << "     '" << data << "' using 1:(stringcolumn(2) eq 'D2' ? $8 : 1/0) with linespoints title 'D2'\n";
  out.plot_script = plot.str();
  return out;
}

// --------------------------------------------------------------------------
// selftest

struct SelfCheck {
  std::string name;
  bool passed = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;
};

namespace detail {

inline SelfCheck check_max(std::string name, double deviation, double tolerance) {
  return {std::move(name), deviation <= tolerance && std::isfinite(deviation), deviation, tolerance};
}

} // namespace detail

inline std::vector<SelfCheck> run_selftests(std::uint64_t seed) {
  std::vector<SelfCheck> checks;
  std::mt19937_64 rng(seed);

  {  // coherent-state moments are the classical boundary for every criterion
    double worst = 0;
    for (double lambda : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      FactorialMoments fm{Mode::A, {}};
      for (int i = 1; i <= 5; ++i) fm.values.push_back(std::pow(lambda, i));
      for (int l = 1; l <= 4; ++l) worst = std::max(worst, std::abs(hoa_d(fm, l)));
      for (int l = 2; l <= 4; ++l) worst = std::max(worst, std::abs(hosps_D(fm, l)));
    }
    checks.push_back(detail::check_max("coherent_moments_baseline", worst, 1e-9));
  }
  {  // coherent states built on the truncated basis
    double worst = 0;
    for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
      const FockCutoffs cut(suggest_max_a(lambda) + 20, 2);
      const auto rep = report(make_coherent_vacuum(std::sqrt(lambda), cut), Mode::A, 0.0, 4);
      for (const auto& [l, v] : rep.d_values) worst = std::max(worst, std::abs(v));
      for (const auto& [l, v] : rep.D_values) worst = std::max(worst, std::abs(v));
    }
    checks.push_back(detail::check_max("coherent_state_baseline", worst, 1e-9));
  }
  {  // Fock |n>: d(l) = n!/(n-l-1)! - n^(l+1), negative for l < n
    double worst = 0;
    bool signs = true;
    for (int n = 1; n <= 10; ++n) {
      const auto fm = factorial_moments(make_fock(n, 0, FockCutoffs(n + 2, 1)), Mode::A, 8);
      for (int l = 1; l <= 7; ++l) {
        const double expected = static_cast<double>(falling_factorial(static_cast<std::uint64_t>(n), l + 1)) -
                                std::pow(static_cast<double>(n), l + 1);
        worst = std::max(worst, std::abs(hoa_d(fm, l) - expected) / std::max(1.0, std::abs(expected)));
        if (l < n) signs &= hoa_d(fm, l) < 0;
      }
    }
    checks.push_back(detail::check_max("fock_baseline", worst, 1e-12));
    checks.push_back({"fock_antibunching_sign", signs, 0.0, 0.0});
  }
  {  // Stirling table vs set-partition enumeration
    bool exact = true;
    for (int n = 0; n <= 10; ++n) {
      const auto counts = oracle::count_set_partitions(n);
      for (int k = 0; k <= n; ++k) exact &= stirling2(n, k) == counts[static_cast<std::size_t>(k)];
    }
    checks.push_back({"stirling_vs_partition_enumeration", exact, 0.0, 0.0});
  }
  {  // the closed D(2) expression equals the general double sum at l = 3,
     // and D(l-1) equals the central-moment excess over Poisson
    double worst_special = 0, worst_poisson = 0, worst_raw = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto pmf = oracle::random_pmf(rng, 10);
      const auto fm = factorial_moments_from_pmf(pmf, 4);
      worst_special = std::max(worst_special, std::abs(hosps_D2_special(fm) - hosps_D(fm, 3)));
      const double mean = static_cast<double>(oracle::pmf_mean(pmf));
      for (int l = 2; l <= 4; ++l) {
        const long double expected = oracle::central_moment(pmf, l) - oracle::poisson_central_moment(mean, l);
        worst_poisson = std::max(worst_poisson, static_cast<double>(std::abs(hosps_D(fm, l) - expected)));
      }
      const long double r2 = oracle::raw_moment(pmf, 2), r3 = oracle::raw_moment(pmf, 3);
      worst_raw = std::max(worst_raw, static_cast<double>(std::abs(r2 - (fm.order(2) + fm.order(1)))));
      worst_raw = std::max(worst_raw,
                           static_cast<double>(std::abs(r3 - (fm.order(3) + 3 * fm.order(2) + fm.order(1)))));
    }
    checks.push_back(detail::check_max("special_D2_equals_general_D2", worst_special, 1e-12));
    checks.push_back(detail::check_max("poisson_difference_identity", worst_poisson, 1e-9));
    checks.push_back(detail::check_max("falling_factorial_identity", worst_raw, 1e-10));
  }
  {  // Hamiltonian structure for both presets
    bool hermitian = true;
    double commutator = 0, element = 0;
    for (const auto& spec : {ProcessSpec::five_wave_mixing(0.37), ProcessSpec::third_harmonic(0.37)}) {
      const FockCutoffs cut(6, 6);
      const auto h = build_hamiltonian(spec, cut);
      hermitian &= h.is_hermitian();
      commutator = std::max(commutator, charge_commutator_norm(h));
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
          if (cut.contains(a - spec.m, b + spec.n))
            element = std::max(element, std::abs(h.element(cut.index(a - spec.m, b + spec.n), cut.index(a, b)).real() -
                                                 spec.g * oracle::ladder_matrix_element(a, b, spec.m, spec.n)));
    }
    checks.push_back({"hamiltonian_hermitian", hermitian, 0.0, 0.0});
    checks.push_back(detail::check_max("hamiltonian_charge_commutator", commutator, 0.0));
    checks.push_back(detail::check_max("hamiltonian_ladder_elements", element, 1e-12));
  }
  {  // exact evolution invariants and method agreement on a small run
    const auto spec = ProcessSpec::five_wave_mixing(0.05);
    const FockCutoffs cut(20, 12);
    const std::vector<double> times{0.5, 1.0, 2.0};
    const auto eig = run_exact(spec, cut, 1.0, times, Method::EigenDecomposition);
    const auto ode = run_exact(spec, cut, 1.0, times, Method::OdeAdaptive);
    const auto tay = run_exact(spec, cut, 1.0, times, Method::ScaledExpm);
    double overlap = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto& e = eig.trajectory.states[i].amplitudes();
      overlap = std::max(overlap, 1.0 - std::abs(e.dot(ode.trajectory.states[i].amplitudes())));
      overlap = std::max(overlap, 1.0 - std::abs(e.dot(tay.trajectory.states[i].amplitudes())));
    }
    checks.push_back(detail::check_max("evolution_unitarity", eig.trajectory.max_norm_drift, 1e-10));
    checks.push_back(detail::check_max("evolution_energy", eig.energy_drift, 1e-9));
    checks.push_back(detail::check_max("evolution_charge", eig.charge_drift, 1e-9));
    checks.push_back(detail::check_max("evolution_method_agreement", overlap, 1e-8));
  }
  return checks;
}

inline CommandOutput cmd_selftest(const RunConfig& config) {
  config.validate();
  CommandOutput out;
  const auto checks = run_selftests(config.seed);
  std::ostringstream csv, s;
  csv << "check,passed,max_deviation,tolerance\n";
  int failures = 0;
  for (const auto& c : checks) {
    csv << c.name << ',' << (c.passed ? "true" : "false") << ',' << format_real(c.max_deviation) << ','
        << format_real(c.tolerance) << '\n';
    s << (c.passed ? "PASS " : "FAIL ") << c.name << " (max deviation " << format_real(c.max_deviation) << ")\n";
    failures += c.passed ? 0 : 1;
  }
  s << "selftest: " << checks.size() - static_cast<std::size_t>(failures) << "/" << checks.size()
    << " checks passed (seed " << config.seed << ")\n";
  if (failures) out.exit_code = kClaimFailure;
  out.csv = csv.str();
  out.summary = s.str();
  return out;
}

// --------------------------------------------------------------------------

/// Runs a subcommand by name, mapping failures onto exit codes.
inline CommandOutput run_command(const std::string& name, const RunConfig& config) {
  try {
    if (name == "criteria") return cmd_criteria(config);
    if (name == "compare") return cmd_compare(config);
    if (name == "depth") return cmd_depth(config);
    if (name == "selftest") return cmd_selftest(config);
    throw ConfigError("unknown subcommand '" + name + "'");
  } catch (const ConfigError& e) {
    CommandOutput out;
    out.exit_code = kConfigError;
    out.summary = std::string("error: ") + e.what() + "\n";
    return out;
  } catch (const InvalidArgument& e) {
    CommandOutput out;
    out.exit_code = kConfigError;
    out.summary = std::string("error: ") + e.what() + "\n";
    return out;
  } catch (const CutoffError& e) {
    CommandOutput out;
    out.exit_code = kNumericalFailure;
    out.summary = std::string("error: ") + e.what() + "\n";
    return out;
  } catch (const NumericalError& e) {
    CommandOutput out;
    out.exit_code = kNumericalFailure;
    out.summary = std::string("error: ") + e.what() + "\n";
    return out;
  }
}

} // namespace nonclassic::harness
