#pragma once

// Exact unitary evolution |psi(t)> = exp(-iHt)|psi0> on the truncated basis.
//
// The default route diagonalizes H once, block by block: H commutes with the
// charge Q = n N_A + m N_B, so the basis splits into small equal-charge
// blocks that are each solved with a dense Hermitian eigensolver. A Taylor
// propagator with step scaling and an adaptive Dormand-Prince integrator are
// kept as independent cross-checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include "nonclassic/error.hpp"
#include "nonclassic/fock.hpp"
#include "nonclassic/parallel.hpp"
#include "nonclassic/process.hpp"

namespace nonclassic {

enum class Method { EigenDecomposition, ScaledExpm, OdeAdaptive };

inline const char* method_name(Method method) {
  switch (method) {
    case Method::EigenDecomposition: return "eigen";
    case Method::ScaledExpm: return "expm";
    case Method::OdeAdaptive: return "ode";
  }
  return "?";
}

struct EvolutionPlan {
  HamiltonianMatrix hamiltonian;
  std::vector<double> times;
  Method method = Method::EigenDecomposition;
  double tolerance = 1e-10;
  /// EigenDecomposition requests above this dimension run on the ODE integrator.
  Eigen::Index ode_fallback_dim = 4096;
  unsigned workers = 1;

  void validate() const {
    if (!(tolerance > 0) || !std::isfinite(tolerance)) throw InvalidArgument("EvolutionPlan: tolerance must be > 0");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!std::isfinite(times[i]) || times[i] < 0) throw InvalidArgument("EvolutionPlan: times must be finite and >= 0");
      if (i > 0 && !(times[i] > times[i - 1])) throw InvalidArgument("EvolutionPlan: times must be strictly increasing");
    }
  }

  [[nodiscard]] Method effective_method() const {
    if (method == Method::EigenDecomposition && hamiltonian.dimension() > ode_fallback_dim) return Method::OdeAdaptive;
    return method;
  }
};

struct Trajectory {
  TwoModeState initial;
  std::vector<double> times;
  std::vector<TwoModeState> states;
  Method method = Method::EigenDecomposition;
  double max_leakage = 0.0;
  double max_norm_drift = 0.0;
  /// Some state crossed the leakage ceiling; its statistics are not trustworthy.
  bool leakage_flagged = false;
};

/// Per-charge-block eigendecomposition of a Hamiltonian.
class ChargeBlockSpectrum {
public:
  explicit ChargeBlockSpectrum(const HamiltonianMatrix& hamiltonian) : dimension_(hamiltonian.dimension()) {
    const auto& spec = hamiltonian.spec();
    const auto& cut = hamiltonian.cutoffs();
    std::map<long, std::vector<Eigen::Index>> by_charge;
    std::vector<std::pair<std::size_t, Eigen::Index>> position(static_cast<std::size_t>(dimension_));
    for (Eigen::Index i = 0; i < dimension_; ++i) {
      const auto [n_a, n_b] = cut.occupation(i);
      by_charge[spec.charge(n_a, n_b)].push_back(i);
    }
    blocks_.reserve(by_charge.size());
    for (auto& [charge, indices] : by_charge) {
      for (std::size_t k = 0; k < indices.size(); ++k)
        position[static_cast<std::size_t>(indices[k])] = {blocks_.size(), static_cast<Eigen::Index>(k)};
      blocks_.push_back(Block{std::move(indices), {}, {}});
    }

    std::vector<Eigen::MatrixXcd> matrices(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto size = static_cast<Eigen::Index>(blocks_[b].indices.size());
      matrices[b] = Eigen::MatrixXcd::Zero(size, size);
    }
    const auto& h = hamiltonian.sparse();
    for (Eigen::Index col = 0; col < h.outerSize(); ++col) {
      for (HamiltonianMatrix::Sparse::InnerIterator it(h, col); it; ++it) {
        const auto [row_block, row_pos] = position[static_cast<std::size_t>(it.row())];
        const auto [col_block, col_pos] = position[static_cast<std::size_t>(it.col())];
        if (row_block != col_block) throw NumericalError("ChargeBlockSpectrum: H couples different charge sectors");
        matrices[row_block](row_pos, col_pos) = it.value();
      }
    }
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrices[b]);
      if (solver.info() != Eigen::Success) throw NumericalError("ChargeBlockSpectrum: eigensolver failed");
      blocks_[b].energies = solver.eigenvalues();
      blocks_[b].vectors = solver.eigenvectors();
    }
  }

  [[nodiscard]] std::size_t block_count() const { return blocks_.size(); }

  [[nodiscard]] std::size_t largest_block() const {
    std::size_t largest = 0;
    for (const auto& b : blocks_) largest = std::max(largest, b.indices.size());
    return largest;
  }

  [[nodiscard]] Eigen::VectorXcd propagate(const Eigen::VectorXcd& psi0, double t) const {
    if (psi0.size() != dimension_) throw InvalidArgument("ChargeBlockSpectrum: dimension mismatch");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dimension_);
    for (const auto& block : blocks_) {
      const auto size = static_cast<Eigen::Index>(block.indices.size());
      Eigen::VectorXcd local(size);
      for (Eigen::Index k = 0; k < size; ++k) local[k] = psi0[block.indices[static_cast<std::size_t>(k)]];
      if (local.squaredNorm() == 0) continue;
      Eigen::VectorXcd coeff = block.vectors.adjoint() * local;
      for (Eigen::Index k = 0; k < size; ++k) coeff[k] *= std::polar(1.0, -block.energies[k] * t);
      local = block.vectors * coeff;
      for (Eigen::Index k = 0; k < size; ++k) out[block.indices[static_cast<std::size_t>(k)]] = local[k];
    }
    return out;
  }

private:
  struct Block {
    std::vector<Eigen::Index> indices;
    Eigen::VectorXd energies;
    Eigen::MatrixXcd vectors;
  };

  Eigen::Index dimension_;
  std::vector<Block> blocks_;
};

namespace detail {

inline double max_abs_row_sum(const HamiltonianMatrix::Sparse& h) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(h.rows());
  for (Eigen::Index col = 0; col < h.outerSize(); ++col)
    for (HamiltonianMatrix::Sparse::InnerIterator it(h, col); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

// exp(-i H dt) psi by truncated Taylor series over substeps with |H| h <= 1/2.
inline Eigen::VectorXcd taylor_propagate(const HamiltonianMatrix::Sparse& h, double h_norm, Eigen::VectorXcd psi,
                                         double dt, double tolerance) {
  if (dt == 0) return psi;
  const auto substeps = std::max<long>(1, static_cast<long>(std::ceil(2.0 * h_norm * dt)));
  const double step = dt / static_cast<double>(substeps);
  const std::complex<double> factor(0.0, -step);
  const double term_floor = std::min(tolerance * 1e-6, 1e-17);
  for (long s = 0; s < substeps; ++s) {
    Eigen::VectorXcd term = psi;
    Eigen::VectorXcd sum = psi;
    for (int k = 1; k < 200; ++k) {
      term = (factor / static_cast<double>(k)) * (h * term);
      sum += term;
      if (term.norm() <= term_floor * sum.norm()) break;
    }
    psi = std::move(sum);
  }
  return psi;
}

inline std::vector<Eigen::VectorXcd> ode_propagate(const HamiltonianMatrix::Sparse& h, const Eigen::VectorXcd& psi0,
                                                   const std::vector<double>& times, double tolerance) {
  namespace odeint = boost::numeric::odeint;
  using state_type = std::vector<std::complex<double>>;
  const auto dim = psi0.size();

  std::vector<double> grid;
  grid.reserve(times.size() + 1);
  const bool prepend_zero = times.empty() || times.front() > 0;
  if (prepend_zero) grid.push_back(0.0);
  grid.insert(grid.end(), times.begin(), times.end());

  std::vector<Eigen::VectorXcd> out;
  out.reserve(times.size());
  if (times.empty()) return out;

  state_type x(psi0.data(), psi0.data() + dim);
  auto rhs = [&](const state_type& in, state_type& dxdt, double) {
    Eigen::Map<const Eigen::VectorXcd> v(in.data(), dim);
    Eigen::Map<Eigen::VectorXcd> d(dxdt.data(), dim);
    d.noalias() = std::complex<double>(0.0, -1.0) * (h * v);
  };
  std::size_t seen = 0;
  auto observer = [&](const state_type& state, double) {
    if (!(prepend_zero && seen == 0)) out.emplace_back(Eigen::Map<const Eigen::VectorXcd>(state.data(), dim));
    ++seen;
  };
  const double local_tol = tolerance * 1e-3;
  const double h_norm = std::max(1.0, max_abs_row_sum(h));
  odeint::integrate_times(odeint::make_dense_output(local_tol, local_tol, odeint::runge_kutta_dopri5<state_type>()),
                          rhs, x, grid.begin(), grid.end(), 0.01 / h_norm, observer);
  if (out.size() != times.size()) throw NumericalError("ode_propagate: integrator skipped output times");
  return out;
}

} // namespace detail

inline Trajectory evolve(const TwoModeState& state0, const EvolutionPlan& plan) {
  plan.validate();
  const auto& hamiltonian = plan.hamiltonian;
  if (!(state0.cutoffs() == hamiltonian.cutoffs())) throw InvalidArgument("evolve: state and Hamiltonian cutoffs differ");

  const Method method = plan.effective_method();
  const auto& psi0 = state0.amplitudes();
  std::vector<Eigen::VectorXcd> psis(plan.times.size());

  switch (method) {
    case Method::EigenDecomposition: {
      const ChargeBlockSpectrum spectrum(hamiltonian);
      parallel_for(plan.times.size(), [&](std::size_t i) {
        psis[i] = plan.times[i] == 0 ? psi0 : spectrum.propagate(psi0, plan.times[i]);
      }, plan.workers);
      break;
    }
    case Method::ScaledExpm: {
      const double h_norm = detail::max_abs_row_sum(hamiltonian.sparse());
      Eigen::VectorXcd current = psi0;
      double now = 0.0;
      for (std::size_t i = 0; i < plan.times.size(); ++i) {
        current = detail::taylor_propagate(hamiltonian.sparse(), h_norm, std::move(current), plan.times[i] - now,
                                           plan.tolerance);
        now = plan.times[i];
        psis[i] = current;
      }
      break;
    }
    case Method::OdeAdaptive:
      psis = detail::ode_propagate(hamiltonian.sparse(), psi0, plan.times, plan.tolerance);
      break;
  }

  Trajectory out{state0, plan.times, {}, method};
  out.states.reserve(psis.size());
  for (auto& psi : psis) {
    out.states.emplace_back(state0.cutoffs(), std::move(psi), state0.norm_deficit());
    const auto& s = out.states.back();
    out.max_leakage = std::max(out.max_leakage, s.leakage());
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(s.norm() - state0.norm()));
  }
  out.leakage_flagged = out.max_leakage > kLeakageCeiling;
  return out;
}

inline std::vector<FactorialMoments> moments_at(std::span<const TwoModeState> states, Mode mode, int k_max) {
  std::vector<FactorialMoments> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(factorial_moments(s, mode, k_max));
  return out;
}

inline double charge_expectation(const TwoModeState& state, const ProcessSpec& spec) {
  const Eigen::VectorXd q = conserved_charge(spec, state.cutoffs());
  CompensatedSum<long double> sum;
  for (Eigen::Index i = 0; i < q.size(); ++i) sum += std::norm(state.amplitudes()[i]) * q[i];
  return static_cast<double>(sum.value());
}

/// |<Q>(t) - <Q>(reference)| for each state.
inline std::vector<double> charge_drift(const TwoModeState& reference, std::span<const TwoModeState> states,
                                        const ProcessSpec& spec) {
  const double q0 = charge_expectation(reference, spec);
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(std::abs(charge_expectation(s, spec) - q0));
  return out;
}

inline std::vector<double> charge_drift(std::span<const TwoModeState> states, const ProcessSpec& spec) {
  if (states.empty()) return {};
  return charge_drift(states.front(), states, spec);
}

/// Largest |<H>(t) - <H>(0)| / max(|<H>(0)|, 1) along a trajectory.
inline double relative_energy_drift(const Trajectory& trajectory, const HamiltonianMatrix& hamiltonian) {
  const double e0 = hamiltonian.expectation(trajectory.initial);
  double worst = 0.0;
  for (const auto& s : trajectory.states)
    worst = std::max(worst, std::abs(hamiltonian.expectation(s) - e0) / std::max(std::abs(e0), 1.0));
  return worst;
}

/// Largest |<Q>(t) - <Q>(0)| / max(<Q>(0), 1) along a trajectory.
inline double relative_charge_drift(const Trajectory& trajectory, const ProcessSpec& spec) {
  const double q0 = charge_expectation(trajectory.initial, spec);
  double worst = 0.0;
  for (double d : charge_drift(trajectory.initial, trajectory.states, spec))
    worst = std::max(worst, d / std::max(std::abs(q0), 1.0));
  return worst;
}

/// CSV: time,mode,N1,N2,N3,N4,norm,leakage,charge_drift (one row per time and mode).
inline void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const ProcessSpec& spec,
                                 std::span<const Mode> modes) {
  const auto precision = out.precision(17);
  out << "time,mode,N1,N2,N3,N4,norm,leakage,charge_drift\n";
  const auto drift = charge_drift(trajectory.initial, trajectory.states, spec);
  for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
    const auto& s = trajectory.states[i];
    for (Mode mode : modes) {
      const auto fm = factorial_moments(s, mode, 4);
      out << trajectory.times[i] << ',' << mode_name(mode);
      for (double v : fm.values) out << ',' << v;
      out << ',' << s.norm() << ',' << s.leakage() << ',' << drift[i] << '\n';
    }
  }
  out.precision(precision);
}

} // namespace nonclassic
