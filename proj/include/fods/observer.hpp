// Luenberger-like estimators for fractional-order plants: single-gain and
// memory-gain step laws, the autonomous error recursion, and gain synthesis.
#pragma once

#include "fods/pole_placement.hpp"
#include "fods/simulation.hpp"

namespace fods {

// Innovation weights L_0..L_q; a single entry is the classic observer.
template <typename Scalar>
struct ObserverGains {
  std::vector<MatrixX<Scalar>> gains;

  explicit ObserverGains(std::vector<MatrixX<Scalar>> g) : gains(std::move(g)) {
    if (gains.empty()) throw std::invalid_argument("observer gains: need at least one matrix");
  }
};

// Estimates x̂[0..k] alongside the predicted outputs ŷ[k] = C x̂[k].
template <typename Scalar>
struct EstimateHistory {
  std::vector<VectorX<Scalar>> estimates;
  std::vector<VectorX<Scalar>> predicted_outputs;

  void append(const MatrixX<Scalar>& C, VectorX<Scalar> xhat) {
    predicted_outputs.push_back(C * xhat);
    estimates.push_back(std::move(xhat));
  }
};

template <typename Scalar>
struct ErrorTrajectory {
  std::vector<VectorX<Scalar>> errors;  // e[0..K]
};

namespace detail {

template <typename Scalar>
void check_observer_args(const SystemModel<Scalar>& model, const VectorX<Scalar>& u,
                         const VectorX<Scalar>& y) {
  if (y.size() != model.output_dim())
    throw ConfigError("observer: measurement has " + std::to_string(y.size()) +
                      " entries but C has " + std::to_string(model.output_dim()) + " rows");
  if (u.size() != model.input_dim())
    throw ConfigError("observer: input has " + std::to_string(u.size()) +
                      " entries but B has " + std::to_string(model.input_dim()) + " columns");
}

}  // namespace detail

// Single-gain update: x̂[k+1] = sum_j A_j x̂[k-j] + B u[k] + L (y[k] - ŷ[k]).
template <typename Scalar>
VectorX<Scalar> observer_step(const SystemModel<Scalar>& model, const CoefficientTable<Scalar>& table,
                              const ObserverGains<Scalar>& gains, const EstimateHistory<Scalar>& est,
                              const detail::NoDeduce<VectorX<Scalar>>& u,
                              const detail::NoDeduce<VectorX<Scalar>>& y) {
  if (gains.gains.size() != 1)
    throw std::invalid_argument("observer_step: the single-gain law takes exactly one gain; use "
                                "observer_step_memory for " + std::to_string(gains.gains.size()));
  if (est.estimates.empty()) throw std::invalid_argument("observer_step: empty estimate history");
  detail::check_observer_args(model, u, y);
  const size_t k = est.estimates.size() - 1;
  return memory_sum(table, est.estimates) + model.B * u +
         gains.gains[0] * (y - est.predicted_outputs[k]);
}

// Memory-gain update: x̂[k+1] = sum_j A_j x̂[k-j] + B u[k]
//                              + sum_j L_j (y[k-j] - ŷ[k-j]),
// with gains beyond the stored list treated as zero.
template <typename Scalar>
VectorX<Scalar> observer_step_memory(const SystemModel<Scalar>& model,
                                     const CoefficientTable<Scalar>& table,
                                     const ObserverGains<Scalar>& gains,
                                     const EstimateHistory<Scalar>& est,
                                     const std::vector<VectorX<Scalar>>& input_history,
                                     const std::vector<VectorX<Scalar>>& output_history) {
  if (est.estimates.empty())
    throw std::invalid_argument("observer_step_memory: empty estimate history");
  const size_t k = est.estimates.size() - 1;
  if (output_history.size() != est.estimates.size())
    throw std::invalid_argument("observer_step_memory: need measurements y[0.." +
                                std::to_string(k) + "], got " +
                                std::to_string(output_history.size()));
  if (input_history.size() != k + 1)
    throw std::invalid_argument("observer_step_memory: need inputs u[0.." + std::to_string(k) +
                                "], got " + std::to_string(input_history.size()));
  detail::check_observer_args(model, input_history[k], output_history[k]);

  VectorX<Scalar> next = memory_sum(table, est.estimates) + model.B * input_history[k];
  const size_t taps = std::min(gains.gains.size(), k + 1);
  for (size_t j = 0; j < taps; ++j)
    next += gains.gains[j] * (output_history[k - j] - est.predicted_outputs[k - j]);
  return next;
}

// Autonomous estimation-error recursion:
//   e[k+1] = sum_j A_j e[k-j] - sum_j L_j C e[k-j]
// (single-gain observers apply -L C e[k] only; no input or feedback terms).
template <typename Scalar>
ErrorTrajectory<Scalar> error_trajectory(const SystemModel<Scalar>& model,
                                         const CoefficientTable<Scalar>& table,
                                         const ObserverGains<Scalar>& gains,
                                         const detail::NoDeduce<VectorX<Scalar>>& e0, int K) {
  if (K < 0) throw std::invalid_argument("error_trajectory: negative step count");
  if (e0.size() != model.state_dim())
    throw std::invalid_argument("error_trajectory: e0 has " + std::to_string(e0.size()) +
                                " entries for a " + std::to_string(model.state_dim()) +
                                "-state model");
  ErrorTrajectory<Scalar> traj;
  traj.errors.reserve(size_t(K) + 1);
  traj.errors.push_back(e0);
  for (int k = 0; k < K; ++k) {
    VectorX<Scalar> next = memory_sum(table, traj.errors);
    const size_t taps = std::min(gains.gains.size(), traj.errors.size());
    for (size_t j = 0; j < taps; ++j)
      next -= gains.gains[j] * (model.C * traj.errors[size_t(k) - j]);
    if (!next.allFinite())
      throw NumericError("error_trajectory: error diverged at step " + std::to_string(k + 1));
    traj.errors.push_back(std::move(next));
  }
  return traj;
}

template <typename Scalar>
ErrorTrajectory<Scalar> error_trajectory(const SystemModel<Scalar>& model,
                                         const ObserverGains<Scalar>& gains,
                                         const detail::NoDeduce<VectorX<Scalar>>& e0, int K) {
  return error_trajectory(model, build_coefficient_table(model, K > 0 ? K - 1 : 0), gains, e0, K);
}

// L with spectral radius of (A_0 - L C) at or below target_radius, via pole
// placement on the transposed pair. Fails when a mode outside the target
// radius is invisible to C.
template <typename Scalar>
MatrixX<Scalar> design_observer_gain(const CoefficientTable<Scalar>& table,
                                     const detail::NoDeduce<MatrixX<Scalar>>& C,
                                     detail::NoDeduce<Scalar> target_radius) {
  if (target_radius < Scalar(0))
    throw std::invalid_argument("design_observer_gain: negative target radius");
  const MatrixX<Scalar>& A0 = table.memory_matrix(0);
  const auto bad = undetectable_modes(A0, C, target_radius + Scalar(1e-9));
  if (!bad.empty())
    throw DesignError("design_observer_gain: modes outside the target radius are not "
                      "detectable through C: " + detail::format_modes(bad));
  const MatrixX<Scalar> At = A0.transpose();
  const MatrixX<Scalar> Ct = C.transpose();
  const MatrixX<Scalar> Ft = place(At, Ct, default_pole_set(A0.rows(), target_radius));
  MatrixX<Scalar> L = -Ft.transpose();
  const Scalar reached = spectral_radius(MatrixX<Scalar>(A0 - L * C));
  if (reached > target_radius + Scalar(1e-9))
    throw DesignError("design_observer_gain: placement reached spectral radius " +
                      detail::g17(double(reached)) + " above target " +
                      detail::g17(double(target_radius)));
  return L;
}

}  // namespace fods
