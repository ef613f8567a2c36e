// Memory state feedback and the coupled plant/observer closed-loop simulation.
#pragma once

#include "fods/observer.hpp"

namespace fods {

// Feedback taps F_0..F_q acting on the estimate history; taps beyond the list are zero.
template <typename Scalar>
struct FeedbackGains {
  std::vector<MatrixX<Scalar>> gains;

  explicit FeedbackGains(std::vector<MatrixX<Scalar>> g) : gains(std::move(g)) {
    if (gains.empty()) throw std::invalid_argument("feedback gains: need at least one matrix");
  }
};

// All coupled closed-loop signals over one run.
template <typename Scalar>
struct ClosedLoopTrace {
  std::vector<VectorX<Scalar>> states;     // x[0..K]
  std::vector<VectorX<Scalar>> estimates;  // x̂[0..K]
  std::vector<VectorX<Scalar>> errors;     // e[k] = x[k] - x̂[k]
  std::vector<VectorX<Scalar>> inputs;     // u[0..K-1]
  std::vector<VectorX<Scalar>> outputs;    // y[0..K]
};

// u[k] = sum_j F_j x̂[k-j], taps limited to the available history.
template <typename Scalar>
VectorX<Scalar> feedback_input(const FeedbackGains<Scalar>& fgains,
                               const std::vector<VectorX<Scalar>>& estimates) {
  if (estimates.empty()) throw std::invalid_argument("feedback_input: empty estimate history");
  const size_t k = estimates.size() - 1;
  VectorX<Scalar> u = VectorX<Scalar>::Zero(fgains.gains[0].rows());
  const size_t taps = std::min(fgains.gains.size(), estimates.size());
  for (size_t j = 0; j < taps; ++j) u += fgains.gains[j] * estimates[k - j];
  return u;
}

// F_0 with spectral radius of (A_0 + B F_0) at or below target_radius. Fails
// when a mode outside the target radius cannot be moved through B.
template <typename Scalar>
MatrixX<Scalar> design_feedback_gain(const CoefficientTable<Scalar>& table,
                                     const detail::NoDeduce<MatrixX<Scalar>>& B,
                                     detail::NoDeduce<Scalar> target_radius) {
  if (target_radius < Scalar(0))
    throw std::invalid_argument("design_feedback_gain: negative target radius");
  const MatrixX<Scalar>& A0 = table.memory_matrix(0);
  const auto bad = unstabilizable_modes(A0, B, target_radius + Scalar(1e-9));
  if (!bad.empty())
    throw DesignError("design_feedback_gain: modes outside the target radius are not "
                      "reachable through B: " + detail::format_modes(bad));
  const MatrixX<Scalar> F = place(A0, B, default_pole_set(A0.rows(), target_radius));
  const Scalar reached = spectral_radius(MatrixX<Scalar>(A0 + B * F));
  if (reached > target_radius + Scalar(1e-9))
    throw DesignError("design_feedback_gain: placement reached spectral radius " +
                      detail::g17(double(reached)) + " above target " +
                      detail::g17(double(target_radius)));
  return F;
}

// Couples the plant recursion with the observer (single- or memory-gain) under
// u[k] from feedback_input on the estimates. Errors e[k] = x[k] - x̂[k].
template <typename Scalar>
ClosedLoopTrace<Scalar> closed_loop_simulate(const SystemModel<Scalar>& model,
                                             const CoefficientTable<Scalar>& table,
                                             const FeedbackGains<Scalar>& fgains,
                                             const ObserverGains<Scalar>& ogains,
                                             const detail::NoDeduce<VectorX<Scalar>>& x0,
                                             const detail::NoDeduce<VectorX<Scalar>>& xhat0,
                                             int K, int window = 0) {
  if (K < 1) throw std::invalid_argument("closed_loop_simulate: need at least one step");
  if (x0.size() != model.state_dim() || xhat0.size() != model.state_dim())
    throw std::invalid_argument("closed_loop_simulate: state vectors must have " +
                                std::to_string(model.state_dim()) + " entries");

  ClosedLoopTrace<Scalar> trace;
  trace.states.push_back(x0);
  EstimateHistory<Scalar> est;
  est.append(model.C, xhat0);
  for (int k = 0; k < K; ++k) {
    const VectorX<Scalar> y = model.C * trace.states[size_t(k)];
    trace.outputs.push_back(y);
    const VectorX<Scalar> u = feedback_input(fgains, est.estimates);
    trace.inputs.push_back(u);

    VectorX<Scalar> xnext = memory_sum(table, trace.states, window) + model.B * u;
    VectorX<Scalar> xhnext = memory_sum(table, est.estimates, window) + model.B * u;
    const size_t taps = std::min(ogains.gains.size(), est.estimates.size());
    for (size_t j = 0; j < taps; ++j)
      xhnext += ogains.gains[j] *
                (trace.outputs[size_t(k) - j] - est.predicted_outputs[size_t(k) - j]);

    if (!xnext.allFinite() || !xhnext.allFinite())
      throw NumericError("closed_loop_simulate: loop diverged at step " + std::to_string(k + 1));
    trace.states.push_back(std::move(xnext));
    est.append(model.C, std::move(xhnext));
  }
  trace.outputs.push_back(model.C * trace.states.back());
  trace.estimates = std::move(est.estimates);
  trace.errors.reserve(trace.states.size());
  for (size_t k = 0; k < trace.states.size(); ++k)
    trace.errors.push_back(trace.states[k] - trace.estimates[k]);
  return trace;
}

template <typename Scalar>
ClosedLoopTrace<Scalar> closed_loop_simulate(const SystemModel<Scalar>& model,
                                             const FeedbackGains<Scalar>& fgains,
                                             const ObserverGains<Scalar>& ogains,
                                             const detail::NoDeduce<VectorX<Scalar>>& x0,
                                             const detail::NoDeduce<VectorX<Scalar>>& xhat0,
                                             int K, int window = 0) {
  return closed_loop_simulate(model, build_coefficient_table(model, K > 0 ? K - 1 : 0), fgains,
                              ogains, x0, xhat0, K, window);
}

}  // namespace fods
