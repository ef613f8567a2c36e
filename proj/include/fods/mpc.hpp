// Receding-horizon quadratic tracking on the MVAR approximation, with the
// observer in the loop against the exact fractional plant.
#pragma once

#include "fods/feedback.hpp"
#include "fods/mvar.hpp"

#include <cmath>

namespace fods {

template <typename Scalar>
struct MpcConfig {
  int prediction_horizon = 8;          // P, steps predicted per solve
  int control_horizon = 4;             // M, moves applied per solve (M <= P)
  int mvar_order = 16;                 // p, memory taps kept by the predictor
  Scalar regularization = Scalar(1e-6);  // lambda, input energy weight
  Scalar sample_rate = Scalar(160);    // fs, Hz

  void validate() const {
    if (prediction_horizon < 1)
      throw ConfigError("prediction_horizon must be at least 1, got " +
                        std::to_string(prediction_horizon));
    if (control_horizon < 1)
      throw ConfigError("control_horizon must be at least 1, got " +
                        std::to_string(control_horizon));
    if (control_horizon > prediction_horizon)
      throw ConfigError("control_horizon (" + std::to_string(control_horizon) +
                        ") exceeds prediction_horizon (" + std::to_string(prediction_horizon) +
                        ")");
    if (mvar_order < 1)
      throw ConfigError("mvar_order must be at least 1, got " + std::to_string(mvar_order));
    if (!(regularization >= Scalar(0)))
      throw ConfigError("regularization must be >= 0, got " +
                        detail::g17(double(regularization)));
    if (!(sample_rate > Scalar(0)))
      throw ConfigError("sample_rate must be positive, got " + detail::g17(double(sample_rate)));
  }
};

// State reference samples x_ref[0..K].
template <typename Scalar>
struct ReferenceSignal {
  std::vector<VectorX<Scalar>> samples;
};

// 50%-duty rectangular wave replicated across all channels: +amplitude on the
// first half of each period (period = round(fs/freq) samples), -amplitude on
// the second. Samples cover steps 0..K.
template <typename Scalar>
ReferenceSignal<Scalar> square_wave_reference(Scalar freq, Scalar fs, Scalar amplitude, int K,
                                              Eigen::Index channels) {
  if (!(freq > Scalar(0)) || !(freq < fs / Scalar(2)))
    throw ConfigError("square wave frequency must lie in (0, fs/2) = (0, " +
                      detail::g17(double(fs / Scalar(2))) + "), got " + detail::g17(double(freq)));
  if (K < 0) throw std::invalid_argument("square_wave_reference: negative step count");
  if (channels < 1) throw std::invalid_argument("square_wave_reference: need >= 1 channel");
  const long period = std::lround(double(fs / freq));
  ReferenceSignal<Scalar> ref;
  ref.samples.reserve(size_t(K) + 1);
  for (int k = 0; k <= K; ++k) {
    const Scalar value = (2 * (k % period) < period) ? amplitude : -amplitude;
    ref.samples.push_back(VectorX<Scalar>::Constant(channels, value));
  }
  return ref;
}

// Stacked P-step prediction split into an input-independent part and a linear
// map of the M blocked moves: x̄ = free_response + forced_map · ū, where moves
// past the control horizon hold the M-th value.
template <typename Scalar>
struct Condensation {
  VectorX<Scalar> free_response;  // P*n
  MatrixX<Scalar> forced_map;     // (P*n) x (M*p_in)
};

template <typename Scalar>
Condensation<Scalar> condense(const MvarModel<Scalar>& mvar,
                              const std::vector<VectorX<Scalar>>& history,
                              const MpcConfig<Scalar>& config) {
  config.validate();
  const int P = config.prediction_horizon, M = config.control_horizon;
  const Eigen::Index n = mvar.state_dim(), p_in = mvar.input_map.cols();
  const std::vector<VectorX<Scalar>> zero_inputs(size_t(P), VectorX<Scalar>::Zero(p_in));

  Condensation<Scalar> cond;
  cond.free_response.resize(P * n);
  const auto free = predict(mvar, history, zero_inputs);
  for (int i = 0; i < P; ++i) cond.free_response.segment(i * n, n) = free[size_t(i)];

  // The predictor is linear in (history, inputs), so each column is the blocked
  // unit-move response from an all-zero history of the same length.
  const std::vector<VectorX<Scalar>> zero_history(history.size(), VectorX<Scalar>::Zero(n));
  cond.forced_map.resize(P * n, M * p_in);
  std::vector<VectorX<Scalar>> unit(size_t(P), VectorX<Scalar>::Zero(p_in));
  for (int m = 0; m < M; ++m) {
    for (Eigen::Index c = 0; c < p_in; ++c) {
      for (int i = 0; i < P; ++i) {
        unit[size_t(i)].setZero();
        if (std::min(i, M - 1) == m) unit[size_t(i)](c) = Scalar(1);
      }
      const auto response = predict(mvar, zero_history, unit);
      for (int i = 0; i < P; ++i)
        cond.forced_map.block(i * n, m * p_in + c, n, 1) = response[size_t(i)];
    }
  }
  return cond;
}

// One receding-horizon solve: moves plus the optimality certificate.
template <typename Scalar>
struct MpcStepSolution {
  std::vector<VectorX<Scalar>> moves;  // M inputs
  Scalar cost = Scalar(0);             // J(ū*) = ||residual||^2 + lambda ||ū*||^2
  Scalar cost_at_zero = Scalar(0);     // J(0)
  Scalar gradient_norm = Scalar(0);    // ||∇J(ū*)||
  bool degenerate = false;             // rank-deficient stacked system (lambda = 0 only)
};

// argmin over stacked moves ū of ||free + forced·ū - ref̄||^2 + lambda ||ū||^2,
// solved with a complete orthogonal decomposition of the stacked system.
template <typename Scalar>
MpcStepSolution<Scalar> solve_mpc_step(const MvarModel<Scalar>& mvar,
                                       const std::vector<VectorX<Scalar>>& history,
                                       const std::vector<VectorX<Scalar>>& ref_window,
                                       const MpcConfig<Scalar>& config) {
  config.validate();
  const int P = config.prediction_horizon, M = config.control_horizon;
  const Eigen::Index n = mvar.state_dim(), p_in = mvar.input_map.cols();
  if (int(ref_window.size()) != P)
    throw std::invalid_argument("solve_mpc_step: reference window has " +
                                std::to_string(ref_window.size()) + " samples, expected " +
                                std::to_string(P));

  const auto cond = condense(mvar, history, config);
  VectorX<Scalar> target(P * n);
  for (int i = 0; i < P; ++i) {
    if (ref_window[size_t(i)].size() != n)
      throw std::invalid_argument("solve_mpc_step: reference sample has " +
                                  std::to_string(ref_window[size_t(i)].size()) +
                                  " entries for a " + std::to_string(n) + "-state model");
    target.segment(i * n, n) = ref_window[size_t(i)];
  }
  const VectorX<Scalar> b = target - cond.free_response;

  const Eigen::Index cols = cond.forced_map.cols();
  const Scalar sqrt_lambda = std::sqrt(config.regularization);
  MatrixX<Scalar> stacked(cond.forced_map.rows() + cols, cols);
  stacked.topRows(cond.forced_map.rows()) = cond.forced_map;
  stacked.bottomRows(cols) = sqrt_lambda * MatrixX<Scalar>::Identity(cols, cols);
  VectorX<Scalar> rhs = VectorX<Scalar>::Zero(stacked.rows());
  rhs.head(b.size()) = b;

  Eigen::CompleteOrthogonalDecomposition<MatrixX<Scalar>> cod(stacked);
  const VectorX<Scalar> u = cod.solve(rhs);

  MpcStepSolution<Scalar> sol;
  sol.degenerate = cod.rank() < cols;
  sol.moves.reserve(size_t(M));
  for (int m = 0; m < M; ++m) sol.moves.push_back(u.segment(m * p_in, p_in));
  const VectorX<Scalar> residual = cond.forced_map * u - b;
  sol.cost = residual.squaredNorm() + config.regularization * u.squaredNorm();
  sol.cost_at_zero = b.squaredNorm();
  sol.gradient_norm =
      (Scalar(2) * (cond.forced_map.transpose() * residual + config.regularization * u)).norm();
  return sol;
}

// Per-solve diagnostics recorded by the closed-loop run.
template <typename Scalar>
struct MpcSolveRecord {
  int step = 0;
  Scalar cost = Scalar(0);
  Scalar cost_at_zero = Scalar(0);
  Scalar gradient_norm = Scalar(0);
  bool degenerate = false;
};

template <typename Scalar>
struct MpcRunResult {
  ClosedLoopTrace<Scalar> trace;
  std::vector<VectorX<Scalar>> references;  // x_ref[0..K]
  std::vector<MpcSolveRecord<Scalar>> solves;
};

// Receding-horizon closed loop against the exact fractional plant: every M
// steps a solve_mpc_step runs on the observer's estimate history (last p taps);
// the stored moves drive both plant and observer between solves, and the
// observer corrects from measured outputs y = C x each step.
template <typename Scalar>
MpcRunResult<Scalar> run_mpc_closed_loop(const SystemModel<Scalar>& plant,
                                         const MpcConfig<Scalar>& config,
                                         const ObserverGains<Scalar>& ogains,
                                         const ReferenceSignal<Scalar>& ref, int K,
                                         detail::NoDeduce<VectorX<Scalar>> x0 = VectorX<Scalar>(),
                                         detail::NoDeduce<VectorX<Scalar>> xhat0 = VectorX<Scalar>()) {
  config.validate();
  if (K < 1) throw std::invalid_argument("run_mpc_closed_loop: need at least one step");
  const Eigen::Index n = plant.state_dim();
  if (int(ref.samples.size()) < K + config.prediction_horizon)
    throw ConfigError("reference covers " + std::to_string(ref.samples.size()) +
                      " samples; a " + std::to_string(K) + "-step run with prediction horizon " +
                      std::to_string(config.prediction_horizon) + " needs at least " +
                      std::to_string(K + config.prediction_horizon));
  if (x0.size() == 0) x0 = VectorX<Scalar>::Zero(n);
  if (xhat0.size() == 0) xhat0 = VectorX<Scalar>::Zero(n);
  if (x0.size() != n || xhat0.size() != n)
    throw std::invalid_argument("run_mpc_closed_loop: state vectors must have " +
                                std::to_string(n) + " entries");

  const auto table =
      build_coefficient_table(plant, std::max(K - 1, config.mvar_order - 1));
  const auto mvar = mvar_truncate(table, plant.B, config.mvar_order);
  const int M = config.control_horizon, P = config.prediction_horizon;

  MpcRunResult<Scalar> result;
  result.references.assign(ref.samples.begin(), ref.samples.begin() + (K + 1));
  auto& trace = result.trace;
  trace.states.push_back(x0);
  EstimateHistory<Scalar> est;
  est.append(plant.C, xhat0);
  std::vector<VectorX<Scalar>> moves;

  for (int k = 0; k < K; ++k) {
    const VectorX<Scalar> y = plant.C * trace.states[size_t(k)];
    trace.outputs.push_back(y);

    if (k % M == 0) {
      const size_t taps = std::min(size_t(config.mvar_order), est.estimates.size());
      const std::vector<VectorX<Scalar>> history(est.estimates.end() - long(taps),
                                                 est.estimates.end());
      const std::vector<VectorX<Scalar>> window(ref.samples.begin() + (k + 1),
                                                ref.samples.begin() + (k + 1 + P));
      auto sol = solve_mpc_step(mvar, history, window, config);
      moves = std::move(sol.moves);
      result.solves.push_back(
          {k, sol.cost, sol.cost_at_zero, sol.gradient_norm, sol.degenerate});
    }
    const VectorX<Scalar>& u = moves[size_t(k % M)];
    trace.inputs.push_back(u);

    VectorX<Scalar> xnext = memory_sum(table, trace.states) + plant.B * u;
    VectorX<Scalar> xhnext = memory_sum(table, est.estimates) + plant.B * u +
                             ogains.gains[0] * (y - est.predicted_outputs[size_t(k)]);
    if (ogains.gains.size() > 1) {
      const size_t taps = std::min(ogains.gains.size(), est.estimates.size());
      for (size_t j = 1; j < taps; ++j)
        xhnext += ogains.gains[j] *
                  (trace.outputs[size_t(k) - j] - est.predicted_outputs[size_t(k) - j]);
    }
    if (!xnext.allFinite() || !xhnext.allFinite())
      throw NumericError("run_mpc_closed_loop: loop diverged at step " + std::to_string(k + 1));
    trace.states.push_back(std::move(xnext));
    est.append(plant.C, std::move(xhnext));
  }
  trace.outputs.push_back(plant.C * trace.states.back());
  trace.estimates = std::move(est.estimates);
  trace.errors.reserve(trace.states.size());
  for (size_t k = 0; k < trace.states.size(); ++k)
    trace.errors.push_back(trace.states[k] - trace.estimates[k]);
  return result;
}

}  // namespace fods
