// Exact full-memory simulation, the propagator family, and the closed-form solution.
#pragma once

#include "fods/coefficients.hpp"

namespace fods {

// sum_{j=0}^{d-1} A_j seq[k-j] with k = seq.size()-1 and d = k+1, optionally
// truncated to the last `window` lags (0 = full memory). Every recursion in
// the library funnels through this helper so plant, observer, and error
// trajectories share one summation order, term for term.
template <typename Scalar>
VectorX<Scalar> memory_sum(const CoefficientTable<Scalar>& table,
                           const std::vector<VectorX<Scalar>>& seq, int window = 0) {
  if (seq.empty()) throw std::invalid_argument("memory_sum: empty state history");
  const int k = int(seq.size()) - 1;
  int depth = k + 1;
  if (window > 0 && window < depth) depth = window;
  if (depth - 1 > table.horizon)
    throw std::invalid_argument("memory_sum: history needs lag " + std::to_string(depth - 1) +
                                " but table horizon is " + std::to_string(table.horizon));
  VectorX<Scalar> acc = VectorX<Scalar>::Zero(table.state_dim());
  for (int j = 0; j < depth; ++j) acc += table.memory[size_t(j)] * seq[size_t(k - j)];
  return acc;
}

namespace detail {

template <typename Scalar>
void check_simulation_args(const SystemModel<Scalar>& model, const VectorX<Scalar>& x0,
                           const std::vector<VectorX<Scalar>>& inputs) {
  if (x0.size() != model.state_dim())
    throw std::invalid_argument("simulate: x0 has " + std::to_string(x0.size()) +
                                " entries for a " + std::to_string(model.state_dim()) +
                                "-state model");
  for (const auto& u : inputs)
    if (u.size() != model.input_dim())
      throw std::invalid_argument("simulate: input vector has " + std::to_string(u.size()) +
                                  " entries, expected " + std::to_string(model.input_dim()));
}

}  // namespace detail

// Rolls the recursion x[k+1] = sum_j A_j x[k-j] + B u[k] for K = inputs.size()
// steps, recording outputs y[k] = C x[k] along the way.
template <typename Scalar>
Trajectory<Scalar> simulate(const SystemModel<Scalar>& model, const CoefficientTable<Scalar>& table,
                            const detail::NoDeduce<VectorX<Scalar>>& x0,
                            const std::vector<VectorX<Scalar>>& inputs, int window = 0) {
  detail::check_simulation_args(model, x0, inputs);
  Trajectory<Scalar> traj;
  traj.states.reserve(inputs.size() + 1);
  traj.outputs.reserve(inputs.size() + 1);
  traj.inputs = inputs;
  traj.states.push_back(x0);
  for (size_t k = 0; k < inputs.size(); ++k) {
    VectorX<Scalar> next = memory_sum(table, traj.states, window) + model.B * inputs[k];
    if (!next.allFinite())
      throw NumericError("simulate: state diverged at step " + std::to_string(k + 1));
    traj.states.push_back(std::move(next));
  }
  for (const auto& x : traj.states) traj.outputs.push_back(model.C * x);
  return traj;
}

template <typename Scalar>
Trajectory<Scalar> simulate(const SystemModel<Scalar>& model,
                            const detail::NoDeduce<VectorX<Scalar>>& x0,
                            const std::vector<VectorX<Scalar>>& inputs, int window = 0) {
  const int J = inputs.empty() ? 0 : int(inputs.size()) - 1;
  return simulate(model, build_coefficient_table(model, J), x0, inputs, window);
}

// State-transition family: G_0 = I, G_k = sum_{j=0}^{k-1} A_j G_{k-1-j}.
template <typename Scalar>
struct PropagatorSet {
  std::vector<MatrixX<Scalar>> g;  // G_0 .. G_K
};

template <typename Scalar>
PropagatorSet<Scalar> propagators(const CoefficientTable<Scalar>& table, int K) {
  if (K < 0) throw std::invalid_argument("propagators: negative step count " + std::to_string(K));
  if (K - 1 > table.horizon)
    throw std::invalid_argument("propagators: K = " + std::to_string(K) +
                                " needs table horizon >= " + std::to_string(K - 1));
  const Eigen::Index n = table.state_dim();
  PropagatorSet<Scalar> set;
  set.g.reserve(size_t(K) + 1);
  set.g.push_back(MatrixX<Scalar>::Identity(n, n));
  for (int k = 1; k <= K; ++k) {
    MatrixX<Scalar> gk = MatrixX<Scalar>::Zero(n, n);
    for (int j = 0; j < k; ++j) gk += table.memory[size_t(j)] * set.g[size_t(k - 1 - j)];
    set.g.push_back(std::move(gk));
  }
  return set;
}

template <typename Scalar>
PropagatorSet<Scalar> propagators(const SystemModel<Scalar>& model, int K) {
  return propagators(build_coefficient_table(model, K > 0 ? K - 1 : 0), K);
}

// Closed-form solution x[k] = G_k x0 + sum_{j=0}^{k-1} G_{k-1-j} B u[j].
template <typename Scalar>
VectorX<Scalar> closed_form_state(const SystemModel<Scalar>& model, const PropagatorSet<Scalar>& set,
                                  const detail::NoDeduce<VectorX<Scalar>>& x0,
                                  const std::vector<VectorX<Scalar>>& inputs, int k) {
  detail::check_simulation_args(model, x0, inputs);
  if (k < 0 || size_t(k) > inputs.size())
    throw std::invalid_argument("closed_form_state: step " + std::to_string(k) +
                                " outside the " + std::to_string(inputs.size()) + "-input horizon");
  if (size_t(k) >= set.g.size())
    throw std::invalid_argument("closed_form_state: propagator set too short for step " +
                                std::to_string(k));
  VectorX<Scalar> x = set.g[size_t(k)] * x0;
  for (int j = 0; j < k; ++j) x += set.g[size_t(k - 1 - j)] * (model.B * inputs[size_t(j)]);
  return x;
}

template <typename Scalar>
VectorX<Scalar> closed_form_state(const SystemModel<Scalar>& model,
                                  const detail::NoDeduce<VectorX<Scalar>>& x0,
                                  const std::vector<VectorX<Scalar>>& inputs, int k) {
  return closed_form_state(model, propagators(model, k), x0, inputs, k);
}

}  // namespace fods
