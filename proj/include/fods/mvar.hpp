// Finite-memory multivariate autoregressive approximation of the fractional plant.
#pragma once

#include "fods/coefficients.hpp"

namespace fods {

// x[k+1] = sum_{j=0}^{p-1} A_j x[k-j] + B u[k], the first p memory matrices of
// the parent model.
template <typename Scalar>
struct MvarModel {
  std::vector<MatrixX<Scalar>> coeffs;
  MatrixX<Scalar> input_map;

  int order() const { return int(coeffs.size()); }
  Eigen::Index state_dim() const { return coeffs.empty() ? 0 : coeffs[0].rows(); }
};

template <typename Scalar>
MvarModel<Scalar> mvar_truncate(const CoefficientTable<Scalar>& table,
                                const detail::NoDeduce<MatrixX<Scalar>>& B,
                                int order) {
  if (order < 1)
    throw ConfigError("mvar order must be at least 1, got " + std::to_string(order));
  if (order - 1 > table.horizon)
    throw ConfigError("mvar order " + std::to_string(order) + " needs memory matrices up to lag " +
                      std::to_string(order - 1) + ", but the table horizon is " +
                      std::to_string(table.horizon));
  if (B.rows() != table.state_dim())
    throw ConfigError("mvar input map has " + std::to_string(B.rows()) + " rows for a " +
                      std::to_string(table.state_dim()) + "-state model");
  MvarModel<Scalar> mvar;
  mvar.coeffs.assign(table.memory.begin(), table.memory.begin() + order);
  mvar.input_map = B;
  return mvar;
}

// Rolls the truncated recursion H = inputs.size() steps forward, feeding each
// prediction back into the history; taps are limited to what is available, so
// with p >= depth the roll matches the exact simulation term for term.
template <typename Scalar>
std::vector<VectorX<Scalar>> predict(const MvarModel<Scalar>& mvar,
                                     const std::vector<VectorX<Scalar>>& history,
                                     const std::vector<VectorX<Scalar>>& inputs) {
  if (history.empty()) throw std::invalid_argument("predict: empty state history");
  const Eigen::Index n = mvar.state_dim();
  std::vector<VectorX<Scalar>> buffer = history;
  std::vector<VectorX<Scalar>> out;
  out.reserve(inputs.size());
  for (const auto& u : inputs) {
    const size_t k = buffer.size() - 1;
    const size_t taps = std::min(size_t(mvar.order()), buffer.size());
    VectorX<Scalar> next = VectorX<Scalar>::Zero(n);
    for (size_t j = 0; j < taps; ++j) next += mvar.coeffs[j] * buffer[k - j];
    next += mvar.input_map * u;
    if (!next.allFinite())
      throw NumericError("predict: forecast diverged " + std::to_string(out.size() + 1) +
                         " steps ahead");
    buffer.push_back(next);
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace fods
