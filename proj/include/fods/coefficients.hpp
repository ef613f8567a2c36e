// Grünwald-Letnikov binomial weights and the lagged memory matrices built from them.
#pragma once

#include "fods/types.hpp"

#include <ostream>

namespace fods {

// psi(a, 0) = 1;  psi(a, j) = psi(a, j-1) * (j - 1 - a) / j.
// The multiplicative recurrence is used instead of the gamma-quotient form
// Gamma(j-a) / (Gamma(-a) Gamma(j+1)), which overflows near j ~ 170 in doubles.
template <typename Scalar>
Scalar gl_coefficient(Scalar alpha, int j) {
  if (j < 0) throw std::invalid_argument("gl_coefficient: negative lag " + std::to_string(j));
  Scalar c(1);
  for (int i = 1; i <= j; ++i) c *= (Scalar(i - 1) - alpha) / Scalar(i);
  return c;
}

// All weights psi(alpha, 0..J) in one pass of the recurrence.
template <typename Scalar>
VectorX<Scalar> gl_coefficients(Scalar alpha, int J) {
  if (J < 0) throw std::invalid_argument("gl_coefficients: negative horizon " + std::to_string(J));
  VectorX<Scalar> c(J + 1);
  c(0) = Scalar(1);
  for (int j = 1; j <= J; ++j) c(j) = c(j - 1) * ((Scalar(j - 1) - alpha) / Scalar(j));
  return c;
}

// Precomputed weights for every state channel plus the memory matrices
//   A_0 = A + diag(alpha),   A_j = -diag(psi(alpha_i, j+1))  for j >= 1,
// stored for j = 0..J. Note psi holds one extra column (lag J+1) because A_J
// consumes the weight at lag J+1.
template <typename Scalar>
struct CoefficientTable {
  MatrixX<Scalar> psi;                    // n x (J+2); psi(i, j) = weight of channel i at lag j
  std::vector<MatrixX<Scalar>> memory;    // A_0 .. A_J
  int horizon = 0;                        // J

  Scalar weight(Eigen::Index channel, int j) const { return psi(channel, j); }
  const MatrixX<Scalar>& memory_matrix(int j) const { return memory[size_t(j)]; }
  Eigen::Index state_dim() const { return psi.rows(); }
};

template <typename Scalar>
CoefficientTable<Scalar> build_coefficient_table(const SystemModel<Scalar>& model, int J) {
  if (J < 0)
    throw std::invalid_argument("build_coefficient_table: negative horizon " + std::to_string(J));
  const Eigen::Index n = model.state_dim();

  CoefficientTable<Scalar> table;
  table.horizon = J;
  table.psi.resize(n, J + 2);
  for (Eigen::Index i = 0; i < n; ++i)
    table.psi.row(i) = gl_coefficients(model.alpha(i), J + 1).transpose();

  table.memory.reserve(size_t(J) + 1);
  table.memory.push_back(model.A + MatrixX<Scalar>(model.alpha.vector().asDiagonal()));
  for (int j = 1; j <= J; ++j)
    table.memory.push_back(MatrixX<Scalar>((-table.psi.col(j + 1)).asDiagonal()));
  return table;
}

// Rows channel,j,psi for lags 0..max_lag (default: the table horizon).
template <typename Scalar>
void write_coefficient_csv(std::ostream& os, const CoefficientTable<Scalar>& table,
                           int max_lag = -1) {
  if (max_lag < 0) max_lag = table.horizon;
  if (max_lag >= table.psi.cols())
    throw std::invalid_argument("write_coefficient_csv: lag " + std::to_string(max_lag) +
                                " exceeds stored horizon " + std::to_string(table.horizon));
  os << "channel,j,psi\n";
  for (Eigen::Index i = 0; i < table.psi.rows(); ++i)
    for (int j = 0; j <= max_lag; ++j)
      os << i + 1 << ',' << j << ',' << detail::g17(double(table.psi(i, j))) << '\n';
}

}  // namespace fods
