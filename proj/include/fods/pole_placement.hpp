// Discrete-time eigenvalue assignment: Ackermann for single-input pairs, a direct
// solve for square invertible input maps, staircase splitting for uncontrollable
// pairs, and a randomized single-input reduction for the multi-input case.
#pragma once

#include "fods/random.hpp"
#include "fods/spectrum.hpp"

#include <Eigen/QR>

#include <sstream>

namespace fods {
namespace detail {

template <typename Scalar>
MatrixX<Scalar> controllability_matrix(const MatrixX<Scalar>& A, const MatrixX<Scalar>& B) {
  const Eigen::Index n = A.rows(), p = B.cols();
  MatrixX<Scalar> ctrl(n, n * p);
  MatrixX<Scalar> block = B;
  for (Eigen::Index i = 0; i < n; ++i) {
    ctrl.middleCols(i * p, p) = block;
    if (i + 1 < n) block = A * block;
  }
  return ctrl;
}

// Ackermann's formula for a controllable single-input pair:
//   F = -e_n^T Ctrl^{-1} phi(A),  phi(z) = prod_i (z - poles[i]).
template <typename Scalar>
MatrixX<Scalar> ackermann(const MatrixX<Scalar>& A, const MatrixX<Scalar>& b,
                          const std::vector<Scalar>& poles) {
  const Eigen::Index n = A.rows();
  const MatrixX<Scalar> ctrl = controllability_matrix(A, b);
  Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(ctrl);
  if (qr.rank() < n)
    throw DesignError("pole placement: single-input pair is not controllable (rank " +
                      std::to_string(qr.rank()) + " of " + std::to_string(n) + ")");
  MatrixX<Scalar> phi = MatrixX<Scalar>::Identity(n, n);
  for (const Scalar p : poles) phi = phi * (A - p * MatrixX<Scalar>::Identity(n, n));
  VectorX<Scalar> last = VectorX<Scalar>::Zero(n);
  last(n - 1) = Scalar(1);
  // row = e_n^T Ctrl^{-1}  <=>  Ctrl^T row^T = e_n
  Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr_t(MatrixX<Scalar>(ctrl.transpose()));
  VectorX<Scalar> row = qr_t.solve(last);
  return -(row.transpose() * phi);
}

template <typename Scalar>
std::string format_modes(const std::vector<std::complex<Scalar>>& modes) {
  std::ostringstream os;
  for (size_t i = 0; i < modes.size(); ++i) {
    if (i) os << ", ";
    os << g17(double(modes[i].real()));
    if (modes[i].imag() != Scalar(0)) os << (modes[i].imag() < 0 ? " - " : " + ")
                                         << g17(std::abs(double(modes[i].imag()))) << "i";
  }
  return os.str();
}

}  // namespace detail

// Evenly spaced real poles from 0.98*radius down to 0.90*radius (all of them 0
// when radius is 0, giving deadbeat designs). A tight positive spread keeps the
// placed gains small — large or defective placements destabilize the fractional
// closed loop through the memory tail even when the lag-0 radius looks fine —
// while distinct values keep the placed matrix diagonalizable.
template <typename Scalar>
std::vector<Scalar> default_pole_set(Eigen::Index n, Scalar radius) {
  const Scalar hi = Scalar(0.98), lo = Scalar(0.90);
  std::vector<Scalar> poles(static_cast<size_t>(n));
  if (n == 1) {
    poles[0] = hi * radius;
    return poles;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    poles[size_t(i)] = radius * (hi - (hi - lo) * Scalar(i) / Scalar(n - 1));
  return poles;
}

// Modes of A with |lambda| > radius that fail the rank test on [A - lambda*I, B]
// (those the input map cannot move). Empty result = stabilizable at this radius.
template <typename DerivedA>
std::vector<std::complex<typename DerivedA::Scalar>> unstabilizable_modes(
    const Eigen::MatrixBase<DerivedA>& a_expr,
    const detail::NoDeduce<MatrixX<typename DerivedA::Scalar>>& B,
    detail::NoDeduce<typename DerivedA::Scalar> radius) {
  using Scalar = typename DerivedA::Scalar;
  using Complex = std::complex<Scalar>;
  using MatrixXc = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  const MatrixX<Scalar> A = a_expr.derived();
  const Eigen::Index n = A.rows();
  std::vector<Complex> bad;
  for (const auto& lambda : spectrum(A)) {
    if (std::abs(lambda) <= radius) continue;
    MatrixXc pencil(n, n + B.cols());
    pencil.leftCols(n) = A.template cast<Complex>() - lambda * MatrixXc::Identity(n, n);
    pencil.rightCols(B.cols()) = B.template cast<Complex>();
    Eigen::ColPivHouseholderQR<MatrixXc> qr(pencil);
    if (qr.rank() < n) bad.push_back(lambda);
  }
  return bad;
}

template <typename DerivedA>
std::vector<std::complex<typename DerivedA::Scalar>> undetectable_modes(
    const Eigen::MatrixBase<DerivedA>& A,
    const detail::NoDeduce<MatrixX<typename DerivedA::Scalar>>& C,
    detail::NoDeduce<typename DerivedA::Scalar> radius) {
  using Scalar = typename DerivedA::Scalar;
  return unstabilizable_modes(A.transpose(), MatrixX<Scalar>(C.transpose()), radius);
}

// Returns F such that the eigenvalues of A + B F land on `poles` (real targets).
// Uncontrollable modes stay where they are; callers verify the reached radius.
template <typename DerivedA>
MatrixX<typename DerivedA::Scalar> place(
    const Eigen::MatrixBase<DerivedA>& a_expr,
    const detail::NoDeduce<MatrixX<typename DerivedA::Scalar>>& B,
    const std::vector<typename DerivedA::Scalar>& poles) {
  using Scalar = typename DerivedA::Scalar;
  const MatrixX<Scalar> A = a_expr.derived();
  const Eigen::Index n = A.rows(), p = B.cols();
  if (A.cols() != n) throw std::invalid_argument("place: A must be square");
  if (B.rows() != n) throw std::invalid_argument("place: B row count must match A");
  if (Eigen::Index(poles.size()) != n)
    throw std::invalid_argument("place: need exactly " + std::to_string(n) + " poles, got " +
                                std::to_string(poles.size()));

  const MatrixX<Scalar> ctrl = detail::controllability_matrix(A, B);
  Eigen::ColPivHouseholderQR<MatrixX<Scalar>> ctrl_qr(ctrl);
  const Eigen::Index rank = ctrl_qr.rank();

  if (rank == 0) return MatrixX<Scalar>::Zero(p, n);  // nothing is movable

  if (rank < n) {
    // Orthogonal split: the leading `rank` columns of the factorization's Q
    // span the controllable subspace; place there and leave the unreachable
    // block untouched.
    const MatrixX<Scalar> Q = ctrl_qr.householderQ() * MatrixX<Scalar>::Identity(n, n);
    const MatrixX<Scalar> At = Q.transpose() * A * Q;
    const MatrixX<Scalar> Bt = Q.transpose() * B;
    const MatrixX<Scalar> A11 = At.topLeftCorner(rank, rank);
    const MatrixX<Scalar> B1 = Bt.topRows(rank);
    std::vector<Scalar> sub_poles(poles.begin(), poles.begin() + rank);
    const MatrixX<Scalar> F1 = place(A11, B1, sub_poles);
    MatrixX<Scalar> Ft = MatrixX<Scalar>::Zero(p, n);
    Ft.leftCols(rank) = F1;
    return Ft * Q.transpose();
  }

  if (p == 1) return detail::ackermann(A, B, poles);

  if (p == n) {
    // Square invertible input map: solve A + B F = diag(poles) directly.
    Eigen::FullPivLU<MatrixX<Scalar>> lu(B);
    if (lu.isInvertible()) {
      MatrixX<Scalar> target = MatrixX<Scalar>::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) target(i, i) = poles[size_t(i)];
      return lu.solve(target - A);
    }
  }

  // Multi-input: reduce to single input through a random combination of the
  // columns (Heymann's lemma); a preliminary random feedback makes the matrix
  // cyclic when needed. Fixed seed keeps designs reproducible.
  Rng rng(0x5eed5eedULL);
  for (int attempt = 0; attempt < 16; ++attempt) {
    MatrixX<Scalar> K0 = MatrixX<Scalar>::Zero(p, n);
    if (attempt > 0) K0 = rng.matrix(p, n, -0.1, 0.1).template cast<Scalar>();
    const MatrixX<Scalar> Ac = A + B * K0;
    const MatrixX<Scalar> v = rng.matrix(p, 1, -1.0, 1.0).template cast<Scalar>();
    const MatrixX<Scalar> b = B * v;
    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(detail::controllability_matrix(Ac, b));
    if (qr.rank() < n) continue;
    return K0 + v * detail::ackermann(Ac, b, poles);
  }
  throw DesignError("pole placement: could not reduce the multi-input pair to a "
                    "controllable single-input pair");
}

}  // namespace fods
