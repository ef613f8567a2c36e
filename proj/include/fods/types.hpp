// Shared dense types, validated model containers, and the error taxonomy.
#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace fods {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {

// Blocks template deduction on a parameter whose Scalar is pinned elsewhere,
// so Eigen expressions convert implicitly instead of failing to deduce.
template <typename T>
using NoDeduce = std::type_identity_t<T>;

}  // namespace detail

// Invalid user-facing configuration: bad dimensions, bad option values.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gain synthesis cannot meet the requested target (unstabilizable/undetectable pairs).
struct DesignError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Floating-point trouble: divergent recursions, eigensolver non-convergence.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem trouble in the experiments layer.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// %.17g: shortest decimal form that round-trips a double exactly.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Per-channel fractional differentiation orders, validated against an open interval.
template <typename Scalar>
class FractionalOrders {
 public:
  explicit FractionalOrders(VectorX<Scalar> alpha, Scalar lo = Scalar(0), Scalar hi = Scalar(2))
      : alpha_(std::move(alpha)) {
    if (alpha_.size() == 0) throw ConfigError("fractional orders: empty vector");
    for (Eigen::Index i = 0; i < alpha_.size(); ++i) {
      const Scalar a = alpha_(i);
      if (!(a > lo) || !(a < hi))  // negated comparisons also reject NaN
        throw ConfigError("fractional order alpha[" + std::to_string(i) + "] = " +
                          detail::g17(double(a)) + " outside the open interval (" +
                          detail::g17(double(lo)) + ", " + detail::g17(double(hi)) + ")");
    }
  }

  const VectorX<Scalar>& vector() const { return alpha_; }
  Scalar operator()(Eigen::Index i) const { return alpha_(i); }
  Eigen::Index size() const { return alpha_.size(); }

 private:
  VectorX<Scalar> alpha_;
};

// x[k+1] = sum_{j=0}^{k} A_j x[k-j] + B u[k],  y[k] = C x[k]
// (A is the raw coupling matrix; the lagged A_j come from a CoefficientTable.)
template <typename Scalar>
struct SystemModel {
  MatrixX<Scalar> A;
  MatrixX<Scalar> B;
  MatrixX<Scalar> C;
  FractionalOrders<Scalar> alpha;

  SystemModel(MatrixX<Scalar> A_in, MatrixX<Scalar> B_in, MatrixX<Scalar> C_in,
              FractionalOrders<Scalar> alpha_in)
      : A(std::move(A_in)), B(std::move(B_in)), C(std::move(C_in)), alpha(std::move(alpha_in)) {
    const Eigen::Index n = A.rows();
    if (n == 0 || A.cols() != n)
      throw ConfigError("system model: A must be square and non-empty, got " +
                        std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
    if (B.rows() != n || B.cols() == 0)
      throw ConfigError("system model: B must be " + std::to_string(n) + "xP with P >= 1, got " +
                        std::to_string(B.rows()) + "x" + std::to_string(B.cols()));
    if (C.cols() != n || C.rows() == 0)
      throw ConfigError("system model: C must be Mx" + std::to_string(n) + " with M >= 1, got " +
                        std::to_string(C.rows()) + "x" + std::to_string(C.cols()));
    if (alpha.size() != n)
      throw ConfigError("system model: alpha has " + std::to_string(alpha.size()) +
                        " entries for a " + std::to_string(n) + "-state model");
    if (!A.allFinite() || !B.allFinite() || !C.allFinite())
      throw ConfigError("system model: matrices must have finite entries");
  }

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }
  Eigen::Index output_dim() const { return C.rows(); }
};

// Full-memory record of one open-loop run.
template <typename Scalar>
struct Trajectory {
  std::vector<VectorX<Scalar>> states;   // x[0..K]
  std::vector<VectorX<Scalar>> inputs;   // u[0..K-1]
  std::vector<VectorX<Scalar>> outputs;  // y[0..K]
};

}  // namespace fods
