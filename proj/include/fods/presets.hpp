// Bundled models: the identified 4-channel EEG plant and a minimal scalar system.
#pragma once

#include "fods/mpc.hpp"

namespace fods {

// 4-channel plant identified from one second of normalized EEG: uniform input
// coupling, first channel measured. Pairs with the MpcConfig defaults
// (P = 8, M = 4, fs = 160 Hz).
template <typename Scalar = double>
SystemModel<Scalar> eeg_model() {
  MatrixX<Scalar> A(4, 4);
  A << Scalar(0.0350), Scalar(0.0526), Scalar(-0.0034), Scalar(-0.0391),
       Scalar(0.0296), Scalar(-0.0496), Scalar(0.0646), Scalar(0.0610),
       Scalar(-0.0103), Scalar(-0.0028), Scalar(-0.0091), Scalar(0.0068),
       Scalar(-0.0291), Scalar(0.0143), Scalar(-0.0008), Scalar(0.0394);
  VectorX<Scalar> alpha(4);
  alpha << Scalar(0.5945), Scalar(0.7176), Scalar(0.9603), Scalar(0.6279);
  MatrixX<Scalar> B(4, 1);
  B << Scalar(1), Scalar(1), Scalar(1), Scalar(1);
  MatrixX<Scalar> C(1, 4);
  C << Scalar(1), Scalar(0), Scalar(0), Scalar(0);
  return SystemModel<Scalar>(std::move(A), std::move(B), std::move(C),
                             FractionalOrders<Scalar>(std::move(alpha)));
}

// Scalar half-order system with unit input and measurement maps; hand-checkable
// trajectories (x0 = 1, u = 0 gives 1, 0.5, 0.375, 0.3125, ...).
template <typename Scalar = double>
SystemModel<Scalar> scalar_model() {
  MatrixX<Scalar> A(1, 1);
  A << Scalar(0);
  VectorX<Scalar> alpha(1);
  alpha << Scalar(0.5);
  MatrixX<Scalar> B(1, 1);
  B << Scalar(1);
  MatrixX<Scalar> C(1, 1);
  C << Scalar(1);
  return SystemModel<Scalar>(std::move(A), std::move(B), std::move(C),
                             FractionalOrders<Scalar>(std::move(alpha)));
}

}  // namespace fods
