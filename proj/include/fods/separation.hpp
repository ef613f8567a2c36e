// Finite block-Toeplitz truncations of the coupled closed-loop operator and the
// spectral separation check: the assembled operator is block upper-triangular,
// so its spectrum must be the union of the controller and observer block spectra.
#pragma once

#include "fods/feedback.hpp"

#include <sstream>

namespace fods {

// Order-N truncations: `controller` stacks the closed-loop state couplings
// A_{i-k} + B F_{i-k}, `coupling` the error injections -B F_{i-k}, and
// `observer` the error dynamics with A_0 - LC on the diagonal and A_j - LC on
// the sub-diagonals (with the memory-gain extension, A_j - L_j C instead).
template <typename Scalar>
struct TruncationBlocks {
  MatrixX<Scalar> controller;  // Nn x Nn, block lower-triangular Toeplitz
  MatrixX<Scalar> coupling;    // Nn x Nn
  MatrixX<Scalar> observer;    // Nn x Nn
  MatrixX<Scalar> assembled;   // [[controller, coupling], [0, observer]]
  int block_order = 0;
};

template <typename Scalar>
TruncationBlocks<Scalar> toeplitz_truncation(const CoefficientTable<Scalar>& table,
                                             const detail::NoDeduce<MatrixX<Scalar>>& B,
                                             const detail::NoDeduce<MatrixX<Scalar>>& C,
                                             const FeedbackGains<Scalar>& fgains,
                                             const ObserverGains<Scalar>& ogains, int N,
                                             bool memory_gain_blocks = false) {
  if (N < 1) throw std::invalid_argument("toeplitz_truncation: block order must be >= 1");
  if (N - 1 > table.horizon)
    throw std::invalid_argument("toeplitz_truncation: block order " + std::to_string(N) +
                                " needs table horizon >= " + std::to_string(N - 1));
  if (!memory_gain_blocks && ogains.gains.size() != 1)
    throw std::invalid_argument("toeplitz_truncation: the printed truncation uses a single "
                                "observer gain; enable memory_gain_blocks for " +
                                std::to_string(ogains.gains.size()));

  const Eigen::Index n = table.state_dim();
  const auto zero = MatrixX<Scalar>::Zero(n, n);
  auto fgain = [&](int j) -> MatrixX<Scalar> {
    if (size_t(j) < fgains.gains.size()) return B * fgains.gains[size_t(j)];
    return zero;
  };
  auto lgain = [&](int j) -> MatrixX<Scalar> {
    // Printed form: the same L weights every sub-diagonal. Extension: lag-matched L_j.
    if (!memory_gain_blocks) return ogains.gains[0] * C;
    if (size_t(j) < ogains.gains.size()) return ogains.gains[size_t(j)] * C;
    return zero;
  };

  TruncationBlocks<Scalar> blocks;
  blocks.block_order = N;
  blocks.controller = MatrixX<Scalar>::Zero(N * n, N * n);
  blocks.coupling = MatrixX<Scalar>::Zero(N * n, N * n);
  blocks.observer = MatrixX<Scalar>::Zero(N * n, N * n);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k <= i; ++k) {
      const int j = i - k;
      const MatrixX<Scalar> bf = fgain(j);
      blocks.controller.block(i * n, k * n, n, n) = table.memory_matrix(j) + bf;
      blocks.coupling.block(i * n, k * n, n, n) = -bf;
      blocks.observer.block(i * n, k * n, n, n) = table.memory_matrix(j) - lgain(j);
    }
  }
  blocks.assembled = MatrixX<Scalar>::Zero(2 * N * n, 2 * N * n);
  blocks.assembled.topLeftCorner(N * n, N * n) = blocks.controller;
  blocks.assembled.topRightCorner(N * n, N * n) = blocks.coupling;
  blocks.assembled.bottomRightCorner(N * n, N * n) = blocks.observer;
  return blocks;
}

template <typename Scalar>
struct SeparationReport {
  int block_order = 0;
  int state_dim = 0;
  Scalar max_mismatch = Scalar(0);
  Scalar tolerance = Scalar(0);
  bool pass = false;
  Scalar controller_block_radius = Scalar(0);  // rho(A_0 + B F_0)
  Scalar observer_block_radius = Scalar(0);    // rho(A_0 - L C)
  std::vector<std::complex<Scalar>> assembled_spectrum;
  std::vector<std::complex<Scalar>> union_spectrum;

  std::string to_text() const {
    std::ostringstream os;
    os << "separation truncation report\n"
       << "block order: " << block_order << "\n"
       << "state dimension: " << state_dim << "\n"
       << "assembled operator: " << 2 * block_order * state_dim << " x "
       << 2 * block_order * state_dim << "\n"
       << "eigenvalues compared: " << assembled_spectrum.size() << " vs "
       << union_spectrum.size() << "\n"
       << "max pairing mismatch: " << detail::g17(double(max_mismatch)) << "\n"
       << "tolerance: " << detail::g17(double(tolerance)) << "\n"
       << "result: " << (pass ? "PASS" : "FAIL") << "\n"
       << "controller block spectral radius: " << detail::g17(double(controller_block_radius))
       << "\n"
       << "observer block spectral radius: " << detail::g17(double(observer_block_radius))
       << "\n";
    return os.str();
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << "block_order,state_dim,max_mismatch,tolerance,pass,controller_block_radius,"
          "observer_block_radius\n"
       << block_order << ',' << state_dim << ',' << detail::g17(double(max_mismatch)) << ','
       << detail::g17(double(tolerance)) << ',' << (pass ? 1 : 0) << ','
       << detail::g17(double(controller_block_radius)) << ','
       << detail::g17(double(observer_block_radius)) << '\n';
    return os.str();
  }
};

// Builds the order-N truncation, compares the assembled spectrum against the
// union of the block spectra, and reports the worst pairing mismatch.
template <typename Scalar>
SeparationReport<Scalar> verify_separation(const SystemModel<Scalar>& model,
                                           const FeedbackGains<Scalar>& fgains,
                                           const ObserverGains<Scalar>& ogains, int N, Scalar tol,
                                           bool memory_gain_blocks = false) {
  const auto table = build_coefficient_table(model, N > 0 ? N - 1 : 0);
  const auto blocks =
      toeplitz_truncation(table, model.B, model.C, fgains, ogains, N, memory_gain_blocks);

  SeparationReport<Scalar> report;
  report.block_order = N;
  report.state_dim = int(model.state_dim());
  report.tolerance = tol;
  report.assembled_spectrum = spectrum(blocks.assembled);
  report.union_spectrum = spectrum(blocks.controller);
  const auto observer_side = spectrum(blocks.observer);
  report.union_spectrum.insert(report.union_spectrum.end(), observer_side.begin(),
                               observer_side.end());
  std::sort(report.union_spectrum.begin(), report.union_spectrum.end(),
            detail::complex_less<Scalar>);
  report.max_mismatch = pair_mismatch(report.assembled_spectrum, report.union_spectrum);
  report.pass = report.max_mismatch <= tol;
  report.controller_block_radius = spectral_radius(
      MatrixX<Scalar>(table.memory_matrix(0) + model.B * fgains.gains[0]));
  report.observer_block_radius = spectral_radius(
      MatrixX<Scalar>(table.memory_matrix(0) - ogains.gains[0] * model.C));
  return report;
}

}  // namespace fods
