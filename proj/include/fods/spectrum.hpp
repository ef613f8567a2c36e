// Eigenvalue multisets with structural deflation, spectral radii, and multiset pairing.
#pragma once

#include "fods/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>

namespace fods {
namespace detail {

// Strongly connected components of the exact zero-pattern digraph of M
// (edge i -> j iff M(i,j) != 0). Iterative Tarjan; component order is not
// meaningful to callers.
template <typename Scalar>
std::vector<std::vector<int>> sparsity_components(const MatrixX<Scalar>& M) {
  const int n = int(M.rows());
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && M(i, j) != Scalar(0)) adj[size_t(i)].push_back(j);

  std::vector<int> index(size_t(n), -1), low(size_t(n), 0);
  std::vector<char> onstack(size_t(n), 0);
  std::vector<int> stack;
  std::vector<std::pair<int, size_t>> call;  // (vertex, next child position)
  std::vector<std::vector<int>> comps;
  int counter = 0;

  for (int root = 0; root < n; ++root) {
    if (index[size_t(root)] != -1) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      const int v = call.back().first;
      size_t& pos = call.back().second;
      if (pos == 0) {
        index[size_t(v)] = low[size_t(v)] = counter++;
        stack.push_back(v);
        onstack[size_t(v)] = 1;
      }
      bool descended = false;
      while (pos < adj[size_t(v)].size()) {
        const int w = adj[size_t(v)][pos++];
        if (index[size_t(w)] == -1) {
          call.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (onstack[size_t(w)]) low[size_t(v)] = std::min(low[size_t(v)], index[size_t(w)]);
      }
      if (descended) continue;
      if (low[size_t(v)] == index[size_t(v)]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          onstack[size_t(w)] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty())
        low[size_t(call.back().first)] =
            std::min(low[size_t(call.back().first)], low[size_t(v)]);
    }
  }
  return comps;
}

template <typename Scalar>
bool complex_less(const std::complex<Scalar>& a, const std::complex<Scalar>& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace detail

// All eigenvalues of a square real matrix, with algebraic multiplicity, sorted
// by (real, imag). The matrix is first condensed along its exact zero pattern
// (Frobenius normal form): a permutation similarity makes the strongly
// connected components of the sparsity digraph the diagonal blocks of a block
// triangular matrix, so the spectrum is exactly the union of the component
// spectra. This keeps repeated eigenvalues of structurally triangular inputs
// (e.g. block-Toeplitz truncations, where a dense solve would smear a length-N
// Jordan chain by ~eps^(1/N)) at full precision.
template <typename Derived>
std::vector<std::complex<typename Derived::Scalar>> spectrum(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> M = m.derived();
  if (M.rows() != M.cols())
    throw std::invalid_argument("spectrum: matrix is " + std::to_string(M.rows()) + "x" +
                                std::to_string(M.cols()) + ", not square");
  if (!M.allFinite()) throw std::invalid_argument("spectrum: matrix has non-finite entries");

  std::vector<std::complex<Scalar>> eigs;
  eigs.reserve(size_t(M.rows()));
  for (const auto& comp : detail::sparsity_components(M)) {
    if (comp.size() == 1) {
      eigs.emplace_back(M(comp[0], comp[0]), Scalar(0));
      continue;
    }
    MatrixX<Scalar> sub(comp.size(), comp.size());
    for (size_t r = 0; r < comp.size(); ++r)
      for (size_t c = 0; c < comp.size(); ++c) sub(Eigen::Index(r), Eigen::Index(c)) = M(comp[r], comp[c]);
    Eigen::EigenSolver<MatrixX<Scalar>> solver(sub, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
      throw NumericError("spectrum: eigensolver failed to converge on a " +
                         std::to_string(comp.size()) + "x" + std::to_string(comp.size()) +
                         " block");
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
      eigs.push_back(solver.eigenvalues()(i));
  }
  std::sort(eigs.begin(), eigs.end(), detail::complex_less<Scalar>);
  return eigs;
}

template <typename Derived>
typename Derived::Scalar spectral_radius(const Eigen::MatrixBase<Derived>& M) {
  typename Derived::Scalar r(0);
  for (const auto& z : spectrum(M)) r = std::max(r, std::abs(z));
  return r;
}

// Greedy nearest-neighbour multiset pairing after sorting both sides by
// (real, imag); returns the largest paired distance.
template <typename Scalar>
Scalar pair_mismatch(std::vector<std::complex<Scalar>> a, std::vector<std::complex<Scalar>> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("pair_mismatch: multisets have sizes " +
                                std::to_string(a.size()) + " and " + std::to_string(b.size()));
  std::sort(a.begin(), a.end(), detail::complex_less<Scalar>);
  std::sort(b.begin(), b.end(), detail::complex_less<Scalar>);
  std::vector<char> used(b.size(), 0);
  Scalar worst(0);
  for (const auto& z : a) {
    size_t best = b.size();
    Scalar best_dist(0);
    for (size_t i = 0; i < b.size(); ++i) {
      if (used[i]) continue;
      const Scalar d = std::abs(z - b[i]);
      if (best == b.size() || d < best_dist) {
        best = i;
        best_dist = d;
      }
    }
    used[best] = 1;
    worst = std::max(worst, best_dist);
  }
  return worst;
}

}  // namespace fods
