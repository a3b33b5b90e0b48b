#pragma once

// Independent reference implementations used only by tests. None of these
// call into the code paths they check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "readout_pem/circuit.hpp"
#include "readout_pem/confusion.hpp"
#include "readout_pem/dense_matrix.hpp"
#include "readout_pem/prob.hpp"

namespace oracle {

using readout_pem::ConfusionMatrix;
using readout_pem::DenseMatrix;

/// Plain Kronecker product of two dense matrices.
inline DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline DenseMatrix as_dense(const ConfusionMatrix& q) {
  DenseMatrix m(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m(r, c) = q(r, c);
  return m;
}

/// Q_0 (x) Q_1 (x) ... built by iterated Kronecker products.
inline DenseMatrix kron_chain(const std::vector<ConfusionMatrix>& qs) {
  DenseMatrix out = as_dense(qs.front());
  for (std::size_t i = 1; i < qs.size(); ++i) out = kron(out, as_dense(qs[i]));
  return out;
}

/// p̄_j = sum_k P(j | k) p_k with P(j | k) from per-bit string comparison.
inline std::vector<double> noisy_double_loop(const std::vector<ConfusionMatrix>& qs,
                                             const std::vector<double>& p) {
  const int n = static_cast<int>(qs.size());
  const std::size_t dim = p.size();
  std::vector<double> out(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < dim; ++k) {
      double prob = 1.0;
      for (int i = 0; i < n; ++i) {
        // Written bitstrings, leftmost character = qubit 0.
        const int prepared = (k >> (n - 1 - i)) & 1;
        const int measured = (j >> (n - 1 - i)) & 1;
        prob *= qs[i](prepared, measured);
      }
      out[j] += prob * p[k];
    }
  }
  return out;
}

using CMatrix = std::vector<std::vector<std::complex<double>>>;

inline CMatrix cidentity(std::size_t n) {
  CMatrix m(n, std::vector<std::complex<double>>(n));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline CMatrix ckron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.size() * b.size(), std::vector<std::complex<double>>(a.size() * b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k)
        for (std::size_t l = 0; l < b.size(); ++l)
          out[i * b.size() + k][j * b.size() + l] = a[i][j] * b[k][l];
  return out;
}

inline CMatrix cmul(const CMatrix& a, const CMatrix& b) {
  const std::size_t n = a.size();
  CMatrix out(n, std::vector<std::complex<double>>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

/// Full 2^n x 2^n unitary of one gate: I (x) ... (x) U (x) ... (x) I, or the
/// CX permutation built from basis-state bit manipulation.
inline CMatrix full_gate_matrix(const readout_pem::Gate& g, int n) {
  const std::size_t dim = std::size_t{1} << n;
  if (g.kind == readout_pem::GateKind::CX) {
    CMatrix m(dim, std::vector<std::complex<double>>(dim));
    const int c = g.targets[0], t = g.targets[1];
    for (std::size_t col = 0; col < dim; ++col) {
      std::size_t row = col;
      if ((col >> (n - 1 - c)) & 1) row ^= std::size_t{1} << (n - 1 - t);
      m[row][col] = 1.0;
    }
    return m;
  }
  const auto u = readout_pem::single_qubit_unitary(g.kind, g.theta);
  const CMatrix small{{u[0], u[1]}, {u[2], u[3]}};
  CMatrix out = cidentity(1);
  for (int q = 0; q < n; ++q) out = ckron(out, q == g.targets[0] ? small : cidentity(2));
  return out;
}

/// |U_total e_0|^2 with U_total the ordered product of full gate matrices.
inline std::vector<double> dense_simulate(const readout_pem::Circuit& c) {
  const int n = c.n_qubits();
  CMatrix total = cidentity(std::size_t{1} << n);
  for (const auto& layer : c.layers())
    for (const auto& g : layer) total = cmul(full_gate_matrix(g, n), total);
  std::vector<double> p(total.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::norm(total[j][0]);
  return p;
}

// Random fixtures.

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t dim) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(dim);
  double total = 0.0;
  for (double& x : v) total += (x = e(rng));
  for (double& x : v) x /= total;
  return v;
}

inline ConfusionMatrix random_confusion(std::mt19937_64& rng, double max_flip = 0.2) {
  std::uniform_real_distribution<double> u(0.001, max_flip);
  return ConfusionMatrix::from_flip_rates(u(rng), u(rng));
}

inline std::vector<ConfusionMatrix> random_confusions(std::mt19937_64& rng, int n,
                                                      double max_flip = 0.2) {
  std::vector<ConfusionMatrix> out;
  for (int i = 0; i < n; ++i) out.push_back(random_confusion(rng, max_flip));
  return out;
}

/// Row-stochastic, strictly diagonally dominant dense matrix.
inline DenseMatrix random_dominant_stochastic(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DenseMatrix m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    double off = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      if (c != r) off += (m(r, c) = u(rng));
    }
    // Diagonal keeps more than half of each row.
    const double diag = 0.55 + 0.4 * u(rng);
    for (std::size_t c = 0; c < dim; ++c) {
      m(r, c) = c == r ? diag : m(r, c) * (1.0 - diag) / off;
    }
  }
  return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace oracle
