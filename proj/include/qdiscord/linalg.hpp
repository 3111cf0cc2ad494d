#pragma once

// Dense complex matrix helpers for small multi-qubit systems.
//
// Index convention: qubit 0 is the leftmost tensor factor, i.e. the most
// significant bit of a computational-basis index. For an n-qubit register the
// basis state |b_0 b_1 ... b_{n-1}> has index sum_i b_i * 2^(n-1-i).

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdiscord/errors.hpp"

namespace qdiscord {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Largest register handled by the dense routines.
inline constexpr int kMaxDenseQubits = 7;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kNegativeEigenTol = 1e-10;
inline constexpr double kEigenClampTol = 1e-12;

namespace detail {

inline bool is_power_of_two(Eigen::Index n) {
  return n >= 2 && std::has_single_bit(static_cast<std::size_t>(n));
}

inline int log2_dim(Eigen::Index n) {
  return std::countr_zero(static_cast<std::size_t>(n));
}

}  // namespace detail

inline ComplexMatrix identity(Eigen::Index dim) {
  return ComplexMatrix::Identity(dim, dim);
}

/// Pauli matrix sigma_j for j in {1, 2, 3}; j == 0 gives the 2x2 identity.
inline ComplexMatrix pauli(int j) {
  ComplexMatrix m(2, 2);
  const Complex i1(0.0, 1.0);
  switch (j) {
    case 0: m << 1.0, 0.0, 0.0, 1.0; break;
    case 1: m << 0.0, 1.0, 1.0, 0.0; break;
    case 2: m << 0.0, -i1, i1, 0.0; break;
    case 3: m << 1.0, 0.0, 0.0, -1.0; break;
    default: throw ArgumentError("pauli index must be 0..3, got " + std::to_string(j));
  }
  return m;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw ArgumentError("kron: operands must be square");
  }
  const Eigen::Index na = a.rows();
  const Eigen::Index nb = b.rows();
  ComplexMatrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
    }
  }
  return out;
}

/// Kronecker power: m ⊗ m ⊗ ... (count factors).
inline ComplexMatrix kron_power(const ComplexMatrix& m, int count) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int i = 0; i < count; ++i) out = kron(out, m);
  return out;
}

/// Embeds a single-qubit operator on `qubit` of an n-qubit register.
inline ComplexMatrix embed_qubit_operator(const ComplexMatrix& op, int qubit, int num_qubits) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < num_qubits; ++q) {
    out = kron(out, q == qubit ? op : identity(2));
  }
  return out;
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    }
  }
  return true;
}

/// Real eigenvalues of a Hermitian matrix, ascending.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  if (!is_hermitian(m)) throw ArgumentError("hermitian_eigenvalues: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("hermitian_eigenvalues: eigensolver failed");
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

/// -sum lambda log2 lambda over a probability spectrum.
///
/// Eigenvalues below -1e-10 are rejected. Anything at or below zero after that
/// contributes nothing; values above one (roundoff) are clamped to one.
inline double entropy_bits(std::span<const double> eigenvalues) {
  double s = 0.0;
  for (double lambda : eigenvalues) {
    if (lambda < -kNegativeEigenTol) {
      throw InvalidStateError("entropy: negative eigenvalue " + std::to_string(lambda), lambda);
    }
    if (lambda <= 0.0) continue;
    if (lambda > 1.0) lambda = 1.0;
    s -= lambda * std::log2(lambda);
  }
  return s;
}

/// Positive semidefinite, unit-trace, Hermitian matrix on `num_qubits` qubits.
class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity (all within 1e-10).
  static DensityMatrix from_matrix(ComplexMatrix m) {
    if (m.rows() != m.cols() || !detail::is_power_of_two(m.rows())) {
      throw ArgumentError("density matrix must be square with power-of-two dimension");
    }
    if (!is_hermitian(m)) throw InvalidStateError("density matrix is not Hermitian", 0.0);
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
      throw InvalidStateError("density matrix trace is " + std::to_string(tr), 0.0);
    }
    const auto ev = hermitian_eigenvalues(m);
    if (ev.front() < -kNegativeEigenTol) {
      throw InvalidStateError("density matrix has negative eigenvalue " + std::to_string(ev.front()),
                              ev.front());
    }
    return DensityMatrix(std::move(m));
  }

  /// Skips validation; for states produced by trusted internal routines.
  static DensityMatrix unchecked(ComplexMatrix m) { return DensityMatrix(std::move(m)); }

  static DensityMatrix maximally_mixed(int num_qubits) {
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    return DensityMatrix(identity(dim) / static_cast<double>(dim));
  }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  int num_qubits() const noexcept { return num_qubits_; }
  double trace() const { return m_.trace().real(); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)), num_qubits_(detail::log2_dim(m_.rows())) {}

  ComplexMatrix m_;
  int num_qubits_;
};

/// Reduced state on the qubits listed in `keep` (ascending, no repeats).
/// The kept qubits keep their relative order.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const int n = rho.num_qubits();
  if (keep.empty()) throw ArgumentError("partial_trace: keep set is empty");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n) {
      throw ArgumentError("partial_trace: qubit index " + std::to_string(keep[i]) + " out of range");
    }
    if (i > 0 && keep[i] <= keep[i - 1]) {
      throw ArgumentError("partial_trace: keep indices must be strictly ascending");
    }
  }
  std::vector<int> traced;
  for (int q = 0, j = 0; q < n; ++q) {
    if (j < static_cast<int>(keep.size()) && keep[j] == q) {
      ++j;
    } else {
      traced.push_back(q);
    }
  }
  const int nk = static_cast<int>(keep.size());
  const int nt = static_cast<int>(traced.size());

  // Scatter a local index over a subset of qubits into a full register index.
  auto scatter = [n](std::size_t local, std::span<const int> qubits) {
    std::size_t full = 0;
    const int m = static_cast<int>(qubits.size());
    for (int b = 0; b < m; ++b) {
      if ((local >> (m - 1 - b)) & 1U) full |= std::size_t{1} << (n - 1 - qubits[b]);
    }
    return full;
  };

  const std::size_t dk = std::size_t{1} << nk;
  const std::size_t dt = std::size_t{1} << nt;
  std::vector<std::size_t> keep_off(dk), trace_off(dt);
  for (std::size_t a = 0; a < dk; ++a) keep_off[a] = scatter(a, keep);
  for (std::size_t e = 0; e < dt; ++e) trace_off[e] = scatter(e, traced);

  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t a = 0; a < dk; ++a) {
    for (std::size_t b = 0; b < dk; ++b) {
      Complex acc = 0.0;
      for (std::size_t e = 0; e < dt; ++e) {
        acc += m(static_cast<Eigen::Index>(keep_off[a] | trace_off[e]),
                 static_cast<Eigen::Index>(keep_off[b] | trace_off[e]));
      }
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
    }
  }
  return DensityMatrix::unchecked(std::move(out));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

/// Von Neumann entropy in bits.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  const auto ev = hermitian_eigenvalues(rho.matrix());
  return entropy_bits(ev);
}

/// Entropy of a 2x2 Hermitian unit-trace block, solved in closed form.
inline double qubit_entropy(double a00, const Complex& a01, double a11) {
  const double mean = 0.5 * (a00 + a11);
  const double half_gap = std::sqrt(0.25 * (a00 - a11) * (a00 - a11) + std::norm(a01));
  const double ev[2] = {mean - half_gap, mean + half_gap};
  return entropy_bits(ev);
}

/// Writes one matrix row per line, entries `re+imj` with 17 significant digits.
inline void write_matrix_csv(std::ostream& os, const ComplexMatrix& m) {
  char buf[96];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      // + 0.0 turns -0 into 0
      std::snprintf(buf, sizeof buf, "%.17g%+.17gj", m(i, j).real() + 0.0, m(i, j).imag() + 0.0);
      if (j > 0) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace qdiscord
