#pragma once

// The symmetric N-qubit family rho = (I + sum_j c_j sigma_j^{⊗N}) / 2^N.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qdiscord/errors.hpp"
#include "qdiscord/linalg.hpp"

namespace qdiscord {

/// Largest N accepted by the coefficient parser and the closed forms.
inline constexpr int kMaxFamilyQubits = 62;

/// Physicality tolerance on closed-form eigenvalues.
inline constexpr double kPhysicalTol = 1e-12;

/// The closed forms split N into three classes.
enum class Category { Odd, TwoMod4, ZeroMod4 };

inline Category classify(int num_qubits) {
  if (num_qubits < 2) throw ArgumentError("classify: need N >= 2, got " + std::to_string(num_qubits));
  if (num_qubits % 2 == 1) return Category::Odd;
  return num_qubits % 4 == 2 ? Category::TwoMod4 : Category::ZeroMod4;
}

inline const char* to_string(Category c) {
  switch (c) {
    case Category::Odd: return "Odd";
    case Category::TwoMod4: return "TwoMod4";
    case Category::ZeroMod4: return "ZeroMod4";
  }
  return "?";
}

struct FamilyCoefficients {
  int num_qubits = 2;
  std::array<double, 3> c{0.0, 0.0, 0.0};

  /// Checks N >= 2 and |c_j| <= 1. Physicality is a separate question.
  static FamilyCoefficients make(int num_qubits, double c1, double c2, double c3) {
    if (num_qubits < 2 || num_qubits > kMaxFamilyQubits) {
      throw ArgumentError("number of qubits must be in [2, " + std::to_string(kMaxFamilyQubits) +
                          "], got " + std::to_string(num_qubits));
    }
    for (double v : {c1, c2, c3}) {
      if (!(std::abs(v) <= 1.0)) {
        throw ArgumentError("coefficient out of [-1, 1]: " + std::to_string(v));
      }
    }
    return FamilyCoefficients{num_qubits, {c1, c2, c3}};
  }

  /// Squares summed smallest first so the result is exactly invariant under
  /// permutations and sign flips.
  double xi() const {
    std::array<double, 3> sq{c[0] * c[0], c[1] * c[1], c[2] * c[2]};
    std::sort(sq.begin(), sq.end());
    return std::sqrt(sq[0] + sq[1] + sq[2]);
  }

  double c_max() const { return std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2])}); }

  /// Index (0..2) of the largest |c_j|, lowest index on ties.
  int dominant_axis() const {
    int best = 0;
    for (int j = 1; j < 3; ++j) {
      if (std::abs(c[j]) > std::abs(c[best])) best = j;
    }
    return best;
  }

  friend bool operator==(const FamilyCoefficients&, const FamilyCoefficients&) = default;
};

/// Parses `N:c1,c2,c3`, e.g. `4:0.8,0.4,0.5`.
inline FamilyCoefficients parse_family(std::string_view text) {
  auto fail = [&](const std::string& why) -> FamilyCoefficients {
    throw ArgumentError("cannot parse state '" + std::string(text) + "': " + why);
  };
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };

  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return fail("expected N:c1,c2,c3");
  const std::string_view n_part = trim(text.substr(0, colon));
  int n = 0;
  auto [np, nec] = std::from_chars(n_part.data(), n_part.data() + n_part.size(), n);
  if (nec != std::errc{} || np != n_part.data() + n_part.size()) return fail("bad qubit count");

  std::array<double, 3> c{};
  std::string_view rest = text.substr(colon + 1);
  for (int j = 0; j < 3; ++j) {
    const auto comma = rest.find(',');
    if ((j < 2) != (comma != std::string_view::npos)) return fail("expected exactly three coefficients");
    std::string_view tok = trim(rest.substr(0, comma));
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    auto [cp, cec] = std::from_chars(tok.data(), tok.data() + tok.size(), c[j]);
    if (tok.empty() || cec != std::errc{} || cp != tok.data() + tok.size()) {
      return fail("bad coefficient '" + std::string(tok) + "'");
    }
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  return FamilyCoefficients::make(n, c[0], c[1], c[2]);
}

inline std::string format_family(const FamilyCoefficients& fc) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d:%.17g,%.17g,%.17g", fc.num_qubits, fc.c[0], fc.c[1], fc.c[2]);
  return buf;
}

struct SpectrumEntry {
  double eigenvalue;
  std::uint64_t multiplicity;
};

struct SpectrumReport {
  std::vector<SpectrumEntry> entries;

  double min_eigenvalue() const {
    double m = entries.front().eigenvalue;
    for (const auto& e : entries) m = std::min(m, e.eigenvalue);
    return m;
  }

  /// Eigenvalues repeated by multiplicity, ascending.
  std::vector<double> expanded() const {
    std::vector<double> out;
    for (const auto& e : entries) out.insert(out.end(), e.multiplicity, e.eigenvalue);
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// Closed-form spectrum. Total: unphysical coefficients yield negative entries.
inline SpectrumReport spectrum_closed_form(const FamilyCoefficients& fc) {
  const int n = fc.num_qubits;
  const double scale = std::ldexp(1.0, -n);
  const auto [c1, c2, c3] = fc.c;
  SpectrumReport r;
  switch (classify(n)) {
    case Category::Odd: {
      const std::uint64_t mult = std::uint64_t{1} << (n - 1);
      const double xi = fc.xi();
      r.entries = {{(1.0 - xi) * scale, mult}, {(1.0 + xi) * scale, mult}};
      break;
    }
    case Category::TwoMod4: {
      const std::uint64_t mult = std::uint64_t{1} << (n - 2);
      r.entries = {{(1.0 - c1 - c2 - c3) * scale, mult},
                   {(1.0 - c1 + c2 + c3) * scale, mult},
                   {(1.0 + c1 - c2 + c3) * scale, mult},
                   {(1.0 + c1 + c2 - c3) * scale, mult}};
      break;
    }
    case Category::ZeroMod4: {
      const std::uint64_t mult = std::uint64_t{1} << (n - 2);
      r.entries = {{(1.0 + c1 - c2 - c3) * scale, mult},
                   {(1.0 - c1 + c2 - c3) * scale, mult},
                   {(1.0 - c1 - c2 + c3) * scale, mult},
                   {(1.0 + c1 + c2 + c3) * scale, mult}};
      break;
    }
  }
  return r;
}

inline bool is_physical(const FamilyCoefficients& fc) {
  return spectrum_closed_form(fc).min_eigenvalue() >= -kPhysicalTol;
}

namespace detail {

inline void require_physical(const FamilyCoefficients& fc) {
  const double m = spectrum_closed_form(fc).min_eigenvalue();
  if (m < -kPhysicalTol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "unphysical: min eigenvalue < 0 (%s has min eigenvalue %.6g)",
                  format_family(fc).c_str(), m);
    throw InvalidStateError(buf, m);
  }
}

}  // namespace detail

inline DensityMatrix build_density_matrix(const FamilyCoefficients& fc) {
  if (fc.num_qubits > kMaxDenseQubits) {
    throw UnsupportedSizeError("dense construction supports at most " + std::to_string(kMaxDenseQubits) +
                               " qubits");
  }
  detail::require_physical(fc);
  const int n = fc.num_qubits;
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix m = identity(dim);
  for (int j = 0; j < 3; ++j) {
    if (fc.c[j] != 0.0) m += fc.c[j] * kron_power(pauli(j + 1), n);
  }
  m /= static_cast<double>(dim);
  return DensityMatrix::unchecked(std::move(m));
}

/// S(rho) in bits from the closed-form spectrum.
inline double global_entropy(const FamilyCoefficients& fc) {
  detail::require_physical(fc);
  double s = 0.0;
  for (const auto& e : spectrum_closed_form(fc).entries) {
    if (e.eigenvalue <= 0.0) continue;
    s -= static_cast<double>(e.multiplicity) * e.eigenvalue * std::log2(e.eigenvalue);
  }
  return s;
}

}  // namespace qdiscord
