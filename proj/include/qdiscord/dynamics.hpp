#pragma once

// Phase-flip dephasing of the family and the resulting discord trajectories.

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qdiscord/discord.hpp"
#include "qdiscord/errors.hpp"
#include "qdiscord/linalg.hpp"
#include "qdiscord/state_family.hpp"

namespace qdiscord {

struct ChannelParams {
  double p = 0.0;
  double gamma = 0.0;
  double t = 0.0;

  /// p = 1 - exp(-gamma t).
  static ChannelParams from_rate(double gamma, double t) {
    if (gamma < 0.0 || t < 0.0) throw ArgumentError("phase damping rate and time must be non-negative");
    return {-std::expm1(-gamma * t), gamma, t};
  }
};

namespace detail {

inline void require_strength(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("channel strength p must lie in [0, 1], got " + std::to_string(p));
}

}  // namespace detail

/// Dephasing every qubit scales c1 and c2 by (1-p)^N and leaves c3 alone.
inline FamilyCoefficients phase_flip_coefficients(const FamilyCoefficients& fc, double p) {
  detail::require_strength(p);
  const double s = std::pow(1.0 - p, fc.num_qubits);
  return FamilyCoefficients{fc.num_qubits, {s * fc.c[0], s * fc.c[1], fc.c[2]}};
}

/// Gamma_0^{(A_1)}, Gamma_1^{(A_1)}, ..., Gamma_0^{(A_N)}, Gamma_1^{(A_N)} as
/// full 2^N x 2^N operators.
inline std::vector<ComplexMatrix> kraus_operators(int num_qubits, double p) {
  detail::require_strength(p);
  if (num_qubits < 1 || num_qubits > kMaxDenseQubits) throw UnsupportedSizeError("kraus_operators: bad qubit count");
  ComplexMatrix keep = ComplexMatrix::Zero(2, 2);
  ComplexMatrix flip = ComplexMatrix::Zero(2, 2);
  keep(0, 0) = keep(1, 1) = std::sqrt(1.0 - p / 2.0);
  flip(0, 0) = std::sqrt(p / 2.0);
  flip(1, 1) = -std::sqrt(p / 2.0);
  std::vector<ComplexMatrix> out;
  for (int q = 0; q < num_qubits; ++q) {
    out.push_back(embed_qubit_operator(keep, q, num_qubits));
    out.push_back(embed_qubit_operator(flip, q, num_qubits));
  }
  return out;
}

/// Applies the local channels one qubit at a time: operators 2q and 2q+1 form
/// the Kraus pair of qubit q.
inline DensityMatrix apply_kraus_channel(const DensityMatrix& rho, const std::vector<ComplexMatrix>& kraus) {
  if (kraus.size() % 2 != 0) throw ArgumentError("Kraus operators must come in per-qubit pairs");
  ComplexMatrix m = rho.matrix();
  for (std::size_t q = 0; q < kraus.size(); q += 2) {
    if (kraus[q].rows() != m.rows()) throw ArgumentError("Kraus operator dimension mismatch");
    m = (kraus[q] * m * kraus[q].adjoint() + kraus[q + 1] * m * kraus[q + 1].adjoint()).eval();
  }
  return DensityMatrix::unchecked(std::move(m));
}

struct TrajectoryPoint {
  double p = 0.0;
  FamilyCoefficients evolved;
  /// xi of the evolved state.
  double delta = 0.0;
  /// Largest |c_j| of the evolved state.
  double theta = 0.0;
  bool physical = true;
  std::optional<double> discord_bits;
};

inline std::vector<TrajectoryPoint> discord_trajectory(const FamilyCoefficients& fc, const std::vector<double>& p_grid) {
  std::vector<TrajectoryPoint> out;
  out.reserve(p_grid.size());
  for (double p : p_grid) {
    TrajectoryPoint pt;
    pt.p = p;
    pt.evolved = phase_flip_coefficients(fc, p);
    pt.delta = pt.evolved.xi();
    pt.theta = pt.evolved.c_max();
    pt.physical = is_physical(pt.evolved);
    if (pt.physical) pt.discord_bits = closed_form_discord(pt.evolved).value_bits;
    out.push_back(pt);
  }
  return out;
}

/// Uniform grid of `steps + 1` points on [0, 1].
inline std::vector<double> uniform_p_grid(int steps) {
  if (steps < 1) throw ArgumentError("grid needs at least one step");
  std::vector<double> g(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / steps;
  return g;
}

/// Header `p,c1,c2,c3,delta,theta,discord,physical`; 17 significant digits.
/// Unphysical rows leave the discord column empty.
inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& points) {
  os << "p,c1,c2,c3,delta,theta,discord,physical\n";
  char buf[256];
  for (const auto& pt : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,", pt.p, pt.evolved.c[0], pt.evolved.c[1],
                  pt.evolved.c[2], pt.delta, pt.theta);
    os << buf;
    if (pt.discord_bits) {
      std::snprintf(buf, sizeof buf, "%.17g", *pt.discord_bits);
      os << buf;
    }
    os << ',' << (pt.physical ? "true" : "false") << '\n';
  }
}

struct TransitionReport {
  /// 1 - (|c3| / |c1|)^{1/N}.
  double analytic = 0.0;
  /// Edge of the frozen plateau located by bisection on the trajectory.
  double bisection = 0.0;
  /// Discord on the plateau, f(|c3|).
  double plateau_bits = 0.0;
};

/// Sudden-transition point for N = 0 mod 4 states with c2 = c1 c3 and
/// 0 < |c3| <= |c1|.
inline TransitionReport transition_point(const FamilyCoefficients& fc) {
  const auto [c1, c2, c3] = fc.c;
  if (classify(fc.num_qubits) != Category::ZeroMod4) {
    throw ArgumentError("transition_point: N must be a multiple of 4 (got N = " + std::to_string(fc.num_qubits) + ")");
  }
  if (std::abs(c2 - c1 * c3) > 1e-12) throw ArgumentError("transition_point: condition c2 = c1*c3 violated");
  if (c3 == 0.0) throw ArgumentError("transition_point: condition c3 != 0 violated");
  if (std::abs(c3) > std::abs(c1)) throw ArgumentError("transition_point: condition |c3| < |c1| violated");
  detail::require_physical(fc);

  TransitionReport r;
  r.analytic = 1.0 - std::pow(std::abs(c3) / std::abs(c1), 1.0 / fc.num_qubits);
  r.plateau_bits = closed_form_discord(fc).value_bits;
  if (std::abs(c3) == std::abs(c1)) return r;

  // The plateau holds exactly up to p*; past it D falls with a finite slope.
  auto frozen = [&](double p) {
    return std::abs(closed_form_discord(phase_flip_coefficients(fc, p)).value_bits - r.plateau_bits) <= 1e-13;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    (frozen(mid) ? lo : hi) = mid;
  }
  r.bisection = 0.5 * (lo + hi);
  return r;
}

struct MonotoneReport {
  bool passed = true;
  /// Largest central-difference slope seen at an interior point.
  double max_slope = -std::numeric_limits<double>::infinity();
  std::optional<double> offending_p;
};

/// Checks dD/dp < `slope_tol` by central differences at every interior grid
/// point. Only meaningful for odd N, where no plateau is expected.
inline MonotoneReport certify_monotone_decrease(const FamilyCoefficients& fc, const std::vector<double>& p_grid,
                                                double slope_tol = 1e-12) {
  if (classify(fc.num_qubits) != Category::Odd) throw ArgumentError("monotonicity certificate expects odd N");
  const auto pts = discord_trajectory(fc, p_grid);
  for (const auto& pt : pts) {
    if (!pt.physical) throw ArgumentError("grid leaves the physical region at p = " + std::to_string(pt.p));
  }
  MonotoneReport rep;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double slope = (*pts[i + 1].discord_bits - *pts[i - 1].discord_bits) / (pts[i + 1].p - pts[i - 1].p);
    rep.max_slope = std::max(rep.max_slope, slope);
    if (!(slope < slope_tol) && rep.passed) {
      rep.passed = false;
      rep.offending_p = pts[i].p;
    }
  }
  return rep;
}

}  // namespace qdiscord
