#pragma once

// Multipartite discord of the symmetric family: closed forms per N-category,
// the measurement-dependent objective, and a brute-force minimization oracle.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "qdiscord/errors.hpp"
#include "qdiscord/linalg.hpp"
#include "qdiscord/measurement.hpp"
#include "qdiscord/nelder_mead.hpp"
#include "qdiscord/state_family.hpp"

namespace qdiscord {

/// Largest N the oracle accepts.
inline constexpr int kMaxOracleQubits = 5;

namespace detail {

/// (1 + x) log2(1 + x), zero at x <= -1.
inline double one_plus_x_log2(double x) {
  if (x <= -1.0) return 0.0;
  return (1.0 + x) * std::log1p(x) / std::numbers::ln2;
}

}  // namespace detail

/// f(x) = (1+x)/2 log2(1+x) + (1-x)/2 log2(1-x); equals 1 - H((1+x)/2).
/// Inputs within 1e-12 outside [0, 1] are clamped.
inline double entropy_defect(double x) {
  constexpr double tol = 1e-12;
  if (!(x >= -tol && x <= 1.0 + tol)) {
    throw ArgumentError("entropy_defect: argument " + std::to_string(x) + " outside [0, 1]");
  }
  x = std::clamp(x, 0.0, 1.0);
  return 0.5 * (detail::one_plus_x_log2(x) + detail::one_plus_x_log2(-x));
}

struct ClosedFormReport {
  Category category = Category::Odd;
  double xi = 0.0;
  double c_max = 0.0;
  double value_bits = 0.0;
  /// Axis (0..2) of the largest |c_j|; measuring every qubit along it is optimal.
  int optimal_axis = 0;
};

inline ClosedFormReport closed_form_discord(const FamilyCoefficients& fc) {
  detail::require_physical(fc);
  ClosedFormReport r;
  r.category = classify(fc.num_qubits);
  r.xi = fc.xi();
  r.c_max = fc.c_max();
  r.optimal_axis = fc.dominant_axis();
  const auto [c1, c2, c3] = fc.c;

  double global_part = 0.0;
  switch (r.category) {
    case Category::Odd:
      global_part = entropy_defect(std::min(r.xi, 1.0));
      break;
    case Category::TwoMod4:
      global_part = 0.25 * (detail::one_plus_x_log2(-c1 - c2 - c3) + detail::one_plus_x_log2(-c1 + c2 + c3) +
                            detail::one_plus_x_log2(c1 - c2 + c3) + detail::one_plus_x_log2(c1 + c2 - c3));
      break;
    case Category::ZeroMod4:
      global_part = 0.25 * (detail::one_plus_x_log2(c1 - c2 - c3) + detail::one_plus_x_log2(-c1 + c2 - c3) +
                            detail::one_plus_x_log2(-c1 - c2 + c3) + detail::one_plus_x_log2(c1 + c2 + c3));
      break;
  }
  r.value_bits = global_part - entropy_defect(r.c_max);
  return r;
}

/// The bracketed sum of the discord definition for one measurement tree,
/// evaluated numerically on the dense state.
inline double discord_objective(const FamilyCoefficients& fc, const MeasurementTree& tree) {
  if (tree.num_qubits() != fc.num_qubits) {
    throw ArgumentError("discord_objective: tree is shaped for " + std::to_string(tree.num_qubits()) +
                        " qubits, state has " + std::to_string(fc.num_qubits));
  }
  const DensityMatrix rho = build_density_matrix(fc);
  double value = unconditional_term(rho);
  for (int k = 2; k <= fc.num_qubits; ++k) value += conditional_entropy_term(rho, tree, k);
  return value;
}

struct OracleConfig {
  int restarts = 400;
  std::uint64_t seed = 1;
  int max_iters = 2000;
  double tol = 1e-10;
  double initial_step = 0.25;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct OracleResult {
  double value_bits = 0.0;
  MeasurementTree best_tree;
  int restart_count = 0;
  long objective_evaluations = 0;
  double closed_form_bits = 0.0;
  /// value_bits - closed-form value.
  double gap_to_closed_form = 0.0;
  int best_restart = 0;
};

namespace detail {

inline void normalize_quadruples(std::vector<double>& x) {
  for (std::size_t i = 0; i + 3 < x.size(); i += 4) {
    double n = std::sqrt(x[i] * x[i] + x[i + 1] * x[i + 1] + x[i + 2] * x[i + 2] + x[i + 3] * x[i + 3]);
    if (!(n > 1e-300)) {
      x[i] = 1.0;
      x[i + 1] = x[i + 2] = x[i + 3] = 0.0;
      continue;
    }
    for (int j = 0; j < 4; ++j) x[i + j] /= n;
  }
}

/// Deterministic per-restart generator derived from the master seed.
inline std::mt19937_64 restart_rng(std::uint64_t master, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(restart), 0x9e3779b9U};
  return std::mt19937_64(seq);
}

struct RestartOutcome {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> x;
  long evaluations = 0;
};

}  // namespace detail

/// Multistart downhill-simplex minimization of discord_objective over all
/// frames of the measurement tree. Each restart draws uniform random unit
/// 4-vectors per frame. Output does not depend on the thread count.
inline OracleResult oracle_discord(const FamilyCoefficients& fc, const OracleConfig& cfg = {}) {
  if (fc.num_qubits > kMaxOracleQubits) {
    throw UnsupportedSizeError("oracle supports at most " + std::to_string(kMaxOracleQubits) + " qubits, got " +
                               std::to_string(fc.num_qubits));
  }
  if (cfg.restarts < 1) throw ArgumentError("oracle needs at least one restart");
  const ClosedFormReport closed = closed_form_discord(fc);
  const DensityMatrix rho = build_density_matrix(fc);
  const double unconditional = unconditional_term(rho);

  NelderMeadOptions nm;
  nm.f_tol = cfg.tol;
  nm.max_iterations = cfg.max_iters;
  nm.initial_step = cfg.initial_step;

  std::vector<detail::RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  auto worker = [&](unsigned first, unsigned stride) {
    ConditionalEntropyEvaluator eval(rho);
    auto objective = [&](const std::vector<double>& x) { return unconditional + eval(x); };
    for (auto r = first; r < outcomes.size(); r += stride) {
      auto rng = detail::restart_rng(cfg.seed, static_cast<int>(r));
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<double> x0(eval.dimension());
      for (auto& v : x0) v = gauss(rng);
      detail::normalize_quadruples(x0);
      auto res = nelder_mead(objective, std::move(x0), nm, detail::normalize_quadruples);
      outcomes[r] = {res.value, std::move(res.x), res.evaluations};
    }
  };

  unsigned threads = cfg.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.restarts));
  if (threads <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
  }

  OracleResult out;
  out.restart_count = cfg.restarts;
  out.closed_form_bits = closed.value_bits;
  std::size_t best = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    out.objective_evaluations += outcomes[r].evaluations;
    if (outcomes[r].value < outcomes[best].value) best = r;
  }
  out.best_restart = static_cast<int>(best);
  out.best_tree = MeasurementTree::from_flat(fc.num_qubits, outcomes[best].x);
  // Re-evaluate the normalized argmin so value and tree agree exactly.
  ConditionalEntropyEvaluator eval(rho);
  out.value_bits = unconditional + eval(out.best_tree);
  out.gap_to_closed_form = out.value_bits - closed.value_bits;
  return out;
}

}  // namespace qdiscord
