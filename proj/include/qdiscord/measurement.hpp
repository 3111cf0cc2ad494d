#pragma once

// Projective qubit measurements parametrized by a unit 4-vector (t, y1, y2, y3)
// through V = t I + i (y . sigma); outcome k projects onto V|k>.
//
// A MeasurementTree measures qubits 0, 1, ..., N-2 in order. Level k holds
// 2^k frames; the frame used for qubit k is picked by the outcome history of
// qubits 0..k-1, read as a binary number with qubit 0 as the most significant
// bit. Histories are written as strings where character i is the outcome of
// qubit i.

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdiscord/errors.hpp"
#include "qdiscord/linalg.hpp"

namespace qdiscord {

inline constexpr double kFrameNormTol = 1e-12;
/// Branches below this probability carry no weight.
inline constexpr double kNullBranchProbability = 1e-14;

struct MeasurementFrame {
  double t = 1.0;
  double y1 = 0.0;
  double y2 = 0.0;
  double y3 = 0.0;

  double norm_squared() const { return t * t + y1 * y1 + y2 * y2 + y3 * y3; }

  bool is_normalized(double tol = kFrameNormTol) const { return std::abs(norm_squared() - 1.0) <= tol; }

  MeasurementFrame normalized() const {
    const double n = std::sqrt(norm_squared());
    if (!(n > 0.0)) throw ArgumentError("cannot normalize a zero measurement frame");
    return {t / n, y1 / n, y2 / n, y3 / n};
  }

  MeasurementFrame operator-() const { return {-t, -y1, -y2, -y3}; }

  /// V = t I + i (y1 sigma_1 + y2 sigma_2 + y3 sigma_3).
  ComplexMatrix unitary() const {
    ComplexMatrix v(2, 2);
    v << Complex(t, y3), Complex(y2, y1), Complex(-y2, y1), Complex(t, -y3);
    return v;
  }

  /// Measurement basis vector V|k>.
  std::array<Complex, 2> basis_vector(int k) const {
    if (k == 0) return {Complex(t, y3), Complex(-y2, y1)};
    return {Complex(y2, y1), Complex(t, -y3)};
  }

  /// Rank-one projector V|k><k|V^dagger.
  ComplexMatrix projector(int k) const {
    const auto u = basis_vector(k);
    ComplexMatrix p(2, 2);
    p << std::norm(u[0]), u[0] * std::conj(u[1]), u[1] * std::conj(u[0]), std::norm(u[1]);
    return p;
  }

  static MeasurementFrame z_axis() { return {1.0, 0.0, 0.0, 0.0}; }

  /// A frame whose outcome-0 projector has Bloch axis +e_{axis} (axis in 0..2).
  static MeasurementFrame along_axis(int axis) {
    const double h = std::sqrt(0.5);
    switch (axis) {
      case 0: return {h, 0.0, -h, 0.0};
      case 1: return {h, h, 0.0, 0.0};
      case 2: return z_axis();
      default: throw ArgumentError("axis must be 0, 1 or 2");
    }
  }
};

struct BlochAxis {
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 1.0;

  double norm() const { return std::sqrt(z1 * z1 + z2 * z2 + z3 * z3); }
  double operator[](int j) const { return j == 0 ? z1 : (j == 1 ? z2 : z3); }
};

/// Bloch axis of the outcome-0 projector: V Pi_0 V^dagger = (I + z . sigma) / 2.
inline BlochAxis frame_to_bloch(const MeasurementFrame& f) {
  if (!f.is_normalized()) {
    throw ArgumentError("frame_to_bloch: frame is not normalized (|f|^2 = " + std::to_string(f.norm_squared()) +
                        ")");
  }
  return {2.0 * (-f.t * f.y2 + f.y1 * f.y3), 2.0 * (f.t * f.y1 + f.y2 * f.y3),
          f.t * f.t - f.y1 * f.y1 - f.y2 * f.y2 + f.y3 * f.y3};
}

class MeasurementTree {
 public:
  MeasurementTree() = default;

  /// Level k must hold exactly 2^k normalized frames.
  explicit MeasurementTree(std::vector<std::vector<MeasurementFrame>> levels) : levels_(std::move(levels)) {
    for (std::size_t k = 0; k < levels_.size(); ++k) {
      if (levels_[k].size() != (std::size_t{1} << k)) {
        throw ArgumentError("measurement tree level " + std::to_string(k) + " must hold " +
                            std::to_string(std::size_t{1} << k) + " frames, got " +
                            std::to_string(levels_[k].size()));
      }
      for (const auto& f : levels_[k]) {
        if (!f.is_normalized()) throw ArgumentError("measurement tree frame is not normalized");
      }
    }
  }

  /// Tree for an N-qubit state using the same frame at every node.
  static MeasurementTree uniform(int num_qubits, const MeasurementFrame& frame) {
    std::vector<std::vector<MeasurementFrame>> levels;
    for (int k = 0; k < num_qubits - 1; ++k) levels.emplace_back(std::size_t{1} << k, frame);
    return MeasurementTree(std::move(levels));
  }

  /// Number of frames in a full tree for N qubits.
  static std::size_t frame_count(int num_qubits) { return (std::size_t{1} << (num_qubits - 1)) - 1; }

  /// Builds a tree from level-major flattened (t, y1, y2, y3) quadruples; each
  /// quadruple is normalized on the way in.
  static MeasurementTree from_flat(int num_qubits, std::span<const double> flat) {
    if (flat.size() != 4 * frame_count(num_qubits)) {
      throw ArgumentError("flattened tree has wrong length for " + std::to_string(num_qubits) + " qubits");
    }
    std::vector<std::vector<MeasurementFrame>> levels;
    std::size_t pos = 0;
    for (int k = 0; k < num_qubits - 1; ++k) {
      auto& level = levels.emplace_back();
      for (std::size_t i = 0; i < (std::size_t{1} << k); ++i, pos += 4) {
        level.push_back(MeasurementFrame{flat[pos], flat[pos + 1], flat[pos + 2], flat[pos + 3]}.normalized());
      }
    }
    return MeasurementTree(std::move(levels));
  }

  std::vector<double> to_flat() const {
    std::vector<double> out;
    for (const auto& level : levels_) {
      for (const auto& f : level) out.insert(out.end(), {f.t, f.y1, f.y2, f.y3});
    }
    return out;
  }

  int num_levels() const { return static_cast<int>(levels_.size()); }
  /// Qubit count this tree is shaped for.
  int num_qubits() const { return num_levels() + 1; }

  const MeasurementFrame& frame(int level, std::size_t history_index) const {
    return levels_.at(static_cast<std::size_t>(level)).at(history_index);
  }

  const std::vector<std::vector<MeasurementFrame>>& levels() const { return levels_; }

  /// The first `count` levels.
  MeasurementTree prefix(int count) const {
    if (count < 0 || count > num_levels()) throw ArgumentError("tree prefix longer than tree");
    return MeasurementTree(std::vector<std::vector<MeasurementFrame>>(levels_.begin(), levels_.begin() + count));
  }

 private:
  std::vector<std::vector<MeasurementFrame>> levels_;
};

inline nlohmann::json to_json(const MeasurementTree& tree) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& level : tree.levels()) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& f : level) row.push_back({f.t, f.y1, f.y2, f.y3});
    levels.push_back(std::move(row));
  }
  return {{"num_qubits", tree.num_qubits()}, {"levels", std::move(levels)}};
}

inline MeasurementTree tree_from_json(const nlohmann::json& j) {
  try {
    std::vector<std::vector<MeasurementFrame>> levels;
    for (const auto& row : j.at("levels")) {
      auto& level = levels.emplace_back();
      for (const auto& q : row) {
        if (!q.is_array() || q.size() != 4) throw ArgumentError("frame must be a [t, y1, y2, y3] quadruple");
        level.push_back({q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>()});
      }
    }
    MeasurementTree tree(std::move(levels));
    if (j.contains("num_qubits") && j.at("num_qubits").get<int>() != tree.num_qubits()) {
      throw ArgumentError("num_qubits does not match the number of tree levels");
    }
    return tree;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed measurement tree JSON: ") + e.what());
  }
}

struct Branch {
  double probability = 0.0;
  DensityMatrix state;
  std::string history;
  /// Probability below 1e-14; `state` is then a placeholder (maximally mixed).
  bool null_branch = false;
};

using BranchEnsemble = std::vector<Branch>;

inline double total_probability(const BranchEnsemble& e) {
  return std::accumulate(e.begin(), e.end(), 0.0, [](double s, const Branch& b) { return s + b.probability; });
}

/// Measures one qubit: branches (p_k, Pi_k rho Pi_k / p_k) for k = 0, 1.
inline BranchEnsemble measure_qubit(const DensityMatrix& rho, int qubit, const MeasurementFrame& frame) {
  const int n = rho.num_qubits();
  if (qubit < 0 || qubit >= n) throw ArgumentError("measure_qubit: qubit index out of range");
  if (!frame.is_normalized()) throw ArgumentError("measure_qubit: frame is not normalized");
  BranchEnsemble out;
  for (int k = 0; k < 2; ++k) {
    const ComplexMatrix proj = embed_qubit_operator(frame.projector(k), qubit, n);
    ComplexMatrix post = proj * rho.matrix() * proj;
    const double p = post.trace().real();
    if (p < kNullBranchProbability) {
      out.push_back({std::max(p, 0.0), DensityMatrix::maximally_mixed(n), std::to_string(k), true});
    } else {
      post /= p;
      out.push_back({p, DensityMatrix::unchecked(std::move(post)), std::to_string(k), false});
    }
  }
  return out;
}

namespace detail {

inline std::size_t history_index(const std::string& history) {
  std::size_t idx = 0;
  for (char ch : history) idx = 2 * idx + (ch == '1' ? 1 : 0);
  return idx;
}

/// Applies the first `levels` levels of a tree.
inline BranchEnsemble apply_levels(const DensityMatrix& rho, const MeasurementTree& tree, int levels) {
  BranchEnsemble current{{1.0, rho, std::string{}, false}};
  for (int level = 0; level < levels; ++level) {
    BranchEnsemble next;
    next.reserve(current.size() * 2);
    for (const auto& b : current) {
      const auto& frame = tree.frame(level, history_index(b.history));
      if (b.null_branch) {
        for (int k = 0; k < 2; ++k) {
          next.push_back({0.0, b.state, b.history + static_cast<char>('0' + k), true});
        }
        continue;
      }
      for (auto& child : measure_qubit(b.state, level, frame)) {
        child.probability *= b.probability;
        child.history = b.history + child.history;
        if (child.probability < kNullBranchProbability) child.null_branch = true;
        next.push_back(std::move(child));
      }
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace detail

/// Sequential conditional measurement of qubits 0..N-2; 2^(N-1) branches.
inline BranchEnsemble apply_tree(const DensityMatrix& rho, const MeasurementTree& tree) {
  if (tree.num_qubits() != rho.num_qubits()) {
    throw ArgumentError("apply_tree: tree is shaped for " + std::to_string(tree.num_qubits()) +
                        " qubits, state has " + std::to_string(rho.num_qubits()));
  }
  return detail::apply_levels(rho, tree, tree.num_levels());
}

/// S_{A_k | Pi^{A_1..A_{k-1}}}: the branch-averaged entropy of the A_1..A_k
/// marginal after measuring A_1..A_{k-1} with the first k-1 tree levels.
/// `k` is 1-based as in A_k, 2 <= k <= N.
inline double conditional_entropy_term(const DensityMatrix& rho, const MeasurementTree& tree, int k) {
  const int n = rho.num_qubits();
  if (k < 2 || k > n) throw ArgumentError("conditional_entropy_term: need 2 <= k <= N");
  if (tree.num_levels() < k - 1) throw ArgumentError("conditional_entropy_term: tree has too few levels");
  std::vector<int> keep(static_cast<std::size_t>(k));
  std::iota(keep.begin(), keep.end(), 0);
  double s = 0.0;
  for (const auto& b : detail::apply_levels(rho, tree, k - 1)) {
    if (b.null_branch) continue;
    s += b.probability * von_neumann_entropy(partial_trace(b.state, keep));
  }
  return s;
}

/// -S_{A_2..A_N | A_1} = -(S(rho) - S(rho_{A_1})).
inline double unconditional_term(const DensityMatrix& rho) {
  return -(von_neumann_entropy(rho) - von_neumann_entropy(partial_trace(rho, {0})));
}

/// Fast evaluation of sum_{k=2}^{N} S_{A_k | Pi^{A_1..A_{k-1}}} for many trees
/// on one fixed state.
///
/// Works on reduced conditional states: after a qubit is measured it is
/// projected out, so each step halves the dimension. Matches
/// conditional_entropy_term summed over k. Holds scratch buffers, so one
/// instance must not be shared across threads.
class ConditionalEntropyEvaluator {
 public:
  explicit ConditionalEntropyEvaluator(const DensityMatrix& rho)
      : num_qubits_(rho.num_qubits()), root_(rho.matrix()) {
    if (num_qubits_ < 2) throw ArgumentError("need at least two qubits");
    for (int d = 1; d < num_qubits_; ++d) {
      const Eigen::Index dim = Eigen::Index{1} << (num_qubits_ - d);
      scratch_.emplace_back(dim, dim);
    }
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return 4 * MeasurementTree::frame_count(num_qubits_); }

  /// `flat` is a level-major list of (t, y1, y2, y3); quadruples need not be
  /// normalized (they are rescaled here).
  double operator()(std::span<const double> flat) {
    if (flat.size() != dimension()) throw ArgumentError("evaluator: flattened tree has wrong length");
    flat_ = flat;
    return descend(root_, 0, 0);
  }

  double operator()(const MeasurementTree& tree) {
    const auto flat = tree.to_flat();
    return (*this)(flat);
  }

 private:
  double descend(const ComplexMatrix& r, int depth, std::size_t node) {
    const std::size_t off = 4 * ((std::size_t{1} << depth) - 1 + node);
    MeasurementFrame f{flat_[off], flat_[off + 1], flat_[off + 2], flat_[off + 3]};
    f = f.normalized();
    const Eigen::Index half = r.rows() / 2;
    ComplexMatrix& child = scratch_[static_cast<std::size_t>(depth)];
    double acc = 0.0;
    for (int k = 0; k < 2; ++k) {
      const auto u = f.basis_vector(k);
      // (<u| ⊗ I) r (|u> ⊗ I)
      child.noalias() = std::norm(u[0]) * r.topLeftCorner(half, half);
      child.noalias() += (std::conj(u[0]) * u[1]) * r.topRightCorner(half, half);
      child.noalias() += (std::conj(u[1]) * u[0]) * r.bottomLeftCorner(half, half);
      child.noalias() += std::norm(u[1]) * r.bottomRightCorner(half, half);

      const Eigen::Index q = half / 2;
      const double m00 = child.topLeftCorner(q, q).trace().real();
      const double m11 = child.bottomRightCorner(q, q).trace().real();
      const double p = m00 + m11;
      if (p < kNullBranchProbability) continue;
      const Complex m01 = child.topRightCorner(q, q).trace();
      acc += p * qubit_entropy(m00 / p, m01 / p, m11 / p);
      if (depth + 2 < num_qubits_) {
        // Recursion reuses deeper scratch; this level's child stays intact.
        acc += descend(child, depth + 1, 2 * node + static_cast<std::size_t>(k));
      }
    }
    return acc;
  }

  int num_qubits_;
  ComplexMatrix root_;
  std::vector<ComplexMatrix> scratch_;
  std::span<const double> flat_;
};

}  // namespace qdiscord
