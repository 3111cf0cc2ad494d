#pragma once

// Downhill simplex (Nelder-Mead) minimization with an optional projection
// applied to every trial point.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

namespace qdiscord {

struct NelderMeadOptions {
  /// Stop once max f - min f over the simplex falls below this.
  double f_tol = 1e-10;
  int max_iterations = 2000;
  /// Edge length of the initial simplex along each coordinate.
  double initial_step = 0.25;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  long evaluations = 0;
  bool converged = false;
};

struct IdentityProjection {
  void operator()(std::vector<double>&) const {}
};

/// Minimizes `f` starting from `x0`. `project` maps each new vertex back onto
/// the feasible set (in place) before it is evaluated.
template <class Objective, class Projection = IdentityProjection>
NelderMeadResult nelder_mead(Objective&& f, std::vector<double> x0, const NelderMeadOptions& opt = {},
                             Projection&& project = {}) {
  const std::size_t n = x0.size();
  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return static_cast<double>(f(x));
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  project(simplex[0]);
  values[0] = eval(simplex[0]);
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] += opt.initial_step;
    project(simplex[i + 1]);
    values[i + 1] = eval(simplex[i + 1]);
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto along = [&](double coeff, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coeff * (worst[j] - centroid[j]);
    project(out);
  };

  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    if (values[worst] - values[best] < opt.f_tol) {
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (auto& c : centroid) c /= static_cast<double>(n);

    along(-opt.reflection, trial, simplex[worst]);
    const double f_reflect = eval(trial);

    if (f_reflect < values[best]) {
      along(-opt.reflection * opt.expansion, trial2, simplex[worst]);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }

    // Outside contraction if the reflection improved on the worst point,
    // inside contraction otherwise.
    const bool outside = f_reflect < values[worst];
    along(outside ? -opt.contraction : opt.contraction, trial2, simplex[worst]);
    const double f_contract = eval(trial2);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }

    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) {
        simplex[i][j] = simplex[best][j] + opt.shrink * (simplex[i][j] - simplex[best][j]);
      }
      project(simplex[i]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  res.x = simplex[best];
  res.value = values[best];
  return res;
}

}  // namespace qdiscord
