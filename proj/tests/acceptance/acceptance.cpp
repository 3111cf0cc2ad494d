// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qdiscord/qdiscord.hpp"

namespace {

using namespace qdiscord;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

FamilyCoefficients random_physical(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    FamilyCoefficients fc{n, {u(rng), u(rng), u(rng)}};
    if (is_physical(fc)) return fc;
  }
}

constexpr double kFHalf = 0.18872187554086714;

Verdict oracle_gaps(int n, int states, int restarts, double lower, double upper, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double lo = 1.0, hi = -1.0;
  std::string worst;
  for (int s = 0; s < states; ++s) {
    const auto fc = random_physical(n, rng);
    OracleConfig cfg;
    cfg.restarts = restarts;
    cfg.seed = rng();
    const auto r = oracle_discord(fc, cfg);
    lo = std::min(lo, r.gap_to_closed_form);
    if (r.gap_to_closed_form > hi) {
      hi = r.gap_to_closed_form;
      worst = format_family(fc);
    }
  }
  Verdict v;
  v.pass = lo >= lower && hi <= upper;
  v.detail = "gap range [" + fmt("%.3g", lo) + ", " + fmt("%.3g", hi) + "], worst " + worst;
  return v;
}

Verdict spectra() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int n = 2; n <= 6; ++n) {
    for (int i = 0; i < 200; ++i) {
      const auto fc = random_physical(n, rng);
      const auto closed = spectrum_closed_form(fc).expanded();
      const auto numeric = hermitian_eigenvalues(build_density_matrix(fc).matrix());
      if (closed.size() != numeric.size()) return {false, "size mismatch at " + format_family(fc)};
      for (std::size_t k = 0; k < closed.size(); ++k) worst = std::max(worst, std::abs(closed[k] - numeric[k]));
    }
  }
  return {worst <= 1e-10, "max eigenvalue deviation " + fmt("%.3g", worst)};
}

Verdict channel() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, completeness = 0.0;
  for (int n : {3, 4}) {
    for (int i = 0; i < 20; ++i) {
      const auto fc = random_physical(n, rng);
      const double p = u(rng);
      const auto ks = kraus_operators(n, p);
      for (std::size_t q = 0; q < ks.size(); q += 2) {
        const ComplexMatrix sum = ks[q].adjoint() * ks[q] + ks[q + 1].adjoint() * ks[q + 1];
        completeness = std::max(completeness, (sum - identity(sum.rows())).cwiseAbs().maxCoeff());
      }
      const auto out = apply_kraus_channel(build_density_matrix(fc), ks);
      const auto expect = build_density_matrix(phase_flip_coefficients(fc, p));
      worst = std::max(worst, (out.matrix() - expect.matrix()).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-10 && completeness <= 1e-12,
          "channel deviation " + fmt("%.3g", worst) + ", completeness " + fmt("%.3g", completeness)};
}

Verdict transition() {
  const auto r = transition_point(FamilyCoefficients::make(4, 0.8, 0.4, 0.5));
  const double diff = std::abs(r.analytic - r.bisection);
  return {std::abs(r.analytic - 0.11086) <= 5e-5 && diff <= 1e-8,
          "p* = " + fmt("%.8f", r.analytic) + ", bisection diff " + fmt("%.3g", diff)};
}

Verdict plateau() {
  const auto pts = discord_trajectory(FamilyCoefficients::make(4, 0.8, 0.4, 0.5), {0.0, 0.05, 0.10, 0.2});
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(*pts[static_cast<std::size_t>(i)].discord_bits - kFHalf));
  const double after = *pts[3].discord_bits;
  return {worst <= 1e-9 && after < kFHalf,
          "plateau deviation " + fmt("%.3g", worst) + ", D(0.2) = " + fmt("%.10f", after)};
}

Verdict no_freezing() {
  std::mt19937_64 rng(808);
  const auto grid = uniform_p_grid(200);
  int tested = 0;
  double max_slope = -1e300;
  while (tested < 20) {
    const auto fc = random_physical(3, rng);
    if (!(closed_form_discord(fc).value_bits > 0.0)) continue;
    ++tested;
    const auto rep = certify_monotone_decrease(fc, grid, 0.0);
    max_slope = std::max(max_slope, rep.max_slope);
    if (!rep.passed) return {false, "non-negative slope for " + format_family(fc) + " at p = " + fmt("%g", *rep.offending_p)};
  }
  return {max_slope < 0.0, "max slope " + fmt("%.3g", max_slope)};
}

Verdict equivalences() {
  const int r = 21;
  double worst = 0.0;
  long points = 0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      for (int k = 0; k < r; ++k) {
        const std::array<double, 3> c{-1.0 + 0.1 * i, -1.0 + 0.1 * j, -1.0 + 0.1 * k};
        for (auto [a, b] : {std::pair{3, 5}, std::pair{2, 6}}) {
          const FamilyCoefficients x{a, c}, y{b, c};
          if (!is_physical(x) || !is_physical(y)) continue;
          ++points;
          worst = std::max(worst, std::abs(closed_form_discord(x).value_bits - closed_form_discord(y).value_bits));
        }
      }
    }
  }
  return {worst <= 1e-15, std::to_string(points) + " grid points, max difference " + fmt("%.3g", worst)};
}

Verdict corners() {
  double worst = 0.0;
  worst = std::max(worst, std::abs(closed_form_discord(FamilyCoefficients::make(4, 1, 1, 1)).value_bits - 1.0));
  worst = std::max(worst, std::abs(closed_form_discord(FamilyCoefficients::make(2, 1, -1, 1)).value_bits - 1.0));
  for (int n = 2; n <= 8; ++n) {
    worst = std::max(worst, std::abs(closed_form_discord(FamilyCoefficients::make(n, 0, 0, 0)).value_bits));
    for (int axis = 0; axis < 3; ++axis) {
      for (int s = -20; s <= 20; ++s) {
        FamilyCoefficients fc{n, {0, 0, 0}};
        fc.c[static_cast<std::size_t>(axis)] = s / 20.0;
        if (!is_physical(fc)) continue;
        worst = std::max(worst, std::abs(closed_form_discord(fc).value_bits));
      }
    }
  }
  return {worst <= 1e-12, "max deviation " + fmt("%.3g", worst)};
}

Verdict surfaces() {
  Verdict v;
  std::string detail;
  for (int n : {2, 3, 4}) {
    const auto field = sample_field(n, 61);
    for (double level : {0.03, 0.15, 0.55}) {
      const auto mesh = extract_isosurface(field, level);
      bool ok = true;
      if (level < 0.5 && mesh.empty()) ok = false;
      if (n % 2 == 1 && !is_centrally_symmetric(mesh, 1e-9)) ok = false;
      if (level > 0.5) {
        for (const auto& p : mesh.vertices) {
          if (std::max({std::abs(p[0]), std::abs(p[1]), std::abs(p[2])}) < 0.5) ok = false;
        }
      }
      v.pass = v.pass && ok;
      char buf[96];
      std::snprintf(buf, sizeof buf, "%sN=%d@%.2f:%zu tris%s", detail.empty() ? "" : ", ", n, level,
                    mesh.triangles.size(), ok ? "" : " (bad)");
      detail += buf;
    }
  }
  v.detail = detail;
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "oracle vs closed form, N=3", [] { return oracle_gaps(3, 50, 400, -1e-9, 5e-4, 101); }},
      {2, "oracle vs closed form, N=4", [] { return oracle_gaps(4, 20, 400, -1e-9, 1e-3, 202); }},
      {3, "oracle spot check, N=5", [] { return oracle_gaps(5, 5, 200, -1e300, 2e-3, 303); }},
      {4, "closed-form spectra", spectra},
      {5, "Kraus channel vs coefficient scaling", channel},
      {6, "transition point", transition},
      {7, "frozen plateau", plateau},
      {8, "odd-N monotone decay", no_freezing},
      {9, "category equivalences", equivalences},
      {10, "corner values", corners},
      {11, "level surfaces", surfaces},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::printf("%s %2d %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
