#pragma once

// Command-line front end. Every command writes line-oriented `key: value`
// output (or CSV) and returns a stable exit code:
//   0 success, 1 parse error, 2 domain/physicality error,
//   3 unsupported size, 4 I/O error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdiscord/qdiscord.hpp"

namespace qdiscord::cli {

enum ExitCode : int { kOk = 0, kParseError = 1, kDomainError = 2, kUnsupportedSize = 3, kIoError = 4 };

/// Accepted oracle-minus-closed-form gap per N.
inline double validation_threshold(int num_qubits) {
  switch (num_qubits) {
    case 2:
    case 3: return 5e-4;
    case 4: return 1e-3;
    default: return 2e-3;
  }
}

/// Lower bound on the gap: the oracle may not undercut the closed form.
inline constexpr double kGapFloor = -1e-9;

namespace detail {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.12g", v);
  return buf;
}

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Runs a command body, mapping library errors onto exit codes.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const UnsupportedSizeError& e) {
    err << "error: " << e.what() << '\n';
    return kUnsupportedSize;
  } catch (const FileError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const InvalidStateError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
}

/// Random physical coefficients, uniform over the physical part of the cube.
inline FamilyCoefficients random_physical(int num_qubits, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const double a = u(rng), b = u(rng), c = u(rng);
    FamilyCoefficients fc{num_qubits, {a, b, c}};
    if (is_physical(fc)) return fc;
  }
}

}  // namespace detail

struct OracleFlags {
  int restarts = 400;
  std::uint64_t seed = 1;
  int max_iters = 2000;
  double tol = 1e-10;
  unsigned threads = 0;

  OracleConfig config() const {
    OracleConfig c;
    c.restarts = restarts;
    c.seed = seed;
    c.max_iters = max_iters;
    c.tol = tol;
    c.threads = threads;
    return c;
  }
};

inline void add_oracle_flags(CLI::App* cmd, OracleFlags& f) {
  cmd->add_option("--restarts", f.restarts, "Random restarts of the simplex search")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--max-iters", f.max_iters, "Simplex iteration cap per restart")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "Simplex convergence threshold on the function-value spread");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores); output does not depend on it");
}

inline int cmd_compute(const FamilyCoefficients& fc, std::ostream& out, std::ostream& err) {
  const auto spectrum = spectrum_closed_form(fc);
  const bool physical = is_physical(fc);
  out << "state: " << format_family(fc) << '\n';
  out << "category: " << to_string(classify(fc.num_qubits)) << '\n';
  out << "xi: " << detail::num(fc.xi()) << '\n';
  out << "c_max: " << detail::num(fc.c_max()) << '\n';
  out << "min_eigenvalue: " << detail::num(spectrum.min_eigenvalue()) << '\n';
  out << "physical: " << (physical ? "true" : "false") << '\n';
  if (!physical) {
    err << "error: unphysical: min eigenvalue < 0\n";
    return kDomainError;
  }
  out << "discord: " << detail::num(closed_form_discord(fc).value_bits) << '\n';
  return kOk;
}

inline int cmd_oracle(const FamilyCoefficients& fc, const OracleFlags& flags, const std::string& tree_out,
                      std::ostream& out) {
  const auto res = oracle_discord(fc, flags.config());
  out << "state: " << format_family(fc) << '\n';
  out << "oracle: " << detail::num(res.value_bits) << '\n';
  out << "closed_form: " << detail::num(res.closed_form_bits) << '\n';
  out << "gap: " << detail::num(res.gap_to_closed_form) << '\n';
  out << "restarts: " << res.restart_count << '\n';
  out << "best_restart: " << res.best_restart << '\n';
  out << "evaluations: " << res.objective_evaluations << '\n';
  if (!tree_out.empty()) {
    std::ofstream f(tree_out, std::ios::trunc);
    if (!f) throw FileError("cannot open '" + tree_out + "' for writing");
    f << to_json(res.best_tree).dump(2) << '\n';
    if (!f) throw FileError("failed writing '" + tree_out + "'");
    out << "tree: " << tree_out << '\n';
  }
  return kOk;
}

inline int cmd_validate(int num_qubits, int samples, const OracleFlags& flags, const std::string& csv_out,
                        std::ostream& out) {
  if (num_qubits > kMaxOracleQubits) {
    throw UnsupportedSizeError("validate supports at most " + std::to_string(kMaxOracleQubits) + " qubits");
  }
  std::mt19937_64 rng(flags.seed);
  std::ofstream csv;
  if (!csv_out.empty()) {
    csv.open(csv_out, std::ios::trunc);
    if (!csv) throw FileError("cannot open '" + csv_out + "' for writing");
    csv << "index,c1,c2,c3,closed_form,oracle,gap\n";
  }
  const double threshold = validation_threshold(num_qubits);
  double max_gap = -1.0, min_gap = 1.0, sum_gap = 0.0;
  for (int s = 0; s < samples; ++s) {
    const auto fc = detail::random_physical(num_qubits, rng);
    OracleConfig cfg = flags.config();
    cfg.seed = rng();
    const auto res = oracle_discord(fc, cfg);
    max_gap = std::max(max_gap, res.gap_to_closed_form);
    min_gap = std::min(min_gap, res.gap_to_closed_form);
    sum_gap += res.gap_to_closed_form;
    if (csv.is_open()) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s, fc.c[0], fc.c[1], fc.c[2],
                    res.closed_form_bits, res.value_bits, res.gap_to_closed_form);
      csv << buf;
    }
  }
  if (csv.is_open() && !csv.flush()) throw FileError("failed writing '" + csv_out + "'");
  const bool pass = max_gap <= threshold && min_gap >= kGapFloor;
  out << "qubits: " << num_qubits << '\n';
  out << "samples: " << samples << '\n';
  out << "restarts: " << flags.restarts << '\n';
  out << "max_gap: " << detail::num(max_gap) << '\n';
  out << "mean_gap: " << detail::num(sum_gap / samples) << '\n';
  out << "min_gap: " << detail::num(min_gap) << '\n';
  out << "threshold: " << detail::num(threshold) << '\n';
  out << "status: " << (pass ? "pass" : "fail") << '\n';
  return pass ? kOk : kDomainError;
}

inline int cmd_dynamics(const FamilyCoefficients& fc, int steps, const std::string& csv_out, std::ostream& out) {
  const auto points = discord_trajectory(fc, uniform_p_grid(steps));
  if (csv_out.empty() || csv_out == "-") {
    write_trajectory_csv(out, points);
    return kOk;
  }
  std::ofstream f(csv_out, std::ios::trunc);
  if (!f) throw FileError("cannot open '" + csv_out + "' for writing");
  write_trajectory_csv(f, points);
  if (!f.flush()) throw FileError("failed writing '" + csv_out + "'");
  const auto first = std::find_if(points.begin(), points.end(), [](const auto& p) { return p.physical; });
  out << "rows: " << points.size() << '\n';
  out << "physical_rows: " << std::count_if(points.begin(), points.end(), [](const auto& p) { return p.physical; })
      << '\n';
  if (first != points.end()) out << "first_physical_p: " << detail::num(first->p) << '\n';
  out << "csv: " << csv_out << '\n';
  return kOk;
}

inline int cmd_transition(const FamilyCoefficients& fc, std::ostream& out) {
  const auto r = transition_point(fc);
  out << "state: " << format_family(fc) << '\n';
  out << "p_star: " << detail::fixed6(r.analytic) << '\n';
  out << "analytic: " << detail::fixed6(r.analytic) << '\n';
  out << "bisection: " << detail::fixed6(r.bisection) << '\n';
  out << "method_difference: " << detail::num(std::abs(r.analytic - r.bisection)) << '\n';
  out << "plateau_discord: " << detail::num(r.plateau_bits) << '\n';
  return kOk;
}

inline int cmd_surface(int num_qubits, double level, int resolution, MeshFormat format, const std::string& path,
                       std::ostream& out, std::ostream& err) {
  const auto field = sample_field(num_qubits, resolution);
  const auto mesh = extract_isosurface(field, level);
  export_mesh(mesh, format, path);
  out << "qubits: " << num_qubits << '\n';
  out << "level: " << detail::num(level) << '\n';
  out << "resolution: " << resolution << '\n';
  out << "vertices: " << mesh.vertices.size() << '\n';
  out << "triangles: " << mesh.triangles.size() << '\n';
  out << "components: " << connected_components(mesh) << '\n';
  out << "field_max: " << detail::num(field.max_value()) << '\n';
  out << "output: " << path << '\n';
  if (mesh.empty()) err << "warning: level " << level << " produced an empty mesh\n";
  return kOk;
}

/// Entry point; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multipartite quantum discord of the symmetric N-qubit family"};
  app.name("qdiscord");
  app.require_subcommand(1);

  std::string state;
  OracleFlags oflags;
  std::string out_path;

  auto* compute = app.add_subcommand("compute", "Closed-form discord of a state N:c1,c2,c3");
  compute->add_option("state", state, "State as N:c1,c2,c3")->required();

  auto* oracle = app.add_subcommand("oracle", "Brute-force minimization over measurement trees (N <= 5)");
  oracle->add_option("state", state, "State as N:c1,c2,c3")->required();
  add_oracle_flags(oracle, oflags);
  oracle->add_option("--out", out_path, "Write the argmin measurement tree as JSON");

  int n = 3;
  int samples = 50;
  auto* validate = app.add_subcommand("validate", "Closed form vs. oracle on random physical states");
  validate->add_option("--n", n, "Number of qubits")->check(CLI::Range(2, kMaxFamilyQubits));
  validate->add_option("--samples", samples, "Number of random states")->check(CLI::PositiveNumber);
  add_oracle_flags(validate, oflags);
  validate->add_option("--out", out_path, "Per-sample CSV output");

  int steps = 200;
  auto* dynamics = app.add_subcommand("dynamics", "Discord trajectory under the phase-flip channel");
  dynamics->add_option("state", state, "State as N:c1,c2,c3")->required();
  dynamics->add_option("--steps", steps, "Grid steps on p in [0, 1]")->check(CLI::PositiveNumber);
  dynamics->add_option("--out", out_path, "CSV output path (default: stdout)");

  auto* transition = app.add_subcommand("transition", "Sudden-transition point p* (N = 0 mod 4)");
  transition->add_option("state", state, "State as N:c1,c2,c3")->required();

  double level = 0.15;
  int resolution = 61;
  MeshFormat format = MeshFormat::Obj;
  const std::map<std::string, MeshFormat> formats{{"obj", MeshFormat::Obj}, {"csv", MeshFormat::Csv}};
  auto* surface = app.add_subcommand("surface", "Constant-discord level surface as a triangle mesh");
  surface->add_option("--n", n, "Number of qubits")->check(CLI::Range(2, kMaxFamilyQubits));
  surface->add_option("--level", level, "Discord level in bits");
  surface->add_option("--resolution", resolution, "Grid points per axis (odd)");
  surface->add_option("--format", format, "obj or csv")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  surface->add_option("--out", out_path, "Mesh output path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  FamilyCoefficients fc;
  if (!state.empty()) {
    try {
      fc = parse_family(state);
    } catch (const ArgumentError& e) {
      err << "error: " << e.what() << '\n';
      return kParseError;
    }
  }

  return detail::guarded(err, [&]() -> int {
    if (compute->parsed()) return cmd_compute(fc, out, err);
    if (oracle->parsed()) {
      if (fc.num_qubits > kMaxOracleQubits) {
        throw UnsupportedSizeError("oracle supports at most " + std::to_string(kMaxOracleQubits) + " qubits");
      }
      return cmd_oracle(fc, oflags, out_path, out);
    }
    if (validate->parsed()) return cmd_validate(n, samples, oflags, out_path, out);
    if (dynamics->parsed()) return cmd_dynamics(fc, steps, out_path, out);
    if (transition->parsed()) return cmd_transition(fc, out);
    if (surface->parsed()) return cmd_surface(n, level, resolution, format, out_path, out, err);
    return kParseError;
  });
}

}  // namespace qdiscord::cli
