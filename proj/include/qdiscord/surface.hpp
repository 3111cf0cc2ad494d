#pragma once

// Closed-form discord sampled over the coefficient cube [-1, 1]^3 and its
// constant-discord level surfaces.
//
// Surfaces are extracted cube by cube; each grid cube is split into six
// tetrahedra sharing its (0,0,0)-(1,1,1) diagonal and the level crossing is
// located on tetrahedron edges. The split is the same in every cube, so the
// output is crack-free and inherits the field's point symmetry.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdiscord/discord.hpp"
#include "qdiscord/errors.hpp"
#include "qdiscord/state_family.hpp"

namespace qdiscord {

using Vec3 = std::array<double, 3>;

/// Discord on a regular grid over [-1, 1]^3. Unphysical points hold NaN.
class ScalarField {
 public:
  ScalarField(int num_qubits, int resolution)
      : num_qubits_(num_qubits), resolution_(resolution),
        values_(static_cast<std::size_t>(resolution) * resolution * resolution,
                std::numeric_limits<double>::quiet_NaN()) {}

  int num_qubits() const { return num_qubits_; }
  int resolution() const { return resolution_; }
  double spacing() const { return 2.0 / (resolution_ - 1); }

  /// Grid coordinate along one axis; exactly antisymmetric about the center.
  double coordinate(int i) const {
    return static_cast<double>(2 * i - (resolution_ - 1)) / static_cast<double>(resolution_ - 1);
  }
  Vec3 point(int i, int j, int k) const { return {coordinate(i), coordinate(j), coordinate(k)}; }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * resolution_ + j) * resolution_ + k;
  }

  double value(int i, int j, int k) const { return values_[index(i, j, k)]; }
  bool is_physical(int i, int j, int k) const { return !std::isnan(value(i, j, k)); }
  void set(int i, int j, int k, double v) { values_[index(i, j, k)] = v; }

  /// Largest value over physical points.
  double max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values_) {
      if (!std::isnan(v)) m = std::max(m, v);
    }
    return m;
  }

  const std::vector<double>& values() const { return values_; }

 private:
  int num_qubits_;
  int resolution_;
  std::vector<double> values_;
};

/// Resolution must be odd and at least 3 so the origin is a grid point.
inline ScalarField sample_field(int num_qubits, int resolution) {
  if (resolution < 3 || resolution % 2 == 0) {
    throw ArgumentError("field resolution must be odd and >= 3, got " + std::to_string(resolution));
  }
  classify(num_qubits);
  ScalarField field(num_qubits, resolution);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      for (int k = 0; k < resolution; ++k) {
        const auto [x, y, z] = field.point(i, j, k);
        const FamilyCoefficients fc{num_qubits, {x, y, z}};
        if (is_physical(fc)) field.set(i, j, k, closed_form_discord(fc).value_bits);
      }
    }
  }
  return field;
}

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }
};

namespace detail {

// Corner offsets of a unit cube, bit 2 = x, bit 1 = y, bit 0 = z.
inline constexpr std::array<std::array<int, 3>, 8> kCubeCorners{{
    {0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 0, 0}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}}};

// Six tetrahedra around the 0-7 diagonal, one per axis ordering.
inline constexpr std::array<std::array<int, 4>, 6> kCubeTetrahedra{{
    {0, 4, 6, 7}, {0, 4, 5, 7}, {0, 2, 6, 7}, {0, 2, 3, 7}, {0, 1, 5, 7}, {0, 1, 3, 7}}};

inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Welds surface points by the grid edge they lie on; points within 1e-9 (in
/// edge parameter) of a grid vertex collapse onto that vertex.
///
/// The crossing on each edge is located by bisection on the closed form
/// itself rather than by linear interpolation: the field has unbounded slope
/// at the physical boundary, where linear interpolation misses the level.
class VertexWelder {
 public:
  VertexWelder(TriangleMesh& mesh, int num_qubits) : mesh_(mesh), num_qubits_(num_qubits) {}

  std::uint32_t on_edge(std::size_t a, Vec3 pa, double va, std::size_t b, Vec3 pb, double vb,
                        double level) {
    if (a > b) {
      std::swap(a, b);
      std::swap(pa, pb);
      std::swap(va, vb);
    }
    const auto found = ids_.find({a, b});
    if (found != ids_.end()) return found->second;
    const double t = crossing(pa, va, pb, level);
    std::uint32_t id;
    if (t <= kWeldTol) {
      id = insert({a, a}, pa);
    } else if (t >= 1.0 - kWeldTol) {
      id = insert({b, b}, pb);
    } else {
      return insert({a, b}, lerp(pa, pb, t));
    }
    ids_.emplace(std::pair{a, b}, id);
    return id;
  }

 private:
  static constexpr double kWeldTol = 1e-9;

  static Vec3 lerp(const Vec3& pa, const Vec3& pb, double t) {
    return {pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]), pa[2] + t * (pb[2] - pa[2])};
  }

  // Edge parameter where D crosses `level`; D(pa) = va is on the other side
  // of the level from D(pb).
  double crossing(const Vec3& pa, double va, const Vec3& pb, double level) const {
    if (va == level) return 0.0;
    const bool a_above = va > level;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-15) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const auto p = lerp(pa, pb, mid);
      const double d = closed_form_discord(FamilyCoefficients{num_qubits_, {p[0], p[1], p[2]}}).value_bits;
      ((d > level) == a_above ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  std::uint32_t insert(std::pair<std::size_t, std::size_t> key, const Vec3& p) {
    auto [it, fresh] = ids_.try_emplace(key, static_cast<std::uint32_t>(mesh_.vertices.size()));
    if (fresh) mesh_.vertices.push_back(p);
    return it->second;
  }

  TriangleMesh& mesh_;
  int num_qubits_;
  std::map<std::pair<std::size_t, std::size_t>, std::uint32_t> ids_;
};

}  // namespace detail

struct IsosurfaceOptions {
  /// Keep the fully physical tetrahedra of boundary cubes. Off drops every
  /// cube with an unphysical corner, which loses a one-cell strip along the
  /// boundary.
  bool clip_tetrahedra = true;
};

/// Level surface {D = level}. Tetrahedra with any unphysical corner are skipped.
/// Triangles are oriented with normals pointing toward larger discord;
/// vertices are emitted in cube-index order.
inline TriangleMesh extract_isosurface(const ScalarField& field, double level, const IsosurfaceOptions& opt = {}) {
  if (!(level > 0.0)) throw ArgumentError("isosurface level must be positive");
  TriangleMesh mesh;
  detail::VertexWelder weld(mesh, field.num_qubits());
  const int r = field.resolution();

  std::array<std::size_t, 8> id{};
  std::array<Vec3, 8> pos{};
  std::array<double, 8> val{};
  for (int i = 0; i + 1 < r; ++i) {
    for (int j = 0; j + 1 < r; ++j) {
      for (int k = 0; k + 1 < r; ++k) {
        int unphysical = 0;
        bool any_above = false;
        bool any_below = false;
        for (int c = 0; c < 8; ++c) {
          const auto& o = detail::kCubeCorners[static_cast<std::size_t>(c)];
          const int ci = i + o[0], cj = j + o[1], ck = k + o[2];
          const auto cu = static_cast<std::size_t>(c);
          val[cu] = field.value(ci, cj, ck);
          id[cu] = field.index(ci, cj, ck);
          pos[cu] = field.point(ci, cj, ck);
          if (std::isnan(val[cu])) {
            ++unphysical;
            continue;
          }
          (val[cu] > level ? any_above : any_below) = true;
        }
        if (!any_above || !any_below) continue;
        if (unphysical > 0 && !opt.clip_tetrahedra) continue;

        for (const auto& tet : detail::kCubeTetrahedra) {
          std::array<int, 4> hi{}, lo{};
          int nh = 0, nl = 0;
          bool nan_corner = false;
          for (int c : tet) {
            const double v = val[static_cast<std::size_t>(c)];
            if (std::isnan(v)) nan_corner = true;
            (v > level ? hi[nh++] : lo[nl++]) = c;
          }
          if (nan_corner || nh == 0 || nl == 0) continue;

          auto cut = [&](int a, int b) {
            const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
            return weld.on_edge(id[ua], pos[ua], val[ua], id[ub], pos[ub], val[ub], level);
          };
          Vec3 uphill{0.0, 0.0, 0.0};
          for (int h = 0; h < nh; ++h) {
            for (int l = 0; l < nl; ++l) {
              const auto d = detail::sub(pos[static_cast<std::size_t>(hi[h])], pos[static_cast<std::size_t>(lo[l])]);
              for (int a = 0; a < 3; ++a) uphill[a] += d[a];
            }
          }
          auto emit = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
            if (a == b || b == c || a == c) return;
            const auto n = detail::cross(detail::sub(mesh.vertices[b], mesh.vertices[a]),
                                         detail::sub(mesh.vertices[c], mesh.vertices[a]));
            if (detail::dot(n, uphill) < 0.0) std::swap(b, c);
            mesh.triangles.push_back({a, b, c});
          };

          if (nh == 1 || nl == 1) {
            const bool single_high = nh == 1;
            const int apex = single_high ? hi[0] : lo[0];
            const auto& base = single_high ? lo : hi;
            emit(cut(apex, base[0]), cut(apex, base[1]), cut(apex, base[2]));
          } else {
            const auto a = cut(hi[0], lo[0]);
            const auto b = cut(hi[0], lo[1]);
            const auto c = cut(hi[1], lo[1]);
            const auto d = cut(hi[1], lo[0]);
            emit(a, b, c);
            emit(a, c, d);
          }
        }
      }
    }
  }
  return mesh;
}

inline double mesh_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (const auto& t : mesh.triangles) {
    const auto n = detail::cross(detail::sub(mesh.vertices[t[1]], mesh.vertices[t[0]]),
                                 detail::sub(mesh.vertices[t[2]], mesh.vertices[t[0]]));
    area += 0.5 * std::sqrt(detail::dot(n, n));
  }
  return area;
}

/// Number of edge-connected triangle components.
inline std::size_t connected_components(const TriangleMesh& mesh) {
  std::vector<std::uint32_t> parent(mesh.vertices.size());
  std::iota(parent.begin(), parent.end(), 0U);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& t : mesh.triangles) {
    parent[find(t[1])] = find(t[0]);
    parent[find(t[2])] = find(t[0]);
  }
  std::vector<bool> used(mesh.vertices.size(), false);
  for (const auto& t : mesh.triangles) {
    for (auto v : t) used[v] = true;
  }
  std::size_t count = 0;
  for (std::uint32_t v = 0; v < parent.size(); ++v) {
    if (used[v] && find(v) == v) ++count;
  }
  return count;
}

/// True if v -> -v maps the vertex set onto itself within `tol` (max-norm).
inline bool is_centrally_symmetric(const TriangleMesh& mesh, double tol = 1e-9) {
  std::vector<Vec3> sorted = mesh.vertices;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& v : mesh.vertices) {
    const Vec3 target{-v[0], -v[1], -v[2]};
    auto it = std::lower_bound(sorted.begin(), sorted.end(), Vec3{target[0] - tol, -2.0, -2.0});
    bool found = false;
    for (; it != sorted.end() && (*it)[0] <= target[0] + tol; ++it) {
      if (std::abs((*it)[1] - target[1]) <= tol && std::abs((*it)[2] - target[2]) <= tol) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

enum class MeshFormat { Obj, Csv };

/// `v x y z` lines then `f i j k` (1-based); 17 significant digits.
inline void write_obj(std::ostream& os, const TriangleMesh& mesh) {
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v[0], v[1], v[2]);
    os << buf;
  }
  for (const auto& t : mesh.triangles) os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

/// Header `x,y,z,triangle_id`, then three rows per triangle.
inline void write_mesh_csv(std::ostream& os, const TriangleMesh& mesh) {
  os << "x,y,z,triangle_id\n";
  char buf[128];
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (auto vi : mesh.triangles[t]) {
      const auto& v = mesh.vertices[vi];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu\n", v[0], v[1], v[2], t);
      os << buf;
    }
  }
}

/// Reads the subset of OBJ written by write_obj.
inline TriangleMesh read_obj(std::istream& is) {
  TriangleMesh mesh;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v{};
      if (!(ls >> v[0] >> v[1] >> v[2])) throw ArgumentError("bad OBJ vertex line: " + line);
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<std::uint32_t, 3> f{};
      if (!(ls >> f[0] >> f[1] >> f[2]) || f[0] == 0 || f[1] == 0 || f[2] == 0) {
        throw ArgumentError("bad OBJ face line: " + line);
      }
      mesh.triangles.push_back({f[0] - 1, f[1] - 1, f[2] - 1});
    }
  }
  return mesh;
}

inline void export_mesh(const TriangleMesh& mesh, MeshFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot open '" + path + "' for writing");
  if (format == MeshFormat::Obj) {
    write_obj(out, mesh);
  } else {
    write_mesh_csv(out, mesh);
  }
  out.flush();
  if (!out) throw FileError("failed writing '" + path + "'");
}

}  // namespace qdiscord
