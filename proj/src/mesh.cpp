#include "biot/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

namespace biot {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

using FaceKey = std::array<std::size_t, 3>;

struct FaceKeyHash
{
  std::size_t operator()(const FaceKey &k) const noexcept
  {
    std::size_t h = 1469598103934665603ull;
    for (auto v : k)
      h = (h ^ v) * 1099511628211ull;
    return h;
  }
};

FaceKey make_key(const std::size_t *v, int n)
{
  FaceKey k{kNone, kNone, kNone};
  std::copy(v, v + n, k.begin());
  std::sort(k.begin(), k.begin() + n);
  return k;
}

struct FaceOwner
{
  std::size_t cell;
  int opposite;
  int count;
};

std::unordered_map<FaceKey, FaceOwner, FaceKeyHash> build_faces(const Mesh &mesh)
{
  std::unordered_map<FaceKey, FaceOwner, FaceKeyHash> faces;
  faces.reserve(mesh.num_cells() * static_cast<std::size_t>(mesh.dim + 1));
  const int nv = mesh.dim + 1;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    for (int opp = 0; opp < nv; ++opp) {
      std::array<std::size_t, 3> f{};
      int m = 0;
      for (int a = 0; a < nv; ++a)
        if (a != opp)
          f[m++] = mesh.cells[c][a];
      auto [it, inserted] = faces.try_emplace(make_key(f.data(), mesh.dim), FaceOwner{c, opp, 0});
      ++it->second.count;
    }
  }
  return faces;
}

double signed_measure(const Mesh &mesh, const std::array<std::size_t, 4> &cell)
{
  const auto &p0 = mesh.vertices[cell[0]];
  if (mesh.dim == 2) {
    const auto &p1 = mesh.vertices[cell[1]];
    const auto &p2 = mesh.vertices[cell[2]];
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
  }
  std::array<Vec3, 3> e{};
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i)
      e[a][i] = mesh.vertices[cell[a + 1]][i] - p0[i];
  const double det = e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
                     e[1][0] * (e[0][1] * e[2][2] - e[0][2] * e[2][1]) +
                     e[2][0] * (e[0][1] * e[1][2] - e[0][2] * e[1][1]);
  return det / 6.0;
}

// Tags every boundary face whose vertices all lie on one of the coordinate
// planes x_axis = value. Planes are tried in order; the first match wins.
struct Plane
{
  int axis;
  double value;
  int tag;
};

void tag_boundary_by_planes(Mesh &mesh, std::span<const Plane> planes)
{
  const auto faces = build_faces(mesh);
  std::vector<std::pair<FaceKey, int>> found;
  for (const auto &[key, owner] : faces) {
    if (owner.count != 1)
      continue;
    int tag = 0;
    for (const auto &plane : planes) {
      bool on = true;
      for (int a = 0; a < mesh.dim; ++a)
        on = on && mesh.vertices[key[a]][plane.axis] == plane.value;
      if (on) {
        tag = plane.tag;
        break;
      }
    }
    if (tag == 0)
      throw MeshError("boundary face not on any bounding plane");
    found.emplace_back(key, tag);
  }
  // Deterministic order independent of hash iteration.
  std::sort(found.begin(), found.end(), [](const auto &a, const auto &b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  mesh.facets.clear();
  mesh.facet_tags.clear();
  for (const auto &[key, tag] : found) {
    mesh.facets.push_back({key[0], key[1], mesh.dim == 3 ? key[2] : 0});
    mesh.facet_tags.push_back(tag);
  }
}

} // namespace

int Mesh::tag_id(std::string_view name_or_id) const
{
  for (const auto &[id, name] : tag_names)
    if (name == name_or_id)
      return id;
  int value = 0;
  auto [ptr, ec] = std::from_chars(name_or_id.data(), name_or_id.data() + name_or_id.size(), value);
  if (ec == std::errc() && ptr == name_or_id.data() + name_or_id.size()) {
    if (std::find(facet_tags.begin(), facet_tags.end(), value) != facet_tags.end())
      return value;
  }
  throw MeshError("unknown boundary tag '" + std::string(name_or_id) + "'");
}

std::vector<int> Mesh::boundary_tags() const
{
  std::set<int> tags(facet_tags.begin(), facet_tags.end());
  return {tags.begin(), tags.end()};
}

std::vector<int> Mesh::region_ids() const
{
  std::set<int> ids(cell_regions.begin(), cell_regions.end());
  return {ids.begin(), ids.end()};
}

void validate(Mesh &mesh)
{
  if (mesh.dim != 2 && mesh.dim != 3)
    throw MeshError("mesh dimension must be 2 or 3");
  const int nv = mesh.dim + 1;
  const std::size_t nvert = mesh.num_vertices();
  if (mesh.cells.empty())
    throw MeshError("mesh has no cells");
  if (mesh.cell_regions.empty())
    mesh.cell_regions.assign(mesh.num_cells(), 0);
  if (mesh.cell_regions.size() != mesh.num_cells())
    throw MeshError("cell_regions size does not match number of cells");
  if (mesh.facet_tags.size() != mesh.num_facets())
    throw MeshError("facet_tags size does not match number of facets");

  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    auto &cell = mesh.cells[c];
    for (int a = 0; a < nv; ++a)
      if (cell[a] >= nvert)
        throw MeshError("cell " + std::to_string(c) + " references vertex out of range");
    const double m = signed_measure(mesh, cell);
    if (!(std::abs(m) > 0.0) || !std::isfinite(m))
      throw MeshError("cell " + std::to_string(c) + " is degenerate");
    if (m < 0.0)
      std::swap(cell[1], cell[2]);
  }
  for (std::size_t f = 0; f < mesh.num_facets(); ++f)
    for (int a = 0; a < mesh.dim; ++a)
      if (mesh.facets[f][a] >= nvert)
        throw MeshError("facet " + std::to_string(f) + " references vertex out of range");

  const auto faces = build_faces(mesh);
  std::set<FaceKey> tagged;
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    const auto key = make_key(mesh.facets[f].data(), mesh.dim);
    auto it = faces.find(key);
    if (it == faces.end())
      throw MeshError("facet " + std::to_string(f) + " is not a face of any cell");
    if (it->second.count != 1)
      throw MeshError("facet " + std::to_string(f) + " is an interior face");
    if (!tagged.insert(key).second)
      throw MeshError("facet " + std::to_string(f) + " is listed twice");
  }
  for (const auto &[key, owner] : faces)
    if (owner.count == 1 && !tagged.count(key))
      throw MeshError("boundary face of cell " + std::to_string(owner.cell) + " carries no tag");
    else if (owner.count > 2)
      throw MeshError("non-manifold face shared by more than two cells");
}

Mesh generate_unit_square(int n, std::span<const double> layer_bounds)
{
  if (n < 1)
    throw MeshError("generate_unit_square: n must be >= 1");
  Mesh mesh;
  mesh.dim = 2;
  const auto N = static_cast<std::size_t>(n);
  const double dn = n;
  mesh.vertices.reserve((N + 1) * (N + 1));
  for (std::size_t j = 0; j <= N; ++j)
    for (std::size_t i = 0; i <= N; ++i)
      mesh.vertices.push_back({static_cast<double>(i) / dn, static_cast<double>(j) / dn, 0.0});
  auto id = [N](std::size_t i, std::size_t j) { return j * (N + 1) + i; };
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = 0; i < N; ++i) {
      const auto v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      mesh.cells.push_back({v00, v10, v11, 0});
      mesh.cells.push_back({v00, v11, v01, 0});
    }
  mesh.cell_regions.assign(mesh.num_cells(), 0);
  if (!layer_bounds.empty()) {
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      double yc = 0.0;
      for (int a = 0; a < 3; ++a)
        yc += mesh.vertices[mesh.cells[c][a]][1] / 3.0;
      int region = 0;
      for (double bound : layer_bounds)
        if (yc > bound)
          ++region;
      mesh.cell_regions[c] = region;
    }
  }
  const std::array<Plane, 4> planes{{{1, 0.0, 1}, {0, 1.0, 2}, {1, 1.0, 3}, {0, 0.0, 4}}};
  tag_boundary_by_planes(mesh, planes);
  mesh.tag_names = {{1, "bottom"}, {2, "right"}, {3, "top"}, {4, "left"}};
  validate(mesh);
  return mesh;
}

Mesh generate_unit_cube(int n)
{
  if (n < 1)
    throw MeshError("generate_unit_cube: n must be >= 1");
  Mesh mesh;
  mesh.dim = 3;
  const auto N = static_cast<std::size_t>(n);
  const double dn = n;
  for (std::size_t k = 0; k <= N; ++k)
    for (std::size_t j = 0; j <= N; ++j)
      for (std::size_t i = 0; i <= N; ++i)
        mesh.vertices.push_back(
            {static_cast<double>(i) / dn, static_cast<double>(j) / dn, static_cast<double>(k) / dn});
  auto id = [N](std::size_t i, std::size_t j, std::size_t k) {
    return (k * (N + 1) + j) * (N + 1) + i;
  };
  // Each tet walks from corner 000 to 111 along a permutation of the axes.
  constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t i = 0; i < N; ++i)
        for (const auto &perm : perms) {
          std::array<std::size_t, 3> idx{i, j, k};
          std::array<std::size_t, 4> tet{};
          tet[0] = id(idx[0], idx[1], idx[2]);
          for (int s = 0; s < 3; ++s) {
            ++idx[perm[s]];
            tet[s + 1] = id(idx[0], idx[1], idx[2]);
          }
          mesh.cells.push_back(tet);
        }
  mesh.cell_regions.assign(mesh.num_cells(), 0);
  const std::array<Plane, 6> planes{
      {{0, 0.0, 1}, {0, 1.0, 2}, {1, 0.0, 3}, {1, 1.0, 4}, {2, 0.0, 5}, {2, 1.0, 6}}};
  tag_boundary_by_planes(mesh, planes);
  mesh.tag_names = {{1, "x0"}, {2, "x1"}, {3, "y0"}, {4, "y1"}, {5, "z0"}, {6, "z1"}};
  validate(mesh);
  return mesh;
}

double cell_diameter(const Mesh &mesh, std::size_t cell)
{
  double h2 = 0.0;
  const int nv = mesh.dim + 1;
  for (int a = 0; a < nv; ++a)
    for (int b = a + 1; b < nv; ++b) {
      const auto &p = mesh.vertices[mesh.cells[cell][a]];
      const auto &q = mesh.vertices[mesh.cells[cell][b]];
      double d2 = 0.0;
      for (int i = 0; i < 3; ++i)
        d2 += (p[i] - q[i]) * (p[i] - q[i]);
      h2 = std::max(h2, d2);
    }
  return std::sqrt(h2);
}

MeshStatistics mesh_statistics(const Mesh &mesh)
{
  MeshStatistics s;
  s.n_cells = mesh.num_cells();
  s.n_vertices = mesh.num_vertices();
  s.h_min = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double h = cell_diameter(mesh, c);
    s.h_max = std::max(s.h_max, h);
    s.h_min = std::min(s.h_min, h);
    s.total_measure += std::abs(signed_measure(mesh, mesh.cells[c]));
  }
  if (mesh.cells.empty())
    s.h_min = 0.0;
  return s;
}

// ---------------------------------------------------------------------------

GeomCache::GeomCache(const Mesh &mesh) : dim_(mesh.dim)
{
  const int d = mesh.dim;
  cells_.resize(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    auto &g = cells_[c];
    g.origin = mesh.vertices[mesh.cells[c][0]];
    for (int a = 0; a < d; ++a)
      for (int i = 0; i < d; ++i)
        g.jacobian[i][a] = mesh.vertices[mesh.cells[c][a + 1]][i] - g.origin[i];
    const auto &J = g.jacobian;
    std::array<std::array<double, 3>, 3> inv{};
    if (d == 2) {
      g.det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
      inv[0][0] = J[1][1] / g.det;
      inv[0][1] = -J[0][1] / g.det;
      inv[1][0] = -J[1][0] / g.det;
      inv[1][1] = J[0][0] / g.det;
      g.measure = 0.5 * g.det;
    } else {
      g.det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
              J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
              J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
      inv[0][0] = (J[1][1] * J[2][2] - J[1][2] * J[2][1]) / g.det;
      inv[0][1] = (J[0][2] * J[2][1] - J[0][1] * J[2][2]) / g.det;
      inv[0][2] = (J[0][1] * J[1][2] - J[0][2] * J[1][1]) / g.det;
      inv[1][0] = (J[1][2] * J[2][0] - J[1][0] * J[2][2]) / g.det;
      inv[1][1] = (J[0][0] * J[2][2] - J[0][2] * J[2][0]) / g.det;
      inv[1][2] = (J[0][2] * J[1][0] - J[0][0] * J[1][2]) / g.det;
      inv[2][0] = (J[1][0] * J[2][1] - J[1][1] * J[2][0]) / g.det;
      inv[2][1] = (J[0][1] * J[2][0] - J[0][0] * J[2][1]) / g.det;
      inv[2][2] = (J[0][0] * J[1][1] - J[0][1] * J[1][0]) / g.det;
      g.measure = g.det / 6.0;
    }
    if (!(g.det > 0.0))
      throw MeshError("cell " + std::to_string(c) + " has non-positive Jacobian determinant");
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        g.inverse_transpose[i][j] = inv[j][i];
    // grad lambda_{a+1} is row a of J^{-1}; lambda_0 = 1 - sum.
    g.bary_grad[0] = {0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a)
      for (int i = 0; i < d; ++i) {
        g.bary_grad[a + 1][i] = inv[a][i];
        g.bary_grad[0][i] -= inv[a][i];
      }
    g.diameter = cell_diameter(mesh, c);
  }

  const auto faces = build_faces(mesh);
  facets_.resize(mesh.num_facets());
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    const auto &owner = faces.at(make_key(mesh.facets[f].data(), d));
    auto &fg = facets_[f];
    fg.cell = owner.cell;
    fg.opposite_vertex = owner.opposite;
    const auto &grad = cells_[owner.cell].bary_grad[owner.opposite];
    double norm = 0.0;
    for (int i = 0; i < d; ++i)
      norm += grad[i] * grad[i];
    norm = std::sqrt(norm);
    for (int i = 0; i < d; ++i)
      fg.normal[i] = -grad[i] / norm;
    const auto &p0 = mesh.vertices[mesh.facets[f][0]];
    const auto &p1 = mesh.vertices[mesh.facets[f][1]];
    if (d == 2) {
      fg.measure = std::hypot(p1[0] - p0[0], p1[1] - p0[1]);
    } else {
      const auto &p2 = mesh.vertices[mesh.facets[f][2]];
      const Vec3 a{p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
      const Vec3 b{p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]};
      const Vec3 cr{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
      fg.measure = 0.5 * std::sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]);
    }
  }
}

Vec3 GeomCache::map_to_physical(std::size_t c, const std::array<double, 4> &bary) const
{
  const auto &g = cells_[c];
  Vec3 x = g.origin;
  for (int a = 0; a < dim_; ++a)
    for (int i = 0; i < dim_; ++i)
      x[i] += g.jacobian[i][a] * bary[a + 1];
  return x;
}

std::array<double, 4> GeomCache::barycentric(std::size_t c, const Vec3 &x) const
{
  const auto &g = cells_[c];
  std::array<double, 4> l{};
  l[0] = 1.0;
  for (int a = 0; a < dim_; ++a) {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
      s += g.bary_grad[a + 1][i] * (x[i] - g.origin[i]);
    l[a + 1] = s;
    l[0] -= s;
  }
  return l;
}

} // namespace biot
