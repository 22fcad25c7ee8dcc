#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace biot {

using Vec3 = std::array<double, 3>;

class MeshError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Simplicial mesh (triangles in 2D, tetrahedra in 3D). Coordinates are
/// always stored with three components; z is zero for 2D meshes.
struct Mesh
{
  int dim = 2;
  std::vector<Vec3> vertices;
  /// Only the first dim+1 entries of each cell are used.
  std::vector<std::array<std::size_t, 4>> cells;
  /// Only the first dim entries of each facet are used.
  std::vector<std::array<std::size_t, 3>> facets;
  std::vector<int> facet_tags;
  std::vector<int> cell_regions;
  /// Optional human-readable names for boundary tags ("left", "x0", ...).
  std::map<int, std::string> tag_names;

  std::size_t num_cells() const { return cells.size(); }
  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_facets() const { return facets.size(); }
  int vertices_per_cell() const { return dim + 1; }

  /// Resolve a tag by name or by its decimal id. Throws MeshError if unknown.
  int tag_id(std::string_view name_or_id) const;
  std::vector<int> boundary_tags() const;
  std::vector<int> region_ids() const;
};

/// Reorients cells to positive signed measure and checks every structural
/// invariant (index ranges, non-degenerate cells, facet ownership and
/// boundary coverage). Throws MeshError on violation.
void validate(Mesh &mesh);

/// 2n^2 triangles on [0,1]^2 with the diagonal split from (x0,y0) to
/// (x1,y1) in every square. Boundary tags: bottom=1, right=2, top=3, left=4.
/// When layer_bounds is non-empty, cells whose centroid y exceeds the i-th
/// bound get region i+1.
Mesh generate_unit_square(int n, std::span<const double> layer_bounds = {});

/// 6n^3 tetrahedra on [0,1]^3 (Kuhn split along the main cube diagonal).
/// Boundary tags: x0=1, x1=2, y0=3, y1=4, z0=5, z1=6.
Mesh generate_unit_cube(int n);

struct MeshStatistics
{
  double h_max = 0.0;
  double h_min = 0.0;
  std::size_t n_cells = 0;
  std::size_t n_vertices = 0;
  double total_measure = 0.0;
};

MeshStatistics mesh_statistics(const Mesh &mesh);

/// Maximum vertex-pair distance of a cell.
double cell_diameter(const Mesh &mesh, std::size_t cell);

class GmshError : public MeshError
{
public:
  GmshError(std::size_t line, const std::string &what);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// ASCII Gmsh MSH 2.2 or 4.1. Physical groups of codimension-1 elements
/// become boundary tags; those of codimension-0 elements become regions.
Mesh read_gmsh(const std::filesystem::path &path);
Mesh parse_gmsh(std::string_view text);

/// Writes MSH 2.2 ASCII with coordinates in round-trip precision.
void write_gmsh(const Mesh &mesh, const std::filesystem::path &path);

// ---------------------------------------------------------------------------
// Geometry cache

struct CellGeometry
{
  /// Column a of the Jacobian is vertex[a+1] - vertex[0].
  std::array<std::array<double, 3>, 3> jacobian{};
  std::array<std::array<double, 3>, 3> inverse_transpose{};
  double det = 0.0;
  double measure = 0.0;
  double diameter = 0.0;
  /// Gradients of the barycentric coordinates (constant on the cell).
  std::array<Vec3, 4> bary_grad{};
  Vec3 origin{};
};

struct FacetGeometry
{
  Vec3 normal{};
  double measure = 0.0;
  std::size_t cell = 0;
  /// Index (0..dim) of the cell vertex opposite to the facet.
  int opposite_vertex = 0;
};

class GeomCache
{
public:
  explicit GeomCache(const Mesh &mesh);

  const CellGeometry &cell(std::size_t c) const { return cells_[c]; }
  const FacetGeometry &facet(std::size_t f) const { return facets_[f]; }
  int dim() const { return dim_; }

  /// Physical point of barycentric coordinates (l0..ld) on a cell.
  Vec3 map_to_physical(std::size_t c, const std::array<double, 4> &bary) const;
  /// Barycentric coordinates of a physical point with respect to a cell.
  std::array<double, 4> barycentric(std::size_t c, const Vec3 &x) const;

private:
  int dim_;
  std::vector<CellGeometry> cells_;
  std::vector<FacetGeometry> facets_;
};

} // namespace biot
