#include "biot/mesh.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace biot;

namespace {

std::string fixture(const std::string &name) { return std::string(BIOT_TEST_DATA) + "/" + name; }

std::string read_text(const std::string &path)
{
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST(Gmsh, TwoTrianglesV22)
{
  const Mesh m = read_gmsh(fixture("two_triangles_v22.msh"));
  EXPECT_EQ(m.dim, 2);
  EXPECT_EQ(m.num_vertices(), 4u);
  EXPECT_EQ(m.num_cells(), 2u);
  EXPECT_EQ(m.num_facets(), 4u);
  EXPECT_EQ(m.tag_id("bottom"), 1);
  EXPECT_EQ(m.tag_id("rest"), 2);
  EXPECT_EQ(m.region_ids(), std::vector<int>{10});
  EXPECT_NEAR(mesh_statistics(m).total_measure, 1.0, 1e-15);
}

TEST(Gmsh, NineNodeQuadrilateralRejected)
{
  try {
    read_gmsh(fixture("nine_node_quad.msh"));
    FAIL() << "expected an error";
  } catch (const GmshError &e) {
    EXPECT_NE(std::string(e.what()).find("unsupported element type 10"), std::string::npos);
    EXPECT_EQ(e.line(), 18u);
  }
}

TEST(Gmsh, V41WithTwoPhysicalGroups)
{
  const Mesh m = read_gmsh(fixture("two_groups_v41.msh"));
  EXPECT_EQ(m.num_cells(), 2u);
  EXPECT_EQ(m.num_facets(), 4u);
  EXPECT_EQ(m.tag_id("left"), 1);
  EXPECT_EQ(m.tag_id("others"), 2);
  int left = 0, others = 0;
  for (int t : m.facet_tags)
    (t == 1 ? left : others)++;
  EXPECT_EQ(left, 1);
  EXPECT_EQ(others, 3);
  EXPECT_EQ(m.region_ids(), std::vector<int>{5});
}

TEST(Gmsh, RoundTrip)
{
  const Mesh a = generate_unit_cube(2);
  const auto path = std::filesystem::temp_directory_path() / "biot_roundtrip.msh";
  write_gmsh(a, path);
  const Mesh b = read_gmsh(path);
  std::filesystem::remove(path);
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  ASSERT_EQ(a.num_cells(), b.num_cells());
  ASSERT_EQ(a.num_facets(), b.num_facets());
  for (std::size_t v = 0; v < a.num_vertices(); ++v)
    for (int k = 0; k < 3; ++k)
      EXPECT_EQ(a.vertices[v][k], b.vertices[v][k]);
  EXPECT_EQ(a.cells, b.cells);
  EXPECT_EQ(a.facet_tags, b.facet_tags);
  EXPECT_EQ(a.tag_names, b.tag_names);
}

TEST(Gmsh, ReorientsClockwiseTriangle)
{
  auto text = read_text(fixture("two_triangles_v22.msh"));
  const std::string ccw = "5 2 2 10 1 1 2 3";
  text.replace(text.find(ccw), ccw.size(), "5 2 2 10 1 1 3 2");
  const Mesh m = parse_gmsh(text);
  const GeomCache g(m);
  EXPECT_GT(g.cell(0).det, 0.0);
}

TEST(Gmsh, RejectsBinaryAndUnknownVersion)
{
  EXPECT_THROW(parse_gmsh("$MeshFormat\n2.2 1 8\n$EndMeshFormat\n"), GmshError);
  EXPECT_THROW(parse_gmsh("$MeshFormat\n3.0 0 8\n$EndMeshFormat\n"), GmshError);
}

TEST(Gmsh, ReportsLineOfBadNumber)
{
  auto text = read_text(fixture("two_triangles_v22.msh"));
  text.replace(text.find("3 1 1 0"), 7, "3 1 x 0");
  try {
    parse_gmsh(text);
    FAIL() << "expected an error";
  } catch (const GmshError &e) {
    EXPECT_EQ(e.line(), 14u);
  }
}

TEST(Gmsh, MissingFile)
{
  EXPECT_THROW(read_gmsh("/nonexistent/file.msh"), MeshError);
}
