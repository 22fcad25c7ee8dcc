#include "biot/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace biot {

GmshError::GmshError(std::size_t line, const std::string &what)
    : MeshError("gmsh line " + std::to_string(line) + ": " + what), line_(line)
{
}

namespace {

struct RawElement
{
  int type;
  int physical;
  std::vector<long> nodes;
  std::size_t line;
};

int element_dim(int type)
{
  switch (type) {
  case 15: return 0;
  case 1: return 1;
  case 2: return 2;
  case 4: return 3;
  default: return -1;
  }
}

int element_nodes(int type)
{
  switch (type) {
  case 15: return 1;
  case 1: return 2;
  case 2: return 3;
  case 4: return 4;
  default: return -1;
  }
}

class LineReader
{
public:
  explicit LineReader(std::string_view text)
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos)
        end = text.size();
      auto line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
      lines_.push_back(line);
      start = end + 1;
    }
  }

  bool done() const { return pos_ >= lines_.size(); }
  std::size_t line_number() const { return pos_; } // 1-based number of the last line read

  std::string_view next()
  {
    if (done())
      throw GmshError(pos_, "unexpected end of file");
    return lines_[pos_++];
  }

  std::vector<std::string_view> tokens()
  {
    auto line = next();
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
        ++i;
      if (i >= line.size())
        break;
      std::size_t j = i;
      if (line[i] == '"') {
        j = line.find('"', i + 1);
        if (j == std::string_view::npos)
          throw GmshError(pos_, "unterminated string");
        out.push_back(line.substr(i, j - i + 1));
        i = j + 1;
        continue;
      }
      while (j < line.size() && line[j] != ' ' && line[j] != '\t')
        ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }

  template <typename T>
  T number(std::string_view token) const
  {
    T value{};
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
      throw GmshError(pos_, "expected a number, got '" + std::string(token) + "'");
    return value;
  }

  void expect(std::string_view tag)
  {
    auto line = next();
    if (line != tag)
      throw GmshError(pos_, "expected " + std::string(tag));
  }

  void skip_to(std::string_view end_tag)
  {
    while (next() != end_tag) {
    }
  }

private:
  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
};

template <typename T>
T at(LineReader &r, const std::vector<std::string_view> &tok, std::size_t i)
{
  if (i >= tok.size())
    throw GmshError(r.line_number(), "too few fields");
  return r.template number<T>(tok[i]);
}

struct ParsedFile
{
  std::vector<std::pair<long, Vec3>> nodes;
  std::vector<RawElement> elements;
  std::map<std::pair<int, int>, std::string> physical_names; // (dim, tag) -> name
};

void parse_physical_names(LineReader &r, ParsedFile &out)
{
  const auto count = at<long>(r, r.tokens(), 0);
  for (long i = 0; i < count; ++i) {
    auto tok = r.tokens();
    const int dim = at<int>(r, tok, 0);
    const int tag = at<int>(r, tok, 1);
    std::string name = tok.size() > 2 ? std::string(tok[2]) : std::string();
    if (name.size() >= 2 && name.front() == '"')
      name = name.substr(1, name.size() - 2);
    out.physical_names[{dim, tag}] = name;
  }
  r.expect("$EndPhysicalNames");
}

void check_element_type(LineReader &r, int type)
{
  if (element_dim(type) < 0)
    throw GmshError(r.line_number(), "unsupported element type " + std::to_string(type));
}

void parse_v2(LineReader &r, ParsedFile &out)
{
  while (!r.done()) {
    auto line = r.next();
    if (line.empty())
      continue;
    if (line == "$PhysicalNames") {
      parse_physical_names(r, out);
    } else if (line == "$Nodes") {
      const auto count = at<long>(r, r.tokens(), 0);
      for (long i = 0; i < count; ++i) {
        auto tok = r.tokens();
        out.nodes.emplace_back(at<long>(r, tok, 0),
                               Vec3{at<double>(r, tok, 1), at<double>(r, tok, 2), at<double>(r, tok, 3)});
      }
      r.expect("$EndNodes");
    } else if (line == "$Elements") {
      const auto count = at<long>(r, r.tokens(), 0);
      for (long i = 0; i < count; ++i) {
        auto tok = r.tokens();
        const int type = at<int>(r, tok, 1);
        check_element_type(r, type);
        const int ntags = at<int>(r, tok, 2);
        RawElement e{type, ntags > 0 ? at<int>(r, tok, 3) : 0, {}, r.line_number()};
        const std::size_t first = 3 + static_cast<std::size_t>(ntags);
        const int nn = element_nodes(type);
        if (tok.size() != first + static_cast<std::size_t>(nn))
          throw GmshError(r.line_number(), "wrong number of nodes for element type");
        for (int k = 0; k < nn; ++k)
          e.nodes.push_back(at<long>(r, tok, first + k));
        out.elements.push_back(std::move(e));
      }
      r.expect("$EndElements");
    } else if (line.size() > 1 && line[0] == '$' && line.substr(0, 4) != "$End") {
      r.skip_to("$End" + std::string(line.substr(1)));
    } else {
      throw GmshError(r.line_number(), "unexpected content '" + std::string(line) + "'");
    }
  }
}

void parse_v4(LineReader &r, ParsedFile &out)
{
  // (dim, entity tag) -> first physical tag
  std::map<std::pair<int, int>, int> entity_physical;
  while (!r.done()) {
    auto line = r.next();
    if (line.empty())
      continue;
    if (line == "$PhysicalNames") {
      parse_physical_names(r, out);
    } else if (line == "$Entities") {
      auto head = r.tokens();
      std::array<long, 4> counts{};
      for (int d = 0; d < 4; ++d)
        counts[d] = at<long>(r, head, d);
      for (int d = 0; d < 4; ++d)
        for (long i = 0; i < counts[d]; ++i) {
          auto tok = r.tokens();
          const int tag = at<int>(r, tok, 0);
          const std::size_t nphys_at = d == 0 ? 4 : 7;
          const long nphys = at<long>(r, tok, nphys_at);
          entity_physical[{d, tag}] = nphys > 0 ? at<int>(r, tok, nphys_at + 1) : 0;
        }
      r.expect("$EndEntities");
    } else if (line == "$Nodes") {
      auto head = r.tokens();
      const auto blocks = at<long>(r, head, 0);
      for (long b = 0; b < blocks; ++b) {
        auto bt = r.tokens();
        if (at<int>(r, bt, 2) != 0)
          throw GmshError(r.line_number(), "parametric nodes are not supported");
        const auto nb = at<long>(r, bt, 3);
        std::vector<long> tags;
        for (long i = 0; i < nb; ++i)
          tags.push_back(at<long>(r, r.tokens(), 0));
        for (long i = 0; i < nb; ++i) {
          auto tok = r.tokens();
          out.nodes.emplace_back(tags[i], Vec3{at<double>(r, tok, 0), at<double>(r, tok, 1), at<double>(r, tok, 2)});
        }
      }
      r.expect("$EndNodes");
    } else if (line == "$Elements") {
      auto head = r.tokens();
      const auto blocks = at<long>(r, head, 0);
      for (long b = 0; b < blocks; ++b) {
        auto bt = r.tokens();
        const int edim = at<int>(r, bt, 0);
        const int etag = at<int>(r, bt, 1);
        const int type = at<int>(r, bt, 2);
        check_element_type(r, type);
        const auto ne = at<long>(r, bt, 3);
        auto phys = entity_physical.find({edim, etag});
        const int physical = phys == entity_physical.end() ? 0 : phys->second;
        const int nn = element_nodes(type);
        for (long i = 0; i < ne; ++i) {
          auto tok = r.tokens();
          if (tok.size() != 1 + static_cast<std::size_t>(nn))
            throw GmshError(r.line_number(), "wrong number of nodes for element type");
          RawElement e{type, physical, {}, r.line_number()};
          for (int k = 0; k < nn; ++k)
            e.nodes.push_back(at<long>(r, tok, 1 + k));
          out.elements.push_back(std::move(e));
        }
      }
      r.expect("$EndElements");
    } else if (line.size() > 1 && line[0] == '$' && line.substr(0, 4) != "$End") {
      r.skip_to("$End" + std::string(line.substr(1)));
    } else {
      throw GmshError(r.line_number(), "unexpected content '" + std::string(line) + "'");
    }
  }
}

} // namespace

Mesh parse_gmsh(std::string_view text)
{
  LineReader r(text);
  r.expect("$MeshFormat");
  auto fmt = r.tokens();
  if (fmt.size() < 3)
    throw GmshError(r.line_number(), "malformed $MeshFormat");
  const std::string version(fmt[0]);
  if (at<int>(r, fmt, 1) != 0)
    throw GmshError(r.line_number(), "binary MSH files are not supported");
  r.expect("$EndMeshFormat");

  ParsedFile file;
  if (version == "2.2")
    parse_v2(r, file);
  else if (version == "4.1")
    parse_v4(r, file);
  else
    throw GmshError(2, "unsupported MSH version " + version);

  int dim = 0;
  for (const auto &e : file.elements)
    dim = std::max(dim, element_dim(e.type));
  if (dim != 2 && dim != 3)
    throw GmshError(r.line_number(), "file contains no triangles or tetrahedra");

  std::unordered_map<long, std::size_t> node_index;
  for (std::size_t i = 0; i < file.nodes.size(); ++i)
    if (!node_index.emplace(file.nodes[i].first, i).second)
      throw GmshError(0, "duplicate node tag " + std::to_string(file.nodes[i].first));

  // Keep only nodes referenced by cells, preserving file order.
  std::vector<char> used(file.nodes.size(), 0);
  auto lookup = [&](const RawElement &e, long tag) {
    auto it = node_index.find(tag);
    if (it == node_index.end())
      throw GmshError(e.line, "element references missing node " + std::to_string(tag));
    return it->second;
  };
  for (const auto &e : file.elements)
    if (element_dim(e.type) == dim)
      for (long tag : e.nodes)
        used[lookup(e, tag)] = 1;
  std::vector<std::size_t> renumber(file.nodes.size(), 0);
  Mesh mesh;
  mesh.dim = dim;
  for (std::size_t i = 0; i < file.nodes.size(); ++i)
    if (used[i]) {
      renumber[i] = mesh.vertices.size();
      Vec3 x = file.nodes[i].second;
      if (dim == 2)
        x[2] = 0.0;
      mesh.vertices.push_back(x);
    }

  std::vector<std::pair<std::array<std::size_t, 3>, int>> candidate_facets;
  for (const auto &e : file.elements) {
    const int edim = element_dim(e.type);
    if (edim == dim) {
      std::array<std::size_t, 4> cell{};
      for (int k = 0; k < dim + 1; ++k)
        cell[k] = renumber[lookup(e, e.nodes[k])];
      mesh.cells.push_back(cell);
      mesh.cell_regions.push_back(e.physical);
    } else if (edim == dim - 1) {
      std::array<std::size_t, 3> facet{};
      for (int k = 0; k < dim; ++k) {
        const auto idx = lookup(e, e.nodes[k]);
        if (!used[idx])
          throw GmshError(e.line, "boundary element references a node not attached to any cell");
        facet[k] = renumber[idx];
      }
      candidate_facets.emplace_back(facet, e.physical);
    }
  }

  // Interior facet elements (e.g. tagged material interfaces) are dropped.
  {
    std::map<std::array<std::size_t, 3>, int> face_count;
    for (const auto &cell : mesh.cells)
      for (int opp = 0; opp <= dim; ++opp) {
        std::array<std::size_t, 3> f{0, 0, 0};
        int m = 0;
        for (int a = 0; a <= dim; ++a)
          if (a != opp)
            f[m++] = cell[a];
        std::sort(f.begin(), f.begin() + dim);
        ++face_count[f];
      }
    for (const auto &[facet, tag] : candidate_facets) {
      auto key = facet;
      std::sort(key.begin(), key.begin() + dim);
      auto it = face_count.find(key);
      if (it != face_count.end() && it->second > 1)
        continue;
      mesh.facets.push_back(facet);
      mesh.facet_tags.push_back(tag);
    }
  }
  for (const auto &[key, name] : file.physical_names)
    if (key.first == dim - 1)
      mesh.tag_names[key.second] = name;

  try {
    validate(mesh);
  } catch (const GmshError &) {
    throw;
  } catch (const MeshError &err) {
    throw GmshError(r.line_number(), err.what());
  }
  return mesh;
}

Mesh read_gmsh(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw MeshError("cannot open mesh file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_gmsh(buffer.str());
}

void write_gmsh(const Mesh &mesh, const std::filesystem::path &path)
{
  std::ofstream out(path);
  if (!out)
    throw MeshError("cannot write mesh file " + path.string());
  char buf[128];
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  if (!mesh.tag_names.empty()) {
    out << "$PhysicalNames\n" << mesh.tag_names.size() << "\n";
    for (const auto &[id, name] : mesh.tag_names)
      out << mesh.dim - 1 << " " << id << " \"" << name << "\"\n";
    out << "$EndPhysicalNames\n";
  }
  out << "$Nodes\n" << mesh.num_vertices() << "\n";
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const auto &x = mesh.vertices[i];
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %.17g\n", i + 1, x[0], x[1], x[2]);
    out << buf;
  }
  out << "$EndNodes\n$Elements\n" << mesh.num_facets() + mesh.num_cells() << "\n";
  std::size_t id = 1;
  const int facet_type = mesh.dim == 2 ? 1 : 2;
  const int cell_type = mesh.dim == 2 ? 2 : 4;
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    out << id++ << " " << facet_type << " 2 " << mesh.facet_tags[f] << " " << mesh.facet_tags[f];
    for (int a = 0; a < mesh.dim; ++a)
      out << " " << mesh.facets[f][a] + 1;
    out << "\n";
  }
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    out << id++ << " " << cell_type << " 2 " << mesh.cell_regions[c] << " " << mesh.cell_regions[c];
    for (int a = 0; a <= mesh.dim; ++a)
      out << " " << mesh.cells[c][a] + 1;
    out << "\n";
  }
  out << "$EndElements\n";
  if (!out)
    throw MeshError("write failure on " + path.string());
}

} // namespace biot
