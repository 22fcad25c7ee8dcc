#include "biot/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace biot {

void write_file_atomic(const std::filesystem::path &path, std::string_view content)
{
  namespace fs = std::filesystem;
  std::error_code ec;
  const auto parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
  fs::create_directories(parent, ec);
  if (ec)
    throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
  const auto tmp = parent / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out)
      throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

std::string format_number(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<VtkField> solution_fields(const Discretization &disc, std::span<const cplx> solution)
{
  const auto &dofs = disc.dofs();
  const std::size_t nv = disc.mesh().num_vertices();
  const int d = disc.dim();
  if (solution.size() != dofs.size())
    throw std::invalid_argument("solution size does not match the dof map");
  VtkField u{"u", d, {}}, p{"p", 1, {}}, phi{"phi", 1, {}};
  u.values.reserve(nv * static_cast<std::size_t>(d));
  for (std::size_t v = 0; v < nv; ++v) {
    for (int c = 0; c < d; ++c)
      u.values.push_back(solution[dofs.u(v, c)]);
    p.values.push_back(solution[dofs.p(v)]);
    phi.values.push_back(solution[dofs.phi(v)]);
  }
  return {u, p, phi};
}

std::string vtk_string(const Mesh &mesh, std::span<const VtkField> fields)
{
  const std::size_t nv = mesh.num_vertices();
  const int nvc = mesh.vertices_per_cell();
  std::ostringstream o;
  o << "# vtk DataFile Version 3.0\nbiotfem\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  o << "POINTS " << nv << " double\n";
  for (const auto &x : mesh.vertices)
    o << format_number(x[0]) << ' ' << format_number(x[1]) << ' ' << format_number(x[2]) << '\n';
  o << "CELLS " << mesh.num_cells() << ' ' << mesh.num_cells() * static_cast<std::size_t>(nvc + 1) << '\n';
  for (const auto &c : mesh.cells) {
    o << nvc;
    for (int k = 0; k < nvc; ++k)
      o << ' ' << c[k];
    o << '\n';
  }
  o << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    o << (mesh.dim == 2 ? 5 : 10) << '\n';
  o << "CELL_DATA " << mesh.num_cells() << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (int r : mesh.cell_regions)
    o << r << '\n';

  if (!fields.empty())
    o << "POINT_DATA " << nv << '\n';
  for (const auto &f : fields) {
    if (f.components < 1 || f.components > 3 || f.values.size() != nv * static_cast<std::size_t>(f.components))
      throw std::invalid_argument("field '" + f.name + "' is not sized to the mesh vertices");
    const auto nc = static_cast<std::size_t>(f.components);
    auto part = [&](const char *suffix, auto get) {
      if (nc == 1)
        o << "SCALARS " << f.name << suffix << " double 1\nLOOKUP_TABLE default\n";
      else
        o << "VECTORS " << f.name << suffix << " double\n";
      for (std::size_t v = 0; v < nv; ++v) {
        for (std::size_t c = 0; c < (nc == 1 ? 1 : 3); ++c) {
          if (c)
            o << ' ';
          o << format_number(c < nc ? get(f.values[v * nc + c]) : 0.0);
        }
        o << '\n';
      }
    };
    part("_re", [](const cplx &z) { return z.real(); });
    part("_im", [](const cplx &z) { return z.imag(); });
    o << "SCALARS " << f.name << "_abs double 1\nLOOKUP_TABLE default\n";
    for (std::size_t v = 0; v < nv; ++v) {
      double s = 0.0;
      for (std::size_t c = 0; c < nc; ++c)
        s += std::norm(f.values[v * nc + c]);
      o << format_number(std::sqrt(s)) << '\n';
    }
  }
  return o.str();
}

void write_vtk(const Mesh &mesh, std::span<const VtkField> fields, const std::filesystem::path &path)
{
  write_file_atomic(path, vtk_string(mesh, fields));
}

std::string runs_csv_header()
{
  return "dim,k,n,h,dofs,kappa,nu,omega,delta1,delta2,err_u,err_p,err_phi,err_total,solver,iterations,residual,"
         "wall_time\n";
}

std::string runs_csv_row(const RunRecord &r, bool include_timing)
{
  std::ostringstream o;
  o << r.dim << ',' << r.degree << ',' << r.n << ',' << format_number(r.h) << ',' << r.dofs << ','
    << format_number(r.kappa) << ',' << format_number(r.nu) << ',' << format_number(r.omega) << ','
    << format_number(r.delta1) << ',' << format_number(r.delta2) << ',' << format_number(r.error.err_u) << ','
    << format_number(r.error.err_p) << ',' << format_number(r.error.err_phi) << ','
    << format_number(r.error.total) << ',' << to_string(r.solve.method) << ',' << r.solve.iterations << ','
    << format_number(r.solve.relative_residual) << ','
    << format_number(include_timing ? r.solve.wall_seconds : 0.0) << '\n';
  return o.str();
}

std::string runs_csv(std::span<const RunRecord> runs, bool include_timing, const Slopes *slopes)
{
  std::string s = runs_csv_header();
  for (const auto &r : runs)
    s += runs_csv_row(r, include_timing);
  if (slopes)
    s += "# slopes u=" + format_number(slopes->u) + " p=" + format_number(slopes->p) +
         " phi=" + format_number(slopes->phi) + " total=" + format_number(slopes->total) + '\n';
  return s;
}

std::string profile_csv(std::span<const double> ys, std::span<const cplx> values)
{
  if (ys.size() != values.size())
    throw std::invalid_argument("profile coordinates and values differ in length");
  std::string s = "y,p_re,p_im,p_abs\n";
  for (std::size_t i = 0; i < ys.size(); ++i)
    s += format_number(ys[i]) + ',' + format_number(values[i].real()) + ',' + format_number(values[i].imag()) + ',' +
         format_number(std::abs(values[i])) + '\n';
  return s;
}

} // namespace biot
