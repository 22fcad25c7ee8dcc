#pragma once

#include "biot/verification.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace biot {

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Writes to a temporary file in the target directory and renames it into
/// place. Missing parent directories are created.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

/// Nodal field sampled at mesh vertices; components == 1 (scalar) or the
/// number of components per vertex (vertex-major storage).
struct VtkField
{
  std::string name;
  int components = 1;
  std::vector<cplx> values;
};

/// Vertex samples of u, p and phi from a monolithic solution vector.
std::vector<VtkField> solution_fields(const Discretization &disc, std::span<const cplx> solution);

/// Legacy ASCII UNSTRUCTURED_GRID with <name>_re, <name>_im and <name>_abs
/// point arrays per field and the cell region as cell data.
std::string vtk_string(const Mesh &mesh, std::span<const VtkField> fields);
void write_vtk(const Mesh &mesh, std::span<const VtkField> fields, const std::filesystem::path &path);

/// Plain decimal formatting used by every text output.
std::string format_number(double v);

std::string runs_csv_header();
/// wall_time is written as 0 unless include_timing is set, which keeps
/// sequential outputs byte-identical.
std::string runs_csv_row(const RunRecord &run, bool include_timing);
std::string runs_csv(std::span<const RunRecord> runs, bool include_timing, const Slopes *slopes = nullptr);

std::string profile_csv(std::span<const double> ys, std::span<const cplx> values);

} // namespace biot
