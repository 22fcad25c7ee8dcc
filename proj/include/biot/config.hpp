#pragma once

#include "biot/verification.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace biot {

/// Schema violations; issues() lists every offending key.
class ConfigError : public std::runtime_error
{
public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string> &issues() const { return issues_; }

private:
  std::vector<std::string> issues_;
};

enum class StudyKind
{
  single,
  convergence,
  kappa_sweep,
  nu_sweep,
  layered
};

std::string to_string(StudyKind s);

enum class GeometryKind
{
  unit_square,
  unit_cube,
  gmsh
};

struct GeometryConfig
{
  GeometryKind kind = GeometryKind::unit_square;
  int n = 8;
  std::vector<int> levels;
  std::filesystem::path path;

  int dim() const { return kind == GeometryKind::unit_cube ? 3 : 2; }
};

/// Constant boundary datum or the trace of the manufactured solution.
struct BoundaryValue
{
  bool manufactured = false;
  CVec3 vector{};
  cplx scalar{};
};

struct BoundaryEntry
{
  std::string tag;
  DisplacementCondition displacement = DisplacementCondition::traction;
  BoundaryValue displacement_value{};
  PressureCondition pressure = PressureCondition::flux;
  BoundaryValue pressure_value{};
};

struct SweepConfig
{
  std::vector<double> kappas;
  std::vector<double> nus;
  std::vector<double> delta2s;
};

struct LayeredSection
{
  std::vector<double> omegas{25.0, 50.0, 75.0, 100.0, 125.0};
  std::vector<double> layer_bounds{1.0 / 3.0, 2.0 / 3.0};
  double bottom_traction = 1e-2;
  double bottom_pressure = 1e-2;
  std::size_t samples = 200;
  double line_x = 0.5;
  /// Also solve with the direct solver and report the U-norm difference.
  bool compare_direct = false;
};

struct SpectrumSection
{
  std::size_t k_eigs = 10;
  std::vector<std::string> clamped;
};

struct InfsupSection
{
  std::vector<int> levels{2, 4, 8};
  std::vector<double> delta1s{0.5, 0.0};
  std::vector<std::string> displacement_dirichlet;
  std::vector<std::string> pressure_dirichlet;
};

struct RunConfig
{
  StudyKind study = StudyKind::single;
  GeometryConfig geometry{};
  int degree = 1;
  RawMaterial material{};
  Stabilization stab{};
  /// delta1 = omega^-2 instead of the constant value.
  bool delta1_inverse_omega_squared = false;
  /// Empty means the default manufactured split.
  std::vector<BoundaryEntry> boundary;
  bool manufactured_source = false;
  SolverSettings solver{};
  SweepConfig sweep{};
  LayeredSection layered{};
  SpectrumSection spectrum{};
  InfsupSection infsup{};
  std::filesystem::path output_dir;
  bool write_vtk = true;
  /// Directory of the config file; relative paths resolve against it.
  std::filesystem::path base_dir;
};

RunConfig parse_config(std::string_view json_text, const std::filesystem::path &base_dir = {});
RunConfig load_config(const std::filesystem::path &path);

} // namespace biot
