#pragma once

#include "biot/config.hpp"

#include <exception>
#include <filesystem>
#include <vector>

namespace biot {

enum ExitCode : int
{
  exit_ok = 0,
  exit_config_error = 2,
  exit_solver_failure = 3,
  exit_io_error = 4
};

struct RunOptions
{
  /// Overrides the config and the BIOTFEM_OUTPUT_DIR environment variable.
  std::filesystem::path output_dir;
  bool parallel = false;
  /// Record wall-clock times in CSV output (breaks byte-identical reruns).
  bool timing = false;
};

struct RunResult
{
  int exit_code = exit_ok;
  std::vector<std::filesystem::path> written;
};

/// Output directory precedence: options, config, BIOTFEM_OUTPUT_DIR,
/// then "biotfem_output".
std::filesystem::path resolve_output_dir(const RunConfig &config, const RunOptions &options);

/// Mesh for the configured geometry; n replaces the configured size for
/// structured geometries.
Mesh build_mesh(const RunConfig &config, int n);

/// Boundary conditions of a single run. An empty boundary section selects
/// the manufactured problem with the default Dirichlet split.
BoundarySpec build_boundary(const RunConfig &config, const Mesh &mesh, const MaterialParams &params,
                            const ExactSolution *exact);

/// Executes the configured study and writes its artifacts. Exceptions
/// propagate; use exit_code_for to map them.
RunResult run_study(const RunConfig &config, const RunOptions &options);
RunResult run_spectrum(const RunConfig &config, const RunOptions &options);
RunResult run_infsup(const RunConfig &config, const RunOptions &options);

/// Exit code for a caught exception.
int exit_code_for(const std::exception_ptr &error);

} // namespace biot
