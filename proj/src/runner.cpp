#include "biot/runner.hpp"

#include "biot/io.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>

namespace biot {

namespace fs = std::filesystem;

namespace {

Stabilization stabilization_for(const RunConfig &config, double omega)
{
  Stabilization s = config.stab;
  if (config.delta1_inverse_omega_squared)
    s.delta1 = 1.0 / (omega * omega);
  return s;
}

ManufacturedCase manufactured_case(const RunConfig &config)
{
  ManufacturedCase c;
  c.dim = config.geometry.dim();
  c.degree = config.degree;
  c.material = config.material;
  c.stab = stabilization_for(config, config.material.omega);
  c.solver = config.solver;
  return c;
}

std::vector<std::string> default_displacement_tags(int dim)
{
  return dim == 2 ? std::vector<std::string>{"right", "bottom"} : std::vector<std::string>{"y1", "z0", "z1"};
}

std::vector<std::string> default_pressure_tags(int dim)
{
  return dim == 2 ? std::vector<std::string>{"left", "top"} : std::vector<std::string>{"x0", "x1", "y0"};
}

void emit(RunResult &result, const fs::path &path, std::string_view content)
{
  write_file_atomic(path, content);
  result.written.push_back(path);
  spdlog::info("wrote {}", path.string());
}

bool needs_exact(const RunConfig &config)
{
  if (config.boundary.empty() || config.manufactured_source)
    return true;
  for (const auto &b : config.boundary)
    if (b.displacement_value.manufactured || b.pressure_value.manufactured)
      return true;
  return false;
}

RunResult run_single(const RunConfig &config, const RunOptions &options, const fs::path &out)
{
  RunResult result;
  const Mesh mesh = build_mesh(config, config.geometry.n);
  const auto params = derive_coefficients(config.material);
  const Discretization disc(mesh, config.degree);
  std::optional<ExactSolution> exact;
  if (needs_exact(config))
    exact = mesh.dim == 2 ? manufactured_2d(params) : manufactured_3d(params);
  const auto boundary = build_boundary(config, mesh, params, exact ? &*exact : nullptr);
  const auto stab = stabilization_for(config, config.material.omega);
  BodyForces forces;
  if (config.boundary.empty() || config.manufactured_source)
    forces = manufactured_forces(*exact, params);

  spdlog::info("single run: {} cells, {} unknowns", mesh.num_cells(), disc.dofs().size());
  const auto system = assemble_system(disc, params, stab, boundary, forces);
  const auto [x, report] = solve(system, config.solver);

  RunRecord rec;
  rec.dim = mesh.dim;
  rec.degree = config.degree;
  rec.n = config.geometry.kind == GeometryKind::gmsh ? 0 : config.geometry.n;
  rec.h = mesh_statistics(mesh).h_max;
  rec.dofs = disc.dofs().size();
  rec.kappa = config.material.kappa.begin()->second;
  rec.nu = config.material.nu;
  rec.omega = config.material.omega;
  rec.delta1 = stab.delta1;
  rec.delta2 = stab.delta2;
  rec.solve = report;
  if (exact && (config.boundary.empty() || config.manufactured_source)) {
    rec.error = compute_error(disc, params, x, *exact);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.error.err_u = rec.error.err_p = rec.error.err_phi = rec.error.total = nan;
  }
  emit(result, out / "single.csv", runs_csv(std::span(&rec, 1), options.timing));
  if (config.write_vtk) {
    const auto fields = solution_fields(disc, x);
    emit(result, out / "solution.vtk", vtk_string(mesh, fields));
  }
  if (!report.converged) {
    spdlog::error("solver did not converge (relative residual {:.3e})", report.relative_residual);
    result.exit_code = exit_solver_failure;
  }
  return result;
}

RunResult run_convergence(const RunConfig &config, const RunOptions &options, const fs::path &out)
{
  RunResult result;
  const auto study = convergence_study(manufactured_case(config), config.geometry.levels, options.parallel);
  for (const auto &r : study.runs)
    spdlog::info("n={} h={:.4g} total error {:.6e}", r.n, r.h, r.error.total);
  const Slopes *slopes = study.runs.size() >= 2 ? &study.slopes : nullptr;
  if (slopes)
    spdlog::info("slopes u={:.3f} p={:.3f} phi={:.3f} total={:.3f}", slopes->u, slopes->p, slopes->phi,
                 slopes->total);
  emit(result, out / "convergence.csv", runs_csv(study.runs, options.timing, slopes));
  if (!study.complete) {
    spdlog::error("convergence study stopped: {}", study.failure);
    result.exit_code = exit_solver_failure;
  }
  return result;
}

RunResult run_sweep(const RunConfig &config, const RunOptions &options, const fs::path &out)
{
  RunResult result;
  const auto problem = manufactured_case(config);
  std::vector<RunRecord> runs;
  std::string name;
  if (config.study == StudyKind::kappa_sweep) {
    runs = kappa_sweep(problem, config.geometry.n, config.sweep.kappas, config.sweep.delta2s, options.parallel);
    name = "kappa_sweep.csv";
  } else {
    runs = nu_sweep(problem, config.geometry.n, config.sweep.nus, config.sweep.delta2s, options.parallel);
    name = "nu_sweep.csv";
  }
  for (const auto &r : runs)
    spdlog::info("kappa={:.1e} nu={} delta2={} total error {:.6e}", r.kappa, r.nu, r.delta2, r.error.total);
  emit(result, out / name, runs_csv(runs, options.timing));
  return result;
}

RunResult run_layered(const RunConfig &config, const RunOptions &options, const fs::path &out)
{
  RunResult result;
  LayeredConfig lc;
  lc.n = config.geometry.n;
  lc.degree = config.degree;
  lc.material = config.material;
  lc.layer_bounds = config.layered.layer_bounds;
  lc.omegas = config.layered.omegas;
  lc.bottom_traction = config.layered.bottom_traction;
  lc.bottom_pressure = config.layered.bottom_pressure;
  if (!config.delta1_inverse_omega_squared)
    lc.delta1_override = config.stab.delta1;
  lc.delta2 = config.stab.delta2;
  lc.solver = config.solver;
  lc.samples = config.layered.samples;
  lc.line_x = config.layered.line_x;

  const Mesh mesh = layered_mesh(lc);
  const auto params = derive_coefficients(config.material);
  for (int region : mesh.region_ids())
    params.kappa(region); // throws when a layer has no permeability
  const Discretization disc(mesh, lc.degree);
  spdlog::info("layered study: {} cells, {} unknowns", mesh.num_cells(), disc.dofs().size());
  const auto runs = layered_experiment(lc, disc, options.parallel);

  const double wave_speed = std::sqrt(config.material.E / config.material.rho);
  std::string table = "omega,delta1,delta2,solver,iterations,residual,converged,finite,sign_changes,"
                      "direct_rel_diff,wavelength\n";
  for (const auto &run : runs) {
    const std::string tag = format_number(run.omega);
    double diff = std::numeric_limits<double>::quiet_NaN();
    if (config.layered.compare_direct && run.finite) {
      SolverSettings direct = config.solver;
      direct.method = SolveMethod::direct;
      const auto ref = solve_layered(lc, disc, run.omega, direct);
      RawMaterial raw = config.material;
      raw.omega = run.omega;
      const auto gram = assemble_norm_matrix(disc, derive_coefficients(raw));
      CVector delta(ref.solution.size());
      for (std::size_t i = 0; i < delta.size(); ++i)
        delta[i] = run.solution[i] - ref.solution[i];
      diff = u_norm(gram, delta) / u_norm(gram, ref.solution);
    }
    const double wavelength = 2.0 * std::numbers::pi * wave_speed / run.omega;
    spdlog::info("omega={} iterations={} residual={:.3e} sign changes={} (elastic wavelength {:.3g})", tag,
                 run.report.iterations, run.report.relative_residual, run.sign_changes, wavelength);
    table += tag + ',' + format_number(run.delta1) + ',' + format_number(run.delta2) + ',' +
             to_string(run.report.method) + ',' + std::to_string(run.report.iterations) + ',' +
             format_number(run.report.relative_residual) + ',' + (run.report.converged ? "1" : "0") + ',' +
             (run.finite ? "1" : "0") + ',' + std::to_string(run.sign_changes) + ',' + format_number(diff) + ',' +
             format_number(wavelength) + '\n';
    if (run.finite)
      emit(result, out / ("profile_omega" + tag + ".csv"), profile_csv(run.ys, run.profile));
    if (config.write_vtk)
      emit(result, out / ("layered_omega" + tag + ".vtk"), vtk_string(mesh, solution_fields(disc, run.solution)));
    if (!run.report.converged || !run.finite) {
      spdlog::error("omega={}: solver did not produce a converged finite solution", tag);
      result.exit_code = exit_solver_failure;
    }
  }
  emit(result, out / "layered.csv", table);
  return result;
}

} // namespace

fs::path resolve_output_dir(const RunConfig &config, const RunOptions &options)
{
  if (!options.output_dir.empty())
    return options.output_dir;
  if (!config.output_dir.empty())
    return config.output_dir;
  if (const char *env = std::getenv("BIOTFEM_OUTPUT_DIR"); env && *env)
    return env;
  return "biotfem_output";
}

Mesh build_mesh(const RunConfig &config, int n)
{
  switch (config.geometry.kind) {
  case GeometryKind::unit_square: return generate_unit_square(n);
  case GeometryKind::unit_cube: return generate_unit_cube(n);
  case GeometryKind::gmsh: {
    auto path = config.geometry.path;
    if (path.is_relative() && !config.base_dir.empty())
      path = config.base_dir / path;
    if (!fs::exists(path))
      throw IoError("geometry file not found: " + path.string());
    return read_gmsh(path);
  }
  }
  throw ConfigError({"geometry.type: unsupported"});
}

BoundarySpec build_boundary(const RunConfig &config, const Mesh &mesh, const MaterialParams &params,
                            const ExactSolution *exact)
{
  if (config.boundary.empty()) {
    if (!exact)
      throw ConfigError({"boundary: the manufactured default needs the manufactured solution"});
    return manufactured_boundary(*exact, params, mesh);
  }
  std::optional<double> kappa;
  if (params.raw.kappa.size() == 1)
    kappa = params.raw.kappa.begin()->second;

  BoundarySpec spec;
  std::vector<std::string> issues;
  for (const auto &entry : config.boundary) {
    int tag = 0;
    try {
      tag = mesh.tag_id(entry.tag);
    } catch (const MeshError &) {
      issues.push_back("boundary." + entry.tag + ": no such boundary tag in the mesh");
      continue;
    }
    BoundaryCondition bc;
    bc.displacement = entry.displacement;
    bc.pressure = entry.pressure;
    const auto dv = entry.displacement_value;
    if (dv.manufactured) {
      if (entry.displacement == DisplacementCondition::dirichlet)
        bc.displacement_data = [ex = *exact](const Vec3 &x, const Vec3 &) { return ex.u(x); };
      else
        bc.displacement_data = [ex = *exact, params](const Vec3 &x, const Vec3 &n) {
          return manufactured_traction(ex, params, x, n);
        };
    } else {
      bc.displacement_data = [v = dv.vector](const Vec3 &, const Vec3 &) { return v; };
    }
    const auto pv = entry.pressure_value;
    if (pv.manufactured) {
      if (entry.pressure == PressureCondition::dirichlet) {
        bc.pressure_data = [ex = *exact](const Vec3 &x, const Vec3 &) { return ex.p(x); };
      } else if (!kappa) {
        issues.push_back("boundary." + entry.tag + ": manufactured flux needs a single permeability value");
      } else {
        bc.pressure_data = [ex = *exact, k = *kappa, mu_f = params.mu_f()](const Vec3 &x, const Vec3 &n) {
          const auto g = ex.grad_p(x);
          cplx s{};
          for (int a = 0; a < ex.dim(); ++a)
            s += g[a] * n[a];
          return (k / mu_f) * s;
        };
      }
    } else {
      bc.pressure_data = [v = pv.scalar](const Vec3 &, const Vec3 &) { return v; };
    }
    if (spec.conditions.count(tag))
      issues.push_back("boundary." + entry.tag + ": tag listed twice");
    spec.conditions[tag] = std::move(bc);
  }
  for (int tag : mesh.boundary_tags())
    if (!spec.conditions.count(tag)) {
      const auto it = mesh.tag_names.find(tag);
      issues.push_back("boundary: no condition for tag " + (it != mesh.tag_names.end() ? it->second : std::to_string(tag)));
    }
  if (!issues.empty())
    throw ConfigError(std::move(issues));
  return spec;
}

RunResult run_study(const RunConfig &config, const RunOptions &options)
{
  const auto out = resolve_output_dir(config, options);
  spdlog::info("study {} -> {}", to_string(config.study), out.string());
  switch (config.study) {
  case StudyKind::single: return run_single(config, options, out);
  case StudyKind::convergence: return run_convergence(config, options, out);
  case StudyKind::kappa_sweep:
  case StudyKind::nu_sweep: return run_sweep(config, options, out);
  case StudyKind::layered: return run_layered(config, options, out);
  }
  return {};
}

RunResult run_spectrum(const RunConfig &config, const RunOptions &options)
{
  RunResult result;
  const auto out = resolve_output_dir(config, options);
  const Mesh mesh = build_mesh(config, config.geometry.n);
  const auto params = derive_coefficients(config.material);
  std::vector<int> tags;
  const auto names = config.spectrum.clamped.empty() ? default_displacement_tags(mesh.dim) : config.spectrum.clamped;
  for (const auto &t : names)
    tags.push_back(mesh.tag_id(t));
  const auto report = elasticity_spectrum(mesh, config.degree, params, tags, config.spectrum.k_eigs);
  spdlog::info("omega^2={} m_bar={} gap={:.6e} smallest eigenvalue {:.6e}", report.omega2, report.m_bar, report.gap,
               report.eigenvalues.empty() ? 0.0 : report.eigenvalues.front());
  std::string table = "index,eigenvalue\n";
  for (std::size_t i = 0; i < report.eigenvalues.size(); ++i)
    table += std::to_string(i + 1) + ',' + format_number(report.eigenvalues[i]) + '\n';
  table += "# omega2=" + format_number(report.omega2) + " m_bar=" + std::to_string(report.m_bar) +
           " gap=" + format_number(report.gap) + '\n';
  emit(result, out / "spectrum.csv", table);
  return result;
}

RunResult run_infsup(const RunConfig &config, const RunOptions &options)
{
  RunResult result;
  if (config.geometry.kind == GeometryKind::gmsh)
    throw ConfigError({"geometry.type: inf-sup estimates use unit_square or unit_cube"});
  const auto out = resolve_output_dir(config, options);
  const int dim = config.geometry.dim();
  const auto params = derive_coefficients(config.material);
  const auto utags = config.infsup.displacement_dirichlet.empty() ? default_displacement_tags(dim)
                                                                  : config.infsup.displacement_dirichlet;
  const auto ptags =
      config.infsup.pressure_dirichlet.empty() ? default_pressure_tags(dim) : config.infsup.pressure_dirichlet;
  std::string table = "delta1,delta2,n,beta\n";
  for (double d1 : config.infsup.delta1s) {
    Stabilization stab = config.stab;
    stab.delta1 = d1;
    const auto betas = infsup_estimate(dim, config.degree, config.infsup.levels, params, stab, utags, ptags);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      spdlog::info("delta1={} n={} beta={:.6e}", d1, config.infsup.levels[i], betas[i]);
      table += format_number(d1) + ',' + format_number(stab.delta2) + ',' + std::to_string(config.infsup.levels[i]) +
               ',' + format_number(betas[i]) + '\n';
    }
  }
  emit(result, out / "infsup.csv", table);
  return result;
}

int exit_code_for(const std::exception_ptr &error)
{
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError &) {
    return exit_config_error;
  } catch (const ParameterError &) {
    return exit_config_error;
  } catch (const MeshError &e) {
    // Gmsh parse problems and missing tags come from the inputs.
    return dynamic_cast<const GmshError *>(&e) ? exit_io_error : exit_config_error;
  } catch (const AssemblyError &) {
    return exit_config_error;
  } catch (const SolverError &) {
    return exit_solver_failure;
  } catch (const IoError &) {
    return exit_io_error;
  } catch (const std::filesystem::filesystem_error &) {
    return exit_io_error;
  } catch (...) {
    return exit_solver_failure;
  }
}

} // namespace biot
