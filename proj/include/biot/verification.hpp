#pragma once

#include "biot/exact.hpp"
#include "biot/forms.hpp"

#include <optional>
#include <string>
#include <vector>

namespace biot {

/// Errors in the energy norm
///   |(v,q,xi)|_U^2 = 2 mu_e |eps(v)|^2 + kappa/(mu_f omega alpha) |q|_1^2 + |xi|^2 / lambda.
/// The per-field members are the square roots of the three contributions.
struct ErrorReport
{
  double err_u = 0.0;
  double err_p = 0.0;
  double err_phi = 0.0;
  double total = 0.0;
  /// Residual- and pressure-stabilization seminorm contributions; only set
  /// when the mesh-dependent norm was requested.
  std::optional<double> discrete_total;
  double h = 0.0;
  std::size_t dofs = 0;
};

/// Nodal interpolant of the exact fields.
CVector interpolate(const Discretization &disc, const ExactSolution &exact);

/// Errors computed with quadrature of degree 2k+2 against the closed-form
/// fields. Passing a Stabilization adds the mesh-dependent norm terms.
ErrorReport compute_error(const Discretization &disc, const MaterialParams &params, std::span<const cplx> solution,
                          const ExactSolution &exact, const std::optional<Stabilization> &discrete_norm = {});

/// Gram matrix of the U-norm (optionally the mesh-dependent U_h-norm) on
/// the full monolithic space.
CsrMatrix assemble_norm_matrix(const Discretization &disc, const MaterialParams &params,
                               const std::optional<Stabilization> &discrete_norm = {});

/// sqrt(x^H N x) for the U-norm Gram matrix N.
double u_norm(const CsrMatrix &gram, std::span<const cplx> x);

/// Least-squares slope of log(err) against log(h) over the last `last`
/// entries (all when fewer are given).
double least_squares_slope(std::span<const double> h, std::span<const double> err, std::size_t last = 3);

struct SolverSettings
{
  SolveMethod method = SolveMethod::direct;
  GmresOptions gmres{};
  bool ilu0 = true;
  DirectOptions direct{};
};

std::pair<CVector, SolveReport> solve(const BiotSystem &system, const SolverSettings &settings);

/// A manufactured-solution problem on the unit square (dim 2) or cube (dim 3).
struct ManufacturedCase
{
  int dim = 2;
  int degree = 1;
  RawMaterial material{};
  Stabilization stab{};
  SolverSettings solver{};
};

struct RunRecord
{
  int dim = 2;
  int degree = 1;
  int n = 0;
  double h = 0.0;
  std::size_t dofs = 0;
  double kappa = 0.0;
  double nu = 0.0;
  double omega = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  ErrorReport error{};
  SolveReport solve{};
};

/// Assemble, solve and measure the error on the n-level structured mesh.
RunRecord run_manufactured(const ManufacturedCase &problem, int n);

struct Slopes
{
  double u = 0.0;
  double p = 0.0;
  double phi = 0.0;
  double total = 0.0;
};

struct ConvergenceResult
{
  std::vector<RunRecord> runs;
  Slopes slopes;
  /// False when a level failed; runs then holds the completed levels.
  bool complete = true;
  std::string failure;
};

ConvergenceResult convergence_study(const ManufacturedCase &problem, std::span<const int> levels,
                                    bool parallel = false);

/// One run per (kappa, delta2) pair, kappa-major.
std::vector<RunRecord> kappa_sweep(const ManufacturedCase &problem, int n, std::span<const double> kappas,
                                   std::span<const double> delta2s, bool parallel = false);

/// One run per (nu, delta2) pair, nu-major.
std::vector<RunRecord> nu_sweep(const ManufacturedCase &problem, int n, std::span<const double> nus,
                                std::span<const double> delta2s, bool parallel = false);

// ---------------------------------------------------------------------------
// Layered-permeability problem

struct LayeredConfig
{
  int n = 48;
  int degree = 1;
  RawMaterial material = [] {
    RawMaterial m;
    m.E = 100.0;
    m.nu = 0.45;
    m.mu_f = 1e-2;
    m.rho = 1.0;
    m.kappa = {{0, 1e-3}, {1, 1e-4}, {2, 1e-5}};
    return m;
  }();
  std::vector<double> layer_bounds{1.0 / 3.0, 2.0 / 3.0};
  std::vector<double> omegas{25.0, 50.0, 75.0, 100.0, 125.0};
  double bottom_traction = 1e-2;
  double bottom_pressure = 1e-2;
  /// delta1 = omega^-2 unless delta1_override is set.
  std::optional<double> delta1_override;
  double delta2 = 1.0;
  SolverSettings solver{SolveMethod::gmres, {}, true, {}};
  std::size_t samples = 200;
  double line_x = 0.5;
};

/// Traction (0, t) and p = p_b on the bottom, u = 0 on the top, natural
/// conditions elsewhere.
BoundarySpec layered_boundary(const Mesh &mesh, double bottom_traction, double bottom_pressure);

struct LayeredRun
{
  double omega = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  CVector solution;
  SolveReport report{};
  std::vector<double> ys;
  std::vector<cplx> profile;
  std::size_t sign_changes = 0;
  bool finite = true;
};

Mesh layered_mesh(const LayeredConfig &config);
LayeredRun solve_layered(const LayeredConfig &config, const Discretization &disc, double omega,
                         const SolverSettings &solver);
std::vector<LayeredRun> layered_experiment(const LayeredConfig &config, const Discretization &disc,
                                           bool parallel = false);

/// Pressure sampled on the segment from a to b at `samples` evenly spaced
/// points (end points included).
std::vector<cplx> sample_pressure(const Discretization &disc, std::span<const cplx> solution, const Vec3 &a,
                                  const Vec3 &b, std::size_t samples);

/// Sign changes of the discrete second difference, counted separately for
/// the real and imaginary parts (maximum returned). Differences below
/// rel_tol * max|v| are treated as zero.
std::size_t second_difference_sign_changes(std::span<const cplx> values, double rel_tol = 1e-8);

// ---------------------------------------------------------------------------
// Well-posedness diagnostics

struct SpectrumReport
{
  std::vector<double> eigenvalues;
  double omega2 = 0.0;
  /// Number of eigenvalues below omega^2.
  std::size_t m_bar = 0;
  /// min_n |omega^2 - lambda_n| / (1 + lambda_n)
  double gap = 0.0;
};

/// Eigenvalues of 2 mu_e (eps v, eps w) = lambda rho (v, w) on the
/// displacement space clamped on the given tags.
SpectrumReport elasticity_spectrum(const Mesh &mesh, int degree, const MaterialParams &params,
                                   const std::vector<int> &clamped_tags, std::size_t k_eigs,
                                   std::size_t dense_cap = 3000);

/// Smallest singular value of L^{-1} A L^{-H} with N = L L^H.
double discrete_infsup(const Eigen::MatrixXcd &a, const Eigen::MatrixXd &gram);

/// beta_h = inf-sup constant of A_h in the U_h-norm on the space with
/// homogeneous Dirichlet conditions (u on displacement_tags, p on
/// pressure_tags), one value per level of the structured mesh family.
std::vector<double> infsup_estimate(int dim, int degree, std::span<const int> levels, const MaterialParams &params,
                                    const Stabilization &stab, const std::vector<std::string> &displacement_tags,
                                    const std::vector<std::string> &pressure_tags, std::size_t dense_cap = 3000);

} // namespace biot
