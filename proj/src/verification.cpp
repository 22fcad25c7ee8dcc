#include "biot/verification.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <set>
#include <tuple>

namespace biot {

namespace {

Mesh structured_mesh(int dim, int n)
{
  if (dim == 2)
    return generate_unit_square(n);
  if (dim == 3)
    return generate_unit_cube(n);
  throw ParameterError("dimension must be 2 or 3");
}

/// Runs fn(i) for i in [0, count), concurrently when requested. Results are
/// stored by index so aggregation does not depend on completion order.
template <class R>
std::vector<R> run_indexed(std::size_t count, bool parallel, const std::function<R(std::size_t)> &fn)
{
  std::vector<R> out;
  out.reserve(count);
  if (!parallel) {
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(fn(i));
    return out;
  }
  std::vector<std::future<R>> futures;
  futures.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    futures.push_back(std::async(std::launch::async, fn, i));
  for (auto &f : futures)
    out.push_back(f.get());
  return out;
}

} // namespace

CVector interpolate(const Discretization &disc, const ExactSolution &exact)
{
  const auto &dofs = disc.dofs();
  CVector x(dofs.size());
  for (std::size_t node = 0; node < dofs.n_scalar; ++node) {
    const auto &pt = dofs.node_coords[node];
    const auto u = exact.u(pt);
    for (int c = 0; c < dofs.dim; ++c)
      x[dofs.u(node, c)] = u[c];
    x[dofs.p(node)] = exact.p(pt);
    x[dofs.phi(node)] = exact.phi(pt);
  }
  return x;
}

ErrorReport compute_error(const Discretization &disc, const MaterialParams &params, std::span<const cplx> solution,
                          const ExactSolution &exact, const std::optional<Stabilization> &discrete_norm)
{
  const auto &mesh = disc.mesh();
  const auto &dofs = disc.dofs();
  const int d = disc.dim();
  const int nb = disc.element().num_basis();
  if (solution.size() != dofs.size())
    throw AssemblyError("solution size does not match the dof map");
  const auto rule = quadrature_rule(d, std::min(6, 2 * disc.degree() + 2));
  const double ell2 = params.ell() * params.ell();
  const double bp_scale = 1.0 / (params.mu_f() * params.alpha() * params.omega());
  const double w2rho = params.omega() * params.omega() * params.rho();

  double eu2 = 0.0, ep2 = 0.0, ephi2 = 0.0, disc2 = 0.0;
  std::vector<cplx> ul(static_cast<std::size_t>(nb * d)), pl(nb), fl(nb);

  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto tab = tabulate(disc.element(), disc.geometry(), c, rule);
    const auto cell = dofs.cell(c);
    for (int i = 0; i < nb; ++i) {
      for (int cc = 0; cc < d; ++cc)
        ul[i * d + cc] = solution[dofs.u(cell[i], cc)];
      pl[i] = solution[dofs.p(cell[i])];
      fl[i] = solution[dofs.phi(cell[i])];
    }
    const double kdiff = params.pressure_diffusion(mesh.cell_regions[c]);
    const double h = disc.geometry().cell(c).diameter;
    std::vector<CVec3> rh;
    if (discrete_norm && discrete_norm->delta1 != 0.0)
      rh = residual_R(tab, ul, fl, params);

    for (std::size_t q = 0; q < tab.nq; ++q) {
      const auto &x = tab.points[q];
      // discrete values and gradients
      std::array<CVec3, 3> gu{};
      cplx ph{}, fh{};
      CVec3 gp{};
      for (int i = 0; i < nb; ++i) {
        const double v = tab.value(q, i);
        const auto &g = tab.grad(q, i);
        for (int cc = 0; cc < d; ++cc)
          for (int a = 0; a < d; ++a)
            gu[cc][a] += ul[i * d + cc] * g[a];
        ph += pl[i] * v;
        fh += fl[i] * v;
        for (int a = 0; a < d; ++a)
          gp[a] += pl[i] * g[a];
      }
      const auto gue = exact.grad_u(x);
      const auto gpe = exact.grad_p(x);
      const double w = tab.jxw[q];

      double strain = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          const cplx e = 0.5 * ((gue[a][b] - gu[a][b]) + (gue[b][a] - gu[b][a]));
          strain += std::norm(e);
        }
      eu2 += w * 2.0 * params.mu_e * strain;

      double gpe2 = 0.0;
      for (int a = 0; a < d; ++a)
        gpe2 += std::norm(gpe[a] - gp[a]);
      ep2 += w * kdiff * (std::norm(exact.p(x) - ph) + ell2 * gpe2);
      ephi2 += w * std::norm(exact.phi(x) - fh) / params.lambda;

      if (discrete_norm) {
        disc2 += w * discrete_norm->delta2 * h * h * bp_scale * gpe2;
        if (discrete_norm->delta1 != 0.0) {
          const auto ue = exact.u(x);
          const auto ds = exact.div_strain(x);
          const auto gf = exact.grad_phi(x);
          double r2 = 0.0;
          for (int a = 0; a < d; ++a) {
            const cplx re = w2rho * ue[a] + 2.0 * params.mu_e * ds[a] - gf[a];
            r2 += std::norm(re - rh[q][a]);
          }
          disc2 += w * discrete_norm->delta1 * h * h * r2;
        }
      }
    }
  }

  ErrorReport r;
  r.err_u = std::sqrt(eu2);
  r.err_p = std::sqrt(ep2);
  r.err_phi = std::sqrt(ephi2);
  r.total = std::sqrt(eu2 + ep2 + ephi2);
  if (discrete_norm)
    r.discrete_total = std::sqrt(eu2 + ep2 + ephi2 + disc2);
  r.h = mesh_statistics(mesh).h_max;
  r.dofs = dofs.size();
  return r;
}

CsrMatrix assemble_norm_matrix(const Discretization &disc, const MaterialParams &params,
                               const std::optional<Stabilization> &discrete_norm)
{
  const auto &mesh = disc.mesh();
  const auto &dofs = disc.dofs();
  const int d = disc.dim();
  const int nb = disc.element().num_basis();
  const int nvec = nb * d;
  const auto rule = quadrature_rule(d, matrix_quadrature_degree(disc.degree()));
  const double ell2 = params.ell() * params.ell();
  const double bp_scale = 1.0 / (params.mu_f() * params.alpha() * params.omega());
  const double delta1 = discrete_norm ? discrete_norm->delta1 : 0.0;
  const double delta2 = discrete_norm ? discrete_norm->delta2 : 0.0;

  std::vector<Triplet> trips;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto tab = tabulate(disc.element(), disc.geometry(), c, rule);
    const auto em = element_matrices(tab);
    const auto cell = dofs.cell(c);
    const double h = disc.geometry().cell(c).diameter;
    const double kdiff = params.pressure_diffusion(mesh.cell_regions[c]);
    Eigen::MatrixXd rg;
    if (delta1 != 0.0)
      rg = delta1 * h * h * residual_gram(tab, params);
    else
      rg = Eigen::MatrixXd::Zero(nvec + nb, nvec + nb);

    auto global = [&](int a) {
      return a < nvec ? dofs.u(cell[a / d], a % d) : dofs.phi(cell[a - nvec]);
    };
    for (int a = 0; a < nvec + nb; ++a)
      for (int b = 0; b < nvec + nb; ++b) {
        double v = rg(a, b);
        if (a < nvec && b < nvec)
          v += 2.0 * params.mu_e * em.strain_strain(a, b);
        else if (a >= nvec && b >= nvec)
          v += em.mass(a - nvec, b - nvec) / params.lambda;
        if (v != 0.0)
          trips.push_back({global(a), global(b), v});
      }
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j)
        trips.push_back({dofs.p(cell[i]), dofs.p(cell[j]),
                         kdiff * (em.mass(i, j) + ell2 * em.stiffness(i, j)) +
                             delta2 * h * h * bp_scale * em.stiffness(i, j)});
  }
  return csr_from_triplets(dofs.size(), dofs.size(), trips);
}

double u_norm(const CsrMatrix &gram, std::span<const cplx> x)
{
  const auto nx = spmv(gram, x);
  cplx s{};
  for (std::size_t i = 0; i < x.size(); ++i)
    s += std::conj(x[i]) * nx[i];
  return std::sqrt(std::max(0.0, s.real()));
}

double least_squares_slope(std::span<const double> h, std::span<const double> err, std::size_t last)
{
  if (h.size() != err.size())
    throw std::invalid_argument("h and error sequences differ in length");
  const std::size_t n = std::min(last, h.size());
  if (n < 2)
    throw std::invalid_argument("a slope needs at least two points");
  const std::size_t first = h.size() - n;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = first; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0))
      throw std::invalid_argument("slope needs positive h and error values");
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nn = static_cast<double>(n);
  const double den = nn * sxx - sx * sx;
  if (den == 0.0)
    throw std::invalid_argument("slope undefined for identical h values");
  return (nn * sxy - sx * sy) / den;
}

std::pair<CVector, SolveReport> solve(const BiotSystem &system, const SolverSettings &settings)
{
  const auto t0 = std::chrono::steady_clock::now();
  std::pair<CVector, SolveReport> out;
  if (settings.method == SolveMethod::direct) {
    out = direct_solve(system.matrix, system.load, settings.direct);
  } else if (settings.ilu0) {
    const Ilu0 pre(system.matrix);
    out = gmres(system.matrix, system.load, &pre, settings.gmres);
  } else {
    out = gmres(system.matrix, system.load, nullptr, settings.gmres);
  }
  out.second.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

RunRecord run_manufactured(const ManufacturedCase &problem, int n)
{
  const auto params = derive_coefficients(problem.material);
  const Mesh mesh = structured_mesh(problem.dim, n);
  const Discretization disc(mesh, problem.degree);
  const auto exact = problem.dim == 2 ? manufactured_2d(params) : manufactured_3d(params);
  const auto boundary = manufactured_boundary(exact, params, mesh);
  const auto system = assemble_system(disc, params, problem.stab, boundary, manufactured_forces(exact, params));
  auto [x, report] = solve(system, problem.solver);
  if (!report.converged)
    throw SolverError("solver did not converge at n=" + std::to_string(n) + " (relative residual " +
                      std::to_string(report.relative_residual) + ")");

  RunRecord r;
  r.dim = problem.dim;
  r.degree = problem.degree;
  r.n = n;
  r.error = compute_error(disc, params, x, exact);
  r.h = r.error.h;
  r.dofs = r.error.dofs;
  r.kappa = problem.material.kappa.begin()->second;
  r.nu = problem.material.nu;
  r.omega = problem.material.omega;
  r.delta1 = problem.stab.delta1;
  r.delta2 = problem.stab.delta2;
  r.solve = report;
  return r;
}

ConvergenceResult convergence_study(const ManufacturedCase &problem, std::span<const int> levels, bool parallel)
{
  ConvergenceResult result;
  struct Outcome
  {
    std::optional<RunRecord> record;
    std::string error;
  };
  const auto outcomes = run_indexed<Outcome>(levels.size(), parallel, [&](std::size_t i) {
    try {
      return Outcome{run_manufactured(problem, levels[i]), {}};
    } catch (const std::exception &e) {
      return Outcome{std::nullopt, e.what()};
    }
  });
  for (const auto &o : outcomes) {
    if (!o.record) {
      result.complete = false;
      result.failure = o.error;
      break;
    }
    result.runs.push_back(*o.record);
  }
  if (result.runs.size() >= 2) {
    std::vector<double> h, eu, ep, ef, et;
    for (const auto &r : result.runs) {
      h.push_back(r.h);
      eu.push_back(r.error.err_u);
      ep.push_back(r.error.err_p);
      ef.push_back(r.error.err_phi);
      et.push_back(r.error.total);
    }
    result.slopes.u = least_squares_slope(h, eu);
    result.slopes.p = least_squares_slope(h, ep);
    result.slopes.phi = least_squares_slope(h, ef);
    result.slopes.total = least_squares_slope(h, et);
  }
  return result;
}

std::vector<RunRecord> kappa_sweep(const ManufacturedCase &problem, int n, std::span<const double> kappas,
                                   std::span<const double> delta2s, bool parallel)
{
  for (double k : kappas)
    if (!(k > 0.0))
      throw ParameterError("permeability must be positive");
  const std::size_t m = delta2s.size();
  return run_indexed<RunRecord>(kappas.size() * m, parallel, [&](std::size_t i) {
    ManufacturedCase c = problem;
    c.material.kappa = {{0, kappas[i / m]}};
    c.stab.delta2 = delta2s[i % m];
    return run_manufactured(c, n);
  });
}

std::vector<RunRecord> nu_sweep(const ManufacturedCase &problem, int n, std::span<const double> nus,
                                std::span<const double> delta2s, bool parallel)
{
  for (double nu : nus)
    if (!(nu > 0.0 && nu < 0.5))
      throw ParameterError("Poisson ratio must lie in (0, 0.5)");
  const std::size_t m = delta2s.size();
  return run_indexed<RunRecord>(nus.size() * m, parallel, [&](std::size_t i) {
    ManufacturedCase c = problem;
    c.material.nu = nus[i / m];
    c.stab.delta2 = delta2s[i % m];
    return run_manufactured(c, n);
  });
}

// ---------------------------------------------------------------------------

BoundarySpec layered_boundary(const Mesh &mesh, double bottom_traction, double bottom_pressure)
{
  BoundarySpec spec;
  const int bottom = mesh.tag_id("bottom");
  const int top = mesh.tag_id("top");
  for (int tag : mesh.boundary_tags()) {
    BoundaryCondition bc;
    if (tag == bottom) {
      bc.displacement = DisplacementCondition::traction;
      bc.displacement_data = [bottom_traction](const Vec3 &, const Vec3 &) {
        return CVec3{0.0, bottom_traction, 0.0};
      };
      bc.pressure = PressureCondition::dirichlet;
      bc.pressure_data = [bottom_pressure](const Vec3 &, const Vec3 &) { return cplx(bottom_pressure); };
    } else if (tag == top) {
      bc.displacement = DisplacementCondition::dirichlet;
    }
    spec.conditions[tag] = std::move(bc);
  }
  return spec;
}

Mesh layered_mesh(const LayeredConfig &config)
{
  return generate_unit_square(config.n, config.layer_bounds);
}

std::vector<cplx> sample_pressure(const Discretization &disc, std::span<const cplx> solution, const Vec3 &a,
                                  const Vec3 &b, std::size_t samples)
{
  const auto &mesh = disc.mesh();
  const auto &geom = disc.geometry();
  const auto &dofs = disc.dofs();
  const int nb = disc.element().num_basis();
  std::vector<double> vals(nb);
  std::vector<Vec3> grads(nb);
  std::vector<cplx> out;
  out.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const double t = samples > 1 ? static_cast<double>(s) / static_cast<double>(samples - 1) : 0.0;
    Vec3 x{};
    for (int k = 0; k < 3; ++k)
      x[k] = a[k] + t * (b[k] - a[k]);
    bool found = false;
    for (std::size_t c = 0; c < mesh.num_cells() && !found; ++c) {
      const auto l = geom.barycentric(c, x);
      if (*std::min_element(l.begin(), l.begin() + mesh.dim + 1) < -1e-12)
        continue;
      evaluate_basis(disc.element(), geom.cell(c), l, vals, grads);
      cplx v{};
      const auto cell = dofs.cell(c);
      for (int i = 0; i < nb; ++i)
        v += vals[i] * solution[dofs.p(cell[i])];
      out.push_back(v);
      found = true;
    }
    if (!found)
      throw std::out_of_range("sample point outside the mesh");
  }
  return out;
}

std::size_t second_difference_sign_changes(std::span<const cplx> values, double rel_tol)
{
  if (values.size() < 4)
    return 0;
  auto count = [&](auto part) {
    double vmax = 0.0;
    for (const auto &v : values)
      vmax = std::max(vmax, std::abs(part(v)));
    const double tol = rel_tol * vmax;
    std::size_t changes = 0;
    int last = 0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
      const double d2 = part(values[i - 1]) - 2.0 * part(values[i]) + part(values[i + 1]);
      if (std::abs(d2) <= tol)
        continue;
      const int s = d2 > 0.0 ? 1 : -1;
      if (last != 0 && s != last)
        ++changes;
      last = s;
    }
    return changes;
  };
  return std::max(count([](const cplx &v) { return v.real(); }), count([](const cplx &v) { return v.imag(); }));
}

LayeredRun solve_layered(const LayeredConfig &config, const Discretization &disc, double omega,
                         const SolverSettings &solver)
{
  RawMaterial raw = config.material;
  raw.omega = omega;
  const auto params = derive_coefficients(raw);
  Stabilization stab;
  stab.delta1 = config.delta1_override ? *config.delta1_override : 1.0 / (omega * omega);
  stab.delta2 = config.delta2;
  const auto boundary = layered_boundary(disc.mesh(), config.bottom_traction, config.bottom_pressure);
  const auto system = assemble_system(disc, params, stab, boundary);

  LayeredRun run;
  run.omega = omega;
  run.delta1 = stab.delta1;
  run.delta2 = stab.delta2;
  std::tie(run.solution, run.report) = solve(system, solver);
  run.finite = std::all_of(run.solution.begin(), run.solution.end(),
                           [](const cplx &v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
  if (run.finite) {
    run.profile = sample_pressure(disc, run.solution, {config.line_x, 0.0, 0.0}, {config.line_x, 1.0, 0.0},
                                  config.samples);
    for (std::size_t s = 0; s < config.samples; ++s)
      run.ys.push_back(config.samples > 1 ? static_cast<double>(s) / static_cast<double>(config.samples - 1) : 0.0);
    run.sign_changes = second_difference_sign_changes(run.profile);
  }
  return run;
}

std::vector<LayeredRun> layered_experiment(const LayeredConfig &config, const Discretization &disc, bool parallel)
{
  return run_indexed<LayeredRun>(config.omegas.size(), parallel, [&](std::size_t i) {
    return solve_layered(config, disc, config.omegas[i], config.solver);
  });
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> constrained_nodes(const Discretization &disc, const std::vector<int> &tags)
{
  std::set<std::size_t> nodes;
  const auto &mesh = disc.mesh();
  for (std::size_t f = 0; f < mesh.num_facets(); ++f)
    if (std::find(tags.begin(), tags.end(), mesh.facet_tags[f]) != tags.end())
      for (auto node : disc.dofs().facet_nodes[f])
        nodes.insert(node);
  return {nodes.begin(), nodes.end()};
}

} // namespace

SpectrumReport elasticity_spectrum(const Mesh &mesh, int degree, const MaterialParams &params,
                                   const std::vector<int> &clamped_tags, std::size_t k_eigs, std::size_t dense_cap)
{
  if (clamped_tags.empty())
    throw ParameterError("the displacement Dirichlet set must not be empty");
  const Discretization disc(mesh, degree);
  const auto &dofs = disc.dofs();
  const int d = disc.dim();
  const std::size_t nu_dofs = dofs.n_scalar * static_cast<std::size_t>(d);

  std::vector<char> fixed(nu_dofs, 0);
  for (auto node : constrained_nodes(disc, clamped_tags))
    for (int c = 0; c < d; ++c)
      fixed[dofs.u(node, c)] = 1;
  std::vector<Eigen::Index> map(nu_dofs, -1);
  Eigen::Index nfree = 0;
  for (std::size_t i = 0; i < nu_dofs; ++i)
    if (!fixed[i])
      map[i] = nfree++;
  if (static_cast<std::size_t>(nfree) > dense_cap)
    throw SolverError("dense eigenproblem of size " + std::to_string(nfree) + " exceeds the cap of " +
                      std::to_string(dense_cap));

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nfree, nfree);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nfree, nfree);
  const auto rule = quadrature_rule(d, matrix_quadrature_degree(degree));
  const int nb = disc.element().num_basis();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto em = element_matrices(disc.element(), disc.geometry(), c, rule);
    const auto cell = dofs.cell(c);
    for (int I = 0; I < nb * d; ++I) {
      const auto gi = map[dofs.u(cell[I / d], I % d)];
      if (gi < 0)
        continue;
      for (int J = 0; J < nb * d; ++J) {
        const auto gj = map[dofs.u(cell[J / d], J % d)];
        if (gj < 0)
          continue;
        A(gi, gj) += 2.0 * params.mu_e * em.strain_strain(I, J);
        if (I % d == J % d)
          M(gi, gj) += params.rho() * em.mass(I / d, J / d);
      }
    }
  }

  const auto pairs = dense_generalized_eig(A, M, k_eigs, dense_cap);
  SpectrumReport r;
  r.omega2 = params.omega() * params.omega();
  r.gap = std::numeric_limits<double>::infinity();
  for (const auto &p : pairs) {
    r.eigenvalues.push_back(p.value);
    if (p.value < r.omega2)
      ++r.m_bar;
    r.gap = std::min(r.gap, std::abs(r.omega2 - p.value) / (1.0 + p.value));
  }
  return r;
}

double discrete_infsup(const Eigen::MatrixXcd &a, const Eigen::MatrixXd &gram)
{
  if (a.rows() != a.cols() || gram.rows() != a.rows() || gram.cols() != a.cols())
    throw std::invalid_argument("operator and Gram matrix sizes differ");
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw SolverError("Gram matrix is not positive definite");
  const Eigen::MatrixXcd L = llt.matrixL().toDenseMatrix().cast<cplx>();
  // B = L^{-1} A L^{-H}
  const Eigen::MatrixXcd X = L.triangularView<Eigen::Lower>().solve(a);
  const Eigen::MatrixXcd B =
      L.triangularView<Eigen::Lower>().solve(X.adjoint()).adjoint();
  const Eigen::BDCSVD<Eigen::MatrixXcd> svd(B);
  return svd.singularValues().minCoeff();
}

std::vector<double> infsup_estimate(int dim, int degree, std::span<const int> levels, const MaterialParams &params,
                                    const Stabilization &stab, const std::vector<std::string> &displacement_tags,
                                    const std::vector<std::string> &pressure_tags, std::size_t dense_cap)
{
  std::vector<double> betas;
  for (int n : levels) {
    const Mesh mesh = structured_mesh(dim, n);
    const Discretization disc(mesh, degree);
    const auto &dofs = disc.dofs();
    std::vector<int> utags, ptags;
    for (const auto &t : displacement_tags)
      utags.push_back(mesh.tag_id(t));
    for (const auto &t : pressure_tags)
      ptags.push_back(mesh.tag_id(t));

    std::vector<char> fixed(dofs.size(), 0);
    for (auto node : constrained_nodes(disc, utags))
      for (int c = 0; c < dim; ++c)
        fixed[dofs.u(node, c)] = 1;
    for (auto node : constrained_nodes(disc, ptags))
      fixed[dofs.p(node)] = 1;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < dofs.size(); ++i)
      if (!fixed[i])
        free.push_back(i);
    if (free.size() > dense_cap)
      throw SolverError("dense inf-sup problem of size " + std::to_string(free.size()) + " exceeds the cap of " +
                        std::to_string(dense_cap));

    const auto A = to_dense(assemble_operator(disc, params, stab));
    const auto N = to_dense(assemble_norm_matrix(disc, params, stab));
    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXcd Af(nf, nf);
    Eigen::MatrixXd Nf(nf, nf);
    for (Eigen::Index i = 0; i < nf; ++i)
      for (Eigen::Index j = 0; j < nf; ++j) {
        const auto gi = static_cast<Eigen::Index>(free[static_cast<std::size_t>(i)]);
        const auto gj = static_cast<Eigen::Index>(free[static_cast<std::size_t>(j)]);
        Af(i, j) = A(gi, gj);
        Nf(i, j) = N(gi, gj).real();
      }
    betas.push_back(discrete_infsup(Af, Nf));
  }
  return betas;
}

} // namespace biot
