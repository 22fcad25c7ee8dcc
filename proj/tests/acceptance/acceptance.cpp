// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "biot/verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace biot;

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string join(const std::vector<double> &v, const char *f = "%.3g")
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + fmt(f, v[i]);
  return s;
}

ManufacturedCase baseline_case(int dim, int degree)
{
  ManufacturedCase c;
  c.dim = dim;
  c.degree = degree;
  c.stab = {0.5, 0.0};
  return c;
}

Outcome convergence(int dim, int degree, std::vector<int> levels, double lo, double hi, bool per_field)
{
  const auto res = convergence_study(baseline_case(dim, degree), levels);
  if (!res.complete)
    return {false, "study incomplete: " + res.failure};
  std::vector<double> err;
  for (const auto &r : res.runs)
    err.push_back(r.error.total);
  const auto &s = res.slopes;
  bool ok = s.total >= lo && s.total <= hi;
  if (per_field)
    ok = ok && s.u >= 0.85 && s.p >= 0.85 && s.phi >= 0.85;
  return {ok, fmt("errors=[%s] slope total=%.3f u=%.3f p=%.3f phi=%.3f window=[%.2f,%.2f]", join(err).c_str(),
                  s.total, s.u, s.p, s.phi, lo, hi)};
}

Outcome ac4()
{
  std::vector<double> kappas;
  for (int e = 1; e <= 8; ++e)
    kappas.push_back(std::pow(10.0, -e));
  const std::vector<double> d2{0.0, 0.01};
  const auto runs = kappa_sweep(baseline_case(2, 1), 16, kappas, d2);
  double lo = INFINITY, hi = 0.0, e0 = 0.0, e1 = 0.0;
  for (const auto &r : runs) {
    if (r.delta2 == 0.01) {
      lo = std::min(lo, r.error.total);
      hi = std::max(hi, r.error.total);
    }
    if (r.kappa == 1e-8)
      (r.delta2 == 0.0 ? e0 : e1) = r.error.total;
  }
  const double ratio = hi / lo;
  return {ratio <= 10.0 && e0 > e1,
          fmt("max/min ratio (delta2=0.01)=%.4f; kappa=1e-8 error delta2=0: %.6g, delta2=0.01: %.6g", ratio, e0, e1)};
}

Outcome ac5()
{
  const std::vector<double> nus{0.3, 0.4, 0.45, 0.49}, d2{0.0, 1.0};
  const auto runs = nu_sweep(baseline_case(2, 1), 16, nus, d2);
  bool ok = true;
  std::vector<double> ratios;
  for (std::size_t i = 0; i + 1 < runs.size(); i += 2) {
    const double r = std::max(runs[i].error.total, runs[i + 1].error.total) /
                     std::min(runs[i].error.total, runs[i + 1].error.total);
    ratios.push_back(r);
    ok = ok && r <= 2.0;
  }
  return {ok, "error ratio delta2=1 vs 0 per nu {0.3,0.4,0.45,0.49}: [" + join(ratios, "%.6f") + "]"};
}

Outcome ac6()
{
  const auto params = derive_coefficients(RawMaterial{});
  const Mesh m = generate_unit_square(8);
  const Discretization disc(m, 1);
  const auto ex = manufactured_2d(params);
  const auto bc = manufactured_boundary(ex, params, m);
  const auto forces = manufactured_forces(ex, params);
  const Stabilization stab{0.5, 0.0};
  const auto A = assemble_operator(disc, params, stab);
  const auto F = assemble_load(disc, params, stab, bc, forces);
  const auto constraints = collect_dirichlet(disc, bc);
  const auto sys = apply_dirichlet(A, F, disc.dofs(), constraints);
  const auto [x, rep] = direct_solve(sys.matrix, sys.load);
  auto r = spmv(A, x);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] -= F[i];
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    cplx s{};
    double vn = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (constraints.count(i))
        continue;
      const cplx v(u(rng), u(rng));
      s += std::conj(v) * r[i];
      vn += std::norm(v);
    }
    worst = std::max(worst, std::abs(s) / (std::sqrt(vn) * norm2(F)));
  }
  return {worst <= 1e-10, fmt("max relative residual over 20 test vectors=%.3e", worst)};
}

Outcome ac7()
{
  const auto params = derive_coefficients(RawMaterial{});
  std::vector<std::string> fails;

  // (u,p) block.
  double up = 0.0;
  for (int dim : {2, 3}) {
    const Mesh m = dim == 2 ? generate_unit_square(3) : generate_unit_cube(1);
    const Discretization disc(m, 2);
    const auto A = assemble_operator(disc, params, {0.5, 0.3});
    up = std::max(up, extract_block(A, disc.dofs(), Field::u, Field::p).cwiseAbs().maxCoeff());
    up = std::max(up, extract_block(A, disc.dofs(), Field::p, Field::u).cwiseAbs().maxCoeff());
  }

  // (phi,phi) block with delta1 = 0 against the scalar mass matrix.
  const Mesh sq = generate_unit_square(4);
  const Discretization disc(sq, 1);
  const auto &dofs = disc.dofs();
  const auto nsc = static_cast<Eigen::Index>(dofs.n_scalar);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nsc, nsc), stiff = mass;
  const auto rule = quadrature_rule(2, 2);
  for (std::size_t c = 0; c < sq.num_cells(); ++c) {
    const auto em = element_matrices(disc.element(), disc.geometry(), c, rule);
    const auto cell = dofs.cell(c);
    for (int i = 0; i < dofs.nloc; ++i)
      for (int j = 0; j < dofs.nloc; ++j) {
        mass(static_cast<Eigen::Index>(cell[i]), static_cast<Eigen::Index>(cell[j])) += em.mass(i, j);
        stiff(static_cast<Eigen::Index>(cell[i]), static_cast<Eigen::Index>(cell[j])) += em.stiffness(i, j);
      }
  }
  const Eigen::MatrixXcd phiphi = extract_block(assemble_operator(disc, params, {0.0, 0.0}), dofs, Field::phi, Field::phi);
  const double mass_dev = (phiphi - (mass / params.lambda).cast<cplx>()).cwiseAbs().maxCoeff();

  // P1 residual identity.
  const auto tab = tabulate(disc.element(), disc.geometry(), 5, quadrature_rule(2, 2));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<cplx> v(6), xi(3);
  for (auto &z : v)
    z = cplx(u(rng), u(rng));
  for (auto &z : xi)
    z = cplx(u(rng), u(rng));
  const auto R = residual_R(tab, v, xi, params);
  const double w2rho = params.omega() * params.omega() * params.rho();
  double res_dev = 0.0;
  for (std::size_t q = 0; q < tab.nq; ++q)
    for (int a = 0; a < 2; ++a) {
      cplx e{};
      for (int i = 0; i < 3; ++i)
        e += w2rho * v[i * 2 + a] * tab.value(q, i) - xi[i] * tab.grad(q, i)[a];
      res_dev = std::max(res_dev, std::abs(R[q][a] - e));
    }

  // theta consistency.
  std::mt19937 trng(2024);
  std::uniform_real_distribution<double> E(1.0, 1e4), nu(0.01, 0.49), al(0.05, 1.0), B(0.05, 1.0);
  double theta_dev = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double e = E(trng), n = nu(trng), a = al(trng), b = B(trng);
    const double lambda = e * n / ((1 + n) * (1 - 2 * n));
    const double storage = 3.0 * a * (1.0 - a * b) * (1.0 - 2.0 * n) / (b * e);
    const double t1 = theta_from_storage(storage, lambda, a), t2 = theta_closed_form(n, a, b);
    theta_dev = std::max(theta_dev, std::abs(t1 - t2) / std::abs(t2));
  }

  // kappa-linearity of the (p,p) block.
  auto pp = [&](double kappa) {
    RawMaterial r;
    r.kappa = {{0, kappa}};
    return Eigen::MatrixXcd(
        extract_block(assemble_operator(disc, derive_coefficients(r), {0.5, 0.0}), dofs, Field::p, Field::p));
  };
  const Eigen::MatrixXcd a1 = pp(0.1), a2 = pp(0.2), a3 = pp(0.3);
  const double lin_dev = std::max(((a3 - a2) - (a2 - a1)).cwiseAbs().maxCoeff(),
                                  ((a2 - a1) - (0.1 * stiff).cast<cplx>()).cwiseAbs().maxCoeff());

  const bool ok = up == 0.0 && mass_dev <= 1e-14 && res_dev <= 1e-13 && theta_dev <= 1e-12 && lin_dev <= 1e-13;
  return {ok, fmt("|A_up|=%.1e mass dev=%.1e residual dev=%.1e theta dev=%.1e kappa-linearity dev=%.1e", up,
                  mass_dev, res_dev, theta_dev, lin_dev)};
}

LayeredConfig layered_config()
{
  LayeredConfig cfg; // default layered material, layers and loads
  cfg.n = 48;
  cfg.omegas = {25.0, 50.0};
  cfg.solver.method = SolveMethod::gmres;
  cfg.solver.ilu0 = true;
  cfg.solver.gmres.restart = 500;
  cfg.solver.gmres.tol = 1e-10;
  cfg.solver.gmres.max_iter = 50000;
  return cfg;
}

std::map<int, std::size_t> load_golden(const std::string &path)
{
  std::map<int, std::size_t> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream s(line);
    int omega = 0;
    std::size_t count = 0;
    if (s >> omega >> count)
      out[omega] = count;
  }
  return out;
}

Outcome ac8()
{
  const auto cfg = layered_config();
  const Mesh m = layered_mesh(cfg);
  const Discretization disc(m, 1);
  const auto golden = load_golden(std::string(BIOT_GOLDEN) + "/layered_sign_changes.txt");
  const auto runs = layered_experiment(cfg, disc);
  SolverSettings direct = cfg.solver;
  direct.method = SolveMethod::direct;

  // Bottom pressure dofs.
  std::vector<std::size_t> bottom;
  for (std::size_t n = 0; n < disc.dofs().n_scalar; ++n)
    if (disc.dofs().node_coords[n][1] == 0.0)
      bottom.push_back(disc.dofs().p(n));

  bool ok = true;
  std::string detail;
  for (const auto &run : runs) {
    const auto ref = solve_layered(cfg, disc, run.omega, direct);
    RawMaterial raw = cfg.material;
    raw.omega = run.omega;
    const auto gram = assemble_norm_matrix(disc, derive_coefficients(raw));
    CVector d(ref.solution.size());
    for (std::size_t i = 0; i < d.size(); ++i)
      d[i] = run.solution[i] - ref.solution[i];
    const double diff = u_norm(gram, d) / u_norm(gram, ref.solution);
    double bc_dev = 0.0;
    for (auto i : bottom)
      bc_dev = std::max(bc_dev, std::abs(run.solution[i] - cplx(cfg.bottom_pressure)));
    const int key = static_cast<int>(run.omega);
    const bool has_golden = golden.count(key) > 0;
    const bool run_ok = run.report.converged && run.finite && diff <= 1e-6 && bc_dev <= 1e-10 && has_golden &&
                        run.sign_changes <= golden.at(key);
    ok = ok && run_ok;
    detail += fmt("omega=%g: gmres its=%zu U-diff=%.2e bc dev=%.1e finite=%d sign changes=%zu (golden %s); ",
                  run.omega, run.report.iterations, diff, bc_dev, run.finite ? 1 : 0, run.sign_changes,
                  has_golden ? std::to_string(golden.at(key)).c_str() : "missing");
  }
  return {ok, detail};
}

Outcome ac9()
{
  const auto params = derive_coefficients(RawMaterial{});
  const auto spec = elasticity_spectrum(generate_unit_square(8), 1, params, {1, 2}, 10);
  const std::vector<int> levels{2, 4, 8};
  const std::vector<std::string> disp{"right", "bottom"}, pres{"left", "top"};
  const auto b05 = infsup_estimate(2, 1, levels, params, {0.5, 0.0}, disp, pres);
  const auto b0 = infsup_estimate(2, 1, levels, params, {0.0, 0.0}, disp, pres);
  const double mn = *std::min_element(b05.begin(), b05.end()), mx = *std::max_element(b05.begin(), b05.end());
  bool smaller = true;
  for (std::size_t i = 0; i < levels.size(); ++i)
    smaller = smaller && b0[i] < b05[i];
  const bool ok = spec.m_bar == 0 && spec.gap > 0.0 && mn >= 0.5 * mx && smaller;
  return {ok, fmt("lambda_1=%.5g m_bar=%zu gap=%.4g; beta(delta1=0.5)=[%s] beta(delta1=0)=[%s]",
                  spec.eigenvalues.empty() ? NAN : spec.eigenvalues[0], spec.m_bar, spec.gap,
                  join(b05, "%.5f").c_str(), join(b0, "%.5f").c_str())};
}

Outcome ac10()
{
  auto cfg = layered_config();
  const Mesh m = layered_mesh(cfg);
  const Discretization disc(m, 1);
  bool ok = true;
  std::string detail;
  for (double omega : cfg.omegas) {
    std::size_t its[2]{};
    int slot = 0;
    for (double d2 : {1.0, 0.01}) {
      cfg.delta2 = d2;
      const auto run = solve_layered(cfg, disc, omega, cfg.solver);
      ok = ok && run.report.converged;
      its[slot++] = run.report.iterations;
    }
    ok = ok && its[0] <= its[1];
    detail += fmt("omega=%g: iterations delta2=1: %zu, delta2=0.01: %zu; ", omega, its[0], its[1]);
  }
  return {ok, detail};
}

} // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 2D convergence k=1", [] { return convergence(2, 1, {4, 8, 16, 32}, 0.85, 1.3, true); }},
      {"AC2 2D convergence k=2", [] { return convergence(2, 2, {4, 8, 16}, 1.8, 2.5, false); }},
      {"AC3 3D convergence k=1", [] { return convergence(3, 1, {2, 4, 8}, 0.8, 1.4, false); }},
      {"AC4 permeability robustness", ac4},
      {"AC5 Poisson-ratio robustness", ac5},
      {"AC6 Galerkin orthogonality", ac6},
      {"AC7 operator structure", ac7},
      {"AC8 layered experiment", ac8},
      {"AC9 well-posedness diagnostics", ac9},
      {"AC10 pressure stabilization vs GMRES iterations", ac10},
  };
  int failures = 0;
  for (const auto &[name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
