#include "biot/forms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace biot {

double MaterialParams::kappa(int region) const
{
  auto it = raw.kappa.find(region);
  if (it == raw.kappa.end())
    throw AssemblyError("no permeability given for cell region " + std::to_string(region));
  return it->second;
}

double theta_from_storage(double storage, double lambda, double alpha)
{
  return storage * lambda / alpha + 1.0;
}

double theta_closed_form(double nu, double alpha, double B)
{
  return 3.0 * nu * alpha * (1.0 - alpha * B) / (alpha * B * (1.0 + nu)) + 1.0;
}

MaterialParams derive_coefficients(const RawMaterial &raw)
{
  auto require = [](bool ok, const char *msg) {
    if (!ok)
      throw ParameterError(msg);
  };
  require(raw.E > 0.0, "E must be positive");
  require(raw.nu > 0.0, "nu must be positive");
  require(raw.nu < 0.5, "nu must be below 0.5 (lambda is singular at 0.5)");
  require(raw.mu_f > 0.0, "mu_f must be positive");
  require(raw.rho > 0.0, "rho must be positive");
  require(raw.omega > 0.0, "omega must be positive");
  require(raw.alpha > 0.0 && raw.alpha <= 1.0, "alpha must lie in (0, 1]");
  require(raw.B > 0.0, "B must be positive (S_eps is singular at B = 0)");
  require(raw.B <= 1.0, "B must not exceed 1");
  require(raw.ell > 0.0, "ell must be positive");
  require(!raw.kappa.empty(), "at least one permeability value is required");
  for (const auto &[region, k] : raw.kappa)
    if (!(k > 0.0))
      throw ParameterError("permeability of region " + std::to_string(region) + " must be positive");

  MaterialParams p;
  p.raw = raw;
  p.mu_e = raw.E / (2.0 * (1.0 + raw.nu));
  p.lambda = raw.E * raw.nu / ((1.0 + raw.nu) * (1.0 - 2.0 * raw.nu));
  p.storage = 3.0 * raw.alpha * (1.0 - raw.alpha * raw.B) * (1.0 - 2.0 * raw.nu) / (raw.B * raw.E);
  p.theta = theta_from_storage(p.storage, p.lambda, raw.alpha);
  const double alt = theta_closed_form(raw.nu, raw.alpha, raw.B);
  if (std::abs(p.theta - alt) > 1e-12 * std::abs(alt))
    throw ParameterError("inconsistent theta: the two algebraic forms disagree");
  return p;
}

void BoundarySpec::validate(const Mesh &mesh) const
{
  const auto tags = mesh.boundary_tags();
  for (int t : tags)
    if (!conditions.count(t)) {
      auto name = mesh.tag_names.count(t) ? mesh.tag_names.at(t) : std::to_string(t);
      throw AssemblyError("boundary tag '" + name + "' has no condition");
    }
  for (const auto &[t, cond] : conditions)
    if (!std::binary_search(tags.begin(), tags.end(), t))
      throw AssemblyError("boundary condition given for unknown tag " + std::to_string(t));
}

Discretization::Discretization(const Mesh &mesh, int degree)
    : mesh_(&mesh), geom_(mesh), ref_(mesh.dim, degree), dofs_(build_dofmap(mesh, degree))
{
}

namespace {

/// R_u(N_i e_c) evaluated at quadrature point q (without the grad xi part).
Vec3 momentum_residual_basis(const CellTabulation &t, std::size_t q, int i, int c, const MaterialParams &p)
{
  Vec3 r{};
  const double w2rho = p.omega() * p.omega() * p.rho();
  r[c] = w2rho * t.value(q, i);
  if (t.has_second_derivatives) {
    const auto &H = t.hessians[i];
    double lap = 0.0;
    for (int a = 0; a < t.dim; ++a)
      lap += H[a][a];
    // 2 mu_e div eps(N_i e_c) = mu_e (e_c lap N_i + grad d_c N_i)
    r[c] += p.mu_e * lap;
    for (int a = 0; a < t.dim; ++a)
      r[a] += p.mu_e * H[a][c];
  }
  return r;
}

double dot3(const Vec3 &a, const Vec3 &b, int d)
{
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    s += a[i] * b[i];
  return s;
}

} // namespace

CsrMatrix assemble_operator(const Discretization &disc, const MaterialParams &params, const Stabilization &stab)
{
  const auto &mesh = disc.mesh();
  const auto &dofs = disc.dofs();
  const int d = disc.dim();
  const int nb = disc.element().num_basis();
  const int nvec = nb * d;
  const auto rule = quadrature_rule(d, matrix_quadrature_degree(disc.degree()));

  const double w2rho = params.omega() * params.omega() * params.rho();
  const double inv_lambda = 1.0 / params.lambda;
  const cplx i_unit(0.0, 1.0);
  const double bp_scale = 1.0 / (params.mu_f() * params.alpha() * params.omega());

  std::vector<Triplet> trips;
  trips.reserve(mesh.num_cells() * static_cast<std::size_t>((nvec + 2 * nb) * (nvec + 2 * nb)));

  Eigen::MatrixXd stab_gram;

  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto tab = tabulate(disc.element(), disc.geometry(), c, rule);
    const auto em = element_matrices(tab);
    const auto cell = dofs.cell(c);
    const double h = disc.geometry().cell(c).diameter;
    const double kdiff = params.pressure_diffusion(mesh.cell_regions[c]);

    if (stab.delta1 != 0.0)
      stab_gram = stab.delta1 * h * h * residual_gram(tab, params);
    else
      stab_gram = Eigen::MatrixXd::Zero(nvec + nb, nvec + nb);

    // (u, u) and (phi -> u)
    for (int I = 0; I < nvec; ++I) {
      const auto row = dofs.u(cell[I / d], I % d);
      for (int J = 0; J < nvec; ++J) {
        const bool same_comp = (I % d) == (J % d);
        const double v = (same_comp ? -w2rho * em.mass(I / d, J / d) : 0.0) +
                         2.0 * params.mu_e * em.strain_strain(I, J) + stab_gram(I, J);
        trips.push_back({row, dofs.u(cell[J / d], J % d), v});
      }
      for (int j = 0; j < nb; ++j)
        trips.push_back({row, dofs.phi(cell[j]), -em.div_coupling(I, j) + stab_gram(I, nvec + j)});
    }
    for (int i = 0; i < nb; ++i) {
      const auto prow = dofs.p(cell[i]);
      const auto frow = dofs.phi(cell[i]);
      for (int j = 0; j < nb; ++j) {
        const double stiff = em.stiffness(i, j);
        const double mass = em.mass(i, j);
        // (p, p) and (phi -> p)
        trips.push_back({prow, dofs.p(cell[j]),
                         i_unit * (params.theta * inv_lambda * mass) +
                             (kdiff + stab.delta2 * h * h * bp_scale) * stiff});
        trips.push_back({prow, dofs.phi(cell[j]), -i_unit * (inv_lambda * mass)});
        // (p -> phi) and (phi, phi)
        trips.push_back({frow, dofs.p(cell[j]), -inv_lambda * mass});
        trips.push_back({frow, dofs.phi(cell[j]), inv_lambda * mass + stab_gram(nvec + i, nvec + j)});
      }
      // (u -> phi)
      for (int J = 0; J < nvec; ++J)
        trips.push_back({frow, dofs.u(cell[J / d], J % d), em.div_coupling(J, i) + stab_gram(nvec + i, J)});
    }
  }
  return csr_from_triplets(dofs.size(), dofs.size(), trips);
}

CVector assemble_load(const Discretization &disc, const MaterialParams &params, const Stabilization &stab,
                      const BoundarySpec &boundary, const BodyForces &forces)
{
  const auto &mesh = disc.mesh();
  const auto &dofs = disc.dofs();
  const auto &geom = disc.geometry();
  const auto &ref = disc.element();
  const int d = disc.dim();
  const int nb = ref.num_basis();
  const int load_degree = std::min(6, 2 * disc.degree() + 2);
  boundary.validate(mesh);

  CVector F(dofs.size(), cplx{});
  const double flow_scale = 1.0 / (params.omega() * params.alpha());

  if (forces.momentum || forces.flow || forces.total_pressure) {
    const auto rule = quadrature_rule(d, load_degree);
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const auto tab = tabulate(ref, geom, c, rule);
      const auto cell = dofs.cell(c);
      const double h = geom.cell(c).diameter;
      const double kappa = params.kappa(mesh.cell_regions[c]);
      for (std::size_t q = 0; q < tab.nq; ++q) {
        const double w = tab.jxw[q];
        const auto &x = tab.points[q];
        if (forces.momentum) {
          const CVec3 f = forces.momentum(x);
          for (int i = 0; i < nb; ++i) {
            const double ni = tab.value(q, i);
            for (int cc = 0; cc < d; ++cc) {
              cplx s = f[cc] * ni;
              if (stab.delta1 != 0.0) {
                const Vec3 r = momentum_residual_basis(tab, q, i, cc, params);
                cplx fr{};
                for (int a = 0; a < d; ++a)
                  fr += f[a] * r[a];
                s -= stab.delta1 * h * h * fr;
              }
              F[dofs.u(cell[i], cc)] += w * s;
            }
            if (stab.delta1 != 0.0) {
              const auto &g = tab.grad(q, i);
              cplx fg{};
              for (int a = 0; a < d; ++a)
                fg += f[a] * g[a];
              // consistency with R(v, xi) containing -grad xi
              F[dofs.phi(cell[i])] += w * stab.delta1 * h * h * fg;
            }
          }
        }
        if (forces.flow) {
          const cplx fp = forces.flow(x, kappa) * flow_scale;
          for (int i = 0; i < nb; ++i)
            F[dofs.p(cell[i])] += w * fp * tab.value(q, i);
        }
        if (forces.total_pressure) {
          const cplx fphi = forces.total_pressure(x) / params.lambda;
          for (int i = 0; i < nb; ++i)
            F[dofs.phi(cell[i])] += w * fphi * tab.value(q, i);
        }
      }
    }
  }

  const auto facet_rule = quadrature_rule(d - 1, load_degree);
  const double ref_measure = d == 2 ? 1.0 : 0.5;
  std::vector<double> vals(static_cast<std::size_t>(nb));
  std::vector<Vec3> grads(static_cast<std::size_t>(nb));
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    const auto &cond = boundary.conditions.at(mesh.facet_tags[f]);
    const bool traction = cond.displacement == DisplacementCondition::traction && cond.displacement_data;
    const bool flux = cond.pressure == PressureCondition::flux && cond.pressure_data;
    if (!traction && !flux)
      continue;
    const auto &fg = geom.facet(f);
    const auto cell = dofs.cell(fg.cell);
    const auto &cg = geom.cell(fg.cell);
    for (std::size_t q = 0; q < facet_rule.size(); ++q) {
      Vec3 x{};
      for (int a = 0; a < d; ++a)
        for (int i = 0; i < 3; ++i)
          x[i] += facet_rule.points[q][a] * mesh.vertices[mesh.facets[f][a]][i];
      const double w = facet_rule.weights[q] * fg.measure / ref_measure;
      evaluate_basis(ref, cg, geom.barycentric(fg.cell, x), vals, grads);
      if (traction) {
        const CVec3 g = cond.displacement_data(x, fg.normal);
        for (int i = 0; i < nb; ++i)
          for (int cc = 0; cc < d; ++cc)
            F[dofs.u(cell[i], cc)] += w * g[cc] * vals[i];
      }
      if (flux) {
        const cplx g = cond.pressure_data(x, fg.normal) * flow_scale;
        for (int i = 0; i < nb; ++i)
          F[dofs.p(cell[i])] += w * g * vals[i];
      }
    }
  }
  return F;
}

std::map<std::size_t, cplx> collect_dirichlet(const Discretization &disc, const BoundarySpec &boundary)
{
  const auto &mesh = disc.mesh();
  const auto &dofs = disc.dofs();
  const auto &geom = disc.geometry();
  const int d = disc.dim();
  boundary.validate(mesh);
  std::map<std::size_t, cplx> constraints;
  auto set = [&](std::size_t dof, cplx value) {
    auto [it, inserted] = constraints.emplace(dof, value);
    if (!inserted && std::abs(it->second - value) > 1e-12 * std::max(1.0, std::abs(value)))
      throw AssemblyError("conflicting Dirichlet values on dof " + std::to_string(dof));
  };
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    const auto &cond = boundary.conditions.at(mesh.facet_tags[f]);
    const auto &n = geom.facet(f).normal;
    for (auto node : dofs.facet_nodes[f]) {
      const auto &x = dofs.node_coords[node];
      if (cond.displacement == DisplacementCondition::dirichlet) {
        const CVec3 v = cond.displacement_data ? cond.displacement_data(x, n) : CVec3{};
        for (int c = 0; c < d; ++c)
          set(dofs.u(node, c), v[c]);
      }
      if (cond.pressure == PressureCondition::dirichlet)
        set(dofs.p(node), cond.pressure_data ? cond.pressure_data(x, n) : cplx{});
    }
  }
  return constraints;
}

BiotSystem apply_dirichlet(const CsrMatrix &matrix, const CVector &load, const DofMap &dofs,
                           const std::map<std::size_t, cplx> &constraints)
{
  const std::size_t n = matrix.rows();
  std::vector<char> fixed(n, 0);
  CVector value(n, cplx{});
  for (const auto &[dof, v] : constraints) {
    if (dof >= n)
      throw AssemblyError("constraint on dof out of range");
    fixed[dof] = 1;
    value[dof] = v;
  }
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<cplx> vals;
  cols.reserve(matrix.nnz());
  vals.reserve(matrix.nnz());
  CVector F = load;
  const auto &rp = matrix.row_ptr();
  const auto &ci = matrix.col_idx();
  const auto &mv = matrix.values();
  for (std::size_t i = 0; i < n; ++i) {
    if (fixed[i]) {
      cols.push_back(i);
      vals.push_back(1.0);
      F[i] = value[i];
    } else {
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
        if (fixed[ci[k]])
          F[i] -= mv[k] * value[ci[k]];
        else {
          cols.push_back(ci[k]);
          vals.push_back(mv[k]);
        }
      }
    }
    row_ptr[i + 1] = cols.size();
  }
  BiotSystem sys;
  sys.matrix = CsrMatrix(n, matrix.cols(), std::move(row_ptr), std::move(cols), std::move(vals));
  sys.load = std::move(F);
  sys.dofs = dofs;
  sys.constraints = constraints;
  return sys;
}

BiotSystem assemble_system(const Discretization &disc, const MaterialParams &params, const Stabilization &stab,
                           const BoundarySpec &boundary, const BodyForces &forces)
{
  const auto A = assemble_operator(disc, params, stab);
  const auto F = assemble_load(disc, params, stab, boundary, forces);
  return apply_dirichlet(A, F, disc.dofs(), collect_dirichlet(disc, boundary));
}

std::vector<CVec3> residual_R(const CellTabulation &tab, std::span<const cplx> v_local, std::span<const cplx> xi_local,
                              const MaterialParams &params)
{
  const int d = tab.dim;
  std::vector<CVec3> out(tab.nq, CVec3{});
  for (std::size_t q = 0; q < tab.nq; ++q) {
    auto &r = out[q];
    for (int i = 0; i < tab.nb; ++i) {
      for (int c = 0; c < d; ++c) {
        const cplx coef = v_local[static_cast<std::size_t>(i * d + c)];
        if (coef == cplx{})
          continue;
        const Vec3 basis = momentum_residual_basis(tab, q, i, c, params);
        for (int a = 0; a < d; ++a)
          r[a] += coef * basis[a];
      }
      const cplx xi = xi_local[static_cast<std::size_t>(i)];
      const auto &g = tab.grad(q, i);
      for (int a = 0; a < d; ++a)
        r[a] -= xi * g[a];
    }
  }
  return out;
}

Eigen::MatrixXd residual_gram(const CellTabulation &tab, const MaterialParams &params)
{
  const int d = tab.dim;
  const int nb = tab.nb;
  const int nvec = nb * d;
  const int nr = nvec + nb;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nr, nr);
  // u functions (R_u) followed by phi functions (-grad N_j)
  std::vector<Vec3> rvals(static_cast<std::size_t>(nr));
  for (std::size_t q = 0; q < tab.nq; ++q) {
    for (int i = 0; i < nb; ++i) {
      for (int cc = 0; cc < d; ++cc)
        rvals[i * d + cc] = momentum_residual_basis(tab, q, i, cc, params);
      const auto &g = tab.grad(q, i);
      rvals[nvec + i] = {-g[0], -g[1], -g[2]};
    }
    for (int a = 0; a < nr; ++a)
      for (int b = a; b < nr; ++b) {
        const double v = tab.jxw[q] * dot3(rvals[a], rvals[b], d);
        gram(a, b) += v;
        if (b != a)
          gram(b, a) += v;
      }
  }
  return gram;
}

Eigen::MatrixXcd extract_block(const CsrMatrix &a, const DofMap &dofs, Field row, Field col)
{
  auto range = [&](Field f) -> std::pair<std::size_t, std::size_t> {
    switch (f) {
    case Field::u: return {dofs.u_offset(), dofs.p_offset()};
    case Field::p: return {dofs.p_offset(), dofs.phi_offset()};
    case Field::phi: return {dofs.phi_offset(), dofs.size()};
    }
    return {0, 0};
  };
  const auto [r0, r1] = range(row);
  const auto [c0, c1] = range(col);
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(r1 - r0), static_cast<Eigen::Index>(c1 - c0));
  for (std::size_t i = r0; i < r1; ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const auto j = a.col_idx()[k];
      if (j >= c0 && j < c1)
        block(static_cast<Eigen::Index>(i - r0), static_cast<Eigen::Index>(j - c0)) = a.values()[k];
    }
  return block;
}

} // namespace biot
