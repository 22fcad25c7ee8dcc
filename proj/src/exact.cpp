#include "biot/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace biot {

double Factor1D::eval(double x, int order) const
{
  // Horner over c_k k!/(k-order)! x^(k-order)
  double p = 0.0;
  for (std::size_t k = poly.size(); k-- > static_cast<std::size_t>(order);) {
    double c = poly[k];
    for (int m = 0; m < order; ++m)
      c *= static_cast<double>(k - static_cast<std::size_t>(m));
    p = p * x + c;
  }
  const double fx = freq * x;
  double t = 0.0;
  switch (order) {
  case 0: t = cos_coef * std::cos(fx) + sin_coef * std::sin(fx); break;
  case 1: t = freq * (-cos_coef * std::sin(fx) + sin_coef * std::cos(fx)); break;
  default: t = -freq * freq * (cos_coef * std::cos(fx) + sin_coef * std::sin(fx)); break;
  }
  return p + t;
}

Factor1D Factor1D::polynomial_from_roots(std::initializer_list<double> roots)
{
  Factor1D f;
  f.poly = {1.0};
  for (double r : roots) {
    std::vector<double> next(f.poly.size() + 1, 0.0);
    for (std::size_t k = 0; k < f.poly.size(); ++k) {
      next[k + 1] += f.poly[k];
      next[k] -= r * f.poly[k];
    }
    f.poly = std::move(next);
  }
  return f;
}

Factor1D Factor1D::trig(double constant, double cos_coef, double sin_coef, double freq)
{
  Factor1D f;
  f.poly = {constant};
  f.cos_coef = cos_coef;
  f.sin_coef = sin_coef;
  f.freq = freq;
  return f;
}

double SeparableTerm::value(const Vec3 &x) const
{
  return scale * factors[0].eval(x[0]) * factors[1].eval(x[1]) * factors[2].eval(x[2]);
}

double SeparableTerm::derivative(const Vec3 &x, int a) const
{
  double v = scale;
  for (int i = 0; i < 3; ++i)
    v *= factors[i].eval(x[i], i == a ? 1 : 0);
  return v;
}

double SeparableTerm::second_derivative(const Vec3 &x, int a, int b) const
{
  double v = scale;
  for (int i = 0; i < 3; ++i)
    v *= factors[i].eval(x[i], (i == a) + (i == b));
  return v;
}

cplx ScalarField::value(const Vec3 &x) const
{
  double r = 0.0, i = 0.0;
  for (const auto &t : re)
    r += t.value(x);
  for (const auto &t : im)
    i += t.value(x);
  return {r, i};
}

cplx ScalarField::derivative(const Vec3 &x, int a) const
{
  double r = 0.0, i = 0.0;
  for (const auto &t : re)
    r += t.derivative(x, a);
  for (const auto &t : im)
    i += t.derivative(x, a);
  return {r, i};
}

cplx ScalarField::second_derivative(const Vec3 &x, int a, int b) const
{
  double r = 0.0, i = 0.0;
  for (const auto &t : re)
    r += t.second_derivative(x, a, b);
  for (const auto &t : im)
    i += t.second_derivative(x, a, b);
  return {r, i};
}

ExactSolution::ExactSolution(int dim, std::array<ScalarField, 3> u, ScalarField p, ScalarField phi_base, double lambda)
    : dim_(dim), u_(std::move(u)), p_(std::move(p)), phi_base_(std::move(phi_base)), lambda_(lambda)
{
}

CVec3 ExactSolution::u(const Vec3 &x) const
{
  CVec3 v{};
  for (int c = 0; c < dim_; ++c)
    v[c] = u_[c].value(x);
  return v;
}

std::array<CVec3, 3> ExactSolution::grad_u(const Vec3 &x) const
{
  std::array<CVec3, 3> g{};
  for (int c = 0; c < dim_; ++c)
    for (int a = 0; a < dim_; ++a)
      g[c][a] = u_[c].derivative(x, a);
  return g;
}

cplx ExactSolution::div_u(const Vec3 &x) const
{
  cplx s{};
  for (int a = 0; a < dim_; ++a)
    s += u_[a].derivative(x, a);
  return s;
}

CVec3 ExactSolution::grad_div_u(const Vec3 &x) const
{
  CVec3 g{};
  for (int b = 0; b < dim_; ++b)
    for (int a = 0; a < dim_; ++a)
      g[b] += u_[a].second_derivative(x, a, b);
  return g;
}

CVec3 ExactSolution::laplacian_u(const Vec3 &x) const
{
  CVec3 l{};
  for (int c = 0; c < dim_; ++c)
    for (int a = 0; a < dim_; ++a)
      l[c] += u_[c].second_derivative(x, a, a);
  return l;
}

CVec3 ExactSolution::div_strain(const Vec3 &x) const
{
  const auto l = laplacian_u(x);
  const auto g = grad_div_u(x);
  CVec3 r{};
  for (int c = 0; c < dim_; ++c)
    r[c] = 0.5 * (l[c] + g[c]);
  return r;
}

cplx ExactSolution::p(const Vec3 &x) const { return p_.value(x); }

CVec3 ExactSolution::grad_p(const Vec3 &x) const
{
  CVec3 g{};
  for (int a = 0; a < dim_; ++a)
    g[a] = p_.derivative(x, a);
  return g;
}

cplx ExactSolution::laplacian_p(const Vec3 &x) const
{
  cplx s{};
  for (int a = 0; a < dim_; ++a)
    s += p_.second_derivative(x, a, a);
  return s;
}

cplx ExactSolution::phi(const Vec3 &x) const { return phi_base_.value(x) - lambda_ * div_u(x); }

CVec3 ExactSolution::grad_phi(const Vec3 &x) const
{
  const auto gd = grad_div_u(x);
  CVec3 g{};
  for (int a = 0; a < dim_; ++a)
    g[a] = phi_base_.derivative(x, a) - lambda_ * gd[a];
  return g;
}

namespace {

using F = Factor1D;
constexpr double pi = std::numbers::pi;

SeparableTerm term(F fx, F fy, F fz = F{}, double scale = 1.0)
{
  return SeparableTerm{scale, {std::move(fx), std::move(fy), std::move(fz)}};
}

ScalarField pressure_field()
{
  ScalarField p;
  // sin(pi x / 2) cos(pi y / 2)
  p.re = {term(F::trig(0.0, 0.0, 1.0, pi / 2), F::trig(0.0, 1.0, 0.0, pi / 2))};
  // (1 - cos(pi x)) (1 + cos(pi y))
  p.im = {term(F::trig(1.0, -1.0, 0.0, pi), F::trig(1.0, 1.0, 0.0, pi))};
  return p;
}

} // namespace

ExactSolution manufactured_2d(const MaterialParams &params)
{
  std::array<ScalarField, 3> u;
  u[0].re = {term(F::polynomial_from_roots({1, 1}), F::polynomial_from_roots({0, 0}))};
  u[0].im = {term(F::polynomial_from_roots({1, -2, -2}), F::polynomial_from_roots({0, -1}))};
  u[1].re = {term(F::polynomial_from_roots({0, 1}), F::polynomial_from_roots({0}))};
  u[1].im = {term(F::polynomial_from_roots({0, 0, 1}), F::polynomial_from_roots({0}), F{}, 2.0)};
  auto p = pressure_field();
  return ExactSolution(2, std::move(u), p, p, params.lambda);
}

ExactSolution manufactured_3d(const MaterialParams &params)
{
  std::array<ScalarField, 3> u;
  u[0].re = {term(F::polynomial_from_roots({1, 1, 0}), F::polynomial_from_roots({0, 0}), F::polynomial_from_roots({-2}))};
  u[0].im = {term(F::polynomial_from_roots({1, 0, 0}), F::polynomial_from_roots({0, 0}), F::polynomial_from_roots({-1}))};
  u[1].re = {term(F::polynomial_from_roots({0, 0, 0, 1, 1, 1}), F::polynomial_from_roots({0}),
                  F::polynomial_from_roots({-1, -1}))};
  u[1].im = {term(F::polynomial_from_roots({1, 1, 0, 0, 0}), F::polynomial_from_roots({0, 0, 0}),
                  F::polynomial_from_roots({2}))};
  u[2].re = {term(F::polynomial_from_roots({1, 0}), F::polynomial_from_roots({0}), F::polynomial_from_roots({-2, -2}))};
  u[2].im = {term(F::polynomial_from_roots({0, 0, 1}), F::polynomial_from_roots({0}), F::polynomial_from_roots({2, 2}))};

  ScalarField phi_base;
  // cos(pi y / 2) sin(pi z)
  phi_base.re = {term(F{}, F::trig(0.0, 1.0, 0.0, pi / 2), F::trig(0.0, 0.0, 1.0, pi))};
  // sin(pi z / 2)(1 + cos(pi z)) = (sin(pi z / 2) + sin(3 pi z / 2)) / 2
  phi_base.im = {term(F{}, F::trig(1.0, 1.0, 0.0, pi), F::trig(0.0, 0.0, 1.0, pi / 2), 0.5),
                 term(F{}, F::trig(1.0, 1.0, 0.0, pi), F::trig(0.0, 0.0, 1.0, 1.5 * pi), 0.5)};
  return ExactSolution(3, std::move(u), pressure_field(), std::move(phi_base), params.lambda);
}

BodyForces manufactured_forces(const ExactSolution &exact, const MaterialParams &params)
{
  BodyForces f;
  const int d = exact.dim();
  f.momentum = [exact, params, d](const Vec3 &x) {
    const auto u = exact.u(x);
    const auto ds = exact.div_strain(x);
    const auto gphi = exact.grad_phi(x);
    const double w2rho = params.omega() * params.omega() * params.rho();
    CVec3 r{};
    for (int c = 0; c < d; ++c)
      r[c] = -w2rho * u[c] - 2.0 * params.mu_e * ds[c] + gphi[c];
    return r;
  };
  f.flow = [exact, params](const Vec3 &x, double kappa) {
    const cplx i(0.0, 1.0);
    const double w = params.omega();
    const double a = params.alpha();
    return i * (params.storage + a / params.lambda) * w * exact.p(x) - i * w * (a / params.lambda) * exact.phi(x) -
           (kappa / params.mu_f()) * exact.laplacian_p(x);
  };
  f.total_pressure = [exact](const Vec3 &x) { return exact.phi_base(x) - exact.p(x); };
  return f;
}

CVec3 manufactured_traction(const ExactSolution &exact, const MaterialParams &params, const Vec3 &x, const Vec3 &n)
{
  const int d = exact.dim();
  const auto g = exact.grad_u(x);
  const cplx phi = exact.phi(x);
  CVec3 t{};
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b)
      t[a] += params.mu_e * (g[a][b] + g[b][a]) * n[b];
    t[a] -= phi * n[a];
  }
  return t;
}

BoundarySpec manufactured_boundary(const ExactSolution &exact, const MaterialParams &params, const Mesh &mesh,
                                   const std::vector<std::string> &pressure_dirichlet_tags,
                                   const std::vector<std::string> &displacement_dirichlet_tags)
{
  if (params.raw.kappa.size() != 1)
    throw ParameterError("manufactured boundary data need a single permeability region");
  const double kappa = params.raw.kappa.begin()->second;
  std::vector<int> ptags, utags;
  for (const auto &t : pressure_dirichlet_tags)
    ptags.push_back(mesh.tag_id(t));
  for (const auto &t : displacement_dirichlet_tags)
    utags.push_back(mesh.tag_id(t));

  BoundarySpec spec;
  for (int tag : mesh.boundary_tags()) {
    BoundaryCondition bc;
    if (std::find(utags.begin(), utags.end(), tag) != utags.end()) {
      bc.displacement = DisplacementCondition::dirichlet;
      bc.displacement_data = [exact](const Vec3 &x, const Vec3 &) { return exact.u(x); };
    } else {
      bc.displacement = DisplacementCondition::traction;
      bc.displacement_data = [exact, params](const Vec3 &x, const Vec3 &n) {
        return manufactured_traction(exact, params, x, n);
      };
    }
    if (std::find(ptags.begin(), ptags.end(), tag) != ptags.end()) {
      bc.pressure = PressureCondition::dirichlet;
      bc.pressure_data = [exact](const Vec3 &x, const Vec3 &) { return exact.p(x); };
    } else {
      bc.pressure = PressureCondition::flux;
      bc.pressure_data = [exact, kappa, mu_f = params.mu_f()](const Vec3 &x, const Vec3 &n) {
        const auto g = exact.grad_p(x);
        cplx s{};
        for (int a = 0; a < exact.dim(); ++a)
          s += g[a] * n[a];
        return (kappa / mu_f) * s;
      };
    }
    spec.conditions[tag] = std::move(bc);
  }
  return spec;
}

BoundarySpec manufactured_boundary(const ExactSolution &exact, const MaterialParams &params, const Mesh &mesh)
{
  if (mesh.dim == 2)
    return manufactured_boundary(exact, params, mesh, {"left", "top"}, {"right", "bottom"});
  return manufactured_boundary(exact, params, mesh, {"x0", "x1", "y0"}, {"y1", "z0", "z1"});
}

} // namespace biot
