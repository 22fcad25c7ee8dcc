#pragma once

#include "biot/forms.hpp"

#include <array>
#include <string>
#include <vector>

namespace biot {

/// f(x) = sum_k c_k x^k + cos_coef cos(freq x) + sin_coef sin(freq x)
struct Factor1D
{
  std::vector<double> poly{1.0};
  double cos_coef = 0.0;
  double sin_coef = 0.0;
  double freq = 0.0;

  /// Derivative of order 0, 1 or 2.
  double eval(double x, int order = 0) const;

  static Factor1D polynomial_from_roots(std::initializer_list<double> roots);
  static Factor1D trig(double constant, double cos_coef, double sin_coef, double freq);
};

/// scale * fx(x) * fy(y) * fz(z)
struct SeparableTerm
{
  double scale = 1.0;
  std::array<Factor1D, 3> factors{};

  double value(const Vec3 &x) const;
  double derivative(const Vec3 &x, int a) const;
  double second_derivative(const Vec3 &x, int a, int b) const;
};

/// Complex scalar field built from separable real and imaginary parts.
struct ScalarField
{
  std::vector<SeparableTerm> re;
  std::vector<SeparableTerm> im;

  cplx value(const Vec3 &x) const;
  cplx derivative(const Vec3 &x, int a) const;
  cplx second_derivative(const Vec3 &x, int a, int b) const;
};

/// Closed-form (u, p, phi) with first and second derivatives. phi is
/// represented as phi_base - lambda div u.
class ExactSolution
{
public:
  ExactSolution(int dim, std::array<ScalarField, 3> u, ScalarField p, ScalarField phi_base, double lambda);

  int dim() const { return dim_; }
  double lambda() const { return lambda_; }

  CVec3 u(const Vec3 &x) const;
  /// [c][a] = d u_c / d x_a
  std::array<CVec3, 3> grad_u(const Vec3 &x) const;
  cplx div_u(const Vec3 &x) const;
  CVec3 grad_div_u(const Vec3 &x) const;
  CVec3 laplacian_u(const Vec3 &x) const;
  /// div eps(u) = (lap u + grad div u) / 2
  CVec3 div_strain(const Vec3 &x) const;

  cplx p(const Vec3 &x) const;
  CVec3 grad_p(const Vec3 &x) const;
  cplx laplacian_p(const Vec3 &x) const;

  cplx phi(const Vec3 &x) const;
  CVec3 grad_phi(const Vec3 &x) const;
  cplx phi_base(const Vec3 &x) const { return phi_base_.value(x); }

private:
  int dim_;
  std::array<ScalarField, 3> u_;
  ScalarField p_;
  ScalarField phi_base_;
  double lambda_;
};

/// Unit-square field set with phi = p - lambda tr eps(u).
ExactSolution manufactured_2d(const MaterialParams &params);
/// Unit-cube field set; phi uses its own base field, so phi - p + lambda
/// div u does not vanish and is supplied as a source.
ExactSolution manufactured_3d(const MaterialParams &params);

/// Sources that make the exact fields satisfy the harmonic system.
BodyForces manufactured_forces(const ExactSolution &exact, const MaterialParams &params);

/// Traction (2 mu_e eps(u) - phi I) n of the exact solution.
CVec3 manufactured_traction(const ExactSolution &exact, const MaterialParams &params, const Vec3 &x, const Vec3 &n);

/// Dirichlet traces on the pressure tags (p) and displacement tags (u);
/// natural data (traction on pressure tags, flux on displacement tags)
/// from the exact fields.
BoundarySpec manufactured_boundary(const ExactSolution &exact, const MaterialParams &params, const Mesh &mesh,
                                   const std::vector<std::string> &pressure_dirichlet_tags,
                                   const std::vector<std::string> &displacement_dirichlet_tags);

/// Default boundary split: 2D {left, top} / {right, bottom};
/// 3D {x0, x1, y0} / {y1, z0, z1}.
BoundarySpec manufactured_boundary(const ExactSolution &exact, const MaterialParams &params, const Mesh &mesh);

} // namespace biot
