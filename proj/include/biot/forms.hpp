#pragma once

#include "biot/fem.hpp"
#include "biot/mesh.hpp"
#include "biot/sparse.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>

namespace biot {

using CVec3 = std::array<cplx, 3>;

class ParameterError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class AssemblyError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Physical inputs in CGS units.
struct RawMaterial
{
  double E = 100.0;     ///< Young modulus [dyn/cm^2]
  double nu = 0.4;      ///< Poisson ratio
  double mu_f = 1.0;    ///< fluid viscosity [Poise]
  double omega = 1.0;   ///< angular frequency [rad/s]
  double rho = 1.0;     ///< density [g/cm^3]
  double alpha = 1.0;   ///< Biot-Willis coefficient
  double B = 1.0;       ///< Skempton coefficient
  double ell = 1.0;     ///< length scale of the H1 norm [cm]
  std::map<int, double> kappa{{0, 0.1}}; ///< permeability per cell region [cm^2]
};

struct MaterialParams
{
  RawMaterial raw;
  double mu_e = 0.0;
  double lambda = 0.0;
  double storage = 0.0; ///< S_eps
  double theta = 0.0;

  double kappa(int region) const;
  double E() const { return raw.E; }
  double nu() const { return raw.nu; }
  double mu_f() const { return raw.mu_f; }
  double omega() const { return raw.omega; }
  double rho() const { return raw.rho; }
  double alpha() const { return raw.alpha; }
  double ell() const { return raw.ell; }
  /// kappa / (mu_f omega alpha), the pressure diffusion coefficient of the
  /// scaled flow equation.
  double pressure_diffusion(int region) const { return kappa(region) / (raw.mu_f * raw.omega * raw.alpha); }
};

/// theta = S_eps lambda / alpha + 1.
double theta_from_storage(double storage, double lambda, double alpha);
/// theta = 3 nu alpha (1 - alpha B) / (alpha B (1+nu)) + 1.
double theta_closed_form(double nu, double alpha, double B);

/// Validates the raw inputs and evaluates mu_e, lambda, S_eps and theta.
/// Throws ParameterError on inadmissible input or when the two forms of
/// theta disagree.
MaterialParams derive_coefficients(const RawMaterial &raw);

struct Stabilization
{
  double delta1 = 0.5;
  double delta2 = 0.0;
};

enum class DisplacementCondition
{
  dirichlet,
  traction
};

enum class PressureCondition
{
  dirichlet,
  flux
};

/// Boundary data receive the point and the outward unit normal.
using BoundaryVector = std::function<CVec3(const Vec3 &x, const Vec3 &n)>;
using BoundaryScalar = std::function<cplx(const Vec3 &x, const Vec3 &n)>;

struct BoundaryCondition
{
  DisplacementCondition displacement = DisplacementCondition::traction;
  BoundaryVector displacement_data; ///< prescribed u or traction g^u; empty means zero
  PressureCondition pressure = PressureCondition::flux;
  BoundaryScalar pressure_data;     ///< prescribed p or flux g^p; empty means zero
};

struct BoundarySpec
{
  std::map<int, BoundaryCondition> conditions;

  /// Every mesh boundary tag must be covered and no unknown tag may appear.
  void validate(const Mesh &mesh) const;
};

/// Volume sources added to the right-hand side (manufactured solutions).
struct BodyForces
{
  std::function<CVec3(const Vec3 &)> momentum;                 ///< f_u
  std::function<cplx(const Vec3 &, double kappa)> flow;        ///< f_p (unscaled)
  std::function<cplx(const Vec3 &)> total_pressure;            ///< f_phi: phi - p + lambda div u
};

enum class Field
{
  u,
  p,
  phi
};

struct BiotSystem
{
  CsrMatrix matrix;
  CVector load;
  DofMap dofs;
  std::map<std::size_t, cplx> constraints;
};

/// Shared assembly context for one mesh and polynomial degree.
class Discretization
{
public:
  Discretization(const Mesh &mesh, int degree);

  const Mesh &mesh() const { return *mesh_; }
  const GeomCache &geometry() const { return geom_; }
  const DofMap &dofs() const { return dofs_; }
  const ReferenceElement &element() const { return ref_; }
  int degree() const { return ref_.degree(); }
  int dim() const { return mesh_->dim; }

private:
  const Mesh *mesh_;
  GeomCache geom_;
  ReferenceElement ref_;
  DofMap dofs_;
};

/// Stabilized block operator A_h = B + S_h + C (rows are test functions).
CsrMatrix assemble_operator(const Discretization &disc, const MaterialParams &params, const Stabilization &stab);

/// Right-hand side: traction and flux facet terms, optional body forces and
/// the matching consistency term of the residual stabilization.
CVector assemble_load(const Discretization &disc, const MaterialParams &params, const Stabilization &stab,
                      const BoundarySpec &boundary, const BodyForces &forces = {});

/// Nodal Dirichlet values on u (dirichlet_u tags) and p (dirichlet_p tags).
/// Throws AssemblyError when two tags prescribe different values on a dof.
std::map<std::size_t, cplx> collect_dirichlet(const Discretization &disc, const BoundarySpec &boundary);

/// Row replacement with column elimination: constrained rows become
/// identity rows carrying the prescribed value.
BiotSystem apply_dirichlet(const CsrMatrix &matrix, const CVector &load, const DofMap &dofs,
                           const std::map<std::size_t, cplx> &constraints);

/// Full pipeline: operator, load, Dirichlet elimination.
BiotSystem assemble_system(const Discretization &disc, const MaterialParams &params, const Stabilization &stab,
                           const BoundarySpec &boundary, const BodyForces &forces = {});

/// Momentum residual R(v, xi) = omega^2 rho v + 2 mu_e div eps(v) - grad xi at
/// the tabulation points. v_local is node-major (i*d + c).
std::vector<CVec3> residual_R(const CellTabulation &tab, std::span<const cplx> v_local,
                              std::span<const cplx> xi_local, const MaterialParams &params);

/// Unscaled local Gram matrix (R(a), R(b)) over the residual functions of
/// one cell: u basis functions (node-major) followed by phi basis functions.
Eigen::MatrixXd residual_gram(const CellTabulation &tab, const MaterialParams &params);

/// Dense sub-block (row field, column field) of a monolithic matrix.
Eigen::MatrixXcd extract_block(const CsrMatrix &a, const DofMap &dofs, Field row, Field col);

} // namespace biot
