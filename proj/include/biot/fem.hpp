#pragma once

#include "biot/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace biot {

using Bary = std::array<double, 4>;

class FemError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Quadrature on the reference simplex. Points are barycentric; weights sum
/// to the reference measure (1 in 1D, 1/2 in 2D, 1/6 in 3D).
struct QuadratureRule
{
  int dim = 0;
  int degree = 0;
  std::vector<Bary> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Collapsed (Duffy) Gauss-Legendre rule exact for polynomials of total
/// degree <= exactness_degree. dim in {1,2,3}; degree in [0, 6].
QuadratureRule quadrature_rule(int dim, int exactness_degree);

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights);

/// Lagrange P1/P2 element on a simplex, written in barycentric coordinates.
/// Local numbering: vertices first, then edges in edge_vertices() order.
class ReferenceElement
{
public:
  ReferenceElement(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int num_basis() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Bary> &nodes() const { return nodes_; }
  const std::vector<std::array<int, 2>> &edge_vertices() const { return edges_; }

  /// Basis values at a barycentric point.
  void values(const Bary &l, std::span<double> out) const;
  /// Derivatives with respect to each barycentric coordinate.
  void bary_derivatives(const Bary &l, std::span<Bary> out) const;
  /// Second barycentric derivatives; constant for degree <= 2.
  const std::vector<std::array<Bary, 4>> &bary_hessians() const { return hessians_; }

private:
  int dim_;
  int degree_;
  std::vector<Bary> nodes_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<Bary, 4>> hessians_;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Physical basis values, gradients and Hessians at the quadrature points
/// of one cell.
struct CellTabulation
{
  int dim = 0;
  int nb = 0;
  std::size_t nq = 0;
  std::vector<double> values;  // [q * nb + i]
  std::vector<Vec3> grads;     // [q * nb + i]
  std::vector<Mat3> hessians;  // [i], zero for P1
  std::vector<double> jxw;     // [q]
  std::vector<Vec3> points;    // [q]
  bool has_second_derivatives = false;

  double value(std::size_t q, int i) const { return values[q * nb + i]; }
  const Vec3 &grad(std::size_t q, int i) const { return grads[q * nb + i]; }
};

CellTabulation tabulate(const ReferenceElement &ref, const GeomCache &geom, std::size_t cell,
                        const QuadratureRule &rule);

/// Basis values and physical gradients at a single barycentric point.
void evaluate_basis(const ReferenceElement &ref, const CellGeometry &g, const Bary &l,
                    std::span<double> values, std::span<Vec3> grads);

/// Global numbering for the equal-order (u, p, phi) triple. Scalar nodes are
/// vertices, then (for k=2) edges. The monolithic ordering is
/// [u (node-major, component-minor) | p | phi].
struct DofMap
{
  int dim = 2;
  int degree = 1;
  int nloc = 0;
  std::size_t n_scalar = 0;
  std::vector<std::size_t> cell_dofs;
  std::vector<Vec3> node_coords;
  /// Scalar nodes lying on each boundary facet (mesh facet order).
  std::vector<std::vector<std::size_t>> facet_nodes;

  std::span<const std::size_t> cell(std::size_t c) const
  {
    return {cell_dofs.data() + c * static_cast<std::size_t>(nloc), static_cast<std::size_t>(nloc)};
  }
  std::size_t u(std::size_t node, int comp) const { return node * static_cast<std::size_t>(dim) + comp; }
  std::size_t p(std::size_t node) const { return static_cast<std::size_t>(dim) * n_scalar + node; }
  std::size_t phi(std::size_t node) const { return static_cast<std::size_t>(dim + 1) * n_scalar + node; }
  std::size_t u_offset() const { return 0; }
  std::size_t p_offset() const { return static_cast<std::size_t>(dim) * n_scalar; }
  std::size_t phi_offset() const { return static_cast<std::size_t>(dim + 1) * n_scalar; }
  std::size_t size() const { return static_cast<std::size_t>(dim + 2) * n_scalar; }
};

DofMap build_dofmap(const Mesh &mesh, int degree);

/// Real local matrices of one cell. Vector-valued indices are node-major:
/// row i*d + c is basis N_i e_c.
struct ElementMatrices
{
  Eigen::MatrixXd mass;           ///< int N_i N_j
  Eigen::MatrixXd stiffness;      ///< int grad N_i . grad N_j
  Eigen::MatrixXd strain_strain;  ///< int eps(Phi_I) : eps(Phi_J)
  Eigen::MatrixXd div_coupling;   ///< int div(Phi_I) N_j
  std::array<Eigen::MatrixXd, 3> grad_pairs; ///< [a](i,j) = int N_i d_a N_j
};

ElementMatrices element_matrices(const CellTabulation &tab);
ElementMatrices element_matrices(const ReferenceElement &ref, const GeomCache &geom, std::size_t cell,
                                 const QuadratureRule &rule);

/// Default matrix quadrature degree (exact for products of P_k functions).
inline int matrix_quadrature_degree(int k) { return 2 * k; }

} // namespace biot
