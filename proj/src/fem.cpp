#include "biot/fem.hpp"

#include <algorithm>
#include <map>

namespace biot {

ReferenceElement::ReferenceElement(int dim, int degree) : dim_(dim), degree_(degree)
{
  if (dim != 2 && dim != 3)
    throw FemError("ReferenceElement: dimension must be 2 or 3");
  if (degree != 1 && degree != 2)
    throw FemError("ReferenceElement: degree must be 1 or 2");
  for (int a = 0; a <= dim; ++a) {
    Bary node{};
    node[a] = 1.0;
    nodes_.push_back(node);
  }
  if (dim == 2)
    edges_ = {{0, 1}, {1, 2}, {0, 2}};
  else
    edges_ = {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {1, 3}, {2, 3}};
  if (degree == 2)
    for (const auto &e : edges_) {
      Bary node{};
      node[e[0]] = 0.5;
      node[e[1]] = 0.5;
      nodes_.push_back(node);
    }

  hessians_.assign(nodes_.size(), {});
  if (degree == 2) {
    for (int a = 0; a <= dim; ++a)
      hessians_[a][a][a] = 4.0;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto [i, j] = edges_[e];
      hessians_[dim + 1 + e][i][j] = 4.0;
      hessians_[dim + 1 + e][j][i] = 4.0;
    }
  }
}

void ReferenceElement::values(const Bary &l, std::span<double> out) const
{
  if (degree_ == 1) {
    for (int a = 0; a <= dim_; ++a)
      out[a] = l[a];
    return;
  }
  for (int a = 0; a <= dim_; ++a)
    out[a] = l[a] * (2.0 * l[a] - 1.0);
  for (std::size_t e = 0; e < edges_.size(); ++e)
    out[dim_ + 1 + e] = 4.0 * l[edges_[e][0]] * l[edges_[e][1]];
}

void ReferenceElement::bary_derivatives(const Bary &l, std::span<Bary> out) const
{
  for (auto &d : out)
    d = Bary{};
  if (degree_ == 1) {
    for (int a = 0; a <= dim_; ++a)
      out[a][a] = 1.0;
    return;
  }
  for (int a = 0; a <= dim_; ++a)
    out[a][a] = 4.0 * l[a] - 1.0;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [i, j] = edges_[e];
    out[dim_ + 1 + e][i] = 4.0 * l[j];
    out[dim_ + 1 + e][j] = 4.0 * l[i];
  }
}

void evaluate_basis(const ReferenceElement &ref, const CellGeometry &g, const Bary &l,
                    std::span<double> values, std::span<Vec3> grads)
{
  const int nb = ref.num_basis();
  const int d = ref.dim();
  ref.values(l, values);
  std::array<Bary, 10> db{};
  ref.bary_derivatives(l, std::span<Bary>(db.data(), nb));
  for (int i = 0; i < nb; ++i) {
    Vec3 grad{};
    for (int a = 0; a <= d; ++a)
      for (int c = 0; c < d; ++c)
        grad[c] += db[i][a] * g.bary_grad[a][c];
    grads[i] = grad;
  }
}

CellTabulation tabulate(const ReferenceElement &ref, const GeomCache &geom, std::size_t cell,
                        const QuadratureRule &rule)
{
  const auto &g = geom.cell(cell);
  CellTabulation t;
  t.dim = ref.dim();
  t.nb = ref.num_basis();
  t.nq = rule.size();
  t.values.resize(t.nq * t.nb);
  t.grads.resize(t.nq * t.nb);
  t.jxw.resize(t.nq);
  t.points.resize(t.nq);
  const double scale = g.det;
  for (std::size_t q = 0; q < t.nq; ++q) {
    evaluate_basis(ref, g, rule.points[q], std::span<double>(t.values.data() + q * t.nb, t.nb),
                   std::span<Vec3>(t.grads.data() + q * t.nb, t.nb));
    t.jxw[q] = rule.weights[q] * scale;
    t.points[q] = geom.map_to_physical(cell, rule.points[q]);
  }
  t.hessians.assign(t.nb, Mat3{});
  t.has_second_derivatives = ref.degree() >= 2;
  if (t.has_second_derivatives) {
    const int d = ref.dim();
    const auto &hb = ref.bary_hessians();
    for (int i = 0; i < t.nb; ++i)
      for (int a = 0; a <= d; ++a)
        for (int b = 0; b <= d; ++b) {
          const double h = hb[i][a][b];
          if (h == 0.0)
            continue;
          for (int r = 0; r < d; ++r)
            for (int s = 0; s < d; ++s)
              t.hessians[i][r][s] += h * g.bary_grad[a][r] * g.bary_grad[b][s];
        }
  }
  return t;
}

DofMap build_dofmap(const Mesh &mesh, int degree)
{
  if (degree != 1 && degree != 2)
    throw FemError("build_dofmap: degree must be 1 or 2");
  const ReferenceElement ref(mesh.dim, degree);
  DofMap dm;
  dm.dim = mesh.dim;
  dm.degree = degree;
  dm.nloc = ref.num_basis();
  dm.node_coords = mesh.vertices;
  const std::size_t nv = mesh.num_vertices();

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_ids;
  auto edge_key = [](std::size_t a, std::size_t b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  dm.cell_dofs.reserve(mesh.num_cells() * dm.nloc);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto &cell = mesh.cells[c];
    for (int a = 0; a <= mesh.dim; ++a)
      dm.cell_dofs.push_back(cell[a]);
    if (degree == 2)
      for (const auto &e : ref.edge_vertices()) {
        auto key = edge_key(cell[e[0]], cell[e[1]]);
        auto [it, inserted] = edge_ids.try_emplace(key, nv + edge_ids.size());
        if (inserted) {
          const auto &p = mesh.vertices[key.first];
          const auto &q = mesh.vertices[key.second];
          dm.node_coords.push_back({0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])});
        }
        dm.cell_dofs.push_back(it->second);
      }
  }
  dm.n_scalar = nv + edge_ids.size();

  dm.facet_nodes.resize(mesh.num_facets());
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    auto &nodes = dm.facet_nodes[f];
    for (int a = 0; a < mesh.dim; ++a)
      nodes.push_back(mesh.facets[f][a]);
    if (degree == 2)
      for (int a = 0; a < mesh.dim; ++a)
        for (int b = a + 1; b < mesh.dim; ++b)
          nodes.push_back(edge_ids.at(edge_key(mesh.facets[f][a], mesh.facets[f][b])));
  }
  return dm;
}

ElementMatrices element_matrices(const CellTabulation &t)
{
  const int nb = t.nb;
  const int d = t.dim;
  const int nvec = nb * d;
  ElementMatrices m;
  m.mass = Eigen::MatrixXd::Zero(nb, nb);
  m.stiffness = Eigen::MatrixXd::Zero(nb, nb);
  m.strain_strain = Eigen::MatrixXd::Zero(nvec, nvec);
  m.div_coupling = Eigen::MatrixXd::Zero(nvec, nb);
  for (auto &gp : m.grad_pairs)
    gp = Eigen::MatrixXd::Zero(nb, nb);

  for (std::size_t q = 0; q < t.nq; ++q) {
    const double w = t.jxw[q];
    for (int i = 0; i < nb; ++i) {
      const double ni = t.value(q, i);
      const Vec3 &gi = t.grad(q, i);
      for (int j = 0; j < nb; ++j) {
        const double nj = t.value(q, j);
        const Vec3 &gj = t.grad(q, j);
        double dot = 0.0;
        for (int a = 0; a < d; ++a)
          dot += gi[a] * gj[a];
        m.mass(i, j) += w * ni * nj;
        m.stiffness(i, j) += w * dot;
        for (int a = 0; a < d; ++a)
          m.grad_pairs[a](i, j) += w * ni * gj[a];
        // eps(N_i e_c) : eps(N_j e_e) = 1/2 (delta_ce grad_i.grad_j + d_e N_i d_c N_j)
        for (int c = 0; c < d; ++c) {
          m.div_coupling(i * d + c, j) += w * gi[c] * nj;
          for (int e = 0; e < d; ++e)
            m.strain_strain(i * d + c, j * d + e) += w * 0.5 * ((c == e ? dot : 0.0) + gi[e] * gj[c]);
        }
      }
    }
  }
  return m;
}

ElementMatrices element_matrices(const ReferenceElement &ref, const GeomCache &geom, std::size_t cell,
                                 const QuadratureRule &rule)
{
  if (!(geom.cell(cell).det > 0.0))
    throw FemError("element_matrices: degenerate Jacobian");
  return element_matrices(tabulate(ref, geom, cell, rule));
}

} // namespace biot
