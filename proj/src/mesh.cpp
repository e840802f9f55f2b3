#include "smpm/mesh.hpp"

#include <stdexcept>

namespace smpm {

Mesh build_mesh(int n, int m_x, int m_z, double l_x, double l_z) {
  if (n < 2 || m_x < 1 || m_z < 1 || l_x <= 0.0 || l_z <= 0.0)
    throw std::invalid_argument("build_mesh: counts must be positive and extents > 0");

  Mesh mesh;
  mesh.basis = gll_basis(n);
  mesh.n = n;
  mesh.m_x = m_x;
  mesh.m_z = m_z;
  mesh.l_x = l_x;
  mesh.l_z = l_z;
  mesh.h_x = l_x / m_x;
  mesh.h_z = l_z / m_z;
  mesh.eta = mesh.h_x / mesh.h_z;
  mesh.r = static_cast<Index>(n) * n * m_x * m_z;

  mesh.coords.resize(mesh.r, 2);
  mesh.neighbors.resize(m_x * m_z, 4);
  for (int ex = 0; ex < m_x; ++ex) {
    for (int ez = 0; ez < m_z; ++ez) {
      const int e = mesh.element_index(ex, ez);
      mesh.neighbors(e, Mesh::west) = ex > 0 ? mesh.element_index(ex - 1, ez) : -1;
      mesh.neighbors(e, Mesh::east) = ex < m_x - 1 ? mesh.element_index(ex + 1, ez) : -1;
      mesh.neighbors(e, Mesh::south) = ez > 0 ? mesh.element_index(ex, ez - 1) : -1;
      mesh.neighbors(e, Mesh::north) = ez < m_z - 1 ? mesh.element_index(ex, ez + 1) : -1;
      for (int ix = 0; ix < n; ++ix) {
        const double x =
            -0.5 * l_x + ex * mesh.h_x + 0.5 * (mesh.basis.nodes(ix) + 1.0) * mesh.h_x;
        for (int iz = 0; iz < n; ++iz) {
          const double z =
              -0.5 * l_z + ez * mesh.h_z + 0.5 * (mesh.basis.nodes(iz) + 1.0) * mesh.h_z;
          const Index g = mesh.node_index(e, ix, iz);
          mesh.coords(g, 0) = x;
          mesh.coords(g, 1) = z;
        }
      }
    }
  }
  return mesh;
}

Decomposition build_decomposition(const Mesh& mesh) {
  Decomposition dec;
  dec.n = mesh.n;
  dec.m_x = mesh.m_x;
  dec.m_z = mesh.m_z;
  dec.r = mesh.r;
  dec.d = mesh.m_x - 1;
  dec.k = 2 * dec.side_size() * dec.d;
  dec.gamma_to_node.resize(dec.k);
  dec.interface_x.resize(dec.d);

  const int n = mesh.n;
  for (int i = 0; i < dec.d; ++i) {
    Index p = dec.iface_begin(i);
    double x_sum = 0.0;
    // left side: east edge of strip i, bottom to top
    for (int ez = 0; ez < mesh.m_z; ++ez)
      for (int iz = 0; iz < n; ++iz) {
        const Index g = mesh.node_index(mesh.element_index(i, ez), n - 1, iz);
        dec.gamma_to_node[p++] = g;
        x_sum += mesh.coords(g, 0);
      }
    // right side: west edge of strip i+1, bottom to top
    for (int ez = 0; ez < mesh.m_z; ++ez)
      for (int iz = 0; iz < n; ++iz) {
        const Index g = mesh.node_index(mesh.element_index(i + 1, ez), 0, iz);
        dec.gamma_to_node[p++] = g;
        x_sum += mesh.coords(g, 0);
      }
    dec.interface_x(i) = x_sum / static_cast<double>(dec.iface_size());
  }
  return dec;
}

Vector apply_E(const Decomposition& dec, const Vector& v) {
  if (v.size() != dec.k) throw std::invalid_argument("apply_E: interface vector has wrong length");
  Vector u = Vector::Zero(dec.r);
  for (Index p = 0; p < dec.k; ++p) u(dec.gamma_to_node[p]) = v(p);
  return u;
}

Vector apply_Et(const Decomposition& dec, const Vector& u) {
  if (u.size() != dec.r) throw std::invalid_argument("apply_Et: full vector has wrong length");
  Vector v(dec.k);
  for (Index p = 0; p < dec.k; ++p) v(p) = u(dec.gamma_to_node[p]);
  return v;
}

}  // namespace smpm
