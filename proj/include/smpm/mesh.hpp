#pragma once

#include <vector>

#include "smpm/gll.hpp"
#include "smpm/types.hpp"

namespace smpm {

/// Logically cartesian m_x x m_z element mesh of axis-aligned rectangles
/// covering [-l_x/2, l_x/2] x [-l_z/2, l_z/2], each element carrying an
/// n x n GLL grid mapped affinely from [-1,1]^2.
///
/// Elements adjacent along an edge each own a copy of the n shared GLL
/// nodes: coordinates coincide, indices differ. Global numbering is
/// element-major with element index e = ex*m_z + ez, and node
/// g = e*n^2 + ix*n + iz (z fastest), which makes every vertical strip of
/// elements a contiguous index range.
///
/// Immutable after construction; shareable across threads.
struct Mesh {
  GllBasis basis;
  int n = 0, m_x = 0, m_z = 0;
  double l_x = 0, l_z = 0;
  double h_x = 0, h_z = 0;  // element extents [m]
  double eta = 0;           // element aspect ratio h_x / h_z
  Index r = 0;              // n^2 m_x m_z nodes
  Matrix coords;            // r x 2, (x, z) per node

  // neighbor element ids per element, -1 at the physical boundary
  enum Side { west = 0, east = 1, south = 2, north = 3 };
  Eigen::Matrix<int, Eigen::Dynamic, 4> neighbors;

  int element_index(int ex, int ez) const { return ex * m_z + ez; }
  Index node_index(int e, int ix, int iz) const {
    return static_cast<Index>(e) * n * n + static_cast<Index>(ix) * n + iz;
  }
  int element_of_node(Index g) const { return static_cast<int>(g / (n * n)); }
};

Mesh build_mesh(int n, int m_x, int m_z, double l_x, double l_z);

/// Vertical-strip decomposition: subdomain s owns elements ex == s, i.e. the
/// contiguous node range [s*n^2*m_z, (s+1)*n^2*m_z). Interface i sits between
/// strips i and i+1 and collects 2*n*m_z duplicated nodes: the strip-i east
/// edge (left side) bottom-to-top, then the strip-(i+1) west edge (right
/// side) bottom-to-top.
struct Decomposition {
  int n = 0, m_x = 0, m_z = 0;
  Index r = 0;
  Index k = 0;  // 2 n m_z (m_x - 1) interfacial nodes
  int d = 0;    // m_x - 1 interfaces
  std::vector<Index> gamma_to_node;  // length k, interface slot -> global node
  Vector interface_x;  // mean x-coordinate per interface (diagnostics only)

  Index side_size() const { return static_cast<Index>(n) * m_z; }
  Index iface_size() const { return 2 * side_size(); }
  Index iface_begin(int i) const { return i * iface_size(); }
};

Decomposition build_decomposition(const Mesh& mesh);

/// Scatter an interface vector into the full grid (zero elsewhere).
Vector apply_E(const Decomposition& dec, const Vector& v);
/// Gather the interface values of a full-grid vector; E^T E = I exactly.
Vector apply_Et(const Decomposition& dec, const Vector& u);

}  // namespace smpm
