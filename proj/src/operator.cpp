#include "smpm/operator.hpp"

#include <stdexcept>
#include <string>

namespace smpm {

namespace {

// Emits every entry of a strip-local block as emit(row, col, value), with
// local index (ez, ix, iz) -> ez*n^2 + ix*n + iz. Duplicate (row, col) pairs
// accumulate.
template <class F>
void for_each_block_entry(const Mesh& mesh, double tau_x, double tau_z,
                          SmpmOperator::BlockKind kind, F&& emit) {
  const int n = mesh.n;
  const int m_z = mesh.m_z;
  const Matrix& D = mesh.basis.diff;
  const Matrix D2 = D * D;
  const double cx = 2.0 / mesh.h_x;
  const double cz = 2.0 / mesh.h_z;
  const double cx2 = cx * cx;
  const double cz2 = cz * cz;
  auto loc = [n](int ez, int ix, int iz) { return ez * n * n + ix * n + iz; };

  for (int ez = 0; ez < m_z; ++ez) {
    // collocation Laplacian
    for (int ix = 0; ix < n; ++ix)
      for (int iz = 0; iz < n; ++iz) {
        const int row = loc(ez, ix, iz);
        for (int m = 0; m < n; ++m) {
          emit(row, loc(ez, m, iz), cx2 * D2(ix, m));
          emit(row, loc(ez, ix, m), cz2 * D2(iz, m));
        }
      }

    // west side rows (ix = 0), outward normal -x
    for (int iz = 0; iz < n; ++iz) {
      const int row = loc(ez, 0, iz);
      if (kind.west_iface) emit(row, row, tau_x);  // Robin self-term; trace is in B
      for (int m = 0; m < n; ++m) emit(row, loc(ez, m, iz), -tau_x * cx * D(0, m));
    }
    // east side rows (ix = n-1), outward normal +x
    for (int iz = 0; iz < n; ++iz) {
      const int row = loc(ez, n - 1, iz);
      if (kind.east_iface) emit(row, row, tau_x);
      for (int m = 0; m < n; ++m) emit(row, loc(ez, m, iz), tau_x * cx * D(n - 1, m));
    }
    // south side rows (iz = 0), outward normal -z
    for (int ix = 0; ix < n; ++ix) {
      const int row = loc(ez, ix, 0);
      if (ez == 0) {
        for (int m = 0; m < n; ++m) emit(row, loc(ez, ix, m), -tau_z * cz * D(0, m));
      } else {
        emit(row, row, tau_z);
        for (int m = 0; m < n; ++m) emit(row, loc(ez, ix, m), -tau_z * cz * D(0, m));
        emit(row, loc(ez - 1, ix, n - 1), -tau_z);
        for (int m = 0; m < n; ++m) emit(row, loc(ez - 1, ix, m), tau_z * cz * D(n - 1, m));
      }
    }
    // north side rows (iz = n-1), outward normal +z
    for (int ix = 0; ix < n; ++ix) {
      const int row = loc(ez, ix, n - 1);
      if (ez == m_z - 1) {
        for (int m = 0; m < n; ++m) emit(row, loc(ez, ix, m), tau_z * cz * D(n - 1, m));
      } else {
        emit(row, row, tau_z);
        for (int m = 0; m < n; ++m) emit(row, loc(ez, ix, m), tau_z * cz * D(n - 1, m));
        emit(row, loc(ez + 1, ix, 0), -tau_z);
        for (int m = 0; m < n; ++m) emit(row, loc(ez + 1, ix, m), -tau_z * cz * D(0, m));
      }
    }
  }
}

}  // namespace

double penalty_tau(int n, double h_x, double h_z, double c_tau) {
  if (n < 2 || h_x <= 0.0 || h_z <= 0.0 || c_tau <= 0.0)
    throw std::invalid_argument("penalty_tau: inputs must be positive");
  return c_tau * n * n / std::min(h_x, h_z);
}

SmpmOperator assemble_operator(const Mesh& mesh, const Decomposition& dec, double tau) {
  SmpmOperator op;
  op.mesh = mesh;
  op.dec = dec;
  op.tau = tau;
  op.tau_x = tau;
  op.tau_z = tau;
  op.block_dim = static_cast<Index>(mesh.n) * mesh.n * mesh.m_z;

  // distinct strip kinds
  op.kind_of.resize(mesh.m_x);
  auto kind_index = [&](SmpmOperator::BlockKind k) {
    for (std::size_t i = 0; i < op.kinds.size(); ++i)
      if (op.kinds[i].west_iface == k.west_iface && op.kinds[i].east_iface == k.east_iface)
        return static_cast<int>(i);
    op.kinds.push_back(k);
    return static_cast<int>(op.kinds.size() - 1);
  };
  for (int s = 0; s < mesh.m_x; ++s)
    op.kind_of[s] = kind_index({s > 0, s < mesh.m_x - 1});

  for (const auto& kind : op.kinds) {
    std::vector<Eigen::Triplet<double>> trip;
    for_each_block_entry(mesh, op.tau_x, op.tau_z, kind,
                         [&](int r, int c, double v) { trip.emplace_back(r, c, v); });
    Eigen::SparseMatrix<double> a(op.block_dim, op.block_dim);
    a.setFromTriplets(trip.begin(), trip.end());
    op.a_sparse.push_back(std::move(a));
  }

  // Strip blocks are invertible Poisson-Robin problems only when at least one
  // side carries an interface; skip factorization for the single-strip mesh.
  if (mesh.m_x >= 2) {
    for (std::size_t i = 0; i < op.kinds.size(); ++i) {
      Matrix dense = Matrix(op.a_sparse[i]);
      Eigen::PartialPivLU<Matrix> lu(dense);
      if (lu.rcond() < 1e-15)
        throw std::runtime_error("assemble_operator: singular strip block (kind " +
                                 std::to_string(i) + ")");
      op.lu.push_back(std::move(lu));
    }
  }

  // B: neighbor traces of the horizontal fluxes, one row per interface slot
  const int n = mesh.n;
  const double cx = 2.0 / mesh.h_x;
  const double tau_x = op.tau_x;
  const Matrix& D = mesh.basis.diff;
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < dec.d; ++i) {
    for (int ez = 0; ez < mesh.m_z; ++ez)
      for (int iz = 0; iz < n; ++iz) {
        // left side: east edge of strip i reads the west edge of strip i+1
        Index p = dec.iface_begin(i) + static_cast<Index>(ez) * n + iz;
        int e = mesh.element_index(i + 1, ez);
        trip.emplace_back(p, mesh.node_index(e, 0, iz), -tau_x);
        for (int m = 0; m < n; ++m)
          trip.emplace_back(p, mesh.node_index(e, m, iz), -tau_x * cx * D(0, m));
        // right side: west edge of strip i+1 reads the east edge of strip i
        p += dec.side_size();
        e = mesh.element_index(i, ez);
        trip.emplace_back(p, mesh.node_index(e, n - 1, iz), -tau_x);
        for (int m = 0; m < n; ++m)
          trip.emplace_back(p, mesh.node_index(e, m, iz), tau_x * cx * D(n - 1, m));
      }
  }
  op.B.resize(dec.k, dec.r);
  op.B.setFromTriplets(trip.begin(), trip.end());
  return op;
}

Matrix subdomain_matrix(const SmpmOperator& op, int strip) {
  if (strip < 0 || strip >= op.mesh.m_x) throw std::invalid_argument("subdomain_matrix: bad strip");
  return Matrix(op.a_sparse[op.kind_of[strip]]);
}

Vector apply_A(const SmpmOperator& op, const Vector& u) {
  if (u.size() != op.dec.r) throw std::invalid_argument("apply_A: wrong length");
  Vector y(op.dec.r);
  const Index q = op.block_dim;
  for (int s = 0; s < op.mesh.m_x; ++s)
    y.segment(s * q, q).noalias() = op.a_sparse[op.kind_of[s]] * u.segment(s * q, q);
  return y;
}

Vector apply_B(const SmpmOperator& op, const Vector& u) {
  if (u.size() != op.dec.r) throw std::invalid_argument("apply_B: wrong length");
  return op.B * u;
}

Vector apply_Bt(const SmpmOperator& op, const Vector& v) {
  if (v.size() != op.dec.k) throw std::invalid_argument("apply_Bt: wrong length");
  return op.B.transpose() * v;
}

Vector apply_L(const SmpmOperator& op, const Vector& u) {
  Vector y = apply_A(op, u);
  const Vector bu = apply_B(op, u);
  for (Index p = 0; p < op.dec.k; ++p) y(op.dec.gamma_to_node[p]) += bu(p);
  return y;
}

Vector solve_A(const SmpmOperator& op, const Vector& f) {
  if (op.lu.empty()) throw std::runtime_error("solve_A: single-strip operator is not factored");
  if (f.size() != op.dec.r) throw std::invalid_argument("solve_A: wrong length");
  Vector u(op.dec.r);
  const Index q = op.block_dim;
  for (int s = 0; s < op.mesh.m_x; ++s)
    u.segment(s * q, q) = op.lu[op.kind_of[s]].solve(f.segment(s * q, q));
  return u;
}

Vector solve_At(const SmpmOperator& op, const Vector& f) {
  if (op.lu.empty()) throw std::runtime_error("solve_At: single-strip operator is not factored");
  if (f.size() != op.dec.r) throw std::invalid_argument("solve_At: wrong length");
  Vector u(op.dec.r);
  const Index q = op.block_dim;
  for (int s = 0; s < op.mesh.m_x; ++s)
    u.segment(s * q, q) = op.lu[op.kind_of[s]].transpose().solve(f.segment(s * q, q));
  return u;
}

Vector assemble_rhs(const SmpmOperator& op, const ScalarField& f, const BoundaryField& g) {
  const Mesh& mesh = op.mesh;
  const int n = mesh.n;
  Vector rhs(mesh.r);
  for (Index i = 0; i < mesh.r; ++i) rhs(i) = f(mesh.coords(i, 0), mesh.coords(i, 1));

  auto add = [&](Index node, double weight, double nx, double nz) {
    rhs(node) += weight * g(mesh.coords(node, 0), mesh.coords(node, 1), nx, nz);
  };
  for (int ez = 0; ez < mesh.m_z; ++ez)
    for (int iz = 0; iz < n; ++iz) {
      add(mesh.node_index(mesh.element_index(0, ez), 0, iz), op.tau_x, -1.0, 0.0);
      add(mesh.node_index(mesh.element_index(mesh.m_x - 1, ez), n - 1, iz), op.tau_x, 1.0, 0.0);
    }
  for (int ex = 0; ex < mesh.m_x; ++ex)
    for (int ix = 0; ix < n; ++ix) {
      add(mesh.node_index(mesh.element_index(ex, 0), ix, 0), op.tau_z, 0.0, -1.0);
      add(mesh.node_index(mesh.element_index(ex, mesh.m_z - 1), ix, n - 1), op.tau_z, 0.0, 1.0);
    }
  return rhs;
}

}  // namespace smpm
