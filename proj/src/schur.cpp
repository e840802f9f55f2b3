#include "smpm/schur.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace smpm {

namespace {

// Per-kind coupling data: the block G = Btrace * A_kind^{-1} * E_kind, with
// rows [west-readers; east-readers] and columns [west-own; east-own].
struct KindCoupling {
  Matrix g;
  Index cols_west = 0, cols_east = 0;
  Index rows_west = 0, rows_east = 0;
};

KindCoupling build_kind_coupling(const SmpmOperator& op, int kind_id, const BlockSolver& solver) {
  const Mesh& mesh = op.mesh;
  const int n = mesh.n;
  const int m_z = mesh.m_z;
  const Index w = static_cast<Index>(n) * m_z;
  const SmpmOperator::BlockKind kind = op.kinds[kind_id];
  const Index q = op.block_dim;
  auto loc = [n](int ez, int ix, int iz) { return ez * n * n + ix * n + iz; };

  KindCoupling kc;
  kc.cols_west = kind.west_iface ? w : 0;
  kc.cols_east = kind.east_iface ? w : 0;
  kc.rows_west = kc.cols_west;
  kc.rows_east = kc.cols_east;
  const Index ncols = kc.cols_west + kc.cols_east;

  Matrix rhs = Matrix::Zero(q, ncols);
  Index c = 0;
  if (kind.west_iface)
    for (int ez = 0; ez < m_z; ++ez)
      for (int iz = 0; iz < n; ++iz) rhs(loc(ez, 0, iz), c++) = 1.0;
  if (kind.east_iface)
    for (int ez = 0; ez < m_z; ++ez)
      for (int iz = 0; iz < n; ++iz) rhs(loc(ez, n - 1, iz), c++) = 1.0;

  const Matrix x = solver(kind_id, rhs);

  const Matrix& D = mesh.basis.diff;
  const double cx = 2.0 / mesh.h_x;
  const double tau = op.tau_x;
  kc.g.resize(kc.rows_west + kc.rows_east, ncols);
  Index row = 0;
  // readers across the west interface evaluate -tau (u + du/dx) on this
  // strip's west edge
  if (kind.west_iface)
    for (int ez = 0; ez < m_z; ++ez)
      for (int iz = 0; iz < n; ++iz) {
        Eigen::RowVectorXd acc = x.row(loc(ez, 0, iz));
        for (int m = 0; m < n; ++m) acc += cx * D(0, m) * x.row(loc(ez, m, iz));
        kc.g.row(row++) = -tau * acc;
      }
  // readers across the east interface evaluate -tau (u - du/dx) on the east edge
  if (kind.east_iface)
    for (int ez = 0; ez < m_z; ++ez)
      for (int iz = 0; iz < n; ++iz) {
        Eigen::RowVectorXd acc = x.row(loc(ez, n - 1, iz));
        for (int m = 0; m < n; ++m) acc -= cx * D(n - 1, m) * x.row(loc(ez, m, iz));
        kc.g.row(row++) = -tau * acc;
      }
  return kc;
}

SchurSystem assemble_schur_impl(std::shared_ptr<const SmpmOperator> op, const BlockSolver& solver,
                                double shift) {
  if (op->mesh.m_x < 2) throw std::invalid_argument("assemble_schur: need m_x >= 2");
  SchurSystem sys;
  sys.op = op;
  sys.k = op->dec.k;
  sys.d = op->dec.d;
  sys.shift = shift;

  std::vector<KindCoupling> kc(op->kinds.size());
  for (std::size_t i = 0; i < op->kinds.size(); ++i)
    kc[i] = build_kind_coupling(*op, static_cast<int>(i), solver);

  const Index w = op->dec.side_size();
  const int d = sys.d;
  double frob2 = static_cast<double>(sys.k);
  sys.blocks.resize(d);
  for (int i = 0; i < d; ++i) {
    auto& blk = sys.blocks[i];
    const bool has_a = i >= 1;      // left of Gamma_{i-1}
    const bool has_d = i <= d - 2;  // right of Gamma_{i+1}
    const Index rows = (has_a ? w : 0) + 2 * w + (has_d ? w : 0);
    blk.entries = Matrix::Zero(rows, 2 * w);

    Index off = 0;
    Index seg_a = -1, seg_b = -1, seg_c = -1, seg_d = -1;
    if (has_a) {
      seg_a = off;
      blk.row_segments.emplace_back((i - 1) * 2 * w, w);
      off += w;
    }
    seg_b = off;
    blk.row_segments.emplace_back(i * 2 * w, w);
    off += w;
    seg_c = off;
    blk.row_segments.emplace_back(i * 2 * w + w, w);
    off += w;
    if (has_d) {
      seg_d = off;
      blk.row_segments.emplace_back((i + 1) * 2 * w + w, w);
    }

    // left-half columns: east-own columns of strip i
    {
      const KindCoupling& g = kc[op->kind_of[i]];
      if (has_a) blk.entries.block(seg_a, 0, w, w) = g.g.topRows(g.rows_west).rightCols(w);
      blk.entries.block(seg_c, 0, w, w) = g.g.bottomRows(g.rows_east).rightCols(w);
    }
    // right-half columns: west-own columns of strip i+1
    {
      const KindCoupling& g = kc[op->kind_of[i + 1]];
      blk.entries.block(seg_b, w, w, w) = g.g.topRows(g.rows_west).leftCols(w);
      if (has_d) blk.entries.block(seg_d, w, w, w) = g.g.bottomRows(g.rows_east).leftCols(w);
    }
    frob2 += blk.entries.squaredNorm();
  }
  sys.frob = std::sqrt(frob2);
  return sys;
}

}  // namespace

SchurSystem assemble_schur(std::shared_ptr<const SmpmOperator> op) {
  auto solver = [&op](int kind, const Matrix& rhs) { return Matrix(op->lu[kind].solve(rhs)); };
  return assemble_schur_impl(op, solver, 0.0);
}

SchurSystem assemble_schur(std::shared_ptr<const SmpmOperator> op, const BlockSolver& solver,
                           double shift) {
  return assemble_schur_impl(op, solver, shift);
}

Vector apply_S(const SchurSystem& sys, const Vector& v) {
  if (v.size() != sys.k) throw std::invalid_argument("apply_S: wrong length");
  sys.applies->fetch_add(1, std::memory_order_relaxed);
  const Index w2 = sys.op->dec.iface_size();
  Vector y = v;
  for (int i = 0; i < sys.d; ++i) {
    const auto& blk = sys.blocks[i];
    const Vector prod = blk.entries * v.segment(i * w2, w2);
    Index off = 0;
    for (const auto& [start, len] : blk.row_segments) {
      y.segment(start, len) += prod.segment(off, len);
      off += len;
    }
  }
  return y;
}

Vector apply_St(const SchurSystem& sys, const Vector& v) {
  if (v.size() != sys.k) throw std::invalid_argument("apply_St: wrong length");
  const Index w2 = sys.op->dec.iface_size();
  Vector y = v;
  for (int i = 0; i < sys.d; ++i) {
    const auto& blk = sys.blocks[i];
    Vector gathered(blk.entries.rows());
    Index off = 0;
    for (const auto& [start, len] : blk.row_segments) {
      gathered.segment(off, len) = v.segment(start, len);
      off += len;
    }
    y.segment(i * w2, w2).noalias() += blk.entries.transpose() * gathered;
  }
  return y;
}

Vector apply_S_definition(const SchurSystem& sys, const Vector& v) {
  const auto& op = *sys.op;
  return v + apply_B(op, solve_A(op, apply_E(op.dec, v)));
}

Vector schur_rhs(const SchurSystem& sys, const Vector& f) {
  const auto& op = *sys.op;
  if (f.size() != op.dec.r) throw std::invalid_argument("schur_rhs: wrong length");
  return apply_B(op, solve_A(op, f));
}

void build_block_jacobi(SchurSystem& sys) {
  const Index w = sys.op->dec.side_size();
  const Index w2 = 2 * w;
  sys.jacobi.clear();
  for (int b = 0; 2 * b < sys.d; ++b) {
    const int i0 = 2 * b;
    const int i1 = std::min(2 * b + 1, sys.d - 1);
    const Index begin = i0 * w2;
    const Index size = (i1 - i0 + 1) * w2;
    Matrix m = Matrix::Identity(size, size);
    for (int i = i0; i <= i1; ++i) {
      const auto& blk = sys.blocks[i];
      Index off = 0;
      for (const auto& [start, len] : blk.row_segments) {
        if (start >= begin && start + len <= begin + size)
          m.block(start - begin, i * w2 - begin, len, w2) += blk.entries.middleRows(off, len);
        off += len;
      }
    }
    SchurSystem::JacobiBlock jb;
    jb.begin = begin;
    jb.size = size;
    jb.lu = Eigen::PartialPivLU<Matrix>(m);
    if (jb.lu.rcond() < 1e-16)
      throw std::runtime_error("build_block_jacobi: singular preconditioner block " +
                               std::to_string(b));
    sys.jacobi.push_back(std::move(jb));
  }
}

Vector apply_block_jacobi_inv(const SchurSystem& sys, const Vector& v) {
  if (sys.jacobi.empty()) throw std::runtime_error("apply_block_jacobi_inv: not built");
  if (v.size() != sys.k) throw std::invalid_argument("apply_block_jacobi_inv: wrong length");
  Vector y(sys.k);
  for (const auto& jb : sys.jacobi)
    y.segment(jb.begin, jb.size) = jb.lu.solve(v.segment(jb.begin, jb.size));
  return y;
}

Vector recover_solution(const SchurSystem& sys, const Vector& f, const Vector& x_S) {
  const auto& op = *sys.op;
  return solve_A(op, f - apply_E(op.dec, x_S));
}

Matrix dense_schur(const SchurSystem& sys) {
  Matrix s = Matrix::Identity(sys.k, sys.k);
  const Index w2 = sys.op->dec.iface_size();
  for (int i = 0; i < sys.d; ++i) {
    const auto& blk = sys.blocks[i];
    Index off = 0;
    for (const auto& [start, len] : blk.row_segments) {
      s.block(start, i * w2, len, w2) += blk.entries.middleRows(off, len);
      off += len;
    }
  }
  return s;
}

void dump_schur_blocks(const SchurSystem& sys, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("dump_schur_blocks: cannot open " + path);
  auto put = [&](std::int64_t v) { std::fwrite(&v, sizeof v, 1, fp); };
  put(sys.op->mesh.n);
  put(sys.op->mesh.m_x);
  put(sys.op->mesh.m_z);
  put(sys.k);
  for (const auto& blk : sys.blocks) {
    put(blk.entries.rows());
    put(blk.entries.cols());
    put(static_cast<std::int64_t>(blk.row_segments.size()));
    for (const auto& [start, len] : blk.row_segments) {
      put(start);
      put(len);
    }
    std::fwrite(blk.entries.data(), sizeof(double), blk.entries.size(), fp);
  }
  std::fclose(fp);
}

DumpedSchur read_schur_blocks(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error("read_schur_blocks: cannot open " + path);
  auto get = [&]() {
    std::int64_t v = 0;
    if (std::fread(&v, sizeof v, 1, fp) != 1)
      throw std::runtime_error("read_schur_blocks: truncated file");
    return v;
  };
  DumpedSchur out;
  out.n = get();
  out.m_x = get();
  out.m_z = get();
  out.k = get();
  const std::int64_t d = out.m_x - 1;
  out.blocks.resize(d);
  for (auto& blk : out.blocks) {
    const std::int64_t rows = get(), cols = get(), nseg = get();
    blk.row_segments.resize(nseg);
    for (auto& [start, len] : blk.row_segments) {
      start = get();
      len = get();
    }
    blk.entries.resize(rows, cols);
    if (std::fread(blk.entries.data(), sizeof(double), blk.entries.size(), fp) !=
        static_cast<std::size_t>(blk.entries.size()))
      throw std::runtime_error("read_schur_blocks: truncated file");
  }
  std::fclose(fp);
  return out;
}

}  // namespace smpm
