#pragma once

#include <optional>
#include <vector>

#include "operad_forge/matrix.hpp"

namespace oforge {

// Smith normal form over ZZ: U * m * V = D with U, V unimodular and the
// diagonal invariant factors satisfying d_i | d_{i+1}. Pivot selection is
// deterministic: smallest |value|, ties broken by (row, col).
struct SmithResult {
  ExactMatrix U, D, V;
  std::vector<Int> invariant_factors;  // nonzero diagonal, normalized positive
};

namespace detail {

class DenseZ {
 public:
  DenseZ(int r, int c) : rows_(r), cols_(c), a_(static_cast<std::size_t>(r) * c) {}
  Int& at(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  const Int& at(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void swap_rows(int i, int j) {
    if (i == j) return;
    for (int c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
  }
  void swap_cols(int i, int j) {
    if (i == j) return;
    for (int r = 0; r < rows_; ++r) std::swap(at(r, i), at(r, j));
  }
  void addmul_row(int dst, int src, const Int& f) {
    if (f == 0) return;
    for (int c = 0; c < cols_; ++c) at(dst, c) += f * at(src, c);
  }
  void addmul_col(int dst, int src, const Int& f) {
    if (f == 0) return;
    for (int r = 0; r < rows_; ++r) at(r, dst) += f * at(r, src);
  }
  void negate_row(int i) {
    for (int c = 0; c < cols_; ++c) at(i, c) = -at(i, c);
  }

  ExactMatrix to_matrix(const GroundRing& ring) const {
    ExactMatrix m(ring, rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c)
        if (at(r, c) != 0) m.set_entry(r, c, Scalar(at(r, c)));
    return m;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Int> a_;
};

inline DenseZ to_dense_z(const ExactMatrix& m) {
  DenseZ d(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (auto& [c, v] : m.row(r).entries()) d.at(r, c) = numerator(v);
  return d;
}

}  // namespace detail

inline SmithResult smith_normal_form(const ExactMatrix& m) {
  require(m.ring().kind == RingKind::integers, errc::ring,
          "smith_normal_form requires ring ZZ");
  const GroundRing Z = GroundRing::integers();
  detail::DenseZ A = detail::to_dense_z(m);
  detail::DenseZ U(m.rows(), m.rows()), V(m.cols(), m.cols());
  for (int i = 0; i < m.rows(); ++i) U.at(i, i) = 1;
  for (int i = 0; i < m.cols(); ++i) V.at(i, i) = 1;

  const int n = std::min(m.rows(), m.cols());
  int k = 0;
  for (; k < n; ++k) {
    // pick pivot: smallest |value| among A[k.., k..], ties by (row, col)
    int pr = -1, pc = -1;
    Int best = 0;
    for (int r = k; r < m.rows(); ++r)
      for (int c = k; c < m.cols(); ++c) {
        const Int& v = A.at(r, c);
        if (v == 0) continue;
        Int av = abs(v);
        if (pr < 0 || av < best) {
          best = av;
          pr = r;
          pc = c;
          if (best == 1) goto have_pivot;  // cannot improve
        }
      }
    if (pr < 0) break;  // all remaining zero
  have_pivot:
    A.swap_rows(k, pr);
    U.swap_rows(k, pr);
    A.swap_cols(k, pc);
    V.swap_cols(k, pc);
    // reduce row and column until pivot divides everything it meets
    for (;;) {
      bool again = false;
      for (int r = k + 1; r < m.rows(); ++r) {
        if (A.at(r, k) == 0) continue;
        Int q = A.at(r, k) / A.at(k, k);
        A.addmul_row(r, k, -q);
        U.addmul_row(r, k, -q);
        if (A.at(r, k) != 0) {
          A.swap_rows(k, r);
          U.swap_rows(k, r);
          again = true;
        }
      }
      for (int c = k + 1; c < m.cols(); ++c) {
        if (A.at(k, c) == 0) continue;
        Int q = A.at(k, c) / A.at(k, k);
        A.addmul_col(c, k, -q);
        V.addmul_col(c, k, -q);
        if (A.at(k, c) != 0) {
          A.swap_cols(k, c);
          V.swap_cols(k, c);
          again = true;
        }
      }
      if (!again) break;
    }
    if (A.at(k, k) < 0) {
      A.negate_row(k);
      U.negate_row(k);
    }
  }
  // enforce divisibility chain d_i | d_{i+1}
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (A.at(j, j) % A.at(i, i) == 0) continue;
      // fold column j into column i, then re-diagonalize the 2x2 block at
      // (i,j): this replaces d_i by gcd(d_i, d_j) and d_j by their lcm
      A.addmul_col(i, j, 1);
      V.addmul_col(i, j, 1);
      for (;;) {
        bool again = false;
        if (A.at(j, i) != 0) {
          Int q = A.at(j, i) / A.at(i, i);
          A.addmul_row(j, i, -q);
          U.addmul_row(j, i, -q);
          if (A.at(j, i) != 0) {
            A.swap_rows(i, j);
            U.swap_rows(i, j);
            again = true;
          }
        }
        if (A.at(i, j) != 0) {
          Int q = A.at(i, j) / A.at(i, i);
          A.addmul_col(j, i, -q);
          V.addmul_col(j, i, -q);
          if (A.at(i, j) != 0) {
            A.swap_cols(i, j);
            V.swap_cols(i, j);
            again = true;
          }
        }
        if (!again && A.at(j, i) == 0 && A.at(i, j) == 0) break;
      }
      if (A.at(i, i) < 0) {
        A.negate_row(i);
        U.negate_row(i);
      }
      if (A.at(j, j) < 0) {
        A.negate_row(j);
        U.negate_row(j);
      }
    }
  }
  SmithResult out;
  out.U = U.to_matrix(Z);
  out.V = V.to_matrix(Z);
  out.D = A.to_matrix(Z);
  for (int i = 0; i < k; ++i) out.invariant_factors.push_back(A.at(i, i));
  return out;
}

// Saturated kernel lattice of an integer matrix: the columns of V matching
// zero diagonal entries span ker(m) ∩ ZZ^cols exactly.
inline std::vector<SparseVec> kernel_basis_integer(const ExactMatrix& m) {
  SmithResult s = smith_normal_form(m);
  int r = static_cast<int>(s.invariant_factors.size());
  std::vector<SparseVec> out;
  ExactMatrix vt = s.V.transpose();  // rows of vt are columns of V
  for (int c = r; c < m.cols(); ++c) out.push_back(vt.row(c));
  return out;
}

inline std::vector<SparseVec> kernel_basis(const ExactMatrix& m) {
  if (m.ring().kind == RingKind::integers) return kernel_basis_integer(m);
  return kernel_basis_field(m);
}

// Integral particular solution of A x = b, if one exists.
inline std::optional<SparseVec> solve_integer(const ExactMatrix& A, const SparseVec& b) {
  const GroundRing Z = GroundRing::integers();
  SmithResult s = smith_normal_form(A);
  SparseVec ub = s.U.apply(b);
  SparseVec y(A.cols());
  int r = static_cast<int>(s.invariant_factors.size());
  for (auto& [i, v] : ub.entries()) {
    if (i >= r) return std::nullopt;  // inconsistent
    Int num = numerator(v);
    const Int& d = s.invariant_factors[i];
    if (num % d != 0) return std::nullopt;  // no integral solution
    y.set(i, Scalar(num / d));
  }
  (void)Z;
  return s.V.apply(y);
}

inline std::optional<SparseVec> solve(const ExactMatrix& A, const SparseVec& b) {
  if (A.ring().kind == RingKind::integers) return solve_integer(A, b);
  return solve_field(A, b);
}

// Finitely generated ZZ-module presented as ZZ^n / column-span(relations).
struct ZModuleInfo {
  int free_rank = 0;
  std::vector<Int> torsion;  // invariant factors > 1
};

inline ZModuleInfo z_quotient_info(int n, const ExactMatrix& relation_columns) {
  require(relation_columns.rows() == n, errc::dim, "relation dimension mismatch");
  ZModuleInfo info;
  if (relation_columns.cols() == 0 || relation_columns.is_zero()) {
    info.free_rank = n;
    return info;
  }
  SmithResult s = smith_normal_form(relation_columns);
  info.free_rank = n - static_cast<int>(s.invariant_factors.size());
  for (auto& d : s.invariant_factors)
    if (d != 1) info.torsion.push_back(d);
  return info;
}

}  // namespace oforge
