#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "operad_forge/ring.hpp"

namespace oforge {

// Sparse vector: sorted (index, coeff) pairs, no explicit zeros.
class SparseVec {
 public:
  SparseVec() = default;
  explicit SparseVec(int dim) : dim_(dim) {}

  static SparseVec unit(int dim, int i, const Scalar& c = Scalar(1)) {
    SparseVec v(dim);
    if (c != 0) v.ent_.emplace_back(i, c);
    return v;
  }

  int dim() const { return dim_; }
  bool is_zero() const { return ent_.empty(); }
  int nnz() const { return static_cast<int>(ent_.size()); }
  const std::vector<std::pair<int, Scalar>>& entries() const { return ent_; }

  Scalar get(int i) const {
    auto it = std::lower_bound(ent_.begin(), ent_.end(), i,
                               [](const auto& e, int k) { return e.first < k; });
    if (it != ent_.end() && it->first == i) return it->second;
    return Scalar(0);
  }

  // Builder-style set; keeps entries sorted.
  void set(int i, const Scalar& c) {
    auto it = std::lower_bound(ent_.begin(), ent_.end(), i,
                               [](const auto& e, int k) { return e.first < k; });
    if (it != ent_.end() && it->first == i) {
      if (c == 0)
        ent_.erase(it);
      else
        it->second = c;
    } else if (c != 0) {
      ent_.insert(it, {i, c});
    }
  }

  void add_to(const GroundRing& R, int i, const Scalar& c) {
    if (c == 0) return;
    auto it = std::lower_bound(ent_.begin(), ent_.end(), i,
                               [](const auto& e, int k) { return e.first < k; });
    if (it != ent_.end() && it->first == i) {
      Scalar s = R.add(it->second, c);
      if (s == 0)
        ent_.erase(it);
      else
        it->second = s;
    } else {
      ent_.insert(it, {i, R.normalize(c)});
    }
  }

  SparseVec scaled(const GroundRing& R, const Scalar& c) const {
    SparseVec r(dim_);
    if (c == 0) return r;
    r.ent_.reserve(ent_.size());
    for (auto& [i, v] : ent_) {
      Scalar s = R.mul(v, c);
      if (s != 0) r.ent_.emplace_back(i, s);
    }
    return r;
  }

  // this += c * other
  void axpy(const GroundRing& R, const Scalar& c, const SparseVec& other) {
    if (c == 0 || other.ent_.empty()) return;
    std::vector<std::pair<int, Scalar>> out;
    out.reserve(ent_.size() + other.ent_.size());
    std::size_t a = 0, b = 0;
    while (a < ent_.size() || b < other.ent_.size()) {
      if (b == other.ent_.size() ||
          (a < ent_.size() && ent_[a].first < other.ent_[b].first)) {
        out.push_back(ent_[a++]);
      } else if (a == ent_.size() || other.ent_[b].first < ent_[a].first) {
        Scalar s = R.mul(c, other.ent_[b].second);
        if (s != 0) out.emplace_back(other.ent_[b].first, s);
        ++b;
      } else {
        Scalar s = R.add(ent_[a].second, R.mul(c, other.ent_[b].second));
        if (s != 0) out.emplace_back(ent_[a].first, s);
        ++a;
        ++b;
      }
    }
    ent_ = std::move(out);
  }

  void add(const GroundRing& R, const SparseVec& other) { axpy(R, Scalar(1), other); }

  SparseVec convert_to(const GroundRing& from, const GroundRing& to) const {
    SparseVec r(dim_);
    for (auto& [i, v] : ent_) {
      Scalar s = from.convert_to(to, v);
      if (s != 0) r.ent_.emplace_back(i, s);
    }
    return r;
  }

  // Concatenation-style embedding into a larger space at an offset.
  SparseVec shifted(int new_dim, int offset) const {
    SparseVec r(new_dim);
    r.ent_.reserve(ent_.size());
    for (auto& [i, v] : ent_) r.ent_.emplace_back(i + offset, v);
    return r;
  }

  bool operator==(const SparseVec& o) const { return dim_ == o.dim_ && ent_ == o.ent_; }

 private:
  int dim_ = 0;
  std::vector<std::pair<int, Scalar>> ent_;
};

// Sparse exact matrix, stored row-major. Absent entries are zero; all entries
// belong to the ring passed around with it.
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(GroundRing ring, int rows, int cols)
      : ring_(ring), cols_(cols), rows_(rows, SparseVec(cols)) {}

  static ExactMatrix identity(GroundRing ring, int n) {
    ExactMatrix m(ring, n, n);
    for (int i = 0; i < n; ++i) m.rows_[i] = SparseVec::unit(n, i);
    return m;
  }

  const GroundRing& ring() const { return ring_; }
  int rows() const { return static_cast<int>(rows_.size()); }
  int cols() const { return cols_; }

  const SparseVec& row(int r) const { return rows_[r]; }
  SparseVec& row(int r) { return rows_[r]; }

  Scalar entry(int r, int c) const { return rows_[r].get(c); }
  void set_entry(int r, int c, const Scalar& v) { rows_[r].set(c, ring_.normalize(v)); }
  void add_entry(int r, int c, const Scalar& v) { rows_[r].add_to(ring_, c, v); }

  void set_row(int r, SparseVec v) {
    require(v.dim() == cols_, errc::dim, "row dimension mismatch");
    rows_[r] = std::move(v);
  }

  ExactMatrix transpose() const {
    ExactMatrix t(ring_, cols_, rows());
    for (int r = 0; r < rows(); ++r)
      for (auto& [c, v] : rows_[r].entries()) t.rows_[c].set(r, v);
    return t;
  }

  SparseVec apply(const SparseVec& x) const {
    require(x.dim() == cols_, errc::dim, "matrix-vector dimension mismatch");
    SparseVec y(rows());
    // column-combination via transpose-free scheme: accumulate row dots
    for (int r = 0; r < rows(); ++r) {
      Scalar acc(0);
      const auto& re = rows_[r].entries();
      const auto& xe = x.entries();
      std::size_t a = 0, b = 0;
      while (a < re.size() && b < xe.size()) {
        if (re[a].first < xe[b].first)
          ++a;
        else if (xe[b].first < re[a].first)
          ++b;
        else
          acc = ring_.add(acc, ring_.mul(re[a++].second, xe[b++].second));
      }
      if (acc != 0) y.set(r, acc);
    }
    return y;
  }

  ExactMatrix multiply(const ExactMatrix& other) const {
    require(cols_ == other.rows(), errc::dim, "matrix product dimension mismatch");
    ExactMatrix out(ring_, rows(), other.cols());
    for (int r = 0; r < rows(); ++r) {
      SparseVec acc(other.cols());
      for (auto& [k, v] : rows_[r].entries()) acc.axpy(ring_, v, other.rows_[k]);
      out.rows_[r] = std::move(acc);
    }
    return out;
  }

  ExactMatrix convert_to(const GroundRing& to) const {
    ExactMatrix out(to, rows(), cols());
    for (int r = 0; r < rows(); ++r) out.rows_[r] = rows_[r].convert_to(ring_, to);
    return out;
  }

  bool is_zero() const {
    for (auto& r : rows_)
      if (!r.is_zero()) return false;
    return true;
  }

  bool is_permutation() const {
    if (rows() != cols_) return false;
    std::vector<char> seen(cols_, 0);
    for (auto& r : rows_) {
      if (r.nnz() != 1) return false;
      auto& [c, v] = r.entries()[0];
      if (v != 1 || seen[c]) return false;
      seen[c] = 1;
    }
    return true;
  }

  bool operator==(const ExactMatrix& o) const {
    return cols_ == o.cols_ && rows_ == o.rows_;
  }

 private:
  GroundRing ring_;
  int cols_ = 0;
  std::vector<SparseVec> rows_;
};

// Row echelon data over a field. Pivoting is deterministic: columns are
// scanned in ascending index and the pivot is the smallest-index unused row
// with a nonzero entry, so all derived bases are reproducible.
struct Echelon {
  ExactMatrix reduced;            // fully reduced (RREF) rows, pivots = 1
  std::vector<int> pivot_cols;    // ascending
  std::vector<int> pivot_row_of;  // col -> row index in `reduced`, or -1
  int rank = 0;
};

inline Echelon row_reduce(const ExactMatrix& m_in) {
  const GroundRing& R = m_in.ring();
  require(R.is_field(), errc::ring, "row_reduce requires a field");
  ExactMatrix m = m_in;
  const int nr = m.rows(), nc = m.cols();
  Echelon e;
  e.pivot_row_of.assign(nc, -1);
  std::vector<char> used(nr, 0);
  std::vector<int> pivot_rows;
  for (int c = 0; c < nc; ++c) {
    int pr = -1;
    for (int r = 0; r < nr; ++r) {
      if (!used[r] && m.row(r).get(c) != 0) {
        pr = r;
        break;
      }
    }
    if (pr < 0) continue;
    used[pr] = 1;
    Scalar inv = R.inv(m.row(pr).get(c));
    m.set_row(pr, m.row(pr).scaled(R, inv));
    for (int r = 0; r < nr; ++r) {
      if (r == pr) continue;
      Scalar f = m.row(r).get(c);
      if (f != 0) m.row(r).axpy(R, R.neg(f), m.row(pr));
    }
    e.pivot_cols.push_back(c);
    pivot_rows.push_back(pr);
  }
  e.rank = static_cast<int>(e.pivot_cols.size());
  // Repack pivot rows in pivot-column order.
  ExactMatrix red(R, e.rank, nc);
  for (int i = 0; i < e.rank; ++i) {
    red.set_row(i, m.row(pivot_rows[i]));
    e.pivot_row_of[e.pivot_cols[i]] = i;
  }
  e.reduced = std::move(red);
  return e;
}

// Rank over the fraction field (for ZZ: rank over QQ).
inline int rank(const ExactMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  if (m.ring().kind == RingKind::integers)
    return row_reduce(m.convert_to(GroundRing::rationals())).rank;
  return row_reduce(m).rank;
}

// Kernel basis over a field, from the RREF: one vector per free column, with
// a 1 at the free column. Deterministic order by free column index.
inline std::vector<SparseVec> kernel_basis_field(const ExactMatrix& m) {
  const GroundRing& R = m.ring();
  Echelon e = row_reduce(m);
  std::vector<SparseVec> basis;
  for (int c = 0; c < m.cols(); ++c) {
    if (e.pivot_row_of[c] >= 0) continue;
    SparseVec v(m.cols());
    v.set(c, Scalar(1));
    for (int i = 0; i < e.rank; ++i) {
      Scalar coef = e.reduced.row(i).get(c);
      if (coef != 0) v.set(e.pivot_cols[i], R.neg(coef));
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

// Particular solution of A x = b over a field; std::nullopt if inconsistent.
inline std::optional<SparseVec> solve_field(const ExactMatrix& A, const SparseVec& b) {
  const GroundRing& R = A.ring();
  require(b.dim() == A.rows(), errc::dim, "solve: rhs dimension mismatch");
  ExactMatrix aug(R, A.rows(), A.cols() + 1);
  for (int r = 0; r < A.rows(); ++r) {
    SparseVec row = A.row(r).shifted(A.cols() + 1, 0);
    Scalar bv = b.get(r);
    if (bv != 0) row.set(A.cols(), bv);
    aug.set_row(r, std::move(row));
  }
  Echelon e = row_reduce(aug);
  if (e.pivot_row_of[A.cols()] >= 0) return std::nullopt;  // pivot in rhs column
  SparseVec x(A.cols());
  for (int i = 0; i < e.rank; ++i) {
    Scalar v = e.reduced.row(i).get(A.cols());
    if (v != 0) x.set(e.pivot_cols[i], v);
  }
  return x;
}

// Membership of b in the row space of `rows` (utility for span checks).
inline bool in_span(const GroundRing& R, const std::vector<SparseVec>& rows,
                    const SparseVec& b) {
  if (rows.empty()) return b.is_zero();
  ExactMatrix m(R, static_cast<int>(rows.size()), rows[0].dim());
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) m.set_row(i, rows[i]);
  auto mt = m.transpose();
  return solve_field(mt, b).has_value();
}

}  // namespace oforge
