#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "operad_forge/smith.hpp"

namespace oforge {

// Free module of finite rank with a fixed ordered basis of opaque labels.
struct BasedModule {
  GroundRing ring;
  std::vector<std::string> labels;

  int rank() const { return static_cast<int>(labels.size()); }

  static BasedModule free(GroundRing ring, int rank, const std::string& prefix = "e") {
    BasedModule m;
    m.ring = ring;
    m.labels.reserve(rank);
    for (int i = 0; i < rank; ++i) m.labels.push_back(prefix + std::to_string(i + 1));
    return m;
  }

  static BasedModule with_labels(GroundRing ring, std::vector<std::string> labels) {
    return BasedModule{ring, std::move(labels)};
  }
};

inline ExactMatrix matrix_from_rows(const GroundRing& R, const std::vector<SparseVec>& rows,
                                    int cols) {
  ExactMatrix m(R, static_cast<int>(rows.size()), cols);
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) m.set_row(i, rows[i]);
  return m;
}

inline ExactMatrix matrix_from_cols(const GroundRing& R, const std::vector<SparseVec>& cols,
                                    int rows) {
  ExactMatrix m(R, rows, static_cast<int>(cols.size()));
  for (int j = 0; j < static_cast<int>(cols.size()); ++j)
    for (auto& [i, v] : cols[j].entries()) m.set_entry(i, j, v);
  return m;
}

// Inverse of a unimodular integer matrix (via QQ elimination; result integral).
inline ExactMatrix invert_unimodular(const ExactMatrix& U) {
  const GroundRing Q = GroundRing::rationals();
  int n = U.rows();
  require(n == U.cols(), errc::dim, "invert: square matrix required");
  ExactMatrix aug(Q, n, 2 * n);
  for (int r = 0; r < n; ++r) {
    SparseVec row = U.row(r).convert_to(U.ring(), Q).shifted(2 * n, 0);
    row.set(n + r, Scalar(1));
    aug.set_row(r, std::move(row));
  }
  Echelon e = row_reduce(aug);
  require(e.rank == n, errc::validate, "invert: matrix is singular");
  ExactMatrix inv(U.ring(), n, n);
  for (int i = 0; i < n; ++i) {
    int prow = e.pivot_row_of[i];
    for (int c = 0; c < n; ++c) {
      Scalar v = e.reduced.row(prow).get(n + c);
      if (v != 0) {
        require(denominator(v) == 1, errc::validate, "invert: non-integral inverse");
        inv.set_entry(i, c, v);
      }
    }
  }
  return inv;
}

// Quotient of a based module by the span of relation vectors. Over a field
// the quotient basis is the set of non-pivot original basis elements (their
// labels survive); over ZZ the free part is computed via Smith normal form
// and torsion invariant factors are reported alongside.
struct QuotientResult {
  BasedModule quotient;
  ExactMatrix projection;  // quot_rank x orig_rank, surjective
  ExactMatrix section;     // orig_rank x quot_rank, projection*section = id
  std::vector<Int> torsion;
};

inline QuotientResult quotient_by_relations(const BasedModule& mod,
                                            const std::vector<SparseVec>& relations,
                                            const std::string& label_prefix = "q") {
  const GroundRing& R = mod.ring;
  const int n = mod.rank();
  QuotientResult out;
  for (auto& r : relations)
    require(r.dim() == n, errc::dim, "relation dimension mismatch");

  if (R.is_field()) {
    Echelon e = row_reduce(matrix_from_rows(R, relations, n));
    std::vector<int> free_cols;
    for (int c = 0; c < n; ++c)
      if (e.pivot_row_of[c] < 0) free_cols.push_back(c);
    int q = static_cast<int>(free_cols.size());
    std::vector<std::string> labels;
    for (int c : free_cols) labels.push_back(mod.labels[c]);
    out.quotient = BasedModule::with_labels(R, std::move(labels));
    out.projection = ExactMatrix(R, q, n);
    out.section = ExactMatrix(R, n, q);
    for (int k = 0; k < q; ++k) {
      out.projection.set_entry(k, free_cols[k], Scalar(1));
      out.section.set_entry(free_cols[k], k, Scalar(1));
    }
    for (int i = 0; i < e.rank; ++i) {
      int p = e.pivot_cols[i];
      // e_p ~ -sum_{free f} coeff * e_f
      for (int k = 0; k < q; ++k) {
        Scalar coef = e.reduced.row(i).get(free_cols[k]);
        if (coef != 0) out.projection.set_entry(k, p, R.neg(coef));
      }
    }
    return out;
  }

  // ZZ: quotient of the lattice by the relation sublattice
  ExactMatrix C = matrix_from_cols(R, relations, n);
  if (C.cols() == 0) {
    out.quotient = BasedModule::with_labels(R, mod.labels);
    out.projection = ExactMatrix::identity(R, n);
    out.section = ExactMatrix::identity(R, n);
    return out;
  }
  SmithResult s = smith_normal_form(C);
  int r = static_cast<int>(s.invariant_factors.size());
  for (auto& d : s.invariant_factors)
    if (d != 1) out.torsion.push_back(d);
  int q = n - r;
  out.quotient = BasedModule::free(R, q, label_prefix);
  out.projection = ExactMatrix(R, q, n);
  for (int k = 0; k < q; ++k) out.projection.set_row(k, s.U.row(r + k));
  ExactMatrix uinv = invert_unimodular(s.U);
  out.section = ExactMatrix(R, n, q);
  for (int c = 0; c < q; ++c)
    for (int i = 0; i < n; ++i) {
      Scalar v = uinv.entry(i, r + c);
      if (v != 0) out.section.set_entry(i, c, v);
    }
  return out;
}

// Simultaneous coinvariants of a based module under a list of invertible
// actions: quotient by the span of sigma(v) - v over all generators sigma and
// basis vectors v. Pure permutation actions take an orbit fast path that is
// valid over every ring (quotient basis = minimal orbit representatives).
inline QuotientResult coinvariants(const BasedModule& mod,
                                   const std::vector<ExactMatrix>& actions) {
  const GroundRing& R = mod.ring;
  const int n = mod.rank();
  for (auto& a : actions)
    require(a.rows() == n && a.cols() == n, errc::dim,
            "coinvariants: action size mismatch");

  bool all_perm = true;
  for (auto& a : actions)
    if (!a.is_permutation()) {
      all_perm = false;
      break;
    }

  if (all_perm) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto unite = [&](int a, int b) {
      a = find(a);
      b = find(b);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);  // keep min as rep
    };
    for (auto& act : actions) {
      ExactMatrix t = act.transpose();  // row i of t: image coords of e_i
      for (int i = 0; i < n; ++i) unite(i, t.row(i).entries()[0].first);
    }
    std::vector<int> reps;
    std::vector<int> rep_index(n, -1);
    for (int i = 0; i < n; ++i)
      if (find(i) == i) {
        rep_index[i] = static_cast<int>(reps.size());
        reps.push_back(i);
      }
    QuotientResult out;
    std::vector<std::string> labels;
    for (int r : reps) labels.push_back(mod.labels[r]);
    out.quotient = BasedModule::with_labels(R, std::move(labels));
    out.projection = ExactMatrix(R, static_cast<int>(reps.size()), n);
    out.section = ExactMatrix(R, n, static_cast<int>(reps.size()));
    for (int i = 0; i < n; ++i) out.projection.set_entry(rep_index[find(i)], i, Scalar(1));
    for (int k = 0; k < static_cast<int>(reps.size()); ++k)
      out.section.set_entry(reps[k], k, Scalar(1));
    return out;
  }

  std::vector<SparseVec> relations;
  relations.reserve(actions.size() * n);
  for (auto& act : actions) {
    ExactMatrix t = act.transpose();
    for (int i = 0; i < n; ++i) {
      SparseVec rel = t.row(i);  // sigma(e_i)
      rel.add_to(R, i, R.from_long(-1));
      if (!rel.is_zero()) relations.push_back(std::move(rel));
    }
  }
  return quotient_by_relations(mod, relations, "c");
}

}  // namespace oforge
