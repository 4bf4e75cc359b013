#pragma once

#include <array>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "operad_forge/based_module.hpp"
#include "operad_forge/perm.hpp"

namespace oforge {

enum class OperadKind { com, ass, lie, custom };

inline std::string operad_kind_name(OperadKind k) {
  switch (k) {
    case OperadKind::com: return "com";
    case OperadKind::ass: return "ass";
    case OperadKind::lie: return "lie";
    case OperadKind::custom: return "custom";
  }
  return "?";
}

struct OperadElement {
  int arity = 1;
  SparseVec coords;
};

// Finite-arity truncation of a symmetric operad as explicit linear-algebra
// data: per-arity based modules, adjacent-transposition actions, the unit in
// O(1), and partial-composition tables for every (m, i, n) with m+n-1 <= N.
class FinOperad {
 public:
  GroundRing ring;
  int max_arity = 1;
  OperadKind kind = OperadKind::custom;
  bool unital = false;

  std::vector<BasedModule> spaces;             // [1..N]; [0] unused
  SparseVec unit;                              // element of O(1)
  std::vector<std::vector<ExactMatrix>> sym;   // sym[n][k-1]: action of s_k on O(n)
  std::map<std::array<int, 3>, std::vector<std::vector<SparseVec>>> comp;
  std::vector<std::vector<ExactMatrix>> plug;  // plug[n][s-1]: O(n) -> O(n-1); unital only

  // basis metadata consumed by algebra evaluators
  std::vector<WordIndex> words;                          // ass: words[n]
  std::vector<std::vector<std::vector<int>>> lie_words;  // lie: basis -> left-normed word

  int dim(int n) const {
    require(1 <= n && n <= max_arity, errc::arity,
            "arity " + std::to_string(n) + " out of range");
    return spaces[n].rank();
  }
  const BasedModule& space(int n) const {
    require(1 <= n && n <= max_arity, errc::arity,
            "arity " + std::to_string(n) + " out of range");
    return spaces[n];
  }

  OperadElement basis_element(int n, int k) const {
    return {n, SparseVec::unit(dim(n), k)};
  }
  OperadElement unit_element() const { return {1, unit}; }

  const std::vector<std::vector<SparseVec>>& comp_table(int m, int i, int n) const {
    auto it = comp.find({m, i, n});
    require(it != comp.end(), errc::arity,
            "no composition table (" + std::to_string(m) + "," + std::to_string(i) +
                "," + std::to_string(n) + ")");
    return it->second;
  }

  // Action matrix of an arbitrary permutation, composed from the stored
  // adjacent-transposition generators.
  ExactMatrix action(int n, const Perm& sigma) const {
    require(static_cast<int>(sigma.size()) == n, errc::dim, "action: size mismatch");
    ExactMatrix m = ExactMatrix::identity(ring, dim(n));
    for (int k : perm_adjacent_factorization(sigma)) m = m.multiply(sym[n][k - 1]);
    return m;
  }

  SparseVec compose_basis(int m, int i, int n, int a, int b) const {
    return comp_table(m, i, n)[a][b];
  }

  OperadElement compose(const OperadElement& f, int i, const OperadElement& g) const {
    require(1 <= i && i <= f.arity, errc::arity, "composition slot out of range");
    require(f.arity + g.arity - 1 <= max_arity, errc::arity,
            "composition exceeds operad truncation");
    const auto& table = comp_table(f.arity, i, g.arity);
    SparseVec out(dim(f.arity + g.arity - 1));
    for (auto& [a, ca] : f.coords.entries())
      for (auto& [b, cb] : g.coords.entries())
        out.axpy(ring, ring.mul(ca, cb), table[a][b]);
    return {f.arity + g.arity - 1, out};
  }

  // Full composition omega o (g_1, ..., g_k), derived from partial
  // compositions applied right-to-left so earlier slots stay put.
  OperadElement compose_full(const OperadElement& omega,
                             const std::vector<OperadElement>& gs) const {
    require(static_cast<int>(gs.size()) == omega.arity, errc::arity,
            "compose_full: argument count mismatch");
    OperadElement acc = omega;
    for (int i = omega.arity; i >= 1; --i) acc = compose(acc, i, gs[i - 1]);
    return acc;
  }

  bool has_plug() const { return !plug.empty(); }
  const ExactMatrix& plug_matrix(int n, int s) const {
    require(has_plug(), errc::operad, "operad has no unit-plug maps");
    require(2 <= n && n <= max_arity && 1 <= s && s <= n, errc::arity,
            "plug slot out of range");
    return plug[n][s - 1];
  }
};

namespace detail {

inline std::string word_label(const Perm& w) {
  std::string s = "w";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(w[i]);
  }
  return s;
}

// Commutator expansion of a left-normed bracket word into the group algebra
// of words: [[...[x_{w1}, x_{w2}], ...], x_{wk}].
inline std::map<std::vector<int>, long> expand_left_normed(const std::vector<int>& w) {
  std::map<std::vector<int>, long> acc;
  acc[{w[0]}] = 1;
  for (std::size_t k = 1; k < w.size(); ++k) {
    std::map<std::vector<int>, long> next;
    for (auto& [seq, c] : acc) {
      std::vector<int> left = seq;
      left.push_back(w[k]);
      next[left] += c;
      std::vector<int> right;
      right.push_back(w[k]);
      right.insert(right.end(), seq.begin(), seq.end());
      next[right] -= c;
    }
    acc.clear();
    for (auto& [seq, c] : next)
      if (c != 0) acc[seq] = c;
  }
  return acc;
}

}  // namespace detail

inline FinOperad build_com(bool unital, GroundRing ring, int N) {
  FinOperad op;
  op.ring = ring;
  op.max_arity = N;
  op.kind = OperadKind::com;
  op.unital = unital;
  op.spaces.resize(N + 1);
  op.sym.resize(N + 1);
  for (int n = 1; n <= N; ++n) {
    op.spaces[n] = BasedModule::with_labels(ring, {"e" + std::to_string(n)});
    for (int k = 1; k < n; ++k) op.sym[n].push_back(ExactMatrix::identity(ring, 1));
  }
  op.unit = SparseVec::unit(1, 0);
  for (int m = 1; m <= N; ++m)
    for (int n = 1; m + n - 1 <= N; ++n)
      for (int i = 1; i <= m; ++i)
        op.comp[{m, i, n}] = {{SparseVec::unit(1, 0)}};
  if (unital) {
    op.plug.resize(N + 1);
    for (int n = 2; n <= N; ++n)
      for (int s = 1; s <= n; ++s) op.plug[n].push_back(ExactMatrix::identity(ring, 1));
  }
  return op;
}

inline FinOperad build_ass(bool unital, GroundRing ring, int N) {
  FinOperad op;
  op.ring = ring;
  op.max_arity = N;
  op.kind = OperadKind::ass;
  op.unital = unital;
  op.spaces.resize(N + 1);
  op.sym.resize(N + 1);
  op.words.resize(N + 1);
  for (int n = 1; n <= N; ++n) {
    op.words[n] = WordIndex(n);
    std::vector<std::string> labels;
    for (int k = 0; k < op.words[n].size(); ++k)
      labels.push_back(detail::word_label(op.words[n].word(k)));
    op.spaces[n] = BasedModule::with_labels(ring, std::move(labels));
    for (int k = 1; k < n; ++k) {
      ExactMatrix m(ring, op.words[n].size(), op.words[n].size());
      Perm s = perm_adjacent(n, k);
      for (int b = 0; b < op.words[n].size(); ++b)
        m.set_entry(op.words[n].index(perm_compose(s, op.words[n].word(b))), b, Scalar(1));
      op.sym[n].push_back(std::move(m));
    }
  }
  op.unit = SparseVec::unit(1, 0);
  for (int m = 1; m <= N; ++m)
    for (int n = 1; m + n - 1 <= N; ++n)
      for (int i = 1; i <= m; ++i) {
        std::vector<std::vector<SparseVec>> table(
            op.words[m].size(), std::vector<SparseVec>(op.words[n].size()));
        for (int a = 0; a < op.words[m].size(); ++a)
          for (int b = 0; b < op.words[n].size(); ++b) {
            Perm w = word_substitute(op.words[m].word(a), i, op.words[n].word(b));
            table[a][b] =
                SparseVec::unit(op.words[m + n - 1].size(), op.words[m + n - 1].index(w));
          }
        op.comp[{m, i, n}] = std::move(table);
      }
  if (unital) {
    op.plug.resize(N + 1);
    for (int n = 2; n <= N; ++n)
      for (int s = 1; s <= n; ++s) {
        ExactMatrix m(ring, op.words[n - 1].size(), op.words[n].size());
        for (int b = 0; b < op.words[n].size(); ++b) {
          Perm w = op.words[n].word(b);
          Perm shorter;
          for (int letter : w) {
            if (letter == s) continue;
            shorter.push_back(letter > s ? letter - 1 : letter);
          }
          m.set_entry(op.words[n - 1].index(shorter), b, Scalar(1));
        }
        op.plug[n].push_back(std::move(m));
      }
  }
  return op;
}

// The Lie operad realized as the span of commutator expansions of left-normed
// bracket words inside the associative operad, with compositions and
// symmetric actions re-expressed in that basis.
inline FinOperad build_lie(GroundRing ring, int N) {
  FinOperad ass = build_ass(false, ring, N);
  FinOperad op;
  op.ring = ring;
  op.max_arity = N;
  op.kind = OperadKind::lie;
  op.unital = false;
  op.spaces.resize(N + 1);
  op.sym.resize(N + 1);
  op.lie_words.resize(N + 1);

  // per arity: basis words, embedding E into ass(n), left inverse L (L*E = id)
  std::vector<ExactMatrix> embed(N + 1), linv(N + 1);
  const GroundRing field =
      ring.kind == RingKind::integers ? GroundRing::rationals() : ring;

  for (int n = 1; n <= N; ++n) {
    std::vector<std::vector<int>> basis_words;
    if (n == 1) {
      basis_words.push_back({1});
    } else {
      std::vector<int> rest;
      for (int t = 2; t <= n; ++t) rest.push_back(t);
      std::vector<int> perm = rest;
      do {
        std::vector<int> w = {1};
        w.insert(w.end(), perm.begin(), perm.end());
        basis_words.push_back(w);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    op.lie_words[n] = basis_words;
    std::vector<std::string> labels;
    for (auto& w : basis_words) {
      std::string s = "l";
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += ".";
        s += std::to_string(w[i]);
      }
      labels.push_back(s);
    }
    op.spaces[n] = BasedModule::with_labels(ring, std::move(labels));

    const int lie_dim = static_cast<int>(basis_words.size());
    const int ass_dim = ass.dim(n);
    ExactMatrix E(ring, ass_dim, lie_dim);
    for (int b = 0; b < lie_dim; ++b)
      for (auto& [seq, c] : detail::expand_left_normed(basis_words[b]))
        E.set_entry(ass.words[n].index(seq), b, ring.from_long(c));
    embed[n] = E;

    // left inverse from the reduced form of [E | I]
    ExactMatrix Ef = ring.kind == RingKind::integers ? E.convert_to(field) : E;
    ExactMatrix aug(field, ass_dim, lie_dim + ass_dim);
    for (int r = 0; r < ass_dim; ++r) {
      SparseVec row = Ef.row(r).shifted(lie_dim + ass_dim, 0);
      row.set(lie_dim + r, Scalar(1));
      aug.set_row(r, std::move(row));
    }
    Echelon e = row_reduce(aug);
    for (int c = 0; c < lie_dim; ++c)
      require(e.pivot_row_of[c] >= 0, errc::ring,
              "lie basis re-expression failed over " + ring.name() + " at arity " +
                  std::to_string(n));
    ExactMatrix L(field, lie_dim, ass_dim);
    for (int c = 0; c < lie_dim; ++c) {
      const SparseVec& row = e.reduced.row(e.pivot_row_of[c]);
      for (auto& [j, v] : row.entries())
        if (j >= lie_dim) L.set_entry(c, j - lie_dim, v);
    }
    linv[n] = std::move(L);
  }
  op.unit = SparseVec::unit(1, 0);

  auto reexpress = [&](int n, const SparseVec& ass_vec) {
    SparseVec input = ring.kind == RingKind::integers ? ass_vec.convert_to(ring, field)
                                                      : ass_vec;
    SparseVec x = linv[n].apply(input);
    SparseVec x_ring(x.dim());
    for (auto& [i, v] : x.entries()) {
      if (ring.kind == RingKind::integers)
        require(denominator(v) == 1, errc::ring,
                "lie re-expression not integral at arity " + std::to_string(n));
      x_ring.set(i, ring.normalize(v));
    }
    // exactness: the result must reproduce the vector, else it was off-span
    SparseVec back = embed[n].apply(x_ring);
    require(back == ass_vec, errc::ring,
            "lie composition left the commutator span at arity " + std::to_string(n));
    return x_ring;
  };

  for (int m = 1; m <= N; ++m)
    for (int n = 1; m + n - 1 <= N; ++n)
      for (int i = 1; i <= m; ++i) {
        const int dm = op.dim(m), dn = op.dim(n);
        std::vector<std::vector<SparseVec>> table(dm, std::vector<SparseVec>(dn));
        const auto& ass_table = ass.comp_table(m, i, n);
        ExactMatrix em_t = embed[m].transpose(), en_t = embed[n].transpose();
        for (int a = 0; a < dm; ++a) {
          const SparseVec& fa = em_t.row(a);
          for (int b = 0; b < dn; ++b) {
            const SparseVec& gb = en_t.row(b);
            SparseVec prod(ass.dim(m + n - 1));
            for (auto& [wa, ca] : fa.entries())
              for (auto& [wb, cb] : gb.entries())
                prod.axpy(ring, ring.mul(ca, cb), ass_table[wa][wb]);
            table[a][b] = reexpress(m + n - 1, prod);
          }
        }
        op.comp[{m, i, n}] = std::move(table);
      }

  for (int n = 1; n <= N; ++n) {
    ExactMatrix en_t = embed[n].transpose();
    for (int k = 1; k < n; ++k) {
      // action on the embedded span, re-expressed
      const ExactMatrix& P = ass.sym[n][k - 1];
      ExactMatrix m(ring, op.dim(n), op.dim(n));
      for (int b = 0; b < op.dim(n); ++b) {
        SparseVec image = reexpress(n, P.apply(en_t.row(b)));
        for (auto& [i, v] : image.entries()) m.set_entry(i, b, v);
      }
      op.sym[n].push_back(std::move(m));
    }
  }
  return op;
}

inline FinOperad build_standard(OperadKind kind, bool unital, GroundRing ring, int N) {
  require(N >= 1, errc::arity, "max arity must be >= 1");
  switch (kind) {
    case OperadKind::com: return build_com(unital, ring, N);
    case OperadKind::ass: return build_ass(unital, ring, N);
    case OperadKind::lie:
      require(!unital, errc::validate, "lie operad has no unital variant");
      return build_lie(ring, N);
    case OperadKind::custom: break;
  }
  fail(errc::operad, "build_standard: unsupported kind");
}

inline OperadElement partial_compose(const FinOperad& op, const OperadElement& f, int i,
                                     const OperadElement& g) {
  return op.compose(f, i, g);
}

struct AxiomReport {
  bool unit_ok = true;
  bool assoc_ok = true;
  bool equiv_ok = true;
  std::vector<std::string> witnesses;
  bool pass() const { return unit_ok && assoc_ok && equiv_ok; }
};

// Exhaustive verification of unit, compatibility and equivariance axioms on
// basis elements up to the operad truncation.
inline AxiomReport check_axioms(const FinOperad& op) {
  AxiomReport rep;
  const int N = op.max_arity;
  auto note = [&](bool& flag, const std::string& msg) {
    flag = false;
    if (rep.witnesses.size() < 32) rep.witnesses.push_back(msg);
  };

  // unit laws
  for (int n = 1; n <= N; ++n)
    for (int b = 0; b < op.dim(n); ++b) {
      OperadElement f = op.basis_element(n, b);
      OperadElement left = op.compose(op.unit_element(), 1, f);
      if (!(left.coords == f.coords))
        note(rep.unit_ok, "unit o_1 f != f at arity " + std::to_string(n) + " basis " +
                              std::to_string(b));
      for (int i = 1; i <= n; ++i) {
        OperadElement right = op.compose(f, i, op.unit_element());
        if (!(right.coords == f.coords))
          note(rep.unit_ok, "f o_" + std::to_string(i) + " unit != f at arity " +
                                std::to_string(n) + " basis " + std::to_string(b));
      }
    }

  // compatibility of double compositions
  for (int a = 1; a <= N; ++a)
    for (int b = 1; a + b - 1 <= N; ++b)
      for (int c = 1; a + b + c - 2 <= N; ++c)
        for (int fa = 0; fa < op.dim(a); ++fa)
          for (int gb = 0; gb < op.dim(b); ++gb)
            for (int hc = 0; hc < op.dim(c); ++hc) {
              OperadElement f = op.basis_element(a, fa);
              OperadElement g = op.basis_element(b, gb);
              OperadElement h = op.basis_element(c, hc);
              for (int i = 1; i <= a; ++i) {
                OperadElement fg = op.compose(f, i, g);
                for (int j = 1; j <= b; ++j) {
                  OperadElement lhs = op.compose(fg, i + j - 1, h);
                  OperadElement rhs = op.compose(f, i, op.compose(g, j, h));
                  if (!(lhs.coords == rhs.coords))
                    note(rep.assoc_ok,
                         "nested mismatch arities (" + std::to_string(a) + "," +
                             std::to_string(b) + "," + std::to_string(c) + ") slots (" +
                             std::to_string(i) + "," + std::to_string(j) + ") basis (" +
                             std::to_string(fa) + "," + std::to_string(gb) + "," +
                             std::to_string(hc) + ")");
                }
                for (int k = i + 1; k <= a; ++k) {
                  OperadElement lhs = op.compose(fg, k + b - 1, h);
                  OperadElement rhs = op.compose(op.compose(f, k, h), i, g);
                  if (!(lhs.coords == rhs.coords))
                    note(rep.assoc_ok,
                         "disjoint mismatch arities (" + std::to_string(a) + "," +
                             std::to_string(b) + "," + std::to_string(c) + ") slots (" +
                             std::to_string(i) + "," + std::to_string(k) + ") basis (" +
                             std::to_string(fa) + "," + std::to_string(gb) + "," +
                             std::to_string(hc) + ")");
                }
              }
            }

  // equivariance against the generating transpositions
  for (int m = 1; m <= N; ++m)
    for (int n = 1; m + n - 1 <= N; ++n)
      for (int i = 1; i <= m; ++i)
        for (int fa = 0; fa < op.dim(m); ++fa)
          for (int gb = 0; gb < op.dim(n); ++gb) {
            OperadElement f = op.basis_element(m, fa);
            OperadElement g = op.basis_element(n, gb);
            OperadElement fg = op.compose(f, i, g);
            for (int k = 1; k < m; ++k) {
              Perm sigma = perm_adjacent(m, k);
              int j = perm_inverse(sigma)[i - 1];
              OperadElement sf{m, op.sym[m][k - 1].apply(f.coords)};
              OperadElement lhs = op.compose(sf, i, g);
              Perm rho = perm_block_outer(sigma, i, n);
              SparseVec rhs = op.action(m + n - 1, rho).apply(op.compose(f, j, g).coords);
              if (!(lhs.coords == rhs))
                note(rep.equiv_ok, "outer equivariance mismatch (" + std::to_string(m) +
                                       "," + std::to_string(i) + "," + std::to_string(n) +
                                       ") s_" + std::to_string(k) + " basis (" +
                                       std::to_string(fa) + "," + std::to_string(gb) + ")");
            }
            for (int k = 1; k < n; ++k) {
              Perm tau = perm_adjacent(n, k);
              OperadElement tg{n, op.sym[n][k - 1].apply(g.coords)};
              OperadElement lhs = op.compose(f, i, tg);
              Perm rho = perm_block_inner(m, i, tau);
              SparseVec rhs = op.action(m + n - 1, rho).apply(fg.coords);
              if (!(lhs.coords == rhs))
                note(rep.equiv_ok, "inner equivariance mismatch (" + std::to_string(m) +
                                       "," + std::to_string(i) + "," + std::to_string(n) +
                                       ") s_" + std::to_string(k) + " basis (" +
                                       std::to_string(fa) + "," + std::to_string(gb) + ")");
            }
          }
  return rep;
}

// Entrywise base change along the canonical ring map; axioms are re-checked.
inline FinOperad base_change(const FinOperad& op, const GroundRing& target) {
  require(op.ring.has_canonical_map_to(target), errc::ringmap,
          "no canonical map " + op.ring.name() + " -> " + target.name());
  FinOperad out = op;
  out.ring = target;
  for (int n = 1; n <= op.max_arity; ++n) {
    out.spaces[n].ring = target;
    for (auto& m : out.sym[n]) m = m.convert_to(target);
  }
  out.unit = op.unit.convert_to(op.ring, target);
  for (auto& [key, table] : out.comp)
    for (auto& row : table)
      for (auto& v : row) v = v.convert_to(op.ring, target);
  if (!out.plug.empty())
    for (auto& per_arity : out.plug)
      for (auto& m : per_arity) m = m.convert_to(target);
  AxiomReport rep = check_axioms(out);
  require(rep.pass(), errc::validate,
          "base change broke operad axioms: " +
              (rep.witnesses.empty() ? std::string("?") : rep.witnesses.front()));
  return out;
}

}  // namespace oforge
