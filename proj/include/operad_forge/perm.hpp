#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "operad_forge/errors.hpp"

namespace oforge {

// Permutations of {1..n} stored 1-based: p[i-1] = image of i.
using Perm = std::vector<int>;

inline Perm perm_identity(int n) {
  Perm p(n);
  for (int i = 0; i < n; ++i) p[i] = i + 1;
  return p;
}

// (a o b)(i) = a(b(i))
inline Perm perm_compose(const Perm& a, const Perm& b) {
  Perm r(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = a[b[i] - 1];
  return r;
}

inline Perm perm_inverse(const Perm& p) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[p[i] - 1] = static_cast<int>(i) + 1;
  return r;
}

// Adjacent transposition s_k swapping k and k+1 (1 <= k <= n-1).
inline Perm perm_adjacent(int n, int k) {
  Perm p = perm_identity(n);
  std::swap(p[k - 1], p[k]);
  return p;
}

// Writes p as a product of adjacent transpositions: p = s_{k1} o s_{k2} o ...
// (bubble sort; deterministic).
inline std::vector<int> perm_adjacent_factorization(Perm p) {
  std::vector<int> ks;
  const int n = static_cast<int>(p.size());
  for (;;) {
    bool swapped = false;
    for (int i = 0; i + 1 < n; ++i) {
      if (p[i] > p[i + 1]) {
        // s_{i+1} o p' = p  =>  prepend factor
        std::swap(p[i], p[i + 1]);
        ks.push_back(i + 1);
        swapped = true;
      }
    }
    if (!swapped) break;
  }
  std::reverse(ks.begin(), ks.end());
  return ks;
}

inline std::vector<Perm> all_permutations(int n) {
  Perm p = perm_identity(n);
  std::vector<Perm> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline std::string perm_to_string(const Perm& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(p[i]);
  }
  return s;
}

// The permutation of {1..m+n-1} that relocates the inner block when the outer
// operation's inputs are relabeled by sigma in S_m and the block sits at slot
// i: with j = sigma^{-1}(i),
//   (sigma * f) o_i g  ==  rho * (f o_j g),   rho = block_outer(sigma, i, n).
inline Perm perm_block_outer(const Perm& sigma, int i, int n) {
  const int m = static_cast<int>(sigma.size());
  Perm sinv = perm_inverse(sigma);
  const int j = sinv[i - 1];
  auto phi = [&](int x) { return x < i ? x : x + n - 1; };
  Perm rho(m + n - 1);
  for (int k = 1; k < j; ++k) rho[k - 1] = phi(sigma[k - 1]);
  for (int t = 0; t < n; ++t) rho[j - 1 + t] = i + t;
  for (int k = j + 1; k <= m; ++k) rho[k + n - 2] = phi(sigma[k - 1]);
  return rho;
}

// Embedding of tau in S_n into S_{m+n-1} acting on the block at slot i:
//   f o_i (tau * g)  ==  rho * (f o_i g),   rho = block_inner(m, i, tau).
inline Perm perm_block_inner(int m, int i, const Perm& tau) {
  const int n = static_cast<int>(tau.size());
  Perm rho = perm_identity(m + n - 1);
  for (int t = 1; t <= n; ++t) rho[i - 1 + t - 1] = i - 1 + tau[t - 1];
  return rho;
}

// Word substitution for the associative operad: splice word v (length n) into
// slot i of word u (length m), both given as permutations listing the slots in
// multiplication order.
inline Perm word_substitute(const Perm& u, int i, const Perm& v) {
  const int m = static_cast<int>(u.size());
  const int n = static_cast<int>(v.size());
  require(1 <= i && i <= m, errc::arity, "word_substitute: slot out of range");
  Perm w;
  w.reserve(m + n - 1);
  for (int k = 0; k < m; ++k) {
    int letter = u[k];
    if (letter < i) {
      w.push_back(letter);
    } else if (letter > i) {
      w.push_back(letter + n - 1);
    } else {
      for (int t = 0; t < n; ++t) w.push_back(v[t] + i - 1);
    }
  }
  return w;
}

// Index lookup table for words of a fixed length, in std::next_permutation
// (lexicographic) order.
class WordIndex {
 public:
  WordIndex() = default;
  explicit WordIndex(int n) : words_(all_permutations(n)) {
    for (int k = 0; k < static_cast<int>(words_.size()); ++k) index_[words_[k]] = k;
  }
  int size() const { return static_cast<int>(words_.size()); }
  const Perm& word(int k) const { return words_[k]; }
  int index(const Perm& w) const {
    auto it = index_.find(w);
    require(it != index_.end(), errc::validate, "unknown word");
    return it->second;
  }

 private:
  std::vector<Perm> words_;
  std::map<Perm, int> index_;
};

}  // namespace oforge
