#pragma once

#include <map>
#include <vector>

#include "operad_forge/algebra.hpp"

namespace oforge {

// Straightening rewriting system for a bracket table on ordered generators:
//   x_b (x) x_a  ->  x_a (x) x_b + t [x_b, x_a]   for b > a.
// Normal forms are nondecreasing words. The result is graded by the number
// of bracket substitutions (the t-power); summing all layers evaluates at
// t = 1, the layer-k part is the k-th deformation correction.
class RewritingSystem {
 public:
  using Word = std::vector<int>;                 // generator indices, 0-based
  using LinComb = std::map<Word, Scalar>;        // normal words -> coefficients
  using Layers = std::vector<LinComb>;           // index = t-power
  using Memo = std::map<Word, Layers>;

  RewritingSystem(const LieAlgebraData& d) : ring_(d.g.ring), gens_(d.g), br_(d.bracket) {}

  const GroundRing& ring() const { return ring_; }
  const BasedModule& generators() const { return gens_; }

  static bool is_nondecreasing(const Word& w) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i] > w[i + 1]) return false;
    return true;
  }

  // rewrite at the leftmost descent; deterministic and memoized
  const Layers& straighten(const Word& w, Memo& memo) const {
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    Layers out;
    int pos = -1;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i] > w[i + 1]) {
        pos = static_cast<int>(i);
        break;
      }
    if (pos < 0) {
      out.resize(1);
      out[0][w] = Scalar(1);
    } else {
      Word swapped = w;
      std::swap(swapped[pos], swapped[pos + 1]);
      accumulate(out, straighten(swapped, memo), 0, Scalar(1));
      const SparseVec& br = br_[w[pos]][w[pos + 1]];
      for (auto& [k, c] : br.entries()) {
        Word shorter;
        shorter.reserve(w.size() - 1);
        shorter.insert(shorter.end(), w.begin(), w.begin() + pos);
        shorter.push_back(k);
        shorter.insert(shorter.end(), w.begin() + pos + 2, w.end());
        accumulate(out, straighten(shorter, memo), 1, c);
      }
    }
    auto [it2, _] = memo.emplace(w, std::move(out));
    return it2->second;
  }

  // full normal form at t = 1 (sum of all layers)
  LinComb normal_form(const Word& w, Memo& memo) const {
    LinComb out;
    for (auto& layer : straighten(w, memo))
      for (auto& [nw, c] : layer) add_term(out, nw, c);
    return out;
  }

  // the two straightenings of x_c x_b x_a (c > b > a): resolving the left
  // descent first versus the right descent first; equal iff the overlap
  // ambiguity resolves
  std::pair<LinComb, LinComb> resolve_overlap(int c, int b, int a, Memo& memo) const {
    require(c > b && b > a, errc::validate, "overlap needs c > b > a");
    // left first: (x_c x_b) x_a -> x_b x_c x_a + [x_c,x_b] x_a
    LinComb left;
    {
      Word w1 = {b, c, a};
      for (auto& [nw, coef] : normal_form(w1, memo)) add_term(left, nw, coef);
      for (auto& [k, coef] : br_[c][b].entries()) {
        Word w2 = {k, a};
        for (auto& [nw, coef2] : normal_form(w2, memo))
          add_term(left, nw, ring_.mul(coef, coef2));
      }
    }
    // right first: x_c (x_b x_a) -> x_c x_a x_b + x_c [x_b,x_a]
    LinComb right;
    {
      Word w1 = {c, a, b};
      for (auto& [nw, coef] : normal_form(w1, memo)) add_term(right, nw, coef);
      for (auto& [k, coef] : br_[b][a].entries()) {
        Word w2 = {c, k};
        for (auto& [nw, coef2] : normal_form(w2, memo))
          add_term(right, nw, ring_.mul(coef, coef2));
      }
    }
    return {left, right};
  }

  void add_term(LinComb& acc, const Word& w, const Scalar& c) const {
    if (c == 0) return;
    auto [it, inserted] = acc.emplace(w, c);
    if (!inserted) {
      it->second = ring_.add(it->second, c);
      if (it->second == 0) acc.erase(it);
    }
  }

 private:
  void accumulate(Layers& acc, const Layers& src, int shift, const Scalar& c) const {
    if (acc.size() < src.size() + shift) acc.resize(src.size() + shift);
    for (std::size_t k = 0; k < src.size(); ++k)
      for (auto& [w, v] : src[k]) add_term(acc[k + shift], w, ring_.mul(c, v));
  }

  GroundRing ring_;
  BasedModule gens_;
  std::vector<std::vector<SparseVec>> br_;
};

// Nondecreasing words over r generators with length <= D, in (length, lex)
// order: the PBW monomial basis of the truncated enveloping algebra.
inline std::vector<RewritingSystem::Word> pbw_words(int r, int D) {
  std::vector<RewritingSystem::Word> out;
  out.push_back({});
  std::vector<RewritingSystem::Word> prev = {{}};
  for (int len = 1; len <= D; ++len) {
    std::vector<RewritingSystem::Word> cur;
    for (auto& w : prev)
      for (int g = w.empty() ? 0 : w.back(); g < r; ++g) {
        RewritingSystem::Word nw = w;
        nw.push_back(g);
        cur.push_back(nw);
      }
    for (auto& w : cur) out.push_back(w);
    prev = std::move(cur);
  }
  return out;
}

inline std::string word_label(const BasedModule& gens, const RewritingSystem::Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ".";
    s += gens.labels[w[i]];
  }
  return s;
}

}  // namespace oforge
