#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>

#include "operad_forge/operad.hpp"

namespace oforge {

using gid = int;  // flat basis index across all degrees of an algebra

namespace detail {

// Coinvariant presentation of a free algebra: one quotient per degree, with
// tensor-index bookkeeping for V^{(x)i} (x) O(i).
struct FreeAlgebraData {
  std::shared_ptr<const FinOperad> op;
  BasedModule gens;
  int trunc = 0;
  std::map<int, QuotientResult> quots;  // degree i >= 1
  std::map<int, int> tensor_dim;
  // flat layout of the resulting algebra (ascending degree)
  std::map<int, int> offset;
  std::vector<int> degs;
  int total = 0;

  int encode(const std::vector<int>& tuple, int opidx, int opdim) const {
    int idx = 0;
    for (int t : tuple) idx = idx * gens.rank() + t;
    return idx * opdim + opidx;
  }
  std::pair<std::vector<int>, int> decode(int idx, int len, int opdim) const {
    int opidx = idx % opdim;
    idx /= opdim;
    std::vector<int> tuple(len);
    for (int k = len - 1; k >= 0; --k) {
      tuple[k] = idx % gens.rank();
      idx /= gens.rank();
    }
    return {tuple, opidx};
  }

  SparseVec section_column(int deg, int local) const {
    const QuotientResult& q = quots.at(deg);
    SparseVec col(q.section.rows());
    for (int r = 0; r < q.section.rows(); ++r) {
      Scalar c = q.section.entry(r, local);
      if (c != 0) col.set(r, c);
    }
    return col;
  }
};

SparseVec free_apply(const FreeAlgebraData& D, int arity, int omega_idx,
                     const std::vector<gid>& args);

struct BinaryTable {
  // table[(a,b)] = flat coordinates of a*b (for lie: the bracket [a,b])
  std::map<std::pair<gid, gid>, SparseVec> table;
  int flat_dim = 0;

  const SparseVec& at(gid a, gid b) const {
    auto it = table.find({a, b});
    require(it != table.end(), errc::trunc, "missing binary structure constant");
    return it->second;
  }
  SparseVec mul(const GroundRing& R, const SparseVec& x, const SparseVec& y) const {
    SparseVec out(flat_dim);
    for (auto& [a, ca] : x.entries())
      for (auto& [b, cb] : y.entries()) out.axpy(R, R.mul(ca, cb), at(a, b));
    return out;
  }
};

}  // namespace detail

// Degreewise finite-rank algebra over a FinOperad, given by structure
// constants. Elements are sparse vectors over the flat basis (all degrees
// concatenated in ascending degree order). Immutable after construction; the
// unit of a unital algebra is by convention the first degree-0 basis vector.
class GradedAlgebra {
 public:
  struct FreeInfo {
    OperadKind kind;
    bool unital = false;
    BasedModule gens;
    int trunc = 0;
    std::map<std::vector<int>, gid> monomial_gid;  // com: sorted generator tuple
    std::shared_ptr<const detail::FreeAlgebraData> data;
  };

  using Evaluator =
      std::function<SparseVec(int arity, int omega_idx, const std::vector<gid>& args)>;

  GradedAlgebra() = default;

  static GradedAlgebra make(std::shared_ptr<const FinOperad> op,
                            std::map<int, BasedModule> comps, bool unital,
                            bool augmented, Evaluator eval, std::string name) {
    GradedAlgebra a;
    a.op_ = std::move(op);
    a.comps_ = std::move(comps);
    a.unital_ = unital;
    a.augmented_ = augmented;
    a.eval_ = std::move(eval);
    a.name_ = std::move(name);
    a.index();
    if (unital) {
      require(a.comp_rank(0) >= 1, errc::validate, "unital algebra needs degree 0");
      a.unit_ = a.gid_of(0, 0);
    }
    return a;
  }

  const GroundRing& ring() const { return op_->ring; }
  const FinOperad& operad() const { return *op_; }
  std::shared_ptr<const FinOperad> operad_ptr() const { return op_; }
  const std::map<int, BasedModule>& components() const { return comps_; }
  const std::string& name() const { return name_; }
  bool unital() const { return unital_; }
  bool augmented() const { return augmented_; }
  gid unit() const {
    require(unital_, errc::validate, "algebra is not unital");
    return unit_;
  }
  int max_degree() const { return comps_.empty() ? -1 : comps_.rbegin()->first; }

  int comp_rank(int d) const {
    auto it = comps_.find(d);
    return it == comps_.end() ? 0 : it->second.rank();
  }
  const BasedModule& comp(int d) const {
    auto it = comps_.find(d);
    require(it != comps_.end(), errc::trunc, "no component in degree " + std::to_string(d));
    return it->second;
  }
  bool has_comp(int d) const { return comps_.count(d) > 0; }

  int flat_dim() const { return total_; }
  gid gid_of(int d, int i) const {
    auto it = offset_.find(d);
    require(it != offset_.end(), errc::trunc, "no component in degree " + std::to_string(d));
    return it->second + i;
  }
  int deg_of(gid g) const { return deg_[g]; }
  int idx_of(gid g) const { return g - offset_.at(deg_[g]); }
  const std::string& label(gid g) const { return comps_.at(deg_of(g)).labels[idx_of(g)]; }
  int comp_offset(int d) const { return offset_.at(d); }

  SparseVec basis_flat(gid g) const { return SparseVec::unit(total_, g); }

  SparseVec flat_from(int d, const SparseVec& comp_vec) const {
    require(comp_vec.dim() == comp_rank(d), errc::dim, "component size mismatch");
    return comp_vec.shifted(total_, offset_.at(d));
  }
  SparseVec comp_part(const SparseVec& flat, int d) const {
    SparseVec out(comp_rank(d));
    int off = offset_.at(d);
    for (auto& [i, v] : flat.entries())
      if (deg_[i] == d) out.set(i - off, v);
    return out;
  }
  bool is_homogeneous(const SparseVec& flat, int d) const {
    for (auto& [i, v] : flat.entries())
      if (deg_[i] != d) return false;
    return true;
  }

  const SparseVec& product(gid a, gid b) const {
    auto it = prod_.find(key(a, b));
    if (it != prod_.end()) return it->second;
    auto [it2, inserted] =
        prod_.emplace(key(a, b), apply_basis_raw(2, binary_index(), {a, b}));
    return it2->second;
  }
  bool product_in_range(gid a, gid b) const { return comps_.count(deg_[a] + deg_[b]) > 0; }

  SparseVec product_flat(const SparseVec& x, const SparseVec& y) const {
    SparseVec out(total_);
    for (auto& [a, ca] : x.entries())
      for (auto& [b, cb] : y.entries()) out.axpy(ring(), ring().mul(ca, cb), product(a, b));
    return out;
  }

  SparseVec apply_basis(int arity, int omega_idx, const std::vector<gid>& args) const {
    if (arity == 2 && omega_idx == binary_index() && args.size() == 2)
      return product(args[0], args[1]);
    return apply_basis_raw(arity, omega_idx, args);
  }

  SparseVec apply_elements(int arity, const SparseVec& omega,
                           const std::vector<SparseVec>& args) const {
    require(static_cast<int>(args.size()) == arity, errc::arity,
            "apply_elements: argument count mismatch");
    SparseVec out(total_);
    std::vector<gid> tuple(arity);
    std::function<void(int, const Scalar&)> rec = [&](int slot, const Scalar& coeff) {
      if (slot == arity) {
        for (auto& [w, cw] : omega.entries())
          out.axpy(ring(), ring().mul(coeff, cw), apply_basis(arity, w, tuple));
        return;
      }
      for (auto& [g, c] : args[slot].entries()) {
        tuple[slot] = g;
        rec(slot + 1, ring().mul(coeff, c));
      }
    };
    rec(0, Scalar(1));
    return out;
  }

  const std::optional<FreeInfo>& free_info() const { return free_info_; }
  void set_free_info(FreeInfo info) { free_info_ = std::move(info); }
  bool is_symmetric_algebra() const {
    return free_info_ && free_info_->kind == OperadKind::com && free_info_->unital;
  }

  // index of the canonical binary generator in O(2): a*b (ass: word (1,2))
  int binary_index() const {
    if (op_->kind == OperadKind::ass) return op_->words[2].index({1, 2});
    return 0;
  }

 private:
  std::uint64_t key(gid a, gid b) const {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }

  SparseVec apply_basis_raw(int arity, int omega_idx, const std::vector<gid>& args) const {
    int dsum = 0;
    for (gid g : args) dsum += deg_[g];
    require(comps_.count(dsum) > 0, errc::trunc,
            "action lands in degree " + std::to_string(dsum) + " beyond truncation");
    return eval_(arity, omega_idx, args);
  }

  void index() {
    total_ = 0;
    for (auto& [d, m] : comps_) {
      offset_[d] = total_;
      total_ += m.rank();
      for (int i = 0; i < m.rank(); ++i) deg_.push_back(d);
      require(m.ring == op_->ring, errc::setup, "component ring mismatch");
    }
  }

  std::shared_ptr<const FinOperad> op_;
  std::map<int, BasedModule> comps_;
  std::map<int, int> offset_;
  std::vector<int> deg_;
  int total_ = 0;
  bool unital_ = false;
  bool augmented_ = false;
  gid unit_ = -1;
  Evaluator eval_;
  std::string name_;
  mutable std::unordered_map<std::uint64_t, SparseVec> prod_;
  std::optional<FreeInfo> free_info_;
};

// ---------------------------------------------------------------------------
// evaluators
// ---------------------------------------------------------------------------

// Evaluator synthesized from binary structure constants: ass words multiply
// in word order, com folds the product, lie folds the left-normed bracket.
inline GradedAlgebra::Evaluator make_standard_evaluator(
    std::shared_ptr<const FinOperad> op, std::shared_ptr<detail::BinaryTable> bin) {
  const GroundRing R = op->ring;
  return [op, bin, R](int arity, int omega_idx, const std::vector<gid>& args) -> SparseVec {
    if (arity == 1) return SparseVec::unit(bin->flat_dim, args[0]);
    std::vector<int> order;  // argument slots in evaluation order
    switch (op->kind) {
      case OperadKind::com:
        for (int k = 0; k < arity; ++k) order.push_back(k);
        break;
      case OperadKind::ass: {
        const Perm& w = op->words[arity].word(omega_idx);
        for (int k = 0; k < arity; ++k) order.push_back(w[k] - 1);
        break;
      }
      case OperadKind::lie: {
        const std::vector<int>& w = op->lie_words[arity][omega_idx];
        for (std::size_t k = 0; k < w.size(); ++k) order.push_back(w[k] - 1);
        break;
      }
      case OperadKind::custom:
        fail(errc::operad, "standard evaluator: custom operad needs explicit tables");
    }
    SparseVec acc = SparseVec::unit(bin->flat_dim, args[order[0]]);
    for (int k = 1; k < arity; ++k)
      acc = bin->mul(R, acc, SparseVec::unit(bin->flat_dim, args[order[k]]));
    return acc;
  };
}

namespace detail {

inline SparseVec free_apply(const FreeAlgebraData& D, int arity, int omega_idx,
                            const std::vector<gid>& args) {
  const GroundRing& R = D.op->ring;
  if (arity == 1 && D.op->dim(1) == 1) return SparseVec::unit(D.total, args[0]);
  // strip unit (degree-0) arguments through the plug maps
  for (int s = 0; s < arity; ++s) {
    if (D.degs[args[s]] != 0) continue;
    require(D.op->unital && D.op->has_plug(), errc::operad,
            "degree-0 argument without unit structure");
    SparseVec plugged =
        D.op->plug_matrix(arity, s + 1).apply(SparseVec::unit(D.op->dim(arity), omega_idx));
    std::vector<gid> rest;
    for (int k = 0; k < arity; ++k)
      if (k != s) rest.push_back(args[k]);
    SparseVec out(D.total);
    for (auto& [w, c] : plugged.entries()) out.axpy(R, c, free_apply(D, arity - 1, w, rest));
    return out;
  }
  // all arguments of positive degree: lift along sections, compose, project
  int dsum = 0;
  std::vector<int> degslots(arity);
  for (int s = 0; s < arity; ++s) {
    degslots[s] = D.degs[args[s]];
    dsum += degslots[s];
  }
  require(D.quots.count(dsum) > 0, errc::trunc, "free product beyond truncation");
  std::vector<SparseVec> lifts;
  for (int s = 0; s < arity; ++s)
    lifts.push_back(D.section_column(degslots[s], args[s] - D.offset.at(degslots[s])));
  const QuotientResult& qout = D.quots.at(dsum);
  const int opdim_out = D.op->dim(dsum);
  SparseVec tensor_acc(D.tensor_dim.at(dsum));
  std::vector<int> chosen(arity);
  std::function<void(int, const Scalar&)> rec = [&](int slot, const Scalar& coeff) {
    if (slot == arity) {
      std::vector<int> full_tuple;
      std::vector<OperadElement> gs;
      for (int s = 0; s < arity; ++s) {
        auto [tuple, opidx] = D.decode(chosen[s], degslots[s], D.op->dim(degslots[s]));
        full_tuple.insert(full_tuple.end(), tuple.begin(), tuple.end());
        gs.push_back(D.op->basis_element(degslots[s], opidx));
      }
      OperadElement comp = D.op->compose_full(D.op->basis_element(arity, omega_idx), gs);
      for (auto& [w, cw] : comp.coords.entries())
        tensor_acc.add_to(R, D.encode(full_tuple, w, opdim_out), R.mul(coeff, cw));
      return;
    }
    for (auto& [ti, c] : lifts[slot].entries()) {
      chosen[slot] = ti;
      rec(slot + 1, R.mul(coeff, c));
    }
  };
  rec(0, Scalar(1));
  SparseVec projected = qout.projection.apply(tensor_acc);
  return projected.shifted(D.total, D.offset.at(dsum));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// check_algebra
// ---------------------------------------------------------------------------

struct AlgebraReport {
  bool ok = true;
  long checked = 0;
  int max_total_degree = 0;
  std::vector<std::string> witnesses;
  bool pass() const { return ok; }
};

namespace detail {

inline void for_all_tuples(const GradedAlgebra& a, int len, int max_deg,
                           const std::function<void(const std::vector<gid>&)>& fn) {
  std::vector<gid> tuple(len);
  std::function<void(int, int)> rec = [&](int slot, int budget) {
    if (slot == len) {
      fn(tuple);
      return;
    }
    for (gid g = 0; g < a.flat_dim(); ++g) {
      int d = a.deg_of(g);
      if (d > budget) continue;
      tuple[slot] = g;
      rec(slot + 1, budget - d);
    }
  };
  rec(0, max_deg);
}

}  // namespace detail

// Verifies the compatibility square between operad composition and the
// structure maps on all basis tuples with total degree <= D, plus unit laws.
inline AlgebraReport check_algebra(const GradedAlgebra& a, int max_total_degree) {
  AlgebraReport rep;
  rep.max_total_degree = max_total_degree;
  const FinOperad& op = a.operad();
  auto note = [&](const std::string& msg) {
    rep.ok = false;
    if (rep.witnesses.size() < 16) rep.witnesses.push_back(msg);
  };

  if (a.unital()) {
    for (gid x = 0; x < a.flat_dim(); ++x) {
      if (!a.product_in_range(a.unit(), x)) continue;
      SparseVec ex = a.basis_flat(x);
      if (!(a.product(a.unit(), x) == ex)) note("unit * " + a.label(x) + " mismatch");
      if (!(a.product(x, a.unit()) == ex)) note(a.label(x) + " * unit mismatch");
    }
  }

  // structure maps must be degree-additive
  for (gid x = 0; x < a.flat_dim(); ++x)
    for (gid y = 0; y < a.flat_dim(); ++y) {
      if (!a.product_in_range(x, y)) continue;
      if (a.deg_of(x) + a.deg_of(y) > max_total_degree) continue;
      if (!a.is_homogeneous(a.product(x, y), a.deg_of(x) + a.deg_of(y)))
        note("product " + a.label(x) + " * " + a.label(y) + " not degree-additive");
    }

  for (auto& [mi, table] : op.comp) {
    auto [n, i, m] = mi;
    (void)table;
    const int res_arity = n + m - 1;
    for (int w = 0; w < op.dim(n); ++w)
      for (int g = 0; g < op.dim(m); ++g) {
        OperadElement composed =
            op.compose(op.basis_element(n, w), i, op.basis_element(m, g));
        detail::for_all_tuples(
            a, res_arity, max_total_degree, [&](const std::vector<gid>& t) {
              ++rep.checked;
              SparseVec lhs(a.flat_dim());
              for (auto& [k, c] : composed.coords.entries())
                lhs.axpy(a.ring(), c, a.apply_basis(res_arity, k, t));
              std::vector<gid> inner(t.begin() + (i - 1), t.begin() + (i - 1) + m);
              SparseVec mid = a.apply_basis(m, g, inner);
              std::vector<SparseVec> outer_args;
              outer_args.reserve(n);
              for (int s = 0; s < i - 1; ++s) outer_args.push_back(a.basis_flat(t[s]));
              outer_args.push_back(mid);
              for (int s = i - 1 + m; s < res_arity; ++s)
                outer_args.push_back(a.basis_flat(t[s]));
              SparseVec rhs =
                  a.apply_elements(n, SparseVec::unit(op.dim(n), w), outer_args);
              if (!(lhs == rhs)) {
                std::string tup;
                for (gid x : t) tup += a.label(x) + " ";
                note("compatibility fails at (" + std::to_string(n) + "," +
                     std::to_string(i) + "," + std::to_string(m) +
                     ") omega=" + op.space(n).labels[w] +
                     " gamma=" + op.space(m).labels[g] + " args= " + tup);
              }
            });
      }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// free algebras
// ---------------------------------------------------------------------------

// Free O-algebra on a based module, truncated at degree D: the degree-i
// component is the simultaneous S_i-coinvariants of V^{(x)i} (x) O(i),
// multiplication is induced by operad composition, generators sit in degree
// 1, and unital operads contribute a rank-1 degree-0 component.
inline GradedAlgebra free_algebra(std::shared_ptr<const FinOperad> op,
                                  const BasedModule& v, int D) {
  require(v.ring == op->ring, errc::setup, "generator ring mismatch");
  require(D >= 1, errc::validate, "free algebra needs degree >= 1");
  require(D <= op->max_arity, errc::trunc,
          "degree " + std::to_string(D) + " exceeds operad truncation " +
              std::to_string(op->max_arity));
  const GroundRing R = op->ring;
  auto data = std::make_shared<detail::FreeAlgebraData>();
  data->op = op;
  data->gens = v;
  data->trunc = D;

  std::map<int, BasedModule> comps;
  if (op->unital) comps[0] = BasedModule::with_labels(R, {"1"});

  for (int i = 1; i <= D; ++i) {
    const int opdim = op->dim(i);
    int tdim = opdim;
    for (int k = 0; k < i; ++k) tdim *= v.rank();
    data->tensor_dim[i] = tdim;
    std::vector<std::string> tlabels(tdim);
    for (int idx = 0; idx < tdim; ++idx) {
      auto [tuple, opidx] = data->decode(idx, i, opdim);
      std::string s;
      for (std::size_t k = 0; k < tuple.size(); ++k) {
        if (k) s += ".";
        s += v.labels[tuple[k]];
      }
      if (opdim > 1 || op->kind == OperadKind::lie)
        s += "@" + op->space(i).labels[opidx];
      tlabels[idx] = s;
    }
    BasedModule tensor = BasedModule::with_labels(R, std::move(tlabels));
    std::vector<ExactMatrix> actions;
    for (int k = 1; k < i; ++k) {
      ExactMatrix act(R, tdim, tdim);
      const ExactMatrix& sym = op->sym[i][k - 1];
      for (int idx = 0; idx < tdim; ++idx) {
        auto [tuple, opidx] = data->decode(idx, i, opdim);
        std::vector<int> permuted = tuple;
        std::swap(permuted[k - 1], permuted[k]);
        for (int out = 0; out < opdim; ++out) {
          Scalar c = sym.entry(out, opidx);
          if (c != 0) act.add_entry(data->encode(permuted, out, opdim), idx, c);
        }
      }
      actions.push_back(std::move(act));
    }
    QuotientResult q = coinvariants(tensor, actions);
    comps[i] = q.quotient;
    data->quots[i] = std::move(q);
  }

  data->total = 0;
  for (auto& [d, m] : comps) {
    data->offset[d] = data->total;
    data->total += m.rank();
    for (int k = 0; k < m.rank(); ++k) data->degs.push_back(d);
  }

  auto data_c = std::static_pointer_cast<const detail::FreeAlgebraData>(data);
  GradedAlgebra::Evaluator eval = [data_c](int arity, int omega_idx,
                                           const std::vector<gid>& args) {
    return detail::free_apply(*data_c, arity, omega_idx, args);
  };

  GradedAlgebra a = GradedAlgebra::make(
      op, comps, op->unital, op->unital, eval,
      "free-" + operad_kind_name(op->kind) + "(" + std::to_string(v.rank()) + ")");
  GradedAlgebra::FreeInfo info{op->kind, op->unital, v, D, {}, data_c};
  if (op->kind == OperadKind::com) {
    for (int i = 1; i <= D; ++i) {
      const QuotientResult& q = data->quots.at(i);
      for (int k = 0; k < q.quotient.rank(); ++k) {
        for (int r2 = 0; r2 < q.section.rows(); ++r2) {
          if (q.section.entry(r2, k) != 0) {
            auto [tuple, opidx] = data->decode(r2, i, op->dim(i));
            std::sort(tuple.begin(), tuple.end());
            info.monomial_gid[tuple] = a.gid_of(i, k);
            break;
          }
        }
      }
    }
    if (op->unital) info.monomial_gid[{}] = a.gid_of(0, 0);
  }
  a.set_free_info(std::move(info));
  return a;
}

// Symmetric algebra S(g), realized as the free unital com-algebra on g.
inline GradedAlgebra symmetric_algebra(const BasedModule& g, int D) {
  auto op = std::make_shared<FinOperad>(
      build_standard(OperadKind::com, true, g.ring, std::max(D, 1)));
  return free_algebra(op, g, std::max(D, 1));
}

// i-th exterior power with its alternating-sum inclusion into g^{(x)i}.
inline std::pair<BasedModule, ExactMatrix> exterior_power(const BasedModule& g, int i) {
  require(i >= 1, errc::validate, "exterior power needs i >= 1");
  const GroundRing& R = g.ring;
  const int r = g.rank();
  int tdim = 1;
  for (int k = 0; k < i; ++k) tdim *= r;
  std::vector<std::vector<int>> combos;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == i) {
      combos.push_back(cur);
      return;
    }
    for (int t = start; t < r; ++t) {
      cur.push_back(t);
      rec(t + 1);
      cur.pop_back();
    }
  };
  rec(0);
  std::vector<std::string> labels;
  for (auto& c : combos) {
    std::string s;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k) s += "^";
      s += g.labels[c[k]];
    }
    labels.push_back(s);
  }
  ExactMatrix incl(R, tdim, static_cast<int>(combos.size()));
  for (int j = 0; j < static_cast<int>(combos.size()); ++j) {
    for (auto& sigma : all_permutations(i)) {
      int inv = 0;
      for (int x = 0; x < i; ++x)
        for (int y = x + 1; y < i; ++y)
          if (sigma[x] > sigma[y]) ++inv;
      int idx = 0;
      for (int k = 0; k < i; ++k) idx = idx * r + combos[j][sigma[k] - 1];
      incl.add_entry(idx, j, R.from_long(inv % 2 == 0 ? 1 : -1));
    }
  }
  return {BasedModule::with_labels(R, std::move(labels)), incl};
}

// ---------------------------------------------------------------------------
// Lie algebra data
// ---------------------------------------------------------------------------

struct LieAlgebraData {
  BasedModule g;
  std::vector<std::vector<SparseVec>> bracket;  // bracket[a][b] = [x_a, x_b]
  std::string name;
};

inline LieAlgebraData make_lie_data(BasedModule g,
                                    std::vector<std::vector<SparseVec>> bracket,
                                    std::string name) {
  const int r = g.rank();
  require(static_cast<int>(bracket.size()) == r, errc::dim, "bracket table size");
  for (auto& row : bracket)
    require(static_cast<int>(row.size()) == r, errc::dim, "bracket table size");
  for (int a = 0; a < r; ++a) {
    require(bracket[a][a].is_zero(), errc::antisym,
            "bracket [" + g.labels[a] + "," + g.labels[a] + "] must vanish");
    for (int b = 0; b < r; ++b) {
      SparseVec s = bracket[a][b];
      s.add(g.ring, bracket[b][a]);
      require(s.is_zero(), errc::antisym,
              "bracket not antisymmetric at (" + g.labels[a] + "," + g.labels[b] + ")");
    }
  }
  return {std::move(g), std::move(bracket), std::move(name)};
}

inline SparseVec lie_bracket_vec(const LieAlgebraData& d, const SparseVec& x,
                                 const SparseVec& y) {
  SparseVec out(d.g.rank());
  for (auto& [a, ca] : x.entries())
    for (auto& [b, cb] : y.entries())
      out.axpy(d.g.ring, d.g.ring.mul(ca, cb), d.bracket[a][b]);
  return out;
}

// J(x^y^z) = [[x,y],z] + [[y,z],x] + [[z,x],y] as a matrix Lambda^3 g -> g,
// columns indexed by strictly increasing basis triples in lex order.
inline ExactMatrix jacobiator(const LieAlgebraData& d) {
  const GroundRing& R = d.g.ring;
  const int r = d.g.rank();
  std::vector<std::array<int, 3>> triples;
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b)
      for (int c = b + 1; c < r; ++c) triples.push_back({a, b, c});
  ExactMatrix J(R, r, static_cast<int>(triples.size()));
  for (int j = 0; j < static_cast<int>(triples.size()); ++j) {
    auto [a, b, c] = triples[j];
    auto term = [&](int x, int y, int z) {
      SparseVec ex = SparseVec::unit(r, x), ey = SparseVec::unit(r, y),
                ez = SparseVec::unit(r, z);
      return lie_bracket_vec(d, lie_bracket_vec(d, ex, ey), ez);
    };
    SparseVec val = term(a, b, c);
    val.add(R, term(b, c, a));
    val.add(R, term(c, a, b));
    for (auto& [i, v] : val.entries()) J.set_entry(i, j, v);
  }
  return J;
}

inline bool jacobi_holds(const LieAlgebraData& d) { return jacobiator(d).is_zero(); }

struct ValidatedLie {
  LieAlgebraData data;
  bool jacobi = false;
};

// Validates antisymmetry (throws E_ANTISYM) and tags the data with the
// Jacobi test result; non-Jacobi brackets are accepted on purpose.
inline ValidatedLie lie_from_constants(const LieAlgebraData& d) {
  LieAlgebraData checked = make_lie_data(d.g, d.bracket, d.name);
  return {checked, jacobi_holds(checked)};
}

// g as a graded algebra over the lie operad, concentrated in degree 0.
inline GradedAlgebra lie_algebra_to_graded(const LieAlgebraData& d,
                                           std::shared_ptr<const FinOperad> lie_op) {
  require(lie_op->kind == OperadKind::lie, errc::operad, "lie operad required");
  require(lie_op->ring == d.g.ring, errc::setup, "ring mismatch");
  auto bin = std::make_shared<detail::BinaryTable>();
  bin->flat_dim = d.g.rank();
  for (int a = 0; a < d.g.rank(); ++a)
    for (int b = 0; b < d.g.rank(); ++b) bin->table[{a, b}] = d.bracket[a][b];
  std::map<int, BasedModule> comps;
  comps[0] = d.g;
  return GradedAlgebra::make(lie_op, comps, false, false,
                             make_standard_evaluator(lie_op, bin), d.name);
}

// Finite-rank algebra concentrated in degree 0, from binary structure
// constants. The unit (when unital) must be basis element 0.
inline GradedAlgebra finite_algebra(std::shared_ptr<const FinOperad> op,
                                    const BasedModule& basis,
                                    std::map<std::pair<int, int>, SparseVec> products,
                                    bool unital, std::string name) {
  auto bin = std::make_shared<detail::BinaryTable>();
  bin->flat_dim = basis.rank();
  for (int a = 0; a < basis.rank(); ++a)
    for (int b = 0; b < basis.rank(); ++b) {
      auto it = products.find({a, b});
      bin->table[{a, b}] = it == products.end() ? SparseVec(basis.rank()) : it->second;
    }
  std::map<int, BasedModule> comps;
  comps[0] = basis;
  return GradedAlgebra::make(op, comps, unital, false,
                             make_standard_evaluator(op, bin), std::move(name));
}

// k[x]/x^n as an ass-unital algebra concentrated in degree 0.
inline GradedAlgebra truncated_polynomial_algebra(std::shared_ptr<const FinOperad> ass_op,
                                                  int n) {
  require(n >= 1, errc::validate, "truncated polynomial algebra needs n >= 1");
  const GroundRing& R = ass_op->ring;
  std::vector<std::string> labels = {"1"};
  for (int k = 1; k < n; ++k) labels.push_back(k == 1 ? "x" : "x^" + std::to_string(k));
  BasedModule basis = BasedModule::with_labels(R, labels);
  std::map<std::pair<int, int>, SparseVec> prod;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      SparseVec v(n);
      if (a + b < n) v.set(a + b, Scalar(1));
      prod[{a, b}] = v;
    }
  return finite_algebra(ass_op, basis, std::move(prod), true,
                        "k[x]/x^" + std::to_string(n));
}

// 2x2 upper triangular matrices in the basis (1, E11, E12): a small
// noncommutative unital associative algebra.
inline GradedAlgebra upper_triangular2(std::shared_ptr<const FinOperad> ass_op) {
  const GroundRing& R = ass_op->ring;
  BasedModule basis = BasedModule::with_labels(R, {"1", "E11", "E12"});
  auto vec = [&](long long cu, long long c11, long long c12) {
    SparseVec v(3);
    if (cu) v.set(0, R.from_long(cu));
    if (c11) v.set(1, R.from_long(c11));
    if (c12) v.set(2, R.from_long(c12));
    return v;
  };
  std::map<std::pair<int, int>, SparseVec> prod;
  prod[{0, 0}] = vec(1, 0, 0);
  prod[{0, 1}] = vec(0, 1, 0);
  prod[{0, 2}] = vec(0, 0, 1);
  prod[{1, 0}] = vec(0, 1, 0);
  prod[{2, 0}] = vec(0, 0, 1);
  prod[{1, 1}] = vec(0, 1, 0);
  prod[{1, 2}] = vec(0, 0, 1);
  prod[{2, 1}] = vec(0, 0, 0);
  prod[{2, 2}] = vec(0, 0, 0);
  return finite_algebra(ass_op, basis, std::move(prod), true, "ut2");
}

// A (x) A^op for a degree-0 unital associative algebra, used as the
// independent envelope oracle: (a (x) b)(c (x) d) = ac (x) db.
inline GradedAlgebra tensor_with_opposite(const GradedAlgebra& a) {
  require(a.max_degree() == 0 && a.unital(), errc::scope,
          "tensor_with_opposite expects a degree-0 unital algebra");
  const GroundRing& R = a.ring();
  const int n = a.flat_dim();
  auto ass_op = a.operad_ptr();
  require(ass_op->kind == OperadKind::ass, errc::operad, "associative algebra required");
  const int ug = a.unit();
  auto pos = [&](int i, int j) { return i * n + j; };
  std::vector<int> order;
  order.push_back(pos(ug, ug));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (pos(i, j) != pos(ug, ug)) order.push_back(pos(i, j));
  std::vector<int> place(n * n);
  for (int k = 0; k < n * n; ++k) place[order[k]] = k;
  std::vector<std::string> labels(n * n);
  for (int k = 0; k < n * n; ++k) {
    int i = order[k] / n, j = order[k] % n;
    labels[k] = a.label(i) + "(x)" + a.label(j);
  }
  BasedModule basis = BasedModule::with_labels(R, labels);
  std::map<std::pair<int, int>, SparseVec> prod;
  for (int i1 = 0; i1 < n; ++i1)
    for (int j1 = 0; j1 < n; ++j1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int j2 = 0; j2 < n; ++j2) {
          const SparseVec& left = a.product(i1, i2);   // ac
          const SparseVec& right = a.product(j2, j1);  // db
          SparseVec v(n * n);
          for (auto& [x, cx] : left.entries())
            for (auto& [y, cy] : right.entries())
              v.add_to(R, place[pos(x, y)], R.mul(cx, cy));
          prod[{place[pos(i1, j1)], place[pos(i2, j2)]}] = std::move(v);
        }
  return finite_algebra(ass_op, basis, std::move(prod), true, a.name() + "(x)op");
}

// ---------------------------------------------------------------------------
// algebra homomorphisms
// ---------------------------------------------------------------------------

struct AlgebraHom {
  std::shared_ptr<const GradedAlgebra> src, dst;
  int degree_scale = 1;
  std::map<int, ExactMatrix> mats;  // source degree d -> comp_dst(d*scale) x comp_src(d)

  SparseVec apply_flat(const SparseVec& x) const {
    SparseVec out(dst->flat_dim());
    for (auto& [g, c] : x.entries()) {
      int d = src->deg_of(g);
      auto it = mats.find(d);
      if (it == mats.end()) continue;
      SparseVec img = it->second.apply(SparseVec::unit(src->comp_rank(d), src->idx_of(g)));
      out.axpy(dst->ring(), c, dst->flat_from(d * degree_scale, img));
    }
    return out;
  }
};

struct HomReport {
  bool ok = true;
  std::vector<std::string> witnesses;
  bool pass() const { return ok; }
};

// h(omega(a_1..a_n)) == omega(h(a_1)..h(a_n)) on basis tuples of total
// degree <= D; for the standard kinds the binary operations generate, so
// arity 2 suffices there.
inline HomReport check_hom(const AlgebraHom& h, int max_total_degree) {
  HomReport rep;
  const GradedAlgebra& A = *h.src;
  const GradedAlgebra& B = *h.dst;
  auto note = [&](const std::string& m) {
    rep.ok = false;
    if (rep.witnesses.size() < 8) rep.witnesses.push_back(m);
  };
  if (A.unital()) {
    if (!B.unital()) {
      note("target not unital");
    } else {
      SparseVec img = h.apply_flat(A.basis_flat(A.unit()));
      if (!(img == B.basis_flat(B.unit()))) note("unit not preserved");
    }
  }
  const FinOperad& op = A.operad();
  const int top_arity = op.kind == OperadKind::custom ? op.max_arity : 2;
  for (int n = 2; n <= top_arity; ++n)
    for (int w = 0; w < op.dim(n); ++w)
      detail::for_all_tuples(A, n, max_total_degree, [&](const std::vector<gid>& t) {
        SparseVec lhs = h.apply_flat(A.apply_basis(n, w, t));
        std::vector<SparseVec> imgs;
        for (gid g : t) imgs.push_back(h.apply_flat(A.basis_flat(g)));
        SparseVec rhs = B.apply_elements(n, SparseVec::unit(op.dim(n), w), imgs);
        if (!(lhs == rhs)) {
          std::string tup;
          for (gid x : t) tup += A.label(x) + " ";
          note("hom fails at arity " + std::to_string(n) +
               " omega=" + op.space(n).labels[w] + " args= " + tup);
        }
      });
  return rep;
}

namespace detail {

// evaluate a free-algebra basis class on generator images inside the target
inline SparseVec eval_free_class(const FreeAlgebraData& D, const GradedAlgebra& target,
                                 const std::vector<SparseVec>& gen_images, int deg,
                                 int local) {
  const GroundRing& R = target.ring();
  SparseVec lift = D.section_column(deg, local);
  SparseVec out(target.flat_dim());
  for (auto& [ti, c] : lift.entries()) {
    auto [tuple, opidx] = D.decode(ti, deg, D.op->dim(deg));
    std::vector<SparseVec> args;
    for (int t : tuple) args.push_back(gen_images[t]);
    SparseVec omega = SparseVec::unit(target.operad().dim(deg), opidx);
    out.axpy(R, c, target.apply_elements(deg, omega, args));
  }
  return out;
}

}  // namespace detail

// The unique algebra hom Free(V) -> A extending a linear map on generators
// whose images sit in a single degree d >= 1 of A (default 1). Uniqueness is
// by construction: images of coinvariant classes are forced.
inline AlgebraHom extend_from_generators(std::shared_ptr<const GradedAlgebra> free,
                                         std::shared_ptr<const GradedAlgebra> target,
                                         const std::vector<SparseVec>& gen_images) {
  require(free->free_info().has_value(), errc::setup,
          "source was not produced by free_algebra");
  const auto& info = *free->free_info();
  require(info.data != nullptr, errc::setup, "free algebra lacks lift data");
  require(static_cast<int>(gen_images.size()) == info.gens.rank(), errc::dim,
          "one image per generator required");
  require(free->operad().kind == target->operad().kind &&
              free->ring() == target->ring(),
          errc::setup, "free and target algebras live over different operads");
  int d = -1;
  for (auto& img : gen_images)
    for (auto& [g, c] : img.entries()) {
      int dg = target->deg_of(g);
      if (d < 0) d = dg;
      require(dg == d, errc::degree, "generator images must share a single degree");
    }
  if (d < 0) d = 1;
  require(d >= 1 || target->max_degree() == 0, errc::degree,
          "generator images must sit in degree >= 1");
  if (target->max_degree() == 0) d = 0;

  AlgebraHom h;
  h.src = free;
  h.dst = target;
  h.degree_scale = d;
  const GroundRing& R = free->ring();
  for (auto& [deg, m] : free->components()) {
    ExactMatrix mat(R, target->comp_rank(deg * d), m.rank());
    if (deg == 0) {
      require(target->unital(), errc::setup, "target must be unital");
      mat.set_entry(target->idx_of(target->unit()), 0, Scalar(1));
    } else {
      for (int k = 0; k < m.rank(); ++k) {
        SparseVec img = detail::eval_free_class(*info.data, *target, gen_images, deg, k);
        for (auto& [i, v] : img.entries()) {
          require(target->deg_of(i) == deg * d, errc::degree, "image degree mismatch");
          mat.set_entry(target->idx_of(i), k, v);
        }
      }
    }
    h.mats[deg] = std::move(mat);
  }
  return h;
}

}  // namespace oforge
