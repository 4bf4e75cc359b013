#pragma once

#include <set>

#include "operad_forge/algebra.hpp"
#include "operad_forge/rewriting.hpp"

namespace oforge {

using mgid = int;  // flat module basis index

// Module over an algebra over an operad with T = O: a graded based module M
// together with action maps O(n) (x) A^{(x)(n-1)} (x) M -> M, the module
// element sitting in a designated slot. Immutable after construction.
class AModule {
 public:
  // flat coordinates of omega_basis(arity) with the module element (basis
  // index m) in slot `slot` (1-based) and algebra basis elements elsewhere,
  // listed in ascending slot order
  using ActionFn = std::function<SparseVec(int arity, int omega_idx, int slot,
                                           const std::vector<gid>& alg_args, mgid m)>;

  static AModule make(std::shared_ptr<const GradedAlgebra> alg,
                      std::map<int, BasedModule> comps, ActionFn act, std::string name) {
    AModule m;
    m.alg_ = std::move(alg);
    m.comps_ = std::move(comps);
    m.act_ = std::move(act);
    m.name_ = std::move(name);
    m.index();
    return m;
  }

  const GradedAlgebra& algebra() const { return *alg_; }
  std::shared_ptr<const GradedAlgebra> algebra_ptr() const { return alg_; }
  const GroundRing& ring() const { return alg_->ring(); }
  const std::map<int, BasedModule>& components() const { return comps_; }
  const std::string& name() const { return name_; }

  int comp_rank(int d) const {
    auto it = comps_.find(d);
    return it == comps_.end() ? 0 : it->second.rank();
  }
  bool has_comp(int d) const { return comps_.count(d) > 0; }
  int flat_dim() const { return total_; }
  mgid mgid_of(int d, int i) const { return offset_.at(d) + i; }
  int deg_of(mgid m) const { return deg_[m]; }
  int idx_of(mgid m) const { return m - offset_.at(deg_[m]); }
  std::string label(mgid m) const { return comps_.at(deg_of(m)).labels[idx_of(m)]; }
  int min_degree() const { return comps_.empty() ? 0 : comps_.begin()->first; }
  int max_degree() const { return comps_.empty() ? -1 : comps_.rbegin()->first; }

  SparseVec basis_flat(mgid m) const { return SparseVec::unit(total_, m); }

  SparseVec act_basis(int arity, int omega_idx, int slot, const std::vector<gid>& args,
                      mgid m) const {
    int dsum = deg_[m];
    for (gid g : args) dsum += alg_->deg_of(g);
    require(comps_.count(dsum) > 0, errc::trunc,
            "module action lands in degree " + std::to_string(dsum) +
                " beyond truncation");
    return act_(arity, omega_idx, slot, args, m);
  }
  bool act_in_range(int mdeg, const std::vector<gid>& args) const {
    int dsum = mdeg;
    for (gid g : args) dsum += alg_->deg_of(g);
    return comps_.count(dsum) > 0;
  }

  // multilinear extension over algebra-element vectors and a module vector
  SparseVec act_elements(int arity, const SparseVec& omega, int slot,
                         const std::vector<SparseVec>& alg_args,
                         const SparseVec& mvec) const {
    require(static_cast<int>(alg_args.size()) == arity - 1, errc::arity,
            "act_elements: argument count mismatch");
    SparseVec out(total_);
    std::vector<gid> tuple(arity - 1);
    std::function<void(int, const Scalar&)> rec = [&](int i, const Scalar& coeff) {
      if (i == arity - 1) {
        for (auto& [m, cm] : mvec.entries())
          for (auto& [w, cw] : omega.entries())
            out.axpy(ring(), ring().mul(coeff, ring().mul(cm, cw)),
                     act_basis(arity, w, slot, tuple, m));
        return;
      }
      for (auto& [g, c] : alg_args[i].entries()) {
        tuple[i] = g;
        rec(i + 1, ring().mul(coeff, c));
      }
    };
    rec(0, Scalar(1));
    return out;
  }

  // binary action operators, cached: left(a) m = product-op(a, m),
  // right(a) m = product-op(m, a)
  ExactMatrix left_mult(gid a) const {
    auto it = left_.find(a);
    if (it != left_.end()) return it->second;
    ExactMatrix mat = mult_op(a, /*left=*/true);
    left_.emplace(a, mat);
    return mat;
  }
  ExactMatrix right_mult(gid a) const {
    auto it = right_.find(a);
    if (it != right_.end()) return it->second;
    ExactMatrix mat = mult_op(a, /*left=*/false);
    right_.emplace(a, mat);
    return mat;
  }

 private:
  ExactMatrix mult_op(gid a, bool left) const {
    ExactMatrix mat(ring(), total_, total_);
    const int bin = alg_->binary_index();
    for (mgid m = 0; m < total_; ++m) {
      if (!act_in_range(deg_[m], {a})) continue;
      SparseVec v = act_basis(2, bin, left ? 2 : 1, {a}, m);
      for (auto& [i, c] : v.entries()) mat.set_entry(i, m, c);
    }
    return mat;
  }

  void index() {
    total_ = 0;
    for (auto& [d, m] : comps_) {
      offset_[d] = total_;
      total_ += m.rank();
      for (int i = 0; i < m.rank(); ++i) deg_.push_back(d);
    }
  }

  std::shared_ptr<const GradedAlgebra> alg_;
  std::map<int, BasedModule> comps_;
  std::map<int, int> offset_;
  std::vector<int> deg_;
  int total_ = 0;
  ActionFn act_;
  std::string name_;
  mutable std::map<gid, ExactMatrix> left_, right_;
};

// ---------------------------------------------------------------------------
// module constructors
// ---------------------------------------------------------------------------

namespace detail {

// evaluation of an operation with one module slot, synthesized from the
// algebra products and a pair of "one-sided" action primitives
struct ModuleEval {
  std::shared_ptr<const GradedAlgebra> alg;
  // act_left(a, m): value of product-op(a, m); act_right(m, a)
  std::function<SparseVec(gid, const SparseVec&)> act_left;
  std::function<SparseVec(const SparseVec&, gid)> act_right;
  int mdim = 0;

  SparseVec scaled_act_left(const SparseVec& avec, const SparseVec& m) const {
    SparseVec out(mdim);
    for (auto& [a, c] : avec.entries()) out.axpy(alg->ring(), c, act_left(a, m));
    return out;
  }
  SparseVec scaled_act_right(const SparseVec& m, const SparseVec& avec) const {
    SparseVec out(mdim);
    for (auto& [a, c] : avec.entries()) out.axpy(alg->ring(), c, act_right(m, a));
    return out;
  }

  // evaluate a multiplication order (slots in product order) with the module
  // element at `slot`
  SparseVec eval_order(const std::vector<int>& order, int slot,
                       const std::vector<gid>& args, mgid m) const {
    const GroundRing& R = alg->ring();
    // positions of the module slot in the order
    int mpos = -1;
    for (std::size_t k = 0; k < order.size(); ++k)
      if (order[k] == slot) mpos = static_cast<int>(k);
    require(mpos >= 0, errc::setup, "module slot missing from evaluation order");
    auto arg_at = [&](int s) -> gid {
      // algebra argument living at operation slot s (s != slot)
      int pos = s < slot ? s - 1 : s - 2;
      return args[pos];
    };
    // left part: product of algebra args before the module element
    SparseVec mv = SparseVec::unit(mdim, m);
    if (mpos > 0) {
      SparseVec leftprod = alg->basis_flat(arg_at(order[0]));
      for (int k = 1; k < mpos; ++k)
        leftprod = alg->product_flat(leftprod, alg->basis_flat(arg_at(order[k])));
      mv = scaled_act_left(leftprod, mv);
    }
    for (std::size_t k = mpos + 1; k < order.size(); ++k)
      mv = scaled_act_right(mv, arg_at(order[k]));
    (void)R;
    return mv;
  }
};

}  // namespace detail

// Bimodule over an associative algebra from one-sided action operators given
// on algebra basis elements (matrices on the flat module space).
inline AModule bimodule_from_ops(std::shared_ptr<const GradedAlgebra> alg,
                                 std::map<int, BasedModule> comps,
                                 std::vector<ExactMatrix> left,
                                 std::vector<ExactMatrix> right, std::string name) {
  require(alg->operad().kind == OperadKind::ass, errc::operad,
          "bimodule requires the associative operad");
  int mdim = 0;
  for (auto& [d, m] : comps) mdim += m.rank();
  auto ev = std::make_shared<detail::ModuleEval>();
  ev->alg = alg;
  ev->mdim = mdim;
  auto lft = std::make_shared<std::vector<ExactMatrix>>(std::move(left));
  auto rgt = std::make_shared<std::vector<ExactMatrix>>(std::move(right));
  ev->act_left = [lft](gid a, const SparseVec& m) { return (*lft)[a].apply(m); };
  ev->act_right = [rgt](const SparseVec& m, gid a) { return (*rgt)[a].apply(m); };
  auto op = alg->operad_ptr();
  AModule::ActionFn act = [ev, op](int arity, int omega_idx, int slot,
                                   const std::vector<gid>& args, mgid m) {
    if (arity == 1) return SparseVec::unit(ev->mdim, m);
    const Perm& w = op->words[arity].word(omega_idx);
    std::vector<int> order(w.begin(), w.end());
    return ev->eval_order(order, slot, args, m);
  };
  return AModule::make(alg, std::move(comps), act, std::move(name));
}

// A as a bimodule over itself (associative case).
inline AModule self_bimodule(std::shared_ptr<const GradedAlgebra> alg) {
  require(alg->operad().kind == OperadKind::ass, errc::operad,
          "self_bimodule requires the associative operad");
  std::vector<ExactMatrix> left, right;
  const int n = alg->flat_dim();
  for (gid a = 0; a < n; ++a) {
    ExactMatrix L(alg->ring(), n, n), R(alg->ring(), n, n);
    for (gid m = 0; m < n; ++m) {
      if (alg->product_in_range(a, m)) {
        for (auto& [i, c] : alg->product(a, m).entries()) L.set_entry(i, m, c);
        for (auto& [i, c] : alg->product(m, a).entries()) R.set_entry(i, m, c);
      }
    }
    left.push_back(std::move(L));
    right.push_back(std::move(R));
  }
  return bimodule_from_ops(alg, alg->components(), std::move(left), std::move(right),
                           alg->name() + "-self");
}

// Module over a com algebra from a single action primitive (matrices per
// algebra basis element).
inline AModule com_module_from_ops(std::shared_ptr<const GradedAlgebra> alg,
                                   std::map<int, BasedModule> comps,
                                   std::vector<ExactMatrix> action, std::string name) {
  require(alg->operad().kind == OperadKind::com, errc::operad,
          "com module requires the com operad");
  int mdim = 0;
  for (auto& [d, m] : comps) mdim += m.rank();
  auto ev = std::make_shared<detail::ModuleEval>();
  ev->alg = alg;
  ev->mdim = mdim;
  auto mats = std::make_shared<std::vector<ExactMatrix>>(std::move(action));
  ev->act_left = [mats](gid a, const SparseVec& m) { return (*mats)[a].apply(m); };
  ev->act_right = [mats](const SparseVec& m, gid a) { return (*mats)[a].apply(m); };
  AModule::ActionFn act = [ev](int arity, int omega_idx, int slot,
                               const std::vector<gid>& args, mgid m) {
    (void)omega_idx;
    if (arity == 1) return SparseVec::unit(ev->mdim, m);
    std::vector<int> order;
    for (int s = 1; s <= arity; ++s) order.push_back(s);
    return ev->eval_order(order, slot, args, m);
  };
  return AModule::make(alg, std::move(comps), act, std::move(name));
}

// Representation of a Lie algebra (given as a degree-0 graded algebra over
// the lie operad) from rho matrices per algebra basis element.
inline AModule lie_rep_from_ops(std::shared_ptr<const GradedAlgebra> alg,
                                std::map<int, BasedModule> comps,
                                std::vector<ExactMatrix> rho, std::string name) {
  require(alg->operad().kind == OperadKind::lie, errc::operad,
          "lie representation requires the lie operad");
  int mdim = 0;
  for (auto& [d, m] : comps) mdim += m.rank();
  auto ev = std::make_shared<detail::ModuleEval>();
  ev->alg = alg;
  ev->mdim = mdim;
  auto mats = std::make_shared<std::vector<ExactMatrix>>(std::move(rho));
  // [a, m] = rho(a) m ; [m, a] = -rho(a) m
  ev->act_left = [mats](gid a, const SparseVec& m) { return (*mats)[a].apply(m); };
  ev->act_right = [mats, ev](const SparseVec& m, gid a) {
    return (*mats)[a].apply(m).scaled(ev->alg->ring(), ev->alg->ring().from_long(-1));
  };
  auto op = alg->operad_ptr();
  AModule::ActionFn act = [ev, op](int arity, int omega_idx, int slot,
                                   const std::vector<gid>& args, mgid m) {
    if (arity == 1) return SparseVec::unit(ev->mdim, m);
    const std::vector<int>& w = op->lie_words[arity][omega_idx];
    // fold the left-normed bracket word; exactly one slot carries the module
    const GroundRing& R = ev->alg->ring();
    auto arg_at = [&](int s) -> gid {
      int pos = s < slot ? s - 1 : s - 2;
      return args[pos];
    };
    bool in_module = (w[0] == slot);
    SparseVec mv = in_module ? SparseVec::unit(ev->mdim, m) : SparseVec(ev->mdim);
    SparseVec av = in_module ? SparseVec(ev->alg->flat_dim())
                             : ev->alg->basis_flat(arg_at(w[0]));
    for (std::size_t k = 1; k < w.size(); ++k) {
      if (w[k] == slot) {
        // [current_A, m] = rho(current) m
        mv = ev->scaled_act_left(av, SparseVec::unit(ev->mdim, m));
        in_module = true;
      } else if (in_module) {
        mv = ev->scaled_act_right(mv, arg_at(w[k]));
      } else {
        av = ev->alg->product_flat(av, ev->alg->basis_flat(arg_at(w[k])));
      }
    }
    require(in_module, errc::setup, "module slot never consumed");
    (void)R;
    return mv;
  };
  return AModule::make(alg, std::move(comps), act, std::move(name));
}

// Adjoint representation of a Lie algebra on itself.
inline AModule adjoint_module(std::shared_ptr<const GradedAlgebra> lie_alg) {
  require(lie_alg->operad().kind == OperadKind::lie, errc::operad, "lie algebra required");
  const int n = lie_alg->flat_dim();
  std::vector<ExactMatrix> rho;
  for (gid a = 0; a < n; ++a) {
    ExactMatrix m(lie_alg->ring(), n, n);
    for (gid x = 0; x < n; ++x)
      for (auto& [i, c] : lie_alg->product(a, x).entries()) m.set_entry(i, x, c);
    rho.push_back(std::move(m));
  }
  return lie_rep_from_ops(lie_alg, lie_alg->components(), std::move(rho),
                          lie_alg->name() + "-adjoint");
}

// A or its augmentation ideal A_+ as a module over a com algebra
// (e.g. S(g)); `positive_only` selects A_+.
inline AModule com_self_module(std::shared_ptr<const GradedAlgebra> alg,
                               bool positive_only) {
  require(alg->operad().kind == OperadKind::com, errc::operad, "com algebra required");
  std::map<int, BasedModule> comps;
  for (auto& [d, m] : alg->components())
    if (!positive_only || d > 0) comps[d] = m;
  // flat module index <-> algebra gid translation
  std::map<int, int> moffset;
  int mdim = 0;
  for (auto& [d, m] : comps) {
    moffset[d] = mdim;
    mdim += m.rank();
  }
  std::vector<ExactMatrix> action;
  for (gid a = 0; a < alg->flat_dim(); ++a) {
    ExactMatrix mat(alg->ring(), mdim, mdim);
    for (auto& [d, m] : comps) {
      int dout = d + alg->deg_of(a);
      if (!comps.count(dout)) continue;
      for (int i = 0; i < m.rank(); ++i) {
        const SparseVec& p = alg->product(a, alg->gid_of(d, i));
        for (auto& [j, c] : p.entries())
          mat.set_entry(moffset.at(dout) + alg->idx_of(j), moffset.at(d) + i, c);
      }
    }
    action.push_back(std::move(mat));
  }
  return com_module_from_ops(alg, comps, std::move(action),
                             alg->name() + (positive_only ? "-aug" : "-self"));
}

// Bimodule version of A / A_+ over a graded associative algebra.
inline AModule ass_self_module(std::shared_ptr<const GradedAlgebra> alg,
                               bool positive_only) {
  require(alg->operad().kind == OperadKind::ass, errc::operad, "ass algebra required");
  std::map<int, BasedModule> comps;
  for (auto& [d, m] : alg->components())
    if (!positive_only || d > 0) comps[d] = m;
  std::map<int, int> moffset;
  int mdim = 0;
  for (auto& [d, m] : comps) {
    moffset[d] = mdim;
    mdim += m.rank();
  }
  std::vector<ExactMatrix> left, right;
  for (gid a = 0; a < alg->flat_dim(); ++a) {
    ExactMatrix L(alg->ring(), mdim, mdim), R(alg->ring(), mdim, mdim);
    for (auto& [d, m] : comps) {
      int dout = d + alg->deg_of(a);
      if (!comps.count(dout)) continue;
      for (int i = 0; i < m.rank(); ++i) {
        for (auto& [j, c] : alg->product(a, alg->gid_of(d, i)).entries())
          L.set_entry(moffset.at(dout) + alg->idx_of(j), moffset.at(d) + i, c);
        for (auto& [j, c] : alg->product(alg->gid_of(d, i), a).entries())
          R.set_entry(moffset.at(dout) + alg->idx_of(j), moffset.at(d) + i, c);
      }
    }
    left.push_back(std::move(L));
    right.push_back(std::move(R));
  }
  return bimodule_from_ops(alg, comps, std::move(left), std::move(right),
                           alg->name() + (positive_only ? "-aug" : "-self"));
}

inline AModule self_module(std::shared_ptr<const GradedAlgebra> alg,
                           bool positive_only = false) {
  if (alg->operad().kind == OperadKind::com) return com_self_module(alg, positive_only);
  if (alg->operad().kind == OperadKind::ass) return ass_self_module(alg, positive_only);
  if (alg->operad().kind == OperadKind::lie) {
    require(!positive_only, errc::operad, "lie algebras have no augmentation ideal");
    return adjoint_module(alg);
  }
  fail(errc::operad, "self_module: unsupported operad kind");
}

// Grading shift: shift(M, j) has component d equal to M_{d-j}.
inline AModule shift_module(const AModule& m, int j) {
  std::map<int, BasedModule> comps;
  for (auto& [d, c] : m.components()) comps[d + j] = c;
  auto inner = std::make_shared<AModule>(m);
  AModule::ActionFn act = [inner](int arity, int omega_idx, int slot,
                                  const std::vector<gid>& args, mgid mm) {
    return inner->act_basis(arity, omega_idx, slot, args, mm);
  };
  return AModule::make(m.algebra_ptr(), std::move(comps), act,
                       m.name() + "-shift" + std::to_string(j));
}

// Restriction of an A-module along an algebra hom B -> A (structure-constant
// pullback; degree_scale must be 1).
inline AModule restrict_along(const AlgebraHom& h, const AModule& m) {
  require(h.dst.get() == &m.algebra() || h.dst->name() == m.algebra().name(),
          errc::setup, "module is not over the hom target");
  require(h.degree_scale == 1, errc::setup, "restriction needs a degree-preserving hom");
  auto inner = std::make_shared<AModule>(m);
  auto hom = std::make_shared<AlgebraHom>(h);
  auto src = h.src;
  AModule::ActionFn act = [inner, hom, src](int arity, int omega_idx, int slot,
                                            const std::vector<gid>& args, mgid mm) {
    std::vector<SparseVec> imgs;
    for (gid g : args) imgs.push_back(hom->apply_flat(src->basis_flat(g)));
    SparseVec omega = SparseVec::unit(src->operad().dim(arity), omega_idx);
    return inner->act_elements(arity, omega, slot, imgs, inner->basis_flat(mm));
  };
  return AModule::make(src, m.components(), act, m.name() + "|" + src->name());
}

// ---------------------------------------------------------------------------
// check_module
// ---------------------------------------------------------------------------

struct ModuleReport {
  bool ok = true;
  long checked = 0;
  std::vector<std::string> witnesses;
  bool pass() const { return ok; }
};

// Exhaustive verification of the module compatibility diagram on basis
// tuples up to total degree D: composing in the operad first agrees with
// acting in stages, for the module slot inside and outside the inner block.
inline ModuleReport check_module(const AModule& M, int max_total_degree) {
  ModuleReport rep;
  const GradedAlgebra& A = M.algebra();
  const FinOperad& op = A.operad();
  auto note = [&](const std::string& msg) {
    rep.ok = false;
    if (rep.witnesses.size() < 16) rep.witnesses.push_back(msg);
  };

  // unit law: the O(1) unit acts as the identity
  if (op.dim(1) == 1) {
    for (mgid m = 0; m < M.flat_dim(); ++m)
      if (!(M.act_basis(1, 0, 1, {}, m) == M.basis_flat(m)))
        note("O(1) unit does not act as identity on " + M.label(m));
  }

  for (auto& [mi, table] : op.comp) {
    auto [n, i, k] = mi;
    (void)table;
    const int res_arity = n + k - 1;
    for (int w = 0; w < op.dim(n); ++w)
      for (int g = 0; g < op.dim(k); ++g) {
        OperadElement composed =
            op.compose(op.basis_element(n, w), i, op.basis_element(k, g));
        for (int sprime = 1; sprime <= res_arity; ++sprime) {
          std::vector<gid> args(res_arity - 1);
          auto comp_arg = [&](int cslot) -> gid {  // cslot != sprime
            return args[cslot < sprime ? cslot - 1 : cslot - 2];
          };
          std::function<void(int, int)> rec = [&](int pos, int budget) {
            if (pos == res_arity - 1) {
              for (mgid m = 0; m < M.flat_dim(); ++m) {
                if (M.deg_of(m) > budget) continue;
                if (!M.act_in_range(M.deg_of(m), args)) continue;
                // intermediate values must stay inside the stored window
                if (sprime >= i && sprime < i + k) {
                  std::vector<gid> inner_args;
                  for (int u = i; u < i + k; ++u)
                    if (u != sprime) inner_args.push_back(comp_arg(u));
                  if (!M.act_in_range(M.deg_of(m), inner_args)) continue;
                } else {
                  int dsum = 0;
                  for (int u = i; u < i + k; ++u) dsum += A.deg_of(comp_arg(u));
                  if (!A.has_comp(dsum)) continue;
                }
                ++rep.checked;
                SparseVec lhs(M.flat_dim());
                for (auto& [cidx, cc] : composed.coords.entries())
                  lhs.axpy(M.ring(), cc, M.act_basis(res_arity, cidx, sprime, args, m));
                SparseVec rhs(M.flat_dim());
                if (sprime >= i && sprime < i + k) {
                  // module slot inside the inner block
                  int s2 = sprime - i + 1;
                  std::vector<gid> inner_args;
                  for (int u = i; u < i + k; ++u)
                    if (u != sprime) inner_args.push_back(comp_arg(u));
                  SparseVec mid = M.act_basis(k, g, s2, inner_args, m);
                  std::vector<SparseVec> outer_vecs;
                  for (int q = 1; q <= n; ++q) {
                    if (q == i) continue;
                    int cq = q < i ? q : q + k - 1;
                    outer_vecs.push_back(A.basis_flat(comp_arg(cq)));
                  }
                  rhs = M.act_elements(n, SparseVec::unit(op.dim(n), w), i, outer_vecs,
                                       mid);
                } else {
                  // module slot outside: the inner op eats pure algebra args
                  int s_outer = sprime < i ? sprime : sprime - k + 1;
                  std::vector<gid> inner_args;
                  for (int u = i; u < i + k; ++u) inner_args.push_back(comp_arg(u));
                  SparseVec mid = A.apply_basis(k, g, inner_args);
                  std::vector<SparseVec> outer_vecs;
                  for (int q = 1; q <= n; ++q) {
                    if (q == s_outer) continue;
                    if (q == i) {
                      outer_vecs.push_back(mid);
                      continue;
                    }
                    int cq = q < i ? q : q + k - 1;
                    outer_vecs.push_back(A.basis_flat(comp_arg(cq)));
                  }
                  rhs = M.act_elements(n, SparseVec::unit(op.dim(n), w), s_outer,
                                       outer_vecs, M.basis_flat(m));
                }
                if (!(lhs == rhs)) {
                  std::string tup;
                  for (gid x : args) tup += A.label(x) + " ";
                  note("module square fails at (" + std::to_string(n) + "," +
                       std::to_string(i) + "," + std::to_string(k) + ") slot " +
                       std::to_string(sprime) + " omega=" + op.space(n).labels[w] +
                       " gamma=" + op.space(k).labels[g] + " args= " + tup + "m=" +
                       M.label(m));
                }
              }
              return;
            }
            for (gid g2 = 0; g2 < A.flat_dim(); ++g2) {
              int dg = A.deg_of(g2);
              if (dg > budget) continue;
              args[pos] = g2;
              rec(pos + 1, budget - dg);
            }
          };
          rec(0, max_total_degree);
        }
      }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// derivations
// ---------------------------------------------------------------------------

// Basis of the degree-j derivations A -> M: R-linear maps satisfying the
// Leibniz square against the binary operation, solved as a kernel on source
// degrees <= cap, where cap keeps every constraint inside the stored
// truncations. Returned as matrices (flat M x flat A).
struct DerivationSpace {
  int degree = 0;
  int source_cap = 0;
  std::vector<ExactMatrix> basis;
  int rank() const { return static_cast<int>(basis.size()); }
};

inline DerivationSpace derivation_basis(const GradedAlgebra& A, const AModule& M, int j) {
  require(&M.algebra() == &A || M.algebra().name() == A.name(), errc::setup,
          "module is not over this algebra");
  require(A.operad().kind != OperadKind::custom, errc::operad,
          "derivations implemented for the standard operad kinds");
  const GroundRing& R = A.ring();
  DerivationSpace out;
  out.degree = j;
  int cap = A.max_degree();
  if (j > 0) cap = std::min(cap, M.max_degree() - j);
  if (cap < 0) {
    out.source_cap = -1;
    return out;
  }
  out.source_cap = cap;

  // unknowns: phi(a with deg d <= cap) in M_{d+j}
  std::vector<std::pair<gid, mgid>> vars;
  std::map<std::pair<gid, mgid>, int> var_of;
  for (gid a = 0; a < A.flat_dim(); ++a) {
    int d = A.deg_of(a);
    if (d > cap || !M.has_comp(d + j)) continue;
    for (int t = 0; t < M.comp_rank(d + j); ++t) {
      mgid mt = M.mgid_of(d + j, t);
      var_of[{a, mt}] = static_cast<int>(vars.size());
      vars.push_back({a, mt});
    }
  }
  const int nvars = static_cast<int>(vars.size());

  std::vector<SparseVec> rows;
  const int bin = A.binary_index();
  for (gid x = 0; x < A.flat_dim(); ++x)
    for (gid y = 0; y < A.flat_dim(); ++y) {
      int dx = A.deg_of(x), dy = A.deg_of(y);
      if (dx + dy > cap || !A.product_in_range(x, y)) continue;
      if (!M.has_comp(dx + dy + j)) {
        // phi(x*y) is forced zero: the Leibniz terms must cancel, which they
        // do because phi(x), phi(y) land in missing components too; skip
        continue;
      }
      const int tgt_rank = M.comp_rank(dx + dy + j);
      // row block: one equation per target coordinate
      std::vector<SparseVec> eqs(tgt_rank, SparseVec(nvars));
      // + phi(x*y): phi(z) has target coordinate t for each t
      for (auto& [z, cz] : A.product(x, y).entries()) {
        if (!M.has_comp(A.deg_of(z) + j)) continue;
        for (int t = 0; t < M.comp_rank(A.deg_of(z) + j); ++t) {
          mgid mt = M.mgid_of(A.deg_of(z) + j, t);
          auto it = var_of.find({z, mt});
          if (it != var_of.end()) eqs[t].add_to(R, it->second, cz);
        }
      }
      // - act(bin, slot1, [y], phi(x)): phi(x)*y
      if (M.has_comp(dx + j)) {
        for (int t = 0; t < M.comp_rank(dx + j); ++t) {
          mgid ms = M.mgid_of(dx + j, t);
          auto it = var_of.find({x, ms});
          if (it == var_of.end()) continue;
          SparseVec img = M.act_basis(2, bin, 1, {y}, ms);
          for (auto& [mt, c] : img.entries())
            eqs[M.idx_of(mt)].add_to(R, it->second, R.neg(c));
        }
      }
      // - act(bin, slot2, [x], phi(y)): x*phi(y)
      if (M.has_comp(dy + j)) {
        for (int t = 0; t < M.comp_rank(dy + j); ++t) {
          mgid ms = M.mgid_of(dy + j, t);
          auto it = var_of.find({y, ms});
          if (it == var_of.end()) continue;
          SparseVec img = M.act_basis(2, bin, 2, {x}, ms);
          for (auto& [mt, c] : img.entries())
            eqs[M.idx_of(mt)].add_to(R, it->second, R.neg(c));
        }
      }
      for (auto& e : eqs)
        if (!e.is_zero()) rows.push_back(std::move(e));
    }

  ExactMatrix sys = matrix_from_rows(R, rows, nvars);
  std::vector<SparseVec> kern = kernel_basis(sys);
  for (auto& k : kern) {
    ExactMatrix d(R, M.flat_dim(), A.flat_dim());
    for (auto& [v, c] : k.entries()) d.set_entry(vars[v].second, vars[v].first, c);
    out.basis.push_back(std::move(d));
  }
  return out;
}

// post-hoc re-verification of the Leibniz square for a computed derivation
inline bool verify_derivation(const GradedAlgebra& A, const AModule& M,
                              const ExactMatrix& d, int j) {
  const GroundRing& R = A.ring();
  const int bin = A.binary_index();
  int cap = A.max_degree();
  if (j > 0) cap = std::min(cap, M.max_degree() - j);
  for (gid x = 0; x < A.flat_dim(); ++x)
    for (gid y = 0; y < A.flat_dim(); ++y) {
      if (A.deg_of(x) + A.deg_of(y) > cap || !A.product_in_range(x, y)) continue;
      if (!M.has_comp(A.deg_of(x) + A.deg_of(y) + j)) continue;
      SparseVec lhs(M.flat_dim());
      for (auto& [z, cz] : A.product(x, y).entries())
        lhs.axpy(R, cz, d.apply(A.basis_flat(z)));
      SparseVec rhs(M.flat_dim());
      SparseVec dx = d.apply(A.basis_flat(x));
      SparseVec dy = d.apply(A.basis_flat(y));
      for (auto& [ms, c] : dx.entries()) rhs.axpy(R, c, M.act_basis(2, bin, 1, {y}, ms));
      for (auto& [ms, c] : dy.entries()) rhs.axpy(R, c, M.act_basis(2, bin, 2, {x}, ms));
      if (!(lhs == rhs)) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// square-zero extension
// ---------------------------------------------------------------------------

struct SquareZeroExtension {
  GradedAlgebra algebra;  // A (+) M
  AlgebraHom projection;  // onto A
  std::map<int, int> m_offset;  // degree -> index of the first M basis vector
};

// A (+) M with M squaring to zero: operad elements act on tuples with at
// most one entry from M (via the module action) and kill the rest. The
// module must pass check_module up to the stated degree (E_MODULE).
inline SquareZeroExtension square_zero_extension(std::shared_ptr<const GradedAlgebra> a,
                                                 std::shared_ptr<const AModule> m,
                                                 int check_degree) {
  {
    ModuleReport mr = check_module(*m, check_degree);
    require(mr.pass(), errc::module,
            "module fails its axioms: " +
                (mr.witnesses.empty() ? std::string("?") : mr.witnesses.front()));
  }
  const GroundRing& R = a->ring();
  std::map<int, BasedModule> comps;
  std::map<int, int> m_offset;
  std::set<int> degrees;
  for (auto& [d, c] : a->components()) degrees.insert(d);
  for (auto& [d, c] : m->components()) degrees.insert(d);
  for (int d : degrees) {
    std::vector<std::string> labels;
    if (a->has_comp(d))
      for (auto& l : a->comp(d).labels) labels.push_back("a:" + l);
    m_offset[d] = static_cast<int>(labels.size());
    if (m->has_comp(d))
      for (auto& l : m->components().at(d).labels) labels.push_back("m:" + l);
    comps[d] = BasedModule::with_labels(R, labels);
  }

  // flat translation tables, built against the combined layout
  struct Split {
    bool is_m;
    int inner;  // gid in A or mgid in M
  };
  auto layout = std::make_shared<std::vector<Split>>();
  auto back_a = std::make_shared<std::vector<int>>(a->flat_dim(), -1);
  auto back_m = std::make_shared<std::vector<int>>(m->flat_dim(), -1);
  {
    int flat = 0;
    for (auto& [d, c] : comps) {
      int na = a->has_comp(d) ? a->comp_rank(d) : 0;
      for (int i = 0; i < na; ++i) {
        layout->push_back({false, a->gid_of(d, i)});
        (*back_a)[a->gid_of(d, i)] = flat++;
      }
      int nm = m->has_comp(d) ? m->comp_rank(d) : 0;
      for (int i = 0; i < nm; ++i) {
        layout->push_back({true, m->mgid_of(d, i)});
        (*back_m)[m->mgid_of(d, i)] = flat++;
      }
    }
  }
  const int total = static_cast<int>(layout->size());

  auto aptr = a;
  auto mptr = m;
  GradedAlgebra::Evaluator eval = [aptr, mptr, layout, back_a, back_m, total](
                                      int arity, int omega_idx,
                                      const std::vector<gid>& args) -> SparseVec {
    const GroundRing& R2 = aptr->ring();
    int m_count = 0, m_pos = -1;
    for (int s = 0; s < arity; ++s)
      if ((*layout)[args[s]].is_m) {
        ++m_count;
        m_pos = s;
      }
    SparseVec out(total);
    if (m_count >= 2) return out;  // square-zero law
    if (m_count == 0) {
      std::vector<gid> as;
      for (gid g : args) as.push_back((*layout)[g].inner);
      SparseVec v = aptr->apply_basis(arity, omega_idx, as);
      for (auto& [i, c] : v.entries()) out.set((*back_a)[i], c);
      return out;
    }
    std::vector<gid> as;
    for (int s = 0; s < arity; ++s)
      if (s != m_pos) as.push_back((*layout)[args[s]].inner);
    SparseVec v = mptr->act_basis(arity, omega_idx, m_pos + 1, as,
                                  (*layout)[args[m_pos]].inner);
    for (auto& [i, c] : v.entries()) out.set((*back_m)[i], c);
    return out;
  };

  SquareZeroExtension out{
      GradedAlgebra::make(a->operad_ptr(), comps, a->unital(), a->augmented(), eval,
                          a->name() + "(+)" + m->name()),
      {}, m_offset};
  // projection onto A
  AlgebraHom proj;
  proj.src = std::make_shared<const GradedAlgebra>(out.algebra);
  proj.dst = a;
  for (auto& [d, c] : out.algebra.components()) {
    ExactMatrix mat(R, a->comp_rank(d), c.rank());
    int na = a->has_comp(d) ? a->comp_rank(d) : 0;
    for (int i = 0; i < na; ++i) mat.set_entry(i, i, Scalar(1));
    proj.mats[d] = std::move(mat);
  }
  out.projection = std::move(proj);
  return out;
}

// ---------------------------------------------------------------------------
// enveloping algebra
// ---------------------------------------------------------------------------

namespace detail {

// F'-side data of the enveloping construction: level i holds the
// S_i-coinvariants of O(i+1) (x) A^{(x)i}, with the module slot at position 1
// and the algebra factors at slots 2..i+1. The flat ordering is by
// DESCENDING level so the global quotient eliminates high-level wraps and
// keeps low-level representatives (the unit survives).
struct EnvelopeGuts {
  std::shared_ptr<const GradedAlgebra> alg;
  std::shared_ptr<const FinOperad> op;
  int W = 0;  // max level
  std::vector<QuotientResult> lev;  // [0..W]
  std::vector<int> tensor_dim;      // [0..W]
  std::vector<int> offset;          // flat F' offset per level (descending order)
  std::vector<int> flevel;          // flat F' index -> level
  int fdim = 0;
  QuotientResult global;            // F' -> P

  int adim() const { return alg->flat_dim(); }

  int encode(int level, const std::vector<gid>& tuple, int opidx) const {
    int idx = 0;
    for (gid t : tuple) idx = idx * adim() + t;
    return idx * op->dim(level + 1) + opidx;
  }
  std::pair<std::vector<gid>, int> decode(int level, int idx) const {
    int opidx = idx % op->dim(level + 1);
    idx /= op->dim(level + 1);
    std::vector<gid> tuple(level);
    for (int k = level - 1; k >= 0; --k) {
      tuple[k] = idx % adim();
      idx /= adim();
    }
    return {tuple, opidx};
  }

  // flat F' vector of the class of [theta (x) list] with the module slot at
  // position mslot; canonicalized to module slot 1 by relabeling inputs
  SparseVec wrap(const OperadElement& theta, int mslot,
                 const std::vector<gid>& list) const {
    const GroundRing& R = alg->ring();
    const int r = theta.arity;
    const int level = r - 1;
    require(level <= W, errc::trunc, "wrap level beyond envelope truncation");
    SparseVec th = theta.coords;
    if (mslot != 1) {
      Perm rho(r);
      rho[mslot - 1] = 1;
      for (int t = 1; t < mslot; ++t) rho[t - 1] = t + 1;
      for (int t = mslot + 1; t <= r; ++t) rho[t - 1] = t;
      th = op->action(r, rho).apply(th);
    }
    SparseVec tensor(tensor_dim[level]);
    for (auto& [w, c] : th.entries()) tensor.add_to(R, encode(level, list, w), c);
    SparseVec q = lev[level].projection.apply(tensor);
    return q.shifted(fdim, offset[level]);
  }

  // multiplication of flat F' vectors: [omega (x) a].[gamma (x) b] =
  // [(gamma o_1 omega) (x) (a || b)]
  SparseVec mult_f(const SparseVec& x, const SparseVec& y) const {
    const GroundRing& R = alg->ring();
    SparseVec out(fdim);
    for (auto& [xi, cx] : x.entries()) {
      int li = flevel[xi];
      SparseVec sx = section_of(li, xi);
      for (auto& [yi, cy] : y.entries()) {
        int lj = flevel[yi];
        require(li + lj <= W, errc::trunc, "envelope product beyond truncation");
        SparseVec sy = section_of(lj, yi);
        Scalar c0 = R.mul(cx, cy);
        for (auto& [ti, ci] : sx.entries()) {
          auto [ta, oa] = decode(li, ti);
          for (auto& [tj, cj] : sy.entries()) {
            auto [tb, ob] = decode(lj, tj);
            OperadElement comp = op->compose(op->basis_element(lj + 1, ob), 1,
                                             op->basis_element(li + 1, oa));
            std::vector<gid> list = ta;
            list.insert(list.end(), tb.begin(), tb.end());
            SparseVec term = wrap(comp, 1, list);
            out.axpy(R, R.mul(c0, R.mul(ci, cj)), term);
          }
        }
      }
    }
    return out;
  }

  // module action of omega (module slot s, algebra args) on a flat F' vector
  SparseVec act_f(int arity, int omega_idx, int s, const std::vector<gid>& args,
                  const SparseVec& f) const {
    const GroundRing& R = alg->ring();
    SparseVec out(fdim);
    for (auto& [fi, cf] : f.entries()) {
      int li = flevel[fi];
      require(arity - 1 + li <= W, errc::trunc, "envelope action beyond truncation");
      SparseVec sf = section_of(li, fi);
      for (auto& [ti, ci] : sf.entries()) {
        auto [tup, oidx] = decode(li, ti);
        OperadElement comp = op->compose(op->basis_element(arity, omega_idx), s,
                                         op->basis_element(li + 1, oidx));
        // composite module slot: the inner wrap's slot 1 lands at position s;
        // algebra list in ascending composite slots: args before s, inner
        // tuple, args after s (shifted)
        std::vector<gid> list;
        for (int q = 1; q < s; ++q) list.push_back(args[q - 1]);
        list.insert(list.end(), tup.begin(), tup.end());
        for (int q = s + 1; q <= arity; ++q) list.push_back(args[q - 2]);
        out.axpy(R, R.mul(cf, ci), wrap(comp, s, list));
      }
    }
    return out;
  }

  SparseVec section_of(int level, int fidx) const {
    const QuotientResult& q = lev[level];
    int local = fidx - offset[level];
    SparseVec col(q.section.rows());
    for (int r2 = 0; r2 < q.section.rows(); ++r2) {
      Scalar c = q.section.entry(r2, local);
      if (c != 0) col.set(r2, c);
    }
    return col;
  }

  // P-side helpers
  SparseVec lift_p(const SparseVec& p) const {  // P coords -> F' coords
    SparseVec out(fdim);
    for (auto& [i, c] : p.entries()) {
      for (int r2 = 0; r2 < global.section.rows(); ++r2) {
        Scalar s = global.section.entry(r2, i);
        if (s != 0) out.add_to(alg->ring(), r2, alg->ring().mul(s, c));
      }
    }
    return out;
  }
};

}  // namespace detail

// The universal enveloping algebra P_A of a degree-0 finite-rank algebra,
// built as the quotient of F'(R) = (+)_i (O(i+1) (x) A^{(x)i})_{S_i} by the
// two-sided ideal identifying internal operad compositions with evaluated
// algebra operations (plus unit plugging when A is unital).
struct EnvelopingAlgebra {
  std::shared_ptr<const GradedAlgebra> alg;
  int max_level = 0;
  BasedModule basis;
  std::vector<int> level;              // P basis element -> originating level
  std::map<std::pair<int, int>, SparseVec> mult;
  int unit = -1;
  std::vector<int> filtration_ranks;   // rank F_<=k for k = 0..max_level
  std::vector<Int> torsion;            // ZZ only
  std::shared_ptr<const detail::EnvelopeGuts> guts;

  int dim() const { return basis.rank(); }

  SparseVec product(const SparseVec& x, const SparseVec& y) const {
    const GroundRing& R = alg->ring();
    SparseVec out(dim());
    for (auto& [a, ca] : x.entries())
      for (auto& [b, cb] : y.entries()) {
        auto it = mult.find({a, b});
        require(it != mult.end(), errc::trunc, "envelope product beyond truncation");
        out.axpy(R, R.mul(ca, cb), it->second);
      }
    return out;
  }

  // the image phi_m(p) of p under the module map P -> M sending 1 to m
  SparseVec hom_image(const AModule& M, const SparseVec& p, const SparseVec& mvec) const {
    const GroundRing& R = alg->ring();
    SparseVec out(M.flat_dim());
    SparseVec f = guts->lift_p(p);
    for (auto& [fi, c] : f.entries()) {
      int li = guts->flevel[fi];
      SparseVec s = guts->section_of(li, fi);
      for (auto& [ti, ci] : s.entries()) {
        auto [tup, oidx] = guts->decode(li, ti);
        out.axpy(R, R.mul(c, ci),
                 M.act_elements(li + 1, SparseVec::unit(guts->op->dim(li + 1), oidx), 1,
                                [&] {
                                  std::vector<SparseVec> av;
                                  for (gid t : tup) av.push_back(alg->basis_flat(t));
                                  return av;
                                }(),
                                mvec));
      }
    }
    return out;
  }

  // P as an A-module (the free module on one generator)
  AModule as_module() const {
    auto g = guts;
    auto self_basis = basis;
    auto self_dim = dim();
    auto proj = g->global.projection;
    AModule::ActionFn act = [g, proj, self_dim](int arity, int omega_idx, int slot,
                                                const std::vector<gid>& args,
                                                mgid m) -> SparseVec {
      // lift the P basis element, act on F', project back
      SparseVec p(self_dim);
      p.set(m, Scalar(1));
      SparseVec f = g->lift_p(p);
      SparseVec rf = g->act_f(arity, omega_idx, slot, args, f);
      return proj.apply(rf);
    };
    std::map<int, BasedModule> comps;
    comps[0] = basis;
    return AModule::make(alg, comps, act, alg->name() + "-envelope");
  }
};

inline EnvelopingAlgebra enveloping(std::shared_ptr<const GradedAlgebra> a, int D) {
  require(a->max_degree() == 0, errc::scope,
          "enveloping implemented for degree-0 finite-rank algebras");
  const FinOperad& op = a->operad();
  require(D + 1 <= op.max_arity, errc::trunc,
          "envelope level " + std::to_string(D) + " needs operad arity " +
              std::to_string(D + 1));
  const GroundRing& R = a->ring();
  auto guts = std::make_shared<detail::EnvelopeGuts>();
  guts->alg = a;
  guts->op = a->operad_ptr();
  guts->W = D;

  const int adim = a->flat_dim();
  guts->lev.resize(D + 1);
  guts->tensor_dim.resize(D + 1);
  for (int i = 0; i <= D; ++i) {
    int tdim = op.dim(i + 1);
    for (int k = 0; k < i; ++k) tdim *= adim;
    guts->tensor_dim[i] = tdim;
    std::vector<std::string> labels(tdim);
    for (int idx = 0; idx < tdim; ++idx) {
      auto [tup, oidx] = guts->decode(i, idx);
      std::string s = op.space(i + 1).labels[oidx] + "[";
      for (std::size_t k = 0; k < tup.size(); ++k) {
        if (k) s += ",";
        s += a->label(tup[k]);
      }
      s += "]";
      labels[idx] = s;
    }
    BasedModule tensor = BasedModule::with_labels(R, std::move(labels));
    std::vector<ExactMatrix> actions;
    for (int t = 1; t < i; ++t) {
      // transposition of tensor factors t, t+1 paired with the slot
      // transposition s_{t+1} on O(i+1) (module slot 1 fixed)
      ExactMatrix act(R, tdim, tdim);
      const ExactMatrix& sym = op.sym[i + 1][t];
      for (int idx = 0; idx < tdim; ++idx) {
        auto [tup, oidx] = guts->decode(i, idx);
        std::vector<gid> permuted = tup;
        std::swap(permuted[t - 1], permuted[t]);
        for (int outp = 0; outp < op.dim(i + 1); ++outp) {
          Scalar c = sym.entry(outp, oidx);
          if (c != 0) act.add_entry(guts->encode(i, permuted, outp), idx, c);
        }
      }
      actions.push_back(std::move(act));
    }
    guts->lev[i] = coinvariants(tensor, actions);
  }

  // flat F' layout, descending level
  guts->offset.assign(D + 1, 0);
  guts->fdim = 0;
  for (int i = D; i >= 0; --i) {
    guts->offset[i] = guts->fdim;
    guts->fdim += guts->lev[i].quotient.rank();
  }
  guts->flevel.assign(guts->fdim, 0);
  for (int i = 0; i <= D; ++i)
    for (int k = 0; k < guts->lev[i].quotient.rank(); ++k)
      guts->flevel[guts->offset[i] + k] = i;

  // relation generators
  std::vector<SparseVec> gens;
  // R1: internal algebra compositions agree with evaluated operations
  for (int p = 1; p <= D; ++p)
    for (int q = 2; p + q - 1 <= D; ++q) {
      if (q > op.max_arity) continue;
      for (int w = 0; w < op.dim(p + 1); ++w)
        for (int g = 0; g < op.dim(q); ++g)
          for (int s = 2; s <= p + 1; ++s) {
            OperadElement comp =
                op.compose(op.basis_element(p + 1, w), s, op.basis_element(q, g));
            // enumerate p-1 outer args and q inner args
            std::vector<gid> outer(p - 1), inner(q);
            std::function<void(int)> rec_inner = [&](int pos) {
              if (pos == q) {
                // lhs wrap: list = outer[0..s-3], inner, outer[s-2..]
                std::vector<gid> list;
                for (int t = 0; t < s - 2; ++t) list.push_back(outer[t]);
                list.insert(list.end(), inner.begin(), inner.end());
                for (int t = s - 2; t < p - 1; ++t) list.push_back(outer[t]);
                SparseVec lhs = guts->wrap(comp, 1, list);
                // rhs wrap: gamma evaluated in A at position s-1
                SparseVec val = a->apply_basis(q, g, inner);
                SparseVec rhs(guts->fdim);
                for (auto& [z, cz] : val.entries()) {
                  std::vector<gid> list2;
                  for (int t = 0; t < s - 2; ++t) list2.push_back(outer[t]);
                  list2.push_back(z);
                  for (int t = s - 2; t < p - 1; ++t) list2.push_back(outer[t]);
                  rhs.axpy(R, cz, guts->wrap(op.basis_element(p + 1, w), 1, list2));
                }
                SparseVec rel = lhs;
                rel.axpy(R, R.from_long(-1), rhs);
                if (!rel.is_zero()) gens.push_back(std::move(rel));
                return;
              }
              for (gid x = 0; x < adim; ++x) {
                inner[pos] = x;
                rec_inner(pos + 1);
              }
            };
            std::function<void(int)> rec_outer = [&](int pos) {
              if (pos == p - 1) {
                rec_inner(0);
                return;
              }
              for (gid x = 0; x < adim; ++x) {
                outer[pos] = x;
                rec_outer(pos + 1);
              }
            };
            rec_outer(0);
          }
    }
  // R3: plugging the algebra unit
  if (a->unital() && op.has_plug()) {
    for (int p = 1; p <= D; ++p)
      for (int w = 0; w < op.dim(p + 1); ++w)
        for (int s = 2; s <= p + 1; ++s) {
          SparseVec plugged = op.plug_matrix(p + 1, s)
                                  .apply(SparseVec::unit(op.dim(p + 1), w));
          std::vector<gid> rest(p - 1);
          std::function<void(int)> rec = [&](int pos) {
            if (pos == p - 1) {
              std::vector<gid> list;
              for (int t = 0; t < s - 2; ++t) list.push_back(rest[t]);
              list.push_back(a->unit());
              for (int t = s - 2; t < p - 1; ++t) list.push_back(rest[t]);
              SparseVec lhs = guts->wrap(op.basis_element(p + 1, w), 1, list);
              SparseVec rhs(guts->fdim);
              for (auto& [w2, c] : plugged.entries())
                rhs.axpy(R, c, guts->wrap(op.basis_element(p, w2), 1, rest));
              SparseVec rel = lhs;
              rel.axpy(R, R.from_long(-1), rhs);
              if (!rel.is_zero()) gens.push_back(std::move(rel));
              return;
            }
            for (gid x = 0; x < adim; ++x) {
              rest[pos] = x;
              rec(pos + 1);
            }
          };
          rec(0);
        }
  }

  // two-sided ideal within the truncation: x * g * y over the F' basis
  std::vector<SparseVec> relations = gens;
  auto top_level = [&](const SparseVec& v) {
    int top = 0;
    for (auto& [i, c] : v.entries()) top = std::max(top, guts->flevel[i]);
    return top;
  };
  for (auto& g : gens) {
    int tg = top_level(g);
    for (int fx = 0; fx < guts->fdim; ++fx) {
      int lx = guts->flevel[fx];
      if (lx == 0 || lx + tg > D) continue;
      SparseVec ex = SparseVec::unit(guts->fdim, fx);
      relations.push_back(guts->mult_f(ex, g));
      relations.push_back(guts->mult_f(g, ex));
      for (int fy = 0; fy < guts->fdim; ++fy) {
        int ly = guts->flevel[fy];
        if (ly == 0 || lx + tg + ly > D) continue;
        SparseVec ey = SparseVec::unit(guts->fdim, fy);
        relations.push_back(guts->mult_f(guts->mult_f(ex, g), ey));
      }
    }
    for (int fy = 0; fy < guts->fdim; ++fy) {
      int ly = guts->flevel[fy];
      if (ly == 0 || tg + ly > D) continue;
      // right-only products already covered above when lx loop includes
      // nothing; add g * y explicitly
      SparseVec ey = SparseVec::unit(guts->fdim, fy);
      relations.push_back(guts->mult_f(g, ey));
    }
  }

  BasedModule fmod = BasedModule::free(R, guts->fdim, "f");
  {
    // carry the wrap labels over for readable quotient output
    std::vector<std::string> labels(guts->fdim);
    for (int i = 0; i <= D; ++i)
      for (int k = 0; k < guts->lev[i].quotient.rank(); ++k)
        labels[guts->offset[i] + k] = guts->lev[i].quotient.labels[k];
    fmod = BasedModule::with_labels(R, labels);
  }
  guts->global = quotient_by_relations(fmod, relations, "p");

  EnvelopingAlgebra P;
  P.alg = a;
  P.max_level = D;
  P.basis = guts->global.quotient;
  P.torsion = guts->global.torsion;
  P.guts = guts;
  // levels of surviving basis elements: field path keeps original basis
  // vectors, so read the level off the section column when it is a unit
  // vector; otherwise take the top level of the section
  P.level.resize(P.basis.rank());
  for (int k = 0; k < P.basis.rank(); ++k) {
    int top = 0;
    for (int r2 = 0; r2 < guts->global.section.rows(); ++r2)
      if (guts->global.section.entry(r2, k) != 0)
        top = std::max(top, guts->flevel[r2]);
    P.level[k] = top;
  }
  // filtration ranks: rank of the image of levels <= k under the projection
  for (int k = 0; k <= D; ++k) {
    std::vector<SparseVec> cols;
    for (int i = 0; i <= k; ++i)
      for (int t = 0; t < guts->lev[i].quotient.rank(); ++t) {
        SparseVec e = SparseVec::unit(guts->fdim, guts->offset[i] + t);
        cols.push_back(guts->global.projection.apply(e));
      }
    P.filtration_ranks.push_back(
        rank(matrix_from_cols(R, cols, P.basis.rank()).transpose()));
  }
  // unit: the class of the empty wrap
  {
    SparseVec u =
        guts->global.projection.apply(SparseVec::unit(guts->fdim, guts->offset[0]));
    require(u.nnz() == 1 && u.entries()[0].second == 1, errc::validate,
            "envelope unit did not survive as a basis vector");
    P.unit = u.entries()[0].first;
  }
  // multiplication table
  for (int x = 0; x < P.basis.rank(); ++x)
    for (int y = 0; y < P.basis.rank(); ++y) {
      if (P.level[x] + P.level[y] > D) continue;
      SparseVec fx = guts->lift_p(SparseVec::unit(P.basis.rank(), x));
      SparseVec fy = guts->lift_p(SparseVec::unit(P.basis.rank(), y));
      P.mult[{x, y}] = guts->global.projection.apply(guts->mult_f(fx, fy));
    }
  return P;
}

// Free A-module on a based module U: F(U) = P_A (x) U with the tautological
// action on the P factor.
inline AModule free_module(const EnvelopingAlgebra& P, const BasedModule& u) {
  const GroundRing& R = P.alg->ring();
  require(u.ring == R, errc::setup, "coefficient ring mismatch");
  std::vector<std::string> labels;
  for (int i = 0; i < P.dim(); ++i)
    for (int k = 0; k < u.rank(); ++k)
      labels.push_back(P.basis.labels[i] + "." + u.labels[k]);
  std::map<int, BasedModule> comps;
  comps[0] = BasedModule::with_labels(R, labels);
  AModule base = P.as_module();
  auto basep = std::make_shared<AModule>(std::move(base));
  int urank = u.rank();
  int pdim = P.dim();
  AModule::ActionFn act = [basep, urank, pdim](int arity, int omega_idx, int slot,
                                               const std::vector<gid>& args,
                                               mgid m) -> SparseVec {
    int pi = m / urank, uk = m % urank;
    SparseVec v = basep->act_basis(arity, omega_idx, slot, args, pi);
    SparseVec out(pdim * urank);
    for (auto& [i, c] : v.entries()) out.set(i * urank + uk, c);
    return out;
  };
  return AModule::make(P.alg, comps, act, "F(" + std::to_string(u.rank()) + ")");
}

// rank of Hom_{A-mod}(M, N) for degree-0 modules over the standard kinds:
// solve the linear system of module-map constraints against the binary op
inline int module_hom_rank(const AModule& M, const AModule& N,
                           std::vector<ExactMatrix>* basis_out = nullptr) {
  const GradedAlgebra& A = M.algebra();
  const GroundRing& R = A.ring();
  const int bin = A.binary_index();
  // unknowns: phi(m) coordinates, degree-preserving
  std::vector<std::pair<mgid, mgid>> vars;
  std::map<std::pair<mgid, mgid>, int> var_of;
  for (mgid m = 0; m < M.flat_dim(); ++m) {
    int d = M.deg_of(m);
    if (!N.has_comp(d)) continue;
    for (int t = 0; t < N.comp_rank(d); ++t) {
      var_of[{m, N.mgid_of(d, t)}] = static_cast<int>(vars.size());
      vars.push_back({m, N.mgid_of(d, t)});
    }
  }
  std::vector<SparseVec> rows;
  for (gid a = 0; a < A.flat_dim(); ++a)
    for (mgid m = 0; m < M.flat_dim(); ++m)
      for (int slot = 1; slot <= 2; ++slot) {
        if (!M.act_in_range(M.deg_of(m), {a})) continue;
        int dout = M.deg_of(m) + A.deg_of(a);
        if (!N.has_comp(dout)) continue;
        // phi(act(a, m)) - act(a, phi(m)) = 0
        std::map<int, SparseVec> eq;  // target coord -> row
        auto row_of = [&](mgid nt) -> SparseVec& {
          auto it = eq.find(nt);
          if (it == eq.end())
            it = eq.emplace(nt, SparseVec(static_cast<int>(vars.size()))).first;
          return it->second;
        };
        SparseVec am = M.act_basis(2, bin, slot == 1 ? 2 : 1, {a}, m);
        for (auto& [ms, c] : am.entries()) {
          if (!N.has_comp(M.deg_of(ms))) continue;
          for (int t = 0; t < N.comp_rank(M.deg_of(ms)); ++t) {
            auto it = var_of.find({ms, N.mgid_of(M.deg_of(ms), t)});
            if (it != var_of.end())
              row_of(N.mgid_of(M.deg_of(ms), t)).add_to(R, it->second, c);
          }
        }
        for (int t = 0; t < N.comp_rank(M.deg_of(m)); ++t) {
          mgid ns = N.mgid_of(M.deg_of(m), t);
          auto it = var_of.find({m, ns});
          if (it == var_of.end()) continue;
          SparseVec img = N.act_basis(2, bin, slot == 1 ? 2 : 1, {a}, ns);
          for (auto& [nt, c] : img.entries())
            row_of(nt).add_to(R, it->second, R.neg(c));
        }
        for (auto& [nt, row] : eq)
          if (!row.is_zero()) rows.push_back(row);
      }
  ExactMatrix sys = matrix_from_rows(R, rows, static_cast<int>(vars.size()));
  auto kern = kernel_basis(sys);
  if (basis_out) {
    for (auto& k : kern) {
      ExactMatrix phi(R, N.flat_dim(), M.flat_dim());
      for (auto& [v, c] : k.entries()) phi.set_entry(vars[v].second, vars[v].first, c);
      basis_out->push_back(std::move(phi));
    }
  }
  return static_cast<int>(kern.size());
}

}  // namespace oforge
