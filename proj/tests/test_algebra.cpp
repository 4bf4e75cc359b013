#include <catch2/catch_amalgamated.hpp>

#include "lie_fixtures.hpp"
#include "operad_forge/algebra.hpp"

using namespace oforge;

namespace {
std::vector<int> degree_ranks(const GradedAlgebra& a, int D) {
  std::vector<int> out;
  for (int d = 0; d <= D; ++d) out.push_back(a.comp_rank(d));
  return out;
}
}  // namespace

TEST_CASE("free algebra degree ranks", "[algebra]") {
  auto Q = GroundRing::rationals();
  auto V = BasedModule::free(Q, 2, "x");

  auto ass = std::make_shared<FinOperad>(build_standard(OperadKind::ass, true, Q, 3));
  auto TA = free_algebra(ass, V, 3);
  CHECK(degree_ranks(TA, 3) == std::vector<int>{1, 2, 4, 8});

  auto com = std::make_shared<FinOperad>(build_standard(OperadKind::com, true, Q, 3));
  auto SA = free_algebra(com, V, 3);
  CHECK(degree_ranks(SA, 3) == std::vector<int>{1, 2, 3, 4});

  auto lie = std::make_shared<FinOperad>(build_standard(OperadKind::lie, false, Q, 3));
  auto LA = free_algebra(lie, V, 3);
  CHECK(LA.comp_rank(0) == 0);
  CHECK(LA.comp_rank(1) == 2);
  CHECK(LA.comp_rank(2) == 1);
  CHECK(LA.comp_rank(3) == 2);

  CHECK_THROWS_AS(free_algebra(ass, V, 4), forge_error);  // beyond operad truncation
}

TEST_CASE("symmetric algebra ranks and freeness over ZZ", "[algebra]") {
  auto Q = GroundRing::rationals();
  auto S3 = symmetric_algebra(BasedModule::free(Q, 3, "x"), 4);
  CHECK(degree_ranks(S3, 4) == std::vector<int>{1, 3, 6, 10, 15});

  auto S1 = symmetric_algebra(BasedModule::free(Q, 1, "x"), 3);
  CHECK(degree_ranks(S1, 3) == std::vector<int>{1, 1, 1, 1});

  auto Z = GroundRing::integers();
  auto SZ = symmetric_algebra(BasedModule::free(Z, 2, "x"), 3);
  CHECK(degree_ranks(SZ, 3) == std::vector<int>{1, 2, 3, 4});
  REQUIRE(SZ.free_info().has_value());
  for (auto& [d, q] : SZ.free_info()->data->quots) CHECK(q.torsion.empty());

  // products are plain monomial merges
  gid x1 = SZ.free_info()->monomial_gid.at({0});
  gid x2 = SZ.free_info()->monomial_gid.at({1});
  gid x1x2 = SZ.free_info()->monomial_gid.at({0, 1});
  CHECK(SZ.product(x1, x2) == SZ.basis_flat(x1x2));
  CHECK(SZ.product(x2, x1) == SZ.basis_flat(x1x2));

  // ranks agree across all three rings (free com-algebra route)
  auto F5 = GroundRing::prime_field(5);
  auto SF = symmetric_algebra(BasedModule::free(F5, 3, "x"), 4);
  CHECK(degree_ranks(SF, 4) == degree_ranks(S3, 4));
}

TEST_CASE("check_algebra passes on standard instances", "[algebra]") {
  auto Q = GroundRing::rationals();
  auto S = symmetric_algebra(BasedModule::free(Q, 2, "x"), 4);
  auto rep = check_algebra(S, 4);
  CHECK(rep.pass());
  CHECK(rep.checked > 0);

  auto ass = std::make_shared<FinOperad>(build_standard(OperadKind::ass, true, Q, 4));
  auto A = truncated_polynomial_algebra(ass, 2);
  CHECK(check_algebra(A, 0).pass());

  auto U = upper_triangular2(ass);
  CHECK(check_algebra(U, 0).pass());

  auto T = tensor_with_opposite(A);
  CHECK(T.flat_dim() == 4);
  CHECK(check_algebra(T, 0).pass());
}

TEST_CASE("degree-broken product fails with witness", "[algebra]") {
  auto Q = GroundRing::rationals();
  auto ass = std::make_shared<FinOperad>(build_standard(OperadKind::ass, true, Q, 3));
  // 1 in degree 0, x in degree 1, no degree-2 room, and x*x set to 1
  std::map<int, BasedModule> comps;
  comps[0] = BasedModule::with_labels(Q, {"1"});
  comps[1] = BasedModule::with_labels(Q, {"x"});
  comps[2] = BasedModule::with_labels(Q, {});
  auto bin = std::make_shared<detail::BinaryTable>();
  bin->flat_dim = 2;
  bin->table[{0, 0}] = SparseVec::unit(2, 0);
  bin->table[{0, 1}] = SparseVec::unit(2, 1);
  bin->table[{1, 0}] = SparseVec::unit(2, 1);
  bin->table[{1, 1}] = SparseVec::unit(2, 0);  // x*x = 1: degree mismatch
  auto bad = GradedAlgebra::make(ass, comps, true, false,
                                 make_standard_evaluator(ass, bin), "bad");
  auto rep = check_algebra(bad, 2);
  CHECK(!rep.pass());
  CHECK(!rep.witnesses.empty());
}

TEST_CASE("exterior powers", "[algebra]") {
  auto Q = GroundRing::rationals();
  auto g3 = BasedModule::free(Q, 3, "e");
  auto [l2, incl2] = exterior_power(g3, 2);
  CHECK(l2.rank() == 3);

  auto g2 = BasedModule::free(Q, 2, "e");
  auto [l1, incl1] = exterior_power(g2, 2);
  REQUIRE(l1.rank() == 1);
  // e1^e2 -> e1(x)e2 - e2(x)e1, tensor indices 1 and 2
  CHECK(incl1.entry(1, 0) == Scalar(1));
  CHECK(incl1.entry(2, 0) == Scalar(-1));

  auto [l4, incl4] = exterior_power(g3, 4);
  CHECK(l4.rank() == 0);

  // injectivity of the inclusion over QQ and over ZZ (saturated image)
  auto Z = GroundRing::integers();
  for (int i = 1; i <= 3; ++i) {
    auto [lq, iq] = exterior_power(BasedModule::free(Q, 4, "e"), i);
    CHECK(rank(iq) == lq.rank());
    auto [lz, iz] = exterior_power(BasedModule::free(Z, 4, "e"), i);
    CHECK(rank(iz) == lz.rank());
    auto snf = smith_normal_form(iz);
    for (auto& d : snf.invariant_factors) CHECK(d == 1);  // saturated
  }
}

TEST_CASE("jacobiator values", "[algebra]") {
  auto Q = GroundRing::rationals();

  CHECK(jacobiator(fixtures::abelian(Q, 3)).is_zero());
  CHECK(jacobiator(fixtures::sl2(Q)).is_zero());
  CHECK(jacobiator(fixtures::heisenberg(Q)).is_zero());
  CHECK(jacobiator(fixtures::solvable2(Q)).is_zero());

  auto J = jacobiator(fixtures::nonjacobi_cyclic(Q));
  REQUIRE(J.cols() == 1);
  CHECK(J.entry(0, 0) == Scalar(-1));
  CHECK(J.entry(1, 0) == Scalar(-1));
  CHECK(J.entry(2, 0) == Scalar(-1));

  CHECK(!jacobi_holds(fixtures::nonjacobi_mixed(Q)));

  CHECK(lie_from_constants(fixtures::sl2(Q)).jacobi);
  CHECK(lie_from_constants(fixtures::heisenberg(Q)).jacobi);
  CHECK(!lie_from_constants(fixtures::nonjacobi_cyclic(Q)).jacobi);
}

TEST_CASE("antisymmetry is enforced", "[algebra]") {
  auto Q = GroundRing::rationals();
  BasedModule g = BasedModule::free(Q, 2, "e");
  std::vector<std::vector<SparseVec>> bad(2, std::vector<SparseVec>(2, SparseVec(2)));
  bad[0][0] = SparseVec::unit(2, 0);  // [e1,e1] = e1
  CHECK_THROWS_AS(make_lie_data(g, bad, "bad"), forge_error);

  std::vector<std::vector<SparseVec>> bad2(2, std::vector<SparseVec>(2, SparseVec(2)));
  bad2[0][1] = SparseVec::unit(2, 0);
  bad2[1][0] = SparseVec::unit(2, 0);  // not -[e1,e2]
  CHECK_THROWS_AS(make_lie_data(g, bad2, "bad2"), forge_error);
}

TEST_CASE("lie algebras as graded algebras pass check_algebra iff Jacobi", "[algebra]") {
  auto Q = GroundRing::rationals();
  auto lie = std::make_shared<FinOperad>(build_standard(OperadKind::lie, false, Q, 3));
  auto sl2A = lie_algebra_to_graded(fixtures::sl2(Q), lie);
  CHECK(check_algebra(sl2A, 0).pass());
  auto badA = lie_algebra_to_graded(fixtures::nonjacobi_cyclic(Q), lie);
  CHECK(!check_algebra(badA, 0).pass());
}

TEST_CASE("extend_from_generators", "[algebra]") {
  auto Q = GroundRing::rationals();
  auto V = BasedModule::free(Q, 2, "x");
  auto com = std::make_shared<FinOperad>(build_standard(OperadKind::com, true, Q, 3));
  auto S = std::make_shared<const GradedAlgebra>(free_algebra(com, V, 3));

  SECTION("zero map kills positive degrees") {
    std::vector<SparseVec> zero(2, SparseVec(S->flat_dim()));
    auto h = extend_from_generators(S, S, zero);
    CHECK(check_hom(h, 3).pass());
    for (int d = 1; d <= 3; ++d) CHECK(h.mats.at(d).is_zero());
  }

  SECTION("inclusion of generators extends to the identity") {
    std::vector<SparseVec> incl;
    for (int i = 0; i < 2; ++i) incl.push_back(S->basis_flat(S->gid_of(1, i)));
    auto h = extend_from_generators(S, S, incl);
    CHECK(check_hom(h, 3).pass());
    for (auto& [d, m] : h.mats) CHECK(m == ExactMatrix::identity(Q, S->comp_rank(d)));
  }

  SECTION("free lie on 3 generators onto sl2") {
    auto lie = std::make_shared<FinOperad>(build_standard(OperadKind::lie, false, Q, 3));
    auto Free = std::make_shared<const GradedAlgebra>(
        free_algebra(lie, BasedModule::free(Q, 3, "v"), 3));
    auto sl2A = std::make_shared<const GradedAlgebra>(
        lie_algebra_to_graded(fixtures::sl2(Q), lie));
    std::vector<SparseVec> imgs = {sl2A->basis_flat(0), sl2A->basis_flat(1),
                                   sl2A->basis_flat(2)};  // e, f, h
    auto h = extend_from_generators(Free, sl2A, imgs);
    CHECK(check_hom(h, 3).pass());
    // the class of v1.v2 (x) [1,2] maps to [e,f] = h
    auto& data = *Free->free_info()->data;
    int tidx = data.encode({0, 1}, 0, 1);
    SparseVec cls = data.quots.at(2).projection.apply(
        SparseVec::unit(data.tensor_dim.at(2), tidx));
    SparseVec img = h.apply_flat(Free->flat_from(2, cls));
    CHECK(img == sl2A->basis_flat(2));
  }
}

TEST_CASE("adjunction: restriction and extension are mutually inverse", "[algebra]") {
  auto Q = GroundRing::rationals();
  auto V = BasedModule::free(Q, 2, "x");
  auto com = std::make_shared<FinOperad>(build_standard(OperadKind::com, true, Q, 3));
  auto S = std::make_shared<const GradedAlgebra>(free_algebra(com, V, 3));

  // extension then restriction: returns the generator images
  std::vector<SparseVec> f = {S->basis_flat(S->gid_of(1, 1)),
                              S->basis_flat(S->gid_of(1, 0))};
  auto h = extend_from_generators(S, S, f);
  for (int i = 0; i < 2; ++i) {
    SparseVec restricted = h.apply_flat(S->basis_flat(S->gid_of(1, i)));
    CHECK(restricted == f[i]);
  }

  // restriction then extension recovers a composite hom
  auto h2 = extend_from_generators(S, S, f);
  std::vector<SparseVec> comp_restrict;
  for (int i = 0; i < 2; ++i)
    comp_restrict.push_back(h.apply_flat(h2.apply_flat(S->basis_flat(S->gid_of(1, i)))));
  auto h3 = extend_from_generators(S, S, comp_restrict);
  for (int d = 0; d <= 3; ++d) {
    for (int k = 0; k < S->comp_rank(d); ++k) {
      SparseVec via_comp = h.apply_flat(h2.apply_flat(S->basis_flat(S->gid_of(d, k))));
      SparseVec via_ext = h3.apply_flat(S->basis_flat(S->gid_of(d, k)));
      CHECK(via_comp == via_ext);
    }
  }
}

TEST_CASE("free lie algebra over ZZ reports the operadic 2-torsion", "[algebra]") {
  auto Z = GroundRing::integers();
  auto lie = std::make_shared<FinOperad>(build_standard(OperadKind::lie, false, Z, 2));
  auto L = free_algebra(lie, BasedModule::free(Z, 2, "v"), 2);
  REQUIRE(L.free_info().has_value());
  // degree 2: (V (x) V (x) Lie(2))_{S_2} = Z{[v1,v2]} (+) Z/2 (+) Z/2,
  // one torsion class per generator from [v,v]
  auto& q = L.free_info()->data->quots.at(2);
  CHECK(L.comp_rank(2) == 1);
  REQUIRE(q.torsion == (std::vector<Int>{2, 2}));
}
