#include <catch2/catch_amalgamated.hpp>

#include "operad_forge/operad.hpp"

using namespace oforge;

TEST_CASE("standard operad ranks", "[operad]") {
  auto Q = GroundRing::rationals();

  auto com = build_standard(OperadKind::com, true, Q, 4);
  for (int n = 1; n <= 4; ++n) CHECK(com.dim(n) == 1);

  auto ass = build_standard(OperadKind::ass, true, Q, 3);
  CHECK(ass.dim(1) == 1);
  CHECK(ass.dim(2) == 2);
  CHECK(ass.dim(3) == 6);

  auto lie = build_standard(OperadKind::lie, false, Q, 4);
  CHECK(lie.dim(1) == 1);
  CHECK(lie.dim(2) == 1);
  CHECK(lie.dim(3) == 2);
  CHECK(lie.dim(4) == 6);
}

TEST_CASE("unit laws and simple compositions", "[operad]") {
  auto Q = GroundRing::rationals();
  auto com = build_standard(OperadKind::com, true, Q, 4);
  auto gen = com.basis_element(2, 0);
  CHECK(com.compose(gen, 1, com.basis_element(1, 0)).coords == gen.coords);
  CHECK(com.compose(gen, 1, gen).arity == 3);

  auto ass = build_standard(OperadKind::ass, true, Q, 3);
  for (int b = 0; b < ass.dim(3); ++b) {
    auto f = ass.basis_element(3, b);
    CHECK(com.unit_element().arity == 1);
    CHECK(ass.compose(ass.unit_element(), 1, f).coords == f.coords);
    for (int i = 1; i <= 3; ++i)
      CHECK(ass.compose(f, i, ass.unit_element()).coords == f.coords);
  }

  CHECK_THROWS_AS(ass.compose(ass.basis_element(2, 0), 3, ass.basis_element(2, 0)),
                  forge_error);
  CHECK_THROWS_AS(ass.compose(ass.basis_element(3, 0), 1, ass.basis_element(2, 0)),
                  forge_error);
}

TEST_CASE("lie bracket composition lands on the left-normed basis", "[operad]") {
  auto Q = GroundRing::rationals();
  auto lie = build_standard(OperadKind::lie, false, Q, 4);
  // bracket o_1 bracket = [[1,2],3], the first left-normed basis vector
  auto b = lie.basis_element(2, 0);
  auto c = lie.compose(b, 1, b);
  REQUIRE(c.arity == 3);
  CHECK(c.coords == SparseVec::unit(2, 0));
  CHECK(lie.space(3).labels[0] == "l1.2.3");

  // bracket o_2 bracket = [1,[2,3]] = [[2,3],1]... expressed in the basis:
  // [x1,[x2,x3]] = [[x1,x2],x3] - [[x1,x3],x2] (Jacobi in left-normed form)
  auto c2 = lie.compose(b, 2, b);
  SparseVec expect(2);
  expect.set(0, Scalar(1));
  expect.set(1, Q.from_long(-1));
  CHECK(c2.coords == expect);
}

TEST_CASE("axioms pass for built-ins over QQ, F5, ZZ up to arity 5", "[operad]") {
  std::vector<GroundRing> rings = {GroundRing::rationals(), GroundRing::prime_field(5),
                                   GroundRing::integers()};
  for (auto& R : rings) {
    CAPTURE(R.name());
    auto com = build_standard(OperadKind::com, true, R, 5);
    auto comrep = check_axioms(com);
    CHECK(comrep.pass());
    auto ass = build_standard(OperadKind::ass, true, R, 5);
    auto assrep = check_axioms(ass);
    CHECK(assrep.pass());
    auto lie = build_standard(OperadKind::lie, false, R, 5);
    auto lierep = check_axioms(lie);
    CHECK(lierep.pass());
    CHECK(ass.dim(4) == 24);
    CHECK(ass.dim(5) == 120);
    CHECK(lie.dim(5) == 24);
  }
}

TEST_CASE("lie over F2 still re-expresses (saturated span)", "[operad]") {
  auto F2 = GroundRing::prime_field(2);
  auto lie = build_standard(OperadKind::lie, false, F2, 4);
  CHECK(lie.dim(4) == 6);
  CHECK(check_axioms(lie).pass());
}

TEST_CASE("a perturbed composition table fails with a witness", "[operad]") {
  auto Q = GroundRing::rationals();
  auto ass = build_standard(OperadKind::ass, false, Q, 4);
  auto& table = ass.comp[{2, 1, 2}];
  SparseVec perturbed = table[0][0];
  perturbed.add_to(Q, 0, Scalar(1));
  table[0][0] = perturbed;
  auto rep = check_axioms(ass);
  CHECK(!rep.pass());
  CHECK(!rep.assoc_ok);
  CHECK(!rep.witnesses.empty());

  // at truncation 3 the same perturbation is still caught (equivariance)
  auto ass3 = build_standard(OperadKind::ass, false, Q, 3);
  auto& t3 = ass3.comp[{2, 1, 2}];
  SparseVec p3 = t3[0][0];
  p3.add_to(Q, 0, Scalar(1));
  t3[0][0] = p3;
  auto rep3 = check_axioms(ass3);
  CHECK(!rep3.pass());
  CHECK(!rep3.witnesses.empty());
}

TEST_CASE("base change preserves ranks and axioms", "[operad]") {
  auto Z = GroundRing::integers();
  auto lie_z = build_standard(OperadKind::lie, false, Z, 4);
  auto lie_f5 = base_change(lie_z, GroundRing::prime_field(5));
  CHECK(lie_f5.dim(1) == 1);
  CHECK(lie_f5.dim(2) == 1);
  CHECK(lie_f5.dim(3) == 2);
  CHECK(lie_f5.dim(4) == 6);

  auto com_q = build_standard(OperadKind::com, true, GroundRing::rationals(), 3);
  auto same = base_change(com_q, GroundRing::rationals());
  CHECK(same.dim(3) == 1);

  auto ass_z = build_standard(OperadKind::ass, true, Z, 4);
  auto ass_f2 = base_change(ass_z, GroundRing::prime_field(2));
  CHECK(ass_f2.dim(4) == 24);

  CHECK_THROWS_AS(base_change(com_q, Z), forge_error);
}

TEST_CASE("equivariance against arbitrary permutations (spot checks)", "[operad]") {
  auto Q = GroundRing::rationals();
  auto ass = build_standard(OperadKind::ass, false, Q, 5);
  // (sigma * f) o_i g == rho * (f o_{sigma^{-1}(i)} g) for full permutations
  for (auto& sigma : all_permutations(3)) {
    for (int i = 1; i <= 3; ++i) {
      auto f = ass.basis_element(3, 4);
      auto g = ass.basis_element(2, 1);
      OperadElement sf{3, ass.action(3, sigma).apply(f.coords)};
      auto lhs = ass.compose(sf, i, g);
      int j = perm_inverse(sigma)[i - 1];
      auto rhs_base = ass.compose(f, j, g);
      SparseVec rhs = ass.action(4, perm_block_outer(sigma, i, 2)).apply(rhs_base.coords);
      CHECK(lhs.coords == rhs);
    }
  }
}
