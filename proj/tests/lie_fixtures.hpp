#pragma once

#include "operad_forge/algebra.hpp"

// Shared Lie-algebra fixtures for the test battery.
namespace fixtures {

using namespace oforge;

inline LieAlgebraData lie_from_table(
    GroundRing R, std::vector<std::string> names,
    const std::vector<std::tuple<int, int, std::vector<long long>>>& brackets,
    std::string name) {
  int r = static_cast<int>(names.size());
  BasedModule g = BasedModule::with_labels(R, std::move(names));
  std::vector<std::vector<SparseVec>> table(r, std::vector<SparseVec>(r, SparseVec(r)));
  for (auto& [a, b, coeffs] : brackets) {
    SparseVec v(r);
    for (int k = 0; k < r; ++k)
      if (coeffs[k]) v.set(k, R.from_long(coeffs[k]));
    table[a][b] = v;
    table[b][a] = v.scaled(R, R.from_long(-1));
  }
  return make_lie_data(std::move(g), std::move(table), std::move(name));
}

// [e,f]=h, [h,e]=2e, [h,f]=-2f  (basis order e, f, h)
inline LieAlgebraData sl2(GroundRing R) {
  return lie_from_table(R, {"e", "f", "h"},
                        {{0, 1, {0, 0, 1}}, {2, 0, {2, 0, 0}}, {2, 1, {0, -2, 0}}},
                        "sl2");
}

// [x,y]=z, z central
inline LieAlgebraData heisenberg(GroundRing R) {
  return lie_from_table(R, {"x", "y", "z"}, {{0, 1, {0, 0, 1}}}, "heisenberg");
}

// [x,y]=y
inline LieAlgebraData solvable2(GroundRing R) {
  return lie_from_table(R, {"x", "y"}, {{0, 1, {0, 1}}}, "solvable2");
}

inline LieAlgebraData abelian(GroundRing R, int rank) {
  std::vector<std::string> names;
  for (int i = 0; i < rank; ++i) names.push_back("a" + std::to_string(i + 1));
  return lie_from_table(R, names, {}, "abelian" + std::to_string(rank));
}

// [e1,e2]=e1, [e2,e3]=e2, [e3,e1]=e3: Jacobi fails
inline LieAlgebraData nonjacobi_cyclic(GroundRing R) {
  return lie_from_table(
      R, {"e1", "e2", "e3"},
      {{0, 1, {1, 0, 0}}, {1, 2, {0, 1, 0}}, {2, 0, {0, 0, 1}}}, "nonjacobi-cyclic");
}

// [x,y]=z, [y,z]=x, [z,x]=z: Jacobi fails
inline LieAlgebraData nonjacobi_mixed(GroundRing R) {
  return lie_from_table(R, {"x", "y", "z"},
                        {{0, 1, {0, 0, 1}}, {1, 2, {1, 0, 0}}, {2, 0, {0, 0, 1}}},
                        "nonjacobi-mixed");
}

}  // namespace fixtures
