#pragma once

// Constructive rigidity check for planar scalar maps: if every simplex
// gradient has zero x2-component and the map vanishes on the boundary, the
// map is identically zero. The argument is verified exhaustively on the mesh
// structure itself:
//   1. every simplex has exactly one vertical vertex pair, and its gradient
//      x2-column is exactly k * (difference across that pair), checked on the
//      vertex indicator basis, so zero column forces equality across the pair;
//   2. every vertical lattice edge is such a pair of some simplex, so values
//      are constant along each mesh column;
//   3. the bottom row is boundary, hence zero, hence every value is zero.

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "morrey/mesh.hpp"
#include "morrey/scalar.hpp"

namespace morrey::test_support {

struct LemmaCheck {
  bool ok = true;
  std::string detail;

  void fail(std::string what) {
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += std::move(what);
  }
};

inline LemmaCheck verify_zero_x2_column_rigidity(const mesh::CubeMesh& msh) {
  LemmaCheck check;
  if (msh.dim() != 2) {
    check.fail("lemma check is planar");
    return check;
  }
  const auto k = static_cast<long long>(msh.subdivisions());
  std::set<std::pair<std::size_t, std::size_t>> covered;  // (lower node, upper node)

  std::vector<Rational> nodal(msh.node_count(), Rational(0));
  auto mesh_ptr = std::make_shared<const mesh::CubeMesh>(msh);

  for (std::size_t sid = 0; sid < msh.simplex_count(); ++sid) {
    const auto nodes = msh.simplex_nodes(sid);
    const auto& perm = msh.permutations()[sid % msh.perm_count()];

    // exactly one consecutive pair steps along x2
    std::size_t pair_t = msh.dim();
    for (std::size_t t = 0; t < msh.dim(); ++t)
      if (perm[t] == 1) {
        pair_t = t;
        break;
      }
    if (pair_t == msh.dim()) {
      check.fail("simplex " + std::to_string(sid) + " has no vertical step");
      return check;
    }
    const std::size_t lower = nodes[pair_t];
    const std::size_t upper = nodes[pair_t + 1];
    const auto la = msh.node_lattice(lower);
    const auto lb = msh.node_lattice(upper);
    if (lb[0] != la[0] || lb[1] != la[1] + 1) {
      check.fail("vertical pair of simplex " + std::to_string(sid) + " is not a lattice step");
      return check;
    }

    // the x2 gradient column depends on the vertical pair only: +-k on the
    // pair's indicators, 0 on the third vertex
    for (std::size_t vi = 0; vi < 3; ++vi) {
      const std::size_t w = nodes[vi];
      nodal[w] = Rational(1);
      mesh::PwAffineMap<Rational> ind(mesh_ptr, 1, nodal);
      auto g = mesh::simplex_gradient(ind, sid);
      nodal[w] = Rational(0);
      Rational expected(0);
      if (w == upper) expected = Rational(k);
      if (w == lower) expected = Rational(-k);
      if (g.at(0, 1) != expected) {
        check.fail("x2 column of simplex " + std::to_string(sid) +
                   " is not k * (vertical difference)");
        return check;
      }
    }
    covered.insert({lower, upper});
  }

  // every vertical lattice edge is covered, so zero x2-columns force values
  // constant along every column; the bottom row is boundary
  for (std::size_t v = 0; v < msh.node_count(); ++v) {
    const auto idx = msh.node_lattice(v);
    if (idx[1] == 0) continue;
    mesh::CubeMesh::Lattice below = idx;
    below[1] -= 1;
    if (!covered.count({msh.node_index(below), v})) {
      check.fail("vertical edge below node " + std::to_string(v) + " is not covered");
      return check;
    }
  }
  for (std::size_t v = 0; v < msh.node_count(); ++v) {
    const auto idx = msh.node_lattice(v);
    if (idx[1] == 0 && !msh.boundary_node(v)) {
      check.fail("bottom row node " + std::to_string(v) + " is not boundary");
      return check;
    }
  }
  return check;
}

}  // namespace morrey::test_support
