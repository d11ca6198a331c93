#pragma once

// Test-side oracles. These deliberately take different computation routes
// than the library: dense parameter sampling instead of projection formulas,
// determinant volumes instead of the closed form, point sampling plus
// location instead of simplex enumeration.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "morrey/density.hpp"
#include "morrey/functionals.hpp"
#include "morrey/geometry.hpp"
#include "morrey/mesh.hpp"
#include "morrey/util.hpp"

namespace morrey::test_oracles {

// Min distance to a segment union by scanning a dense parameter grid on each
// segment.
inline double brute_force_segment_distance(const SegmentUnionSet<double>& set,
                                           std::span<const double> x, int steps = 20000) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& seg : set.segments()) {
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      double acc = 0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double p = seg.a[j] + t * (seg.b[j] - seg.a[j]);
        acc += (x[j] - p) * (x[j] - p);
      }
      best = std::min(best, acc);
    }
  }
  return std::sqrt(best);
}

// |det(v_1 - v_0, ..., v_n - v_0)| / n! by Gaussian elimination.
inline double simplex_volume_determinant(const mesh::CubeMesh& msh, std::size_t sid) {
  const std::size_t n = msh.dim();
  const auto nodes = msh.simplex_nodes(sid);
  std::array<std::array<double, 4>, 4> e{};
  const auto p0 = msh.node_point<double>(nodes[0]);
  for (std::size_t r = 0; r < n; ++r) {
    const auto p = msh.node_point<double>(nodes[r + 1]);
    for (std::size_t c = 0; c < n; ++c) e[r][c] = p[c] - p0[c];
  }
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(e[r][col]) > std::fabs(e[pivot][col])) pivot = r;
    if (e[pivot][col] == 0.0) return 0.0;
    if (pivot != col) {
      std::swap(e[pivot], e[col]);
      det = -det;
    }
    det *= e[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = e[r][col] / e[col][col];
      for (std::size_t c = col; c < n; ++c) e[r][c] -= f * e[col][c];
    }
  }
  double fact = 1.0;
  for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<double>(i);
  return std::fabs(det) / fact;
}

// Sampled ess-sup: random interior points, each evaluated through its
// containing simplex. Values are cached per simplex since the shifted density
// is constant there; the point of the oracle is that the max runs over hit
// simplices found by location, not over an enumeration.
template <class S>
S sampled_ess_sup(const density::Density<S>& d, const GradientPoint<S>& A,
                  const mesh::PwAffineMap<S>& u, std::uint64_t samples, std::uint64_t seed) {
  const mesh::CubeMesh& msh = *u.mesh();
  RngStream rng(seed, 0xe55);
  std::vector<char> seen(msh.simplex_count(), 0);
  std::vector<S> cached(msh.simplex_count());
  Point<S> x(msh.dim());
  std::vector<S> shifted(A.size());
  bool any = false;
  S best{};
  for (std::uint64_t i = 0; i < samples; ++i) {
    for (std::size_t j = 0; j < msh.dim(); ++j) x[j] = rng.uniform_scalar01<S>();
    const std::size_t sid = msh.locate<S>(x);
    if (!seen[sid]) {
      auto g = mesh::simplex_gradient(u, sid);
      for (std::size_t e2 = 0; e2 < A.size(); ++e2) shifted[e2] = A.entries()[e2] + g.a[e2];
      cached[sid] = d(std::span<const S>(shifted));
      seen[sid] = 1;
    }
    if (!any || cached[sid] > best) {
      any = true;
      best = cached[sid];
    }
  }
  return best;
}

}  // namespace morrey::test_oracles
