#include <catch2/catch_amalgamated.hpp>

#include "morrey/checkers.hpp"
#include "morrey/constructions.hpp"
#include "morrey/functionals.hpp"
#include "support/oracles.hpp"

using namespace morrey;
using constructions::ZigZagProfile;
using density::Density;
using functionals::ess_sup_shifted;
using functionals::weak_mqc_inequality_holds;
using mesh::build_kuhn_mesh;
using mesh::PwAffineMap;

namespace {

GradientPoint<Rational> base_point_P() {
  const Rational half = fraction<Rational>(1, 2);
  return GradientPoint<Rational>(2, 2, {half, Rational(0), half, Rational(0)});
}

// random indicator density over 1-3 segments in R^{n*m}
template <class S>
Density<S> random_indicator(std::size_t n, std::size_t m, RngStream& rng) {
  const std::size_t dim = n * m;
  std::vector<Segment<S>> segs;
  const std::size_t count = 1 + rng.index(3);
  for (std::size_t s = 0; s < count; ++s) {
    Point<S> a(dim), b(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      a[j] = rng.uniform_scalar<S>(S(-1), S(1));
      b[j] = rng.uniform_scalar<S>(S(-1), S(1));
    }
    segs.push_back({std::move(a), std::move(b)});
  }
  return Density<S>::indicator(
      "random_indicator", n, m,
      density::IndicatorSpec<S>{SegmentUnionSet<S>(dim, std::move(segs)), S(0), S(1),
                                density::default_indicator_tolerance<S>()},
      "test indicator");
}

}  // namespace

TEST_CASE("shifted ess-sup of the oscillation at P is exactly zero") {
  auto f = density::make_square_boundary_4d<Rational>();
  auto map = constructions::zigzag_test_map<Rational>(ZigZagProfile::with_inv_epsilon(4),
                                                      build_kuhn_mesh(2, 8));
  auto r = ess_sup_shifted(f, base_point_P(), map);
  REQUIRE(r.value == 0);
  // every shifted gradient lands on a vertex of the square, so the argmax
  // shifted point is one of O and R
  const std::vector<Rational> O{0, 0, 0, 0}, R{1, 0, 1, 0};
  REQUIRE((r.shifted_point.entries() == O || r.shifted_point.entries() == R));
  REQUIRE(f(r.shifted_point) == r.value);
}

TEST_CASE("zero test map reduces the functional to a density evaluation") {
  auto f = density::make_square_boundary_4d<Rational>();
  auto zero = mesh::zero_map<Rational>(build_kuhn_mesh(2, 4), 2);
  auto P = base_point_P();
  auto r = ess_sup_shifted(f, P, zero);
  REQUIRE(r.value == f(P));
  REQUIRE(r.argmax_simplex == 0);  // tie-break: lowest simplex id

  auto g = density::make_segment_indicator_2d<Rational>({0, 0}, {1, 0});
  auto zg = mesh::zero_map<Rational>(build_kuhn_mesh(2, 4), 1);
  GradientPoint<Rational> A(2, 1, {Rational(5), Rational(5)});
  REQUIRE(ess_sup_shifted(g, A, zg).value == g(A));
}

TEST_CASE("a generic zero-boundary perturbation at P reaches off the set") {
  auto f = density::make_square_boundary_4d<double>();
  auto msh = build_kuhn_mesh(2, 8);
  auto interior = checkers::detail::interior_nodes<double>(*msh);
  RngStream rng(42, 1);
  auto map = checkers::detail::random_zero_boundary_map<double>(msh, 2, interior, 4.0, rng);
  GradientPoint<double> P(2, 2, {0.5, 0.0, 0.5, 0.0});
  auto r = ess_sup_shifted(f, P, map);
  REQUIRE(r.value == 1.0);  // brute force over all simplices agrees (oracle below)
  REQUIRE(test_oracles::sampled_ess_sup(f, P, map, 20000, 7) == 1.0);
}

TEST_CASE("enumeration max agrees with the sampling oracle on random triples") {
  RngStream trial_rng(123, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + trial_rng.index(2);
    const std::size_t k = 2 + 2 * trial_rng.index(2);
    auto d = random_indicator<Rational>(2, m, trial_rng);
    auto msh = build_kuhn_mesh(2, k);
    std::vector<Rational> nodal(msh->node_count() * m);
    for (auto& v : nodal) v = trial_rng.uniform_scalar<Rational>(Rational(-1), Rational(1));
    PwAffineMap<Rational> u(msh, m, std::move(nodal));
    std::vector<Rational> a_entries(2 * m);
    for (auto& e : a_entries) e = trial_rng.uniform_scalar<Rational>(Rational(-1), Rational(1));
    GradientPoint<Rational> A(2, m, std::move(a_entries));

    auto exact = ess_sup_shifted(d, A, u);
    auto sampled = test_oracles::sampled_ess_sup(d, A, u, 10000, 1000 + trial);
    REQUIRE(exact.value == sampled);
  }
}

TEST_CASE("float-mode enumeration stays within 1e-12 of the sampling oracle") {
  RngStream trial_rng(321, 0);
  for (int trial = 0; trial < 10; ++trial) {
    auto d = random_indicator<double>(2, 2, trial_rng);
    auto msh = build_kuhn_mesh(2, 4);
    std::vector<double> nodal(msh->node_count() * 2);
    for (auto& v : nodal) v = trial_rng.uniform(-1, 1);
    PwAffineMap<double> u(msh, 2, std::move(nodal));
    GradientPoint<double> A(2, 2, {trial_rng.uniform(-1, 1), trial_rng.uniform(-1, 1),
                                   trial_rng.uniform(-1, 1), trial_rng.uniform(-1, 1)});
    auto exact = ess_sup_shifted(d, A, u);
    auto sampled = test_oracles::sampled_ess_sup(d, A, u, 10000, 55 + trial);
    REQUIRE(std::fabs(exact.value - sampled) <= 1e-12);
  }
}

TEST_CASE("result invariants: argmax dominates a random subset, volume positive") {
  RngStream rng(9, 0);
  auto d = random_indicator<Rational>(2, 1, rng);
  auto msh = build_kuhn_mesh(2, 6);
  std::vector<Rational> nodal(msh->node_count());
  for (auto& v : nodal) v = rng.uniform_scalar<Rational>(Rational(-1), Rational(1));
  PwAffineMap<Rational> u(msh, 1, std::move(nodal));
  GradientPoint<Rational> A(2, 1, {fraction<Rational>(1, 3), fraction<Rational>(1, 7)});
  auto r = ess_sup_shifted(d, A, u);
  REQUIRE(msh->simplex_volume<Rational>() > 0);
  std::vector<Rational> shifted(2);
  for (int i = 0; i < 50; ++i) {
    const std::size_t sid = rng.index(msh->simplex_count());
    auto g = mesh::simplex_gradient(u, sid);
    for (std::size_t e = 0; e < 2; ++e) shifted[e] = A.entries()[e] + g.a[e];
    REQUIRE(d(std::span<const Rational>(shifted)) <= r.value);
  }
}

TEST_CASE("pointwise-larger densities never decrease the shifted ess-sup") {
  // indicator of OM only is pointwise >= indicator of the full square
  Point<Rational> O(4, Rational(0)), M(4, Rational(0));
  M[0] = 1;
  auto d_small_set = Density<Rational>::indicator(
      "om_only", 2, 2,
      density::IndicatorSpec<Rational>{SegmentUnionSet<Rational>(4, {Segment<Rational>{O, M}}),
                                       Rational(0), Rational(1), Rational(0)},
      "");
  auto d_large_set = density::make_square_boundary_4d<Rational>();
  RngStream rng(31, 0);
  auto msh = build_kuhn_mesh(2, 4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Rational> nodal(msh->node_count() * 2);
    for (auto& v : nodal) v = rng.uniform_scalar<Rational>(Rational(-1), Rational(1));
    PwAffineMap<Rational> u(msh, 2, std::move(nodal));
    std::vector<Rational> a(4);
    for (auto& e : a) e = rng.uniform_scalar<Rational>(Rational(-1), Rational(1));
    GradientPoint<Rational> A(2, 2, std::move(a));
    REQUIRE(ess_sup_shifted(d_small_set, A, u).value >=
            ess_sup_shifted(d_large_set, A, u).value);
  }
}

TEST_CASE("zero-boundary inequality checks") {
  auto f = density::make_square_boundary_4d<Rational>();
  auto P = base_point_P();
  auto zero = mesh::zero_map<Rational>(build_kuhn_mesh(2, 8), 2);
  auto [holds, r] = weak_mqc_inequality_holds(f, P, zero);
  REQUIRE(holds);  // 1 <= 1
  REQUIRE(r.value == 1);

  // scalar case: any zero-boundary map with a nonzero x2-derivative exits the
  // segment, so the sup side is 1
  auto g = density::make_segment_indicator_2d<Rational>({0, 0}, {1, 0});
  auto m4 = build_kuhn_mesh(2, 4);
  auto bump = mesh::interpolate<Rational>(
      [](std::span<const Rational> x, std::span<Rational> out) {
        out[0] = x[0] * (Rational(1) - x[0]) * x[1] * (Rational(1) - x[1]);
      },
      m4, 1);
  REQUIRE(bump.zero_boundary());
  bool has_nonzero_x2 = false;
  for (std::size_t sid = 0; sid < m4->simplex_count(); ++sid)
    has_nonzero_x2 = has_nonzero_x2 || mesh::simplex_gradient(bump, sid).at(0, 1) != 0;
  REQUIRE(has_nonzero_x2);
  GradientPoint<Rational> A1(2, 1, {fraction<Rational>(1, 2), Rational(0)});
  auto [holds2, r2] = weak_mqc_inequality_holds(g, A1, bump);
  REQUIRE(holds2);
  REQUIRE(r2.value == 1);

  // base point outside the segment: the sup side is 1 for any admissible map
  auto fr = density::make_square_boundary_4d<Rational>();
  GradientPoint<Rational> A_far(2, 2, {Rational(2), 0, 0, 0});
  RngStream rng(5, 2);
  auto interior = checkers::detail::interior_nodes<Rational>(*m4);
  auto rnd = checkers::detail::random_zero_boundary_map<Rational>(m4, 2, interior, Rational(4),
                                                                  rng);
  auto [holds3, r3] = weak_mqc_inequality_holds(fr, A_far, rnd);
  REQUIRE(holds3);
  REQUIRE(r3.value == 1);
}

TEST_CASE("the zero-boundary inequality rejects inadmissible maps") {
  auto f = density::make_square_boundary_4d<Rational>();
  auto map = constructions::zigzag_test_map<Rational>(ZigZagProfile::with_inv_epsilon(2),
                                                      build_kuhn_mesh(2, 4));
  REQUIRE(map.zero_boundary() == false);
  REQUIRE_THROWS_AS(weak_mqc_inequality_holds(f, base_point_P(), map), InputError);
}

TEST_CASE("dimension mismatches are rejected before evaluation") {
  auto f = density::make_square_boundary_4d<Rational>();
  auto map1 = mesh::zero_map<Rational>(build_kuhn_mesh(2, 2), 1);  // m mismatch
  REQUIRE_THROWS_AS(ess_sup_shifted(f, base_point_P(), map1), InputError);
  auto map2 = mesh::zero_map<Rational>(build_kuhn_mesh(2, 2), 2);
  GradientPoint<Rational> tiny(1, 1, {Rational(0)});
  REQUIRE_THROWS_AS(ess_sup_shifted(f, tiny, map2), InputError);
}

TEST_CASE("ess-sup results serialize") {
  auto f = density::make_square_boundary_4d<Rational>();
  auto map = constructions::zigzag_test_map<Rational>(ZigZagProfile::with_inv_epsilon(2),
                                                      build_kuhn_mesh(2, 4));
  auto r = ess_sup_shifted(f, base_point_P(), map);
  auto j = functionals::to_json(r);
  REQUIRE(j.at("value") == "0");
  REQUIRE(j.at("gradient").size() == 2);
  REQUIRE(j.at("gradient")[0].size() == 2);
  REQUIRE(j.contains("argmax_simplex"));
  REQUIRE(j.at("shifted_point").at("entries").size() == 4);
}

TEST_CASE("threaded sweeps match the sequential result") {
  auto f = density::make_square_boundary_4d<double>();
  auto msh = build_kuhn_mesh(2, 8);
  RngStream rng(77, 0);
  std::vector<double> nodal(msh->node_count() * 2);
  for (auto& v : nodal) v = rng.uniform(-1, 1);
  PwAffineMap<double> u(msh, 2, std::move(nodal));
  GradientPoint<double> P(2, 2, {0.5, 0, 0.5, 0});
  auto seq = ess_sup_shifted(f, P, u, 1);
  auto par = ess_sup_shifted(f, P, u, 4);
  REQUIRE(seq.value == par.value);
  REQUIRE(seq.argmax_simplex == par.argmax_simplex);
}
