#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "morrey/constructions.hpp"
#include "morrey/density.hpp"
#include "morrey/functionals.hpp"
#include "morrey/mesh.hpp"
#include "morrey/scalar.hpp"
#include "morrey/util.hpp"
#include "morrey/witness.hpp"

namespace morrey::checkers {

using morrey::constructions::LaminateSpec;
using morrey::constructions::ZigZagProfile;
using morrey::density::Density;
using morrey::functionals::EssSupResult;
using morrey::mesh::CubeMesh;
using morrey::mesh::PwAffineMap;

enum class Family { zigzag, laminate, random_small_boundary };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::zigzag: return "zigzag";
    case Family::laminate: return "laminate";
    case Family::random_small_boundary: return "random";
  }
  return "?";
}

inline Family family_from_string(const std::string& s) {
  if (s == "zigzag") return Family::zigzag;
  if (s == "laminate") return Family::laminate;
  if (s == "random" || s == "random_small_boundary") return Family::random_small_boundary;
  throw InputError("unknown construction family: " + s + " (want zigzag|laminate|random)");
}

inline std::vector<Family> all_families() {
  return {Family::zigzag, Family::laminate, Family::random_small_boundary};
}

// A violation needs a strictly positive gap f(A) - ess_sup; exact mode can
// demand exactness, float mode keeps a guard band.
template <class S>
S default_search_margin() {
  if constexpr (is_exact_scalar_v<S>)
    return S{};
  else
    return 1e-9;
}

template <class S>
struct SearchConfig {
  std::size_t mesh_k = 8;
  std::uint64_t trials = 10000;
  std::uint64_t local_search_steps = 2000;
  std::uint64_t seed = 0;
  S gradient_cap = S(4);  // cap for randomly generated test maps
  S margin = default_search_margin<S>();
  std::size_t max_mesh_k = 2048;
  std::uint64_t random_per_delta = 32;
  unsigned threads = 1;
};

namespace detail {

template <class S>
struct MapMetrics {
  EssSupResult<S> ess;
  S grad_norm{};
  S boundary_sq{};
};

template <class S>
MapMetrics<S> map_metrics(const Density<S>& d, const GradientPoint<S>& A, const PwAffineMap<S>& u,
                          unsigned threads) {
  functionals::detail::check_dims(d, A, u);
  auto [ess, grad] = functionals::detail::sweep(d, A, u, threads);
  return {std::move(ess), std::move(grad), mesh::boundary_sup_sq(u)};
}

template <class S>
std::vector<std::size_t> interior_nodes(const CubeMesh& mesh) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < mesh.node_count(); ++v)
    if (!mesh.boundary_node(v)) out.push_back(v);
  return out;
}

// Interior nodal values uniform in [-1, 1]^m, then rescaled onto the gradient
// cap. Vanishes on the boundary by construction.
template <class S>
PwAffineMap<S> random_zero_boundary_map(std::shared_ptr<const CubeMesh> mesh, std::size_t m,
                                        const std::vector<std::size_t>& interior,
                                        const S& gradient_cap, RngStream& rng) {
  std::vector<S> nodal(mesh->node_count() * m, S{});
  for (std::size_t v : interior)
    for (std::size_t c = 0; c < m; ++c) nodal[v * m + c] = rng.uniform_symmetric<S>(S(1));
  PwAffineMap<S> map(std::move(mesh), m, std::move(nodal));
  S g = mesh::grad_sup_norm(map);
  if (g > gradient_cap && g > S{}) return map.scaled(gradient_cap / g);
  return map;
}

// Interior values uniform in [-1, 1]^m, boundary values uniform in
// [-delta/2, delta/2]^m (so the boundary sup stays at most delta for m <= 4),
// then rescaled onto the gradient cap, which can only shrink the boundary.
template <class S>
PwAffineMap<S> random_small_boundary_map(std::shared_ptr<const CubeMesh> mesh, std::size_t m,
                                         const S& delta, const S& gradient_cap, RngStream& rng) {
  std::vector<S> nodal(mesh->node_count() * m, S{});
  const S half_delta = delta / S(2);
  for (std::size_t v = 0; v < mesh->node_count(); ++v) {
    const S range = mesh->boundary_node(v) ? half_delta : S(1);
    for (std::size_t c = 0; c < m; ++c) nodal[v * m + c] = rng.uniform_symmetric<S>(range);
  }
  PwAffineMap<S> map(std::move(mesh), m, std::move(nodal));
  S g = mesh::grad_sup_norm(map);
  if (g > gradient_cap && g > S{}) return map.scaled(gradient_cap / g);
  return map;
}

template <class S>
nlohmann::json construction_ref(const std::string& id, std::size_t k) {
  return {{"type", "construction"}, {"id", id}, {"k", k}};
}

template <class S>
nlohmann::json serialized_map_ref(const PwAffineMap<S>& u) {
  return {{"type", "pw_affine"}, {"map", mesh::to_json(u)}};
}

template <class S>
Witness<S> make_map_witness(WitnessKind kind, const Density<S>& d, const GradientPoint<S>& A,
                            nlohmann::json construction, const MapMetrics<S>& metrics,
                            std::uint64_t seed) {
  Witness<S> w;
  w.kind = kind;
  w.density_id = d.id();
  w.A = A;
  w.construction = std::move(construction);
  w.ess_sup = metrics.ess.value;
  w.f_at_A = d(A);
  w.grad_norm = metrics.grad_norm;
  w.boundary_sup_sq = metrics.boundary_sq;
  w.boundary_sup = std::sqrt(to_double(metrics.boundary_sq));
  w.rng_seed = seed;
  return w;
}

// Smallest even q with amp_norm_sq / (16 q^2) <= delta^2, i.e. the largest
// admissible oscillation scale epsilon = 1/q for a laminate of that
// amplitude under boundary budget delta.
template <class S>
std::int64_t smallest_even_inv_epsilon(const S& delta, const S& amp_norm_sq) {
  double est = std::sqrt(to_double(amp_norm_sq)) / (4.0 * to_double(delta));
  std::int64_t q = est > 2.0 ? static_cast<std::int64_t>(est) - 2 : 2;
  if (q < 2) q = 2;
  if (q % 2 != 0) ++q;
  auto fits = [&](std::int64_t qq) {
    return fraction<S>(1, 16 * qq * qq) * amp_norm_sq <= delta * delta;
  };
  while (!fits(q)) q += 2;
  while (q - 2 >= 2 && fits(q - 2)) q -= 2;
  return q;
}

template <class S>
std::vector<std::vector<S>> default_laminate_amplitudes(std::size_t m) {
  std::vector<std::vector<S>> out;
  if (m == 1) {
    out = {{S(1)}, {S(-1)}, {S(2)}, {S(-2)}};
  } else if (m == 2) {
    out = {{S(1), S(1)},  {S(1), S(-1)}, {S(-1), S(-1)}, {S(-1), S(1)},
           {S(1), S(0)},  {S(0), S(1)},  {S(2), S(2)}};
  } else {
    for (std::size_t c = 0; c < m; ++c) {
      std::vector<S> plus(m, S{}), minus(m, S{});
      plus[c] = S(1);
      minus[c] = S(-1);
      out.push_back(std::move(plus));
      out.push_back(std::move(minus));
    }
    out.emplace_back(m, S(1));
    out.emplace_back(m, S(-1));
  }
  return out;
}

}  // namespace detail

/// Searches for a zero-boundary map breaking f(A) <= ess sup f(A + Du).
/// Candidates: the zero map, seeded random zero-boundary maps under the
/// gradient cap, then coordinate-descent refinement of the best candidate.
/// A finding is sound; "no violation" is only a budget statement.
template <class S>
Verdict<S> falsify_weak_mqc(const Density<S>& d, const GradientPoint<S>& A,
                            const SearchConfig<S>& cfg) {
  if (A.size() != d.n() * d.m())
    throw InputError("falsify_weak_mqc: base point size does not match the density");
  auto mesh_ptr = mesh::build_kuhn_mesh(d.n(), cfg.mesh_k);
  const auto interior = detail::interior_nodes<S>(*mesh_ptr);
  const S f_A = d(A);

  Verdict<S> verdict;
  std::optional<PwAffineMap<S>> best;
  S best_value{};

  auto consider = [&](const PwAffineMap<S>& map) -> bool {
    ++verdict.budget_spent;
    auto metrics = detail::map_metrics(d, A, map, cfg.threads);
    if (f_A - metrics.ess.value > cfg.margin) {
      Witness<S> w = detail::make_map_witness(WitnessKind::weak_violation, d, A,
                                              detail::serialized_map_ref(map), metrics, cfg.seed);
      if (!(*w.f_at_A > *w.ess_sup))
        throw std::logic_error("weak violation witness lost its defining gap");
      verdict.witnesses.push_back(std::move(w));
      verdict.status = VerdictStatus::violated;
      return true;
    }
    if (!best || metrics.ess.value < best_value) {
      best = map;
      best_value = metrics.ess.value;
    }
    return false;
  };

  if (consider(mesh::zero_map<S>(mesh_ptr, d.m()))) return verdict;
  for (std::uint64_t t = 1; t <= cfg.trials; ++t) {
    RngStream rng(cfg.seed, t);
    if (consider(detail::random_zero_boundary_map(mesh_ptr, d.m(), interior, cfg.gradient_cap,
                                                  rng)))
      return verdict;
  }

  if (!interior.empty()) {
    for (std::uint64_t step = 0; step < cfg.local_search_steps; ++step) {
      RngStream rng(cfg.seed, cfg.trials + 1 + step);
      // proposal scale halves over the course of the search
      const long long denom = 1LL << std::min<std::uint64_t>(
          32, (8 * step) / std::max<std::uint64_t>(1, cfg.local_search_steps));
      std::vector<S> nodal = best->nodal_values();
      const std::size_t node = interior[rng.index(interior.size())];
      const std::size_t comp = rng.index(d.m());
      nodal[node * d.m() + comp] += rng.uniform_symmetric<S>(fraction<S>(1, denom));
      PwAffineMap<S> cand(mesh_ptr, d.m(), std::move(nodal));
      S g = mesh::grad_sup_norm(cand);
      if (g > cfg.gradient_cap && g > S{}) cand = cand.scaled(cfg.gradient_cap / g);
      ++verdict.budget_spent;
      auto metrics = detail::map_metrics(d, A, cand, cfg.threads);
      if (f_A - metrics.ess.value > cfg.margin) {
        Witness<S> w = detail::make_map_witness(WitnessKind::weak_violation, d, A,
                                                detail::serialized_map_ref(cand), metrics,
                                                cfg.seed);
        verdict.witnesses.push_back(std::move(w));
        verdict.status = VerdictStatus::violated;
        return verdict;
      }
      if (metrics.ess.value < best_value) {
        best = std::move(cand);
        best_value = metrics.ess.value;
      }
    }
  }

  verdict.status = VerdictStatus::no_violation_within_budget;
  verdict.note = "no violation found within budget: " + std::to_string(verdict.budget_spent) +
                 " zero-boundary candidates evaluated";
  return verdict;
}

/// Evidence against the epsilon-delta definition at fixed (eps_def, K): for
/// every delta in the sequence, hunt for an admissible map (gradient norm at
/// most K, boundary sup at most delta) with f(A) > ess_sup + eps_def. Returns
/// violated only when every delta admits such a witness; the witness list
/// then carries one entry per delta. Families are tried in the given order;
/// the oscillation families pick the largest scale fitting the boundary
/// budget exactly.
template <class S>
Verdict<S> falsify_strong_mqc(const Density<S>& d, const GradientPoint<S>& A, const S& eps_def,
                              const S& K, const std::vector<S>& delta_sequence,
                              const std::vector<Family>& families, const SearchConfig<S>& cfg) {
  if (A.size() != d.n() * d.m())
    throw InputError("falsify_strong_mqc: base point size does not match the density");
  if (!(eps_def > S{})) throw InputError("falsify_strong_mqc: epsilon_def must be positive");
  if (!(K > S{})) throw InputError("falsify_strong_mqc: K must be positive");
  if (delta_sequence.empty()) throw InputError("falsify_strong_mqc: empty delta sequence");
  for (std::size_t i = 0; i < delta_sequence.size(); ++i) {
    if (!(delta_sequence[i] > S{}))
      throw InputError("falsify_strong_mqc: delta sequence must be positive");
    if (i > 0 && delta_sequence[i] > delta_sequence[i - 1])
      throw InputError("falsify_strong_mqc: delta sequence must be decreasing");
  }

  const S f_A = d(A);
  const S half = fraction<S>(1, 2);
  Verdict<S> verdict;

  auto violates = [&](const detail::MapMetrics<S>& metrics, const S& delta) {
    return metrics.grad_norm <= K && metrics.boundary_sq <= delta * delta &&
           f_A - (metrics.ess.value + eps_def) > cfg.margin;
  };

  std::shared_ptr<const CubeMesh> random_mesh;  // built on first use

  for (std::size_t di = 0; di < delta_sequence.size(); ++di) {
    const S& delta = delta_sequence[di];
    std::optional<Witness<S>> found;

    for (Family family : families) {
      if (found) break;
      switch (family) {
        case Family::zigzag: {
          if (d.n() != 2 || d.m() != 2 || K < half) break;
          const std::int64_t q = detail::smallest_even_inv_epsilon(delta, S(2));
          const std::size_t k = static_cast<std::size_t>(2 * q);
          if (k > cfg.max_mesh_k) break;
          auto profile = ZigZagProfile::with_inv_epsilon(q);
          auto map = constructions::zigzag_test_map<S>(profile, mesh::build_kuhn_mesh(2, k));
          ++verdict.budget_spent;
          auto metrics = detail::map_metrics(d, A, map, cfg.threads);
          if (violates(metrics, delta)) {
            auto w = detail::make_map_witness(
                WitnessKind::strong_falsification, d, A,
                detail::construction_ref<S>(constructions::zigzag_id(profile), k), metrics,
                cfg.seed);
            w.epsilon_def = eps_def;
            w.K = K;
            w.delta = delta;
            found = std::move(w);
          }
          break;
        }
        case Family::laminate: {
          for (const auto& amplitude : detail::default_laminate_amplitudes<S>(d.m())) {
            if (found) break;
            S amp_max{};
            S amp_norm_sq{};
            for (const S& b : amplitude) {
              amp_norm_sq += b * b;
              S mag = scalar_abs(b);
              if (mag > amp_max) amp_max = mag;
            }
            if (amp_norm_sq == S{} || amp_max / S(2) > K) continue;
            const std::int64_t q = detail::smallest_even_inv_epsilon(delta, amp_norm_sq);
            const std::size_t k = static_cast<std::size_t>(2 * q);
            if (k > cfg.max_mesh_k) continue;
            for (std::size_t axis = 0; axis < d.n() && !found; ++axis) {
              auto spec = LaminateSpec<S>::axis(axis, d.n(), amplitude,
                                                ZigZagProfile::with_inv_epsilon(q));
              auto map = constructions::laminate_test_map<S>(spec, mesh::build_kuhn_mesh(d.n(), k));
              ++verdict.budget_spent;
              auto metrics = detail::map_metrics(d, A, map, cfg.threads);
              if (violates(metrics, delta)) {
                auto w = detail::make_map_witness(
                    WitnessKind::strong_falsification, d, A,
                    detail::construction_ref<S>(constructions::laminate_id(spec), k), metrics,
                    cfg.seed);
                w.epsilon_def = eps_def;
                w.K = K;
                w.delta = delta;
                found = std::move(w);
              }
            }
          }
          break;
        }
        case Family::random_small_boundary: {
          if (!random_mesh) random_mesh = mesh::build_kuhn_mesh(d.n(), cfg.mesh_k);
          for (std::uint64_t t = 0; t < cfg.random_per_delta && !found; ++t) {
            RngStream rng(cfg.seed, (di + 1) * 0x100000ULL + t);
            auto map = detail::random_small_boundary_map(random_mesh, d.m(), delta,
                                                         std::min(K, cfg.gradient_cap), rng);
            ++verdict.budget_spent;
            auto metrics = detail::map_metrics(d, A, map, cfg.threads);
            if (violates(metrics, delta)) {
              auto w = detail::make_map_witness(WitnessKind::strong_falsification, d, A,
                                                detail::serialized_map_ref(map), metrics,
                                                cfg.seed);
              w.epsilon_def = eps_def;
              w.K = K;
              w.delta = delta;
              found = std::move(w);
            }
          }
          break;
        }
      }
    }

    if (!found) {
      verdict.status = VerdictStatus::no_violation_within_budget;
      verdict.witnesses.clear();
      verdict.note = "no admissible violating map found for delta = " +
                     scalar_to_string(delta) + " (index " + std::to_string(di) + ") within " +
                     std::to_string(verdict.budget_spent) + " candidates";
      return verdict;
    }
    verdict.witnesses.push_back(std::move(*found));
  }

  verdict.status = VerdictStatus::violated;
  verdict.note = "every delta in the sequence admits an admissible violating map (" +
                 std::to_string(delta_sequence.size()) + " scales)";
  return verdict;
}

/// Rebuilds the test map recorded in a witness.
template <class S>
PwAffineMap<S> rebuild_witness_map(const Witness<S>& w) {
  const nlohmann::json& c = w.construction;
  if (c.is_null()) throw InputError("witness has no construction");
  const std::string type = c.at("type").get<std::string>();
  if (type == "pw_affine") return mesh::pw_affine_map_from_json<S>(c.at("map"));
  if (type == "construction") {
    const auto k = c.at("k").get<std::size_t>();
    return constructions::build_construction<S>(c.at("id").get<std::string>(),
                                                mesh::build_kuhn_mesh(w.A.n(), k));
  }
  throw InputError("unknown construction type: " + type);
}

struct WitnessCheck {
  bool ok = true;
  std::string detail;

  void fail(const std::string& what) {
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

/// Recomputes every number stored in a witness from its serialized
/// construction and re-checks the defining inequality of its kind.
/// tol = 0 demands exact agreement.
template <class S>
WitnessCheck verify_witness(const Witness<S>& w, const Density<S>& d, double tol = 0.0) {
  WitnessCheck check;
  auto close = [tol](const S& a, const S& b) {
    if (tol == 0.0) return a == b;
    return std::fabs(to_double(a) - to_double(b)) <= tol;
  };

  if (w.kind == WitnessKind::nonconvex_sublevel) {
    if (!w.pair_x || !w.pair_y || !w.sublevel_s || !w.f_at_A) {
      check.fail("missing sublevel fields");
      return check;
    }
    const std::size_t dim = w.A.size();
    Point<S> mid(dim);
    for (std::size_t i = 0; i < dim; ++i) mid[i] = ((*w.pair_x)[i] + (*w.pair_y)[i]) / S(2);
    if (mid != w.A.entries()) check.fail("midpoint does not match recorded point");
    if (!(d(*w.pair_x) <= *w.sublevel_s) || !(d(*w.pair_y) <= *w.sublevel_s))
      check.fail("endpoints are not in the sublevel set");
    if (!close(d(w.A), *w.f_at_A)) check.fail("stored f_at_A does not recompute");
    if (!(*w.f_at_A > *w.sublevel_s)) check.fail("midpoint does not leave the sublevel set");
    return check;
  }

  PwAffineMap<S> map = rebuild_witness_map<S>(w);
  auto metrics = detail::map_metrics(d, w.A, map, 1);
  if (!w.ess_sup || !close(metrics.ess.value, *w.ess_sup))
    check.fail("stored ess_sup does not recompute");
  if (!w.f_at_A || !close(d(w.A), *w.f_at_A)) check.fail("stored f_at_A does not recompute");
  if (!w.grad_norm || !close(metrics.grad_norm, *w.grad_norm))
    check.fail("stored grad_norm does not recompute");
  if (!w.boundary_sup_sq || !close(metrics.boundary_sq, *w.boundary_sup_sq))
    check.fail("stored boundary_sup_sq does not recompute");

  if (w.kind == WitnessKind::weak_violation) {
    if (!map.zero_boundary()) check.fail("weak witness map is not zero-boundary");
    if (!(*w.f_at_A > *w.ess_sup)) check.fail("weak witness has no gap");
  } else if (w.kind == WitnessKind::strong_falsification) {
    if (!w.epsilon_def || !w.K || !w.delta) {
      check.fail("missing strong fields");
      return check;
    }
    if (!(metrics.grad_norm <= *w.K)) check.fail("gradient bound violated");
    if (!(metrics.boundary_sq <= *w.delta * *w.delta)) check.fail("boundary bound violated");
    if (!(*w.f_at_A > *w.ess_sup + *w.epsilon_def))
      check.fail("strong witness does not beat epsilon_def");
  }
  return check;
}

}  // namespace morrey::checkers
