#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "morrey/density.hpp"
#include "morrey/mesh.hpp"
#include "morrey/scalar.hpp"
#include "morrey/util.hpp"

namespace morrey::functionals {

using morrey::density::Density;
using morrey::mesh::PwAffineMap;
using morrey::mesh::SmallMatrix;

template <class S>
struct EssSupResult {
  S value{};
  std::size_t argmax_simplex = 0;
  SmallMatrix<S> gradient;          // gradient on the argmax simplex
  GradientPoint<S> shifted_point;   // A + gradient there

  EssSupResult() : shifted_point(GradientPoint<S>::zero(1, 1)) {}
};

template <class S>
nlohmann::json to_json(const EssSupResult<S>& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < r.gradient.rows; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < r.gradient.cols; ++j)
      row.push_back(scalar_to_json(r.gradient.at(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"value", scalar_to_json(r.value)},
          {"argmax_simplex", r.argmax_simplex},
          {"gradient", std::move(rows)},
          {"shifted_point", checkers::to_json(r.shifted_point)}};
}

namespace detail {

// Densities are pure, so repeated gradients can reuse their value. Exact mode
// pays real money per evaluation and laminate-style maps produce only a
// handful of distinct gradients; float mode skips the cache since a lookup
// costs as much as an evaluation.
template <class S>
class GradientValueCache {
 public:
  static constexpr std::size_t kCapacity = 64;

  const S* find(std::span<const S> key) const {
    for (const auto& e : entries_)
      if (std::equal(key.begin(), key.end(), e.first.begin(), e.first.begin() + key.size()))
        return &e.second;
    return nullptr;
  }

  void insert(std::span<const S> key, S value) {
    if (entries_.size() >= kCapacity) return;
    entries_.emplace_back();
    std::copy(key.begin(), key.end(), entries_.back().first.begin());
    entries_.back().second = std::move(value);
  }

 private:
  std::vector<std::pair<std::array<S, 16>, S>> entries_;
};

template <class S>
void check_dims(const Density<S>& d, const GradientPoint<S>& A, const PwAffineMap<S>& u) {
  if (d.n() != u.mesh()->dim() || d.m() != u.m())
    throw InputError("ess_sup_shifted: density is on R^{" + std::to_string(d.n()) + "x" +
                     std::to_string(d.m()) + "} but the map has n=" +
                     std::to_string(u.mesh()->dim()) + ", m=" + std::to_string(u.m()));
  if (A.size() != d.n() * d.m())
    throw InputError("ess_sup_shifted: base point size " + std::to_string(A.size()) +
                     " does not match n*m = " + std::to_string(d.n() * d.m()));
}

// One pass over all simplices; also reports the max absolute gradient entry
// so witness construction does not need a second sweep.
template <class S>
std::pair<EssSupResult<S>, S> sweep(const Density<S>& d, const GradientPoint<S>& A,
                                    const PwAffineMap<S>& u, unsigned threads) {
  const std::size_t count = u.mesh()->simplex_count();
  const std::size_t nm = A.size();

  struct Local {
    bool any = false;
    S best{};
    std::size_t best_id = 0;
    S grad_max{};
  };
  std::vector<Local> locals(threads < 1 ? 1 : threads);
  std::vector<std::pair<std::size_t, std::size_t>> stripes;

  unsigned used = threads < 1 ? 1 : threads;
  std::size_t chunk = (count + used - 1) / used;
  for (unsigned t = 0; t < used; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(lo + chunk, count);
    if (lo < hi) stripes.emplace_back(lo, hi);
  }

  auto work = [&](std::size_t stripe_idx) {
    auto [lo, hi] = stripes[stripe_idx];
    Local& acc = locals[stripe_idx];
    GradientValueCache<S> cache;
    std::vector<S> shifted(nm);
    mesh::detail::for_each_simplex_gradient(
        u, lo, hi, [&](std::size_t sid, const SmallMatrix<S>& g) {
          for (std::size_t i = 0; i < nm; ++i) {
            shifted[i] = A.entries()[i] + g.a[i];
            S mag = scalar_abs(g.a[i]);
            if (mag > acc.grad_max) acc.grad_max = mag;
          }
          S value;
          if constexpr (is_exact_scalar_v<S>) {
            std::span<const S> key(shifted.data(), nm);
            if (const S* hit = cache.find(key)) {
              value = *hit;
            } else {
              value = d(std::span<const S>(shifted));
              cache.insert(key, value);
            }
          } else {
            value = d(std::span<const S>(shifted));
          }
          if (!acc.any || value > acc.best) {
            acc.any = true;
            acc.best = std::move(value);
            acc.best_id = sid;
          }
        });
  };

  if (stripes.size() <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < stripes.size(); ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  // deterministic merge: highest value, ties to the lowest simplex id
  Local merged;
  for (const Local& l : locals) {
    if (!l.any) continue;
    if (!merged.any || l.best > merged.best ||
        (l.best == merged.best && l.best_id < merged.best_id)) {
      merged.any = true;
      merged.best = l.best;
      merged.best_id = l.best_id;
    }
    if (l.grad_max > merged.grad_max) merged.grad_max = l.grad_max;
  }

  EssSupResult<S> result;
  result.value = merged.best;
  result.argmax_simplex = merged.best_id;
  result.gradient = mesh::simplex_gradient(u, merged.best_id);
  std::vector<S> shifted(nm);
  for (std::size_t i = 0; i < nm; ++i) shifted[i] = A.entries()[i] + result.gradient.a[i];
  result.shifted_point = GradientPoint<S>(A.n(), A.m(), std::move(shifted));
  return {std::move(result), std::move(merged.grad_max)};
}

}  // namespace detail

/// Exact evaluation of ess sup over Q of f(A + Du): the gradient is constant
/// on each simplex and each simplex has positive volume, so the essential
/// supremum is the plain max over simplices. Ties break to the lowest simplex
/// id regardless of thread count.
template <class S>
EssSupResult<S> ess_sup_shifted(const Density<S>& d, const GradientPoint<S>& A,
                                const PwAffineMap<S>& u, unsigned threads = 1) {
  detail::check_dims(d, A, u);
  return detail::sweep(d, A, u, threads).first;
}

/// The zero-boundary inequality f(A) <= ess sup f(A + Du). Only maps
/// vanishing on the whole boundary are admissible here.
template <class S>
std::pair<bool, EssSupResult<S>> weak_mqc_inequality_holds(const Density<S>& d,
                                                           const GradientPoint<S>& A,
                                                           const PwAffineMap<S>& u,
                                                           unsigned threads = 1) {
  detail::check_dims(d, A, u);
  if (!u.zero_boundary())
    throw InputError("weak_mqc_inequality_holds: map does not vanish on the boundary");
  EssSupResult<S> r = detail::sweep(d, A, u, threads).first;
  bool holds = d(A) <= r.value;
  return {holds, std::move(r)};
}

}  // namespace morrey::functionals
