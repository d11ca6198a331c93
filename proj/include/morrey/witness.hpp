#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "morrey/geometry.hpp"
#include "morrey/scalar.hpp"

namespace morrey::checkers {

enum class WitnessKind { weak_violation, strong_falsification, nonconvex_sublevel };
enum class VerdictStatus { violated, no_violation_within_budget, inconclusive };

inline const char* to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::weak_violation: return "weak_violation";
    case WitnessKind::strong_falsification: return "strong_falsification";
    case WitnessKind::nonconvex_sublevel: return "nonconvex_sublevel";
  }
  return "?";
}

inline const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::violated: return "violated";
    case VerdictStatus::no_violation_within_budget: return "no_violation_within_budget";
    case VerdictStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

inline WitnessKind witness_kind_from_string(const std::string& s) {
  if (s == "weak_violation") return WitnessKind::weak_violation;
  if (s == "strong_falsification") return WitnessKind::strong_falsification;
  if (s == "nonconvex_sublevel") return WitnessKind::nonconvex_sublevel;
  throw InputError("unknown witness kind: " + s);
}

inline VerdictStatus verdict_status_from_string(const std::string& s) {
  if (s == "violated") return VerdictStatus::violated;
  if (s == "no_violation_within_budget") return VerdictStatus::no_violation_within_budget;
  if (s == "inconclusive") return VerdictStatus::inconclusive;
  throw InputError("unknown verdict status: " + s);
}

inline constexpr const char* kNormConventions =
    "gradient: max absolute entry; boundary values: euclidean norm";

// A machine-checkable record of one definition failure. Every recorded number
// is recomputable from the serialized construction (see recompute_witness).
// Fields not applicable to a kind are left unset and omitted from JSON.
template <class S>
struct Witness {
  WitnessKind kind = WitnessKind::weak_violation;
  std::string density_id;
  GradientPoint<S> A = GradientPoint<S>::zero(1, 1);
  nlohmann::json construction;  // {"type":"construction","id":...,"k":...} or {"type":"pw_affine","map":...}

  std::optional<S> ess_sup;
  std::optional<S> f_at_A;
  std::optional<S> grad_norm;
  std::optional<S> boundary_sup_sq;  // exact form; boundary norms are irrational in general
  std::optional<double> boundary_sup;

  std::optional<S> epsilon_def;
  std::optional<S> K;
  std::optional<S> delta;

  // sublevel nonconvexity payload: A above holds the midpoint
  std::optional<S> sublevel_s;
  std::optional<Point<S>> pair_x;
  std::optional<Point<S>> pair_y;

  std::string norm_conventions = kNormConventions;
  std::uint64_t rng_seed = 0;
  std::string arithmetic_mode = arithmetic_mode_name<S>();
};

template <class S>
struct Verdict {
  VerdictStatus status = VerdictStatus::inconclusive;
  std::uint64_t budget_spent = 0;
  std::vector<Witness<S>> witnesses;  // nonempty iff status == violated
  std::string note;

  bool violated() const { return status == VerdictStatus::violated; }
  const Witness<S>& witness() const { return witnesses.front(); }
};

namespace detail {

template <class S>
nlohmann::json point_to_json(const Point<S>& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : p) arr.push_back(scalar_to_json(v));
  return arr;
}

template <class S>
Point<S> point_from_json(const nlohmann::json& j) {
  Point<S> p;
  for (const auto& v : j) p.push_back(scalar_from_json<S>(v));
  return p;
}

}  // namespace detail

template <class S>
nlohmann::json to_json(const GradientPoint<S>& p) {
  return {{"n", p.n()}, {"m", p.m()}, {"entries", detail::point_to_json<S>(p.entries())}};
}

template <class S>
GradientPoint<S> gradient_point_from_json(const nlohmann::json& j) {
  return GradientPoint<S>(j.at("n").get<std::size_t>(), j.at("m").get<std::size_t>(),
                          detail::point_from_json<S>(j.at("entries")));
}

template <class S>
nlohmann::json to_json(const Witness<S>& w) {
  nlohmann::json j{{"kind", to_string(w.kind)},
                   {"density_id", w.density_id},
                   {"A", to_json(w.A)},
                   {"norm_conventions", w.norm_conventions},
                   {"rng_seed", w.rng_seed},
                   {"arithmetic_mode", w.arithmetic_mode}};
  if (!w.construction.is_null()) j["construction"] = w.construction;
  auto put = [&j](const char* key, const auto& opt) {
    if (opt) j[key] = scalar_to_json(*opt);
  };
  put("ess_sup", w.ess_sup);
  put("f_at_A", w.f_at_A);
  put("grad_norm", w.grad_norm);
  put("boundary_sup_sq", w.boundary_sup_sq);
  if (w.boundary_sup) j["boundary_sup"] = *w.boundary_sup;
  put("epsilon_def", w.epsilon_def);
  put("K", w.K);
  put("delta", w.delta);
  put("sublevel_s", w.sublevel_s);
  if (w.pair_x) j["pair_x"] = detail::point_to_json<S>(*w.pair_x);
  if (w.pair_y) j["pair_y"] = detail::point_to_json<S>(*w.pair_y);
  return j;
}

template <class S>
Witness<S> witness_from_json(const nlohmann::json& j) {
  Witness<S> w;
  w.kind = witness_kind_from_string(j.at("kind").get<std::string>());
  w.density_id = j.at("density_id").get<std::string>();
  w.A = gradient_point_from_json<S>(j.at("A"));
  if (j.contains("construction")) w.construction = j.at("construction");
  auto get = [&j](const char* key) -> std::optional<S> {
    if (!j.contains(key)) return std::nullopt;
    return scalar_from_json<S>(j.at(key));
  };
  w.ess_sup = get("ess_sup");
  w.f_at_A = get("f_at_A");
  w.grad_norm = get("grad_norm");
  w.boundary_sup_sq = get("boundary_sup_sq");
  if (j.contains("boundary_sup")) w.boundary_sup = j.at("boundary_sup").get<double>();
  w.epsilon_def = get("epsilon_def");
  w.K = get("K");
  w.delta = get("delta");
  w.sublevel_s = get("sublevel_s");
  if (j.contains("pair_x")) w.pair_x = detail::point_from_json<S>(j.at("pair_x"));
  if (j.contains("pair_y")) w.pair_y = detail::point_from_json<S>(j.at("pair_y"));
  w.norm_conventions = j.at("norm_conventions").get<std::string>();
  w.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  w.arithmetic_mode = j.at("arithmetic_mode").get<std::string>();
  return w;
}

template <class S>
nlohmann::json to_json(const Verdict<S>& v) {
  nlohmann::json j{{"status", to_string(v.status)}, {"budget_spent", v.budget_spent}};
  if (!v.note.empty()) j["note"] = v.note;
  if (!v.witnesses.empty()) {
    j["witness"] = to_json(v.witnesses.front());
    if (v.witnesses.size() > 1) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& w : v.witnesses) arr.push_back(to_json(w));
      j["witnesses"] = arr;
    }
  }
  return j;
}

template <class S>
Verdict<S> verdict_from_json(const nlohmann::json& j) {
  Verdict<S> v;
  v.status = verdict_status_from_string(j.at("status").get<std::string>());
  v.budget_spent = j.at("budget_spent").get<std::uint64_t>();
  if (j.contains("note")) v.note = j.at("note").get<std::string>();
  if (j.contains("witnesses")) {
    for (const auto& w : j.at("witnesses")) v.witnesses.push_back(witness_from_json<S>(w));
  } else if (j.contains("witness")) {
    v.witnesses.push_back(witness_from_json<S>(j.at("witness")));
  }
  return v;
}

}  // namespace morrey::checkers
