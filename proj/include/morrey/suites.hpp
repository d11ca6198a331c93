#pragma once

// Composite pipelines built on the single-definition checkers: the
// scalar-case equivalence harness and the end-to-end R^4 counterexample
// reproduction.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "morrey/checkers.hpp"
#include "morrey/constructions.hpp"
#include "morrey/density.hpp"
#include "morrey/functionals.hpp"

namespace morrey::checkers {

using morrey::density::PairSource;
using morrey::density::SampleBudget;

template <class S>
struct ScalarSuiteConfig {
  std::uint64_t seed = 0;
  std::size_t mesh_k = 4;
  std::size_t num_A = 200;              // sampled base points for both searches
  std::uint64_t weak_trials_per_A = 16;
  std::uint64_t qc_pairs = 1000;        // midpoint tests, split across the level grid
  std::vector<S> delta_sequence = {fraction<S>(1, 2), fraction<S>(1, 4), fraction<S>(1, 8)};
  S eps_def = fraction<S>(1, 4);
  S K = S(2);
  std::uint64_t random_per_delta = 4;
  unsigned threads = 1;
};

struct SuiteOutcome {
  std::string status;       // consistent_all_hold | consistent_counterexample |
                            // inconclusive_tension | inconsistent
  bool inconsistent = false;
  nlohmann::json report;
};

namespace detail {

// Levels bracketing the interesting range: for an indicator, below / at /
// between / at / above the two values; otherwise a fixed default ladder.
template <class S>
std::vector<S> default_level_grid(const Density<S>& d) {
  if (const auto* spec = d.indicator_spec()) {
    const S mid = (spec->on_value + spec->off_value) / S(2);
    return {spec->on_value - S(1), spec->on_value, mid, spec->off_value, spec->off_value + S(1)};
  }
  return {S(-1), S(0), fraction<S>(1, 2), S(1), S(2)};
}

// Base points for the searches: even draws on the indicator's set (where the
// density is smallest), odd draws from an inflated bounding box.
template <class S>
GradientPoint<S> sample_base_point(const Density<S>& d, std::uint64_t seed, std::uint64_t index) {
  const std::size_t dim = d.n() * d.m();
  RngStream rng(seed ^ 0x5eedba5eULL, index);
  const auto* spec = d.indicator_spec();
  Point<S> x(dim);
  if (spec != nullptr && index % 2 == 0) {
    const auto& segs = spec->set.segments();
    const auto& seg = segs[rng.index(segs.size())];
    S t = rng.uniform_scalar01<S>();
    for (std::size_t i = 0; i < dim; ++i) x[i] = seg.a[i] + t * (seg.b[i] - seg.a[i]);
  } else if (spec != nullptr) {
    auto [lo, hi] = spec->set.bounding_box();
    for (std::size_t i = 0; i < dim; ++i) x[i] = rng.uniform_scalar<S>(lo[i] - S(1), hi[i] + S(1));
  } else {
    for (std::size_t i = 0; i < dim; ++i) x[i] = rng.uniform_scalar<S>(S(-2), S(2));
  }
  return GradientPoint<S>(d.n(), d.m(), std::move(x));
}

}  // namespace detail

/// Numeric cross-examination of the scalar-case equivalence (n = 1 or m = 1,
/// lower semicontinuous density): sublevel-set convexity sampling, the
/// zero-boundary search, and the epsilon-delta search must tell a consistent
/// story. A violation certificate without any nonconvexity witness trips the
/// "inconsistent" bug trap; a nonconvexity witness without a search hit is
/// only reported as tension, since the searches are incomplete.
template <class S>
SuiteOutcome scalar_equivalence_suite(const Density<S>& d, const ScalarSuiteConfig<S>& cfg) {
  if (d.n() != 1 && d.m() != 1)
    throw InputError("scalar_equivalence_suite: density must have n = 1 or m = 1");
  if (!d.claimed_lsc())
    throw InputError("scalar_equivalence_suite: density must claim lower semicontinuity");

  nlohmann::json report;
  bool nonconvex_found = false;
  bool weak_found = false;
  bool strong_found = false;

  // stage 1: sublevel midpoint convexity across a level grid
  {
    const auto grid = detail::default_level_grid(d);
    const std::uint64_t per_level = std::max<std::uint64_t>(1, cfg.qc_pairs / grid.size());
    nlohmann::json levels = nlohmann::json::array();
    for (const S& s : grid) {
      auto verdict = density::sublevel_midpoint_convexity(d, s, SampleBudget{per_level}, cfg.seed,
                                                          PairSource::both);
      nlohmann::json entry{{"s", scalar_to_json(s)},
                           {"status", to_string(verdict.status)},
                           {"budget_spent", verdict.budget_spent}};
      if (verdict.violated()) {
        nonconvex_found = true;
        entry["witness"] = to_json(verdict.witness());
      }
      levels.push_back(std::move(entry));
    }
    report["sublevel_convexity"] = std::move(levels);
  }

  // stage 2: zero-boundary search over sampled base points
  {
    SearchConfig<S> wcfg;
    wcfg.mesh_k = cfg.mesh_k;
    wcfg.trials = cfg.weak_trials_per_A;
    wcfg.local_search_steps = 0;
    wcfg.threads = cfg.threads;
    std::uint64_t budget = 0;
    std::optional<nlohmann::json> first_witness;
    for (std::size_t i = 0; i < cfg.num_A; ++i) {
      wcfg.seed = cfg.seed + i;
      auto A = detail::sample_base_point(d, cfg.seed, i);
      auto verdict = falsify_weak_mqc(d, A, wcfg);
      budget += verdict.budget_spent;
      if (verdict.violated()) {
        weak_found = true;
        if (!first_witness) first_witness = to_json(verdict.witness());
      }
    }
    report["weak_search"] = {{"base_points", cfg.num_A},
                             {"violations_found", weak_found},
                             {"budget_spent", budget}};
    if (first_witness) report["weak_search"]["witness"] = *first_witness;
  }

  // stage 3: epsilon-delta search over the same base points
  {
    SearchConfig<S> scfg;
    scfg.mesh_k = cfg.mesh_k;
    scfg.random_per_delta = cfg.random_per_delta;
    scfg.threads = cfg.threads;
    std::uint64_t budget = 0;
    std::optional<nlohmann::json> first_witness;
    for (std::size_t i = 0; i < cfg.num_A; ++i) {
      scfg.seed = cfg.seed + i;
      auto A = detail::sample_base_point(d, cfg.seed, i);
      auto verdict = falsify_strong_mqc(d, A, cfg.eps_def, cfg.K, cfg.delta_sequence,
                                        all_families(), scfg);
      budget += verdict.budget_spent;
      if (verdict.violated()) {
        strong_found = true;
        if (!first_witness) first_witness = to_json(verdict.witness());
      }
    }
    report["strong_search"] = {{"base_points", cfg.num_A},
                               {"falsifications_found", strong_found},
                               {"budget_spent", budget}};
    if (first_witness) report["strong_search"]["witness"] = *first_witness;
  }

  SuiteOutcome outcome;
  if ((weak_found || strong_found) && !nonconvex_found) {
    outcome.status = "inconsistent";
    outcome.inconsistent = true;
  } else if (nonconvex_found && !(weak_found || strong_found)) {
    outcome.status = "inconclusive_tension";
  } else if (nonconvex_found) {
    outcome.status = "consistent_counterexample";
  } else {
    outcome.status = "consistent_all_hold";
  }
  report["status"] = outcome.status;
  report["inconsistencies"] = outcome.inconsistent ? 1 : 0;
  outcome.report = std::move(report);
  return outcome;
}

struct ReproduceConfig {
  std::size_t mesh_k = 8;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  std::size_t delta_count = 10;          // delta_j = 2^-j, j = 1..delta_count
  std::size_t grid_per_axis = 5;
  std::uint64_t sublevel_pairs = 1000;
  std::vector<std::string> strong_A;     // optional override, 4 scalar literals
  bool rational_constructions = true;    // false: run every stage in doubles
  unsigned threads = 1;
};

struct ReproduceOutcome {
  bool confirmed = false;
  std::string status;
  nlohmann::json report;
};

namespace detail {

template <class CS>
ReproduceOutcome reproduce_impl(const ReproduceConfig& cfg) {
  nlohmann::json stages = nlohmann::json::array();
  std::vector<std::string> failed;
  const bool exact = is_exact_scalar_v<CS>;
  auto close = [exact](const CS& a, const CS& b) {
    if (exact) return a == b;
    return std::fabs(to_double(a) - to_double(b)) <= 1e-12;
  };
  auto add_stage = [&stages, &failed](const std::string& name, bool ok, nlohmann::json payload) {
    payload["stage"] = name;
    payload["ok"] = ok;
    stages.push_back(std::move(payload));
    if (!ok) failed.push_back(name);
  };

  const auto d = density::make_square_boundary_4d<CS>();
  const CS half = fraction<CS>(1, 2);
  const GradientPoint<CS> P(2, 2, {half, CS(0), half, CS(0)});

  // stage 1: the base point sits off the set, at density value 1
  {
    CS fP = d(P);
    add_stage("density_at_base_point", close(fP, CS(1)),
              {{"expected", "f(P) = 1"}, {"f_at_P", scalar_to_json(fP)}});
  }

  // stage 2: the 1/2-sublevel set is not convex; the vertex enumeration must
  // produce the midpoint P itself
  {
    auto verdict = density::sublevel_midpoint_convexity(d, half, SampleBudget{cfg.sublevel_pairs},
                                                        cfg.seed, PairSource::both);
    bool ok = verdict.violated() && verdict.witness().A.entries() == P.entries();
    nlohmann::json payload{{"expected", "nonconvexity witness with midpoint P"},
                           {"status", to_string(verdict.status)}};
    if (verdict.violated()) payload["witness"] = to_json(verdict.witness());
    add_stage("sublevel_nonconvexity", ok, std::move(payload));
  }

  // stage 3: the zero-boundary inequality resists the randomized search, at P
  // and across a grid of base points on the low-dimensional faces that keep
  // both component blocks on their segments. Search runs in doubles.
  {
    const auto dd = density::make_square_boundary_4d<double>();
    const GradientPoint<double> Pd(2, 2, {0.5, 0.0, 0.5, 0.0});
    SearchConfig<double> wcfg;
    wcfg.mesh_k = cfg.mesh_k;
    wcfg.trials = cfg.trials;
    wcfg.local_search_steps = std::min<std::uint64_t>(1000, cfg.trials);
    wcfg.seed = cfg.seed;
    wcfg.threads = cfg.threads;
    auto at_P = falsify_weak_mqc(dd, Pd, wcfg);
    bool ok = at_P.status == VerdictStatus::no_violation_within_budget;
    std::uint64_t budget = at_P.budget_spent;

    SearchConfig<double> gcfg = wcfg;
    gcfg.trials = std::max<std::uint64_t>(1, cfg.trials / 16);
    gcfg.local_search_steps = 0;
    const std::size_t g = std::max<std::size_t>(2, cfg.grid_per_axis);
    std::size_t grid_checked = 0;
    for (std::size_t i = 0; i < g && ok; ++i) {
      for (std::size_t j = 0; j < g && ok; ++j) {
        const double a = static_cast<double>(i) / static_cast<double>(g - 1);
        const double b = static_cast<double>(j) / static_cast<double>(g - 1);
        GradientPoint<double> A(2, 2, {a, 0.0, b, 0.0});
        auto verdict = falsify_weak_mqc(dd, A, gcfg);
        budget += verdict.budget_spent;
        ok = ok && verdict.status == VerdictStatus::no_violation_within_budget;
        ++grid_checked;
      }
    }
    add_stage("weak_search_no_violation", ok,
              {{"expected", "no_violation_within_budget at P and on the grid"},
               {"base_point_status", to_string(at_P.status)},
               {"grid_points_checked", grid_checked},
               {"budget_spent", budget},
               {"arithmetic_mode", "float"},
               {"note", "randomized search cannot verify the inequality, only fail to break it"}});
  }

  // stage 4: the epsilon-delta definition fails at P with eps_def = 1/2 and
  // K = 1: every delta = 2^-j admits an admissible oscillation with
  // ess_sup = 0 while f(P) = 1
  {
    GradientPoint<CS> A = P;
    if (!cfg.strong_A.empty()) {
      if (cfg.strong_A.size() != 4)
        throw InputError("reproduce: strong_A override must have 4 entries");
      std::vector<CS> entries;
      for (const auto& txt : cfg.strong_A) entries.push_back(parse_scalar<CS>(txt));
      A = GradientPoint<CS>(2, 2, std::move(entries));
    }
    std::vector<CS> deltas;
    CS delta = CS(1);
    for (std::size_t j = 1; j <= cfg.delta_count; ++j) {
      delta /= CS(2);
      deltas.push_back(delta);
    }
    SearchConfig<CS> scfg;
    scfg.mesh_k = cfg.mesh_k;
    scfg.seed = cfg.seed;
    scfg.random_per_delta = 16;
    scfg.threads = cfg.threads;
    auto verdict = falsify_strong_mqc(d, A, half, CS(1), deltas, all_families(), scfg);

    bool ok = verdict.violated();
    nlohmann::json witness_summaries = nlohmann::json::array();
    if (verdict.violated()) {
      const bool default_base_point = cfg.strong_A.empty();
      for (std::size_t j = 0; j < verdict.witnesses.size(); ++j) {
        const auto& w = verdict.witnesses[j];
        bool wok = true;
        if (default_base_point) {
          wok = close(*w.ess_sup, CS(0)) && close(*w.grad_norm, half) &&
                *w.boundary_sup_sq <= *w.delta * *w.delta;
        }
        ok = ok && wok;
        witness_summaries.push_back({{"delta", scalar_to_json(*w.delta)},
                                     {"ess_sup", scalar_to_json(*w.ess_sup)},
                                     {"grad_norm", scalar_to_json(*w.grad_norm)},
                                     {"boundary_sup", *w.boundary_sup},
                                     {"construction", w.construction},
                                     {"ok", wok}});
      }
    }
    nlohmann::json payload{{"expected",
                            "falsified for every delta with ess_sup = 0, grad_norm = 1/2, "
                            "boundary_sup <= delta"},
                           {"status", to_string(verdict.status)},
                           {"budget_spent", verdict.budget_spent},
                           {"witnesses", std::move(witness_summaries)}};
    if (!verdict.note.empty()) payload["note"] = verdict.note;
    if (cfg.delta_count < 10)
      payload["evidence_note"] = "short delta sequence (" + std::to_string(cfg.delta_count) +
                                 " scales): weaker evidence than the default 10";
    add_stage("strong_falsification", ok, std::move(payload));
  }

  ReproduceOutcome outcome;
  outcome.confirmed = failed.empty();
  if (outcome.confirmed) {
    outcome.status = "confirmed";
  } else {
    outcome.status = "stage-mismatch: ";
    for (std::size_t i = 0; i < failed.size(); ++i)
      outcome.status += (i ? ", " : "") + failed[i];
  }
  outcome.report = {{"status", outcome.status},
                    {"confirmed", outcome.confirmed},
                    {"claim",
                     "weak inequality holds within budget AND the epsilon-delta definition is "
                     "falsified"},
                    {"stages", std::move(stages)},
                    {"construction_arithmetic", exact ? "rational" : "float"}};
  return outcome;
}

}  // namespace detail

/// One-shot reproduction of the R^4 counterexample: the square-boundary
/// indicator is quasiconvex in no sublevel sense, survives the zero-boundary
/// search, and fails the epsilon-delta definition at P = (1/2, 0, 1/2, 0)
/// via explicit oscillation witnesses for every boundary budget 2^-j.
inline ReproduceOutcome reproduce_paper_counterexample(const ReproduceConfig& cfg) {
  if (cfg.rational_constructions) return detail::reproduce_impl<Rational>(cfg);
  return detail::reproduce_impl<double>(cfg);
}

}  // namespace morrey::checkers
