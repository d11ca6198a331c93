// Command-line front end: gallery lookup, the sublevel convexity check, the
// two falsification searches, the scalar equivalence suite, and the one-shot
// counterexample reproduction. Every run emits a JSON report whose
// determinism hash depends only on (argv, seed).
//
// Exit codes: 0 expected verdict, 2 unexpected verdict (violation found where
// none expected, or a pipeline stage mismatch), 64 usage error, 65 bad
// config/input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "morrey/morrey.hpp"

namespace {

using morrey::GradientPoint;
using morrey::InputError;
using morrey::Rational;
using morrey::cli::RunConfig;
using nlohmann::json;

struct Outcome {
  json result;
  std::string verdict_line;
  int exit_code = 0;
};

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

template <class S>
GradientPoint<S> parse_base_point(const morrey::density::Density<S>& d,
                                  const std::vector<std::string>& literals) {
  if (literals.size() != d.n() * d.m())
    throw InputError("A: expected " + std::to_string(d.n() * d.m()) + " entries for density '" +
                     d.id() + "', got " + std::to_string(literals.size()));
  std::vector<S> entries;
  entries.reserve(literals.size());
  for (const auto& lit : literals) entries.push_back(morrey::parse_scalar<S>(lit));
  return GradientPoint<S>(d.n(), d.m(), std::move(entries));
}

template <class S>
std::vector<S> resolve_deltas(const RunConfig& cfg) {
  std::vector<S> deltas;
  if (!cfg.deltas.empty()) {
    for (const auto& lit : cfg.deltas) deltas.push_back(morrey::parse_scalar<S>(lit));
    return deltas;
  }
  S delta(1);
  for (std::size_t j = 1; j <= cfg.delta_count; ++j) {
    delta /= S(2);
    deltas.push_back(delta);
  }
  return deltas;
}

unsigned resolve_threads(const RunConfig& cfg) {
  return cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : morrey::thread_budget();
}

Outcome run_gallery(const RunConfig& cfg) {
  Outcome out;
  if (!cfg.density.empty() && cfg.density != "list") {
    auto d = morrey::density::parse_density_id<Rational>(cfg.density);
    out.result = {{"density", morrey::density::density_descriptor(d)}};
    out.verdict_line = "gallery: " + d.id();
    return out;
  }
  json entries = json::array();
  entries.push_back(
      morrey::density::density_descriptor(morrey::density::make_square_boundary_4d<Rational>()));
  entries.push_back(morrey::density::density_descriptor(
      morrey::density::make_segment_indicator_2d<Rational>({Rational(0), Rational(0)},
                                                           {Rational(1), Rational(0)})));
  out.result = {{"densities", std::move(entries)},
                {"ids", {"square4d", "segment2d(a1,a2,b1,b2)", "point2d(a1,a2)"}}};
  out.verdict_line = "gallery: 2 sample densities listed";
  return out;
}

template <class S>
Outcome run_check_qc(const RunConfig& cfg) {
  auto d = morrey::density::parse_density_id<S>(cfg.density);
  const S s = morrey::parse_scalar<S>(cfg.s);
  auto verdict = morrey::density::sublevel_midpoint_convexity(
      d, s, morrey::density::SampleBudget{cfg.samples}, cfg.seed,
      morrey::density::pair_source_from_string(cfg.pairs));
  Outcome out;
  out.result = {{"verdict", morrey::checkers::to_json(verdict)},
                {"density", morrey::density::density_descriptor(d)},
                {"s", morrey::scalar_to_json(s)}};
  out.verdict_line = std::string("check-qc: ") + morrey::checkers::to_string(verdict.status);
  out.exit_code = verdict.status == morrey::checkers::VerdictStatus::no_violation_within_budget
                      ? 0
                      : 2;
  return out;
}

template <class S>
Outcome run_falsify_weak(const RunConfig& cfg) {
  auto d = morrey::density::parse_density_id<S>(cfg.density);
  auto A = parse_base_point<S>(d, cfg.A);
  morrey::checkers::SearchConfig<S> scfg;
  scfg.mesh_k = cfg.k;
  scfg.trials = cfg.trials;
  scfg.local_search_steps = cfg.local_search_steps;
  scfg.seed = cfg.seed;
  scfg.threads = resolve_threads(cfg);
  auto verdict = morrey::checkers::falsify_weak_mqc(d, A, scfg);
  Outcome out;
  out.result = {{"verdict", morrey::checkers::to_json(verdict)},
                {"A", morrey::checkers::to_json(A)},
                {"density_id", d.id()}};
  out.verdict_line = std::string("falsify-weak: ") + morrey::checkers::to_string(verdict.status);
  out.exit_code = verdict.violated() ? 2 : 0;
  return out;
}

template <class S>
Outcome run_falsify_strong(const RunConfig& cfg) {
  auto d = morrey::density::parse_density_id<S>(cfg.density);
  auto A = parse_base_point<S>(d, cfg.A);
  morrey::checkers::SearchConfig<S> scfg;
  scfg.mesh_k = cfg.k;
  scfg.seed = cfg.seed;
  scfg.threads = resolve_threads(cfg);
  std::vector<morrey::checkers::Family> families;
  for (const auto& name : cfg.families)
    families.push_back(morrey::checkers::family_from_string(name));
  auto verdict = morrey::checkers::falsify_strong_mqc(
      d, A, morrey::parse_scalar<S>(cfg.epsilon_def), morrey::parse_scalar<S>(cfg.K),
      resolve_deltas<S>(cfg), families, scfg);
  Outcome out;
  out.result = {{"verdict", morrey::checkers::to_json(verdict)},
                {"A", morrey::checkers::to_json(A)},
                {"density_id", d.id()},
                {"epsilon_def", cfg.epsilon_def},
                {"K", cfg.K}};
  out.verdict_line = std::string("falsify-strong: ") + morrey::checkers::to_string(verdict.status);
  out.exit_code = verdict.violated() ? 2 : 0;
  return out;
}

template <class S>
Outcome run_scalar_suite(const RunConfig& cfg) {
  auto d = morrey::density::parse_density_id<S>(cfg.density);
  morrey::checkers::ScalarSuiteConfig<S> scfg;
  scfg.seed = cfg.seed;
  scfg.mesh_k = cfg.k;
  scfg.num_A = cfg.num_A;
  scfg.weak_trials_per_A = cfg.weak_trials_per_A;
  scfg.qc_pairs = cfg.qc_pairs;
  scfg.threads = resolve_threads(cfg);
  if (!cfg.deltas.empty()) {
    scfg.delta_sequence.clear();
    for (const auto& lit : cfg.deltas) scfg.delta_sequence.push_back(morrey::parse_scalar<S>(lit));
  }
  auto outcome = morrey::checkers::scalar_equivalence_suite(d, scfg);
  Outcome out;
  out.result = {{"suite", outcome.report}, {"density_id", d.id()}};
  out.verdict_line = "scalar-suite: " + outcome.status;
  out.exit_code = outcome.inconsistent ? 2 : 0;
  return out;
}

Outcome run_reproduce(const RunConfig& cfg) {
  morrey::checkers::ReproduceConfig rcfg;
  rcfg.mesh_k = cfg.k;
  rcfg.trials = cfg.trials;
  rcfg.seed = cfg.seed;
  rcfg.delta_count = cfg.delta_count;
  rcfg.sublevel_pairs = cfg.samples;
  rcfg.strong_A = cfg.strong_A;
  rcfg.rational_constructions = cfg.mode == "rational";
  rcfg.threads = resolve_threads(cfg);
  auto outcome = morrey::checkers::reproduce_paper_counterexample(rcfg);
  Outcome out;
  out.result = outcome.report;
  out.verdict_line = "reproduce: " + outcome.status;
  out.exit_code = outcome.confirmed ? 0 : 2;
  return out;
}

Outcome dispatch(RunConfig& cfg) {
  morrey::cli::validate_mode(cfg.mode);
  if (cfg.mode == "auto") cfg.mode = morrey::cli::default_mode_for_command(cfg.command);
  const bool rational = cfg.mode == "rational";
  if (cfg.command == "gallery") return run_gallery(cfg);
  if (cfg.command == "check-qc")
    return rational ? run_check_qc<Rational>(cfg) : run_check_qc<double>(cfg);
  if (cfg.command == "falsify-weak")
    return rational ? run_falsify_weak<Rational>(cfg) : run_falsify_weak<double>(cfg);
  if (cfg.command == "falsify-strong")
    return rational ? run_falsify_strong<Rational>(cfg) : run_falsify_strong<double>(cfg);
  if (cfg.command == "scalar-suite")
    return rational ? run_scalar_suite<Rational>(cfg) : run_scalar_suite<double>(cfg);
  if (cfg.command == "reproduce") return run_reproduce(cfg);
  throw InputError("unknown command: " + cfg.command);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;

  // --config loads first so explicit flags can override its values
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    std::string path;
    if (arg == "--config" && i + 1 < argc)
      path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      path = arg.substr(9);
    if (path.empty()) continue;
    try {
      std::ifstream in(path);
      if (!in) throw InputError("config: cannot open " + path);
      json j = json::parse(in);
      cfg = morrey::cli::run_config_from_json(j);
    } catch (const json::exception& e) {
      std::cerr << "error: config: " << e.what() << "\n";
      return 65;
    } catch (const InputError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 65;
    }
    break;
  }

  CLI::App app{"quasiconvexity checkers for sup-form variational densities"};
  app.require_subcommand(1);
  std::string config_path;  // consumed above; declared so CLI11 accepts it
  app.add_option("--config", config_path, "JSON config file; explicit flags override it");

  std::string a_csv, deltas_csv, families_csv, strong_a_csv;

  auto add_common = [&](CLI::App* sub, bool with_out = true) {
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--mode", cfg.mode, "arithmetic mode: auto|rational|float");
    if (with_out) sub->add_option("--out", cfg.out, "report output path");
    sub->add_option("--threads", cfg.threads, "worker cap (0: MORREY_THREADS or hardware)");
  };

  auto* gallery = app.add_subcommand("gallery", "print gallery density descriptors");
  gallery->add_option("--density", cfg.density, "density id");
  gallery->add_option("--out", cfg.out, "report output path");

  auto* checkqc = app.add_subcommand("check-qc", "sublevel-set midpoint convexity check");
  checkqc->add_option("--density", cfg.density, "density id");
  checkqc->add_option("--s", cfg.s, "sublevel threshold");
  checkqc->add_option("--pairs", cfg.pairs, "pair source: vertices|random|both");
  checkqc->add_option("--samples", cfg.samples, "random pair budget");
  add_common(checkqc);

  auto* fweak = app.add_subcommand("falsify-weak", "search for a zero-boundary violation");
  fweak->add_option("--density", cfg.density, "density id");
  fweak->add_option("--A", a_csv, "base point, comma-separated");
  fweak->add_option("--k", cfg.k, "mesh subdivisions per axis");
  fweak->add_option("--trials", cfg.trials, "random candidate budget");
  fweak->add_option("--local-steps", cfg.local_search_steps, "local search step budget");
  add_common(fweak);

  auto* fstrong = app.add_subcommand("falsify-strong", "epsilon-delta falsification search");
  fstrong->add_option("--density", cfg.density, "density id");
  fstrong->add_option("--A", a_csv, "base point, comma-separated");
  fstrong->add_option("--eps-def", cfg.epsilon_def, "definition epsilon");
  fstrong->add_option("--K", cfg.K, "gradient bound");
  fstrong->add_option("--deltas", deltas_csv, "decreasing boundary budgets, comma-separated");
  fstrong->add_option("--delta-count", cfg.delta_count, "use 2^-1..2^-count when --deltas absent");
  fstrong->add_option("--families", families_csv, "construction families: zigzag,laminate,random");
  fstrong->add_option("--k", cfg.k, "mesh for the random family");
  add_common(fstrong);

  auto* suite = app.add_subcommand("scalar-suite", "scalar-case equivalence cross-check");
  suite->add_option("--density", cfg.density, "density id (n = 1 or m = 1)");
  suite->add_option("--num-a", cfg.num_A, "sampled base points");
  suite->add_option("--qc-pairs", cfg.qc_pairs, "midpoint pair budget");
  suite->add_option("--trials-per-a", cfg.weak_trials_per_A, "zero-boundary trials per base point");
  suite->add_option("--k", cfg.k, "mesh subdivisions per axis");
  add_common(suite);

  auto* repro = app.add_subcommand("reproduce", "run the full counterexample pipeline");
  repro->add_option("--k", cfg.k, "mesh for the randomized search");
  repro->add_option("--trials", cfg.trials, "zero-boundary candidates at the base point");
  repro->add_option("--delta-count", cfg.delta_count, "boundary budgets 2^-1..2^-count");
  repro->add_option("--samples", cfg.samples, "sublevel pair budget");
  repro->add_option("--strong-A", strong_a_csv, "override the falsification base point");
  add_common(repro);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  if (!a_csv.empty()) cfg.A = split_csv(a_csv);
  if (!deltas_csv.empty()) cfg.deltas = split_csv(deltas_csv);
  if (!families_csv.empty()) cfg.families = split_csv(families_csv);
  if (!strong_a_csv.empty()) cfg.strong_A = split_csv(strong_a_csv);
  for (auto* sub : {gallery, checkqc, fweak, fstrong, suite, repro})
    if (sub->parsed()) cfg.command = sub->get_name();

  try {
    Outcome out = dispatch(cfg);
    json report = morrey::cli::make_report(cfg, std::move(out.result));
    if (!cfg.out.empty()) {
      morrey::cli::atomic_write_file(cfg.out, report.dump(2) + "\n");
    } else {
      std::cout << report.dump(2) << "\n";
    }
    std::cout << out.verdict_line << "\n";
    return out.exit_code;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 65;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
