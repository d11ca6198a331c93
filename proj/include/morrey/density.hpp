#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "morrey/geometry.hpp"
#include "morrey/scalar.hpp"
#include "morrey/util.hpp"
#include "morrey/witness.hpp"

namespace morrey::density {

using morrey::GradientPoint;
using morrey::Point;
using morrey::Segment;
using morrey::SegmentUnionSet;

// Indicator payload: eval(x) = on_value iff dist(x, set) <= tolerance, else
// off_value. on_value < off_value together with a closed set makes the
// density lower semicontinuous.
template <class S>
struct IndicatorSpec {
  SegmentUnionSet<S> set;
  S on_value;
  S off_value;
  S tolerance;
};

// Default membership guard band: exact mode needs none, float mode absorbs
// roundoff in dyadic coordinate arithmetic.
template <class S>
S default_indicator_tolerance() {
  if constexpr (is_exact_scalar_v<S>)
    return S{};
  else
    return 1e-9;
}

// A density on the gradient space R^{nm}. The evaluator must be a pure total
// function defined at every single point; "defined up to null sets" is not
// representable on purpose, since the checks below are pointwise statements.
template <class S>
class Density {
 public:
  using Eval = std::function<S(std::span<const S>)>;

  Density(std::string id, std::size_t n, std::size_t m, Eval evaluator, bool claimed_lsc,
          std::string description)
      : id_(std::move(id)),
        n_(n),
        m_(m),
        eval_(std::move(evaluator)),
        claimed_lsc_(claimed_lsc),
        description_(std::move(description)) {
    if (n_ == 0 || m_ == 0) throw InputError("Density: n and m must be positive");
    if (!eval_) throw InputError("Density: evaluator must be a total function");
  }

  static Density indicator(std::string id, std::size_t n, std::size_t m, IndicatorSpec<S> spec,
                           std::string description) {
    if (spec.set.dim() != n * m)
      throw InputError("Density::indicator: set lives in R^" + std::to_string(spec.set.dim()) +
                       " but n*m = " + std::to_string(n * m));
    if (!(spec.on_value < spec.off_value))
      throw InputError("Density::indicator: on_value must be strictly below off_value");
    if (spec.tolerance < S{}) throw InputError("Density::indicator: negative tolerance");
    auto shared = std::make_shared<const IndicatorSpec<S>>(std::move(spec));
    S tol_sq = shared->tolerance * shared->tolerance;
    Eval eval = [shared, tol_sq](std::span<const S> x) -> S {
      return segment_distance_sq(shared->set, x) <= tol_sq ? shared->on_value : shared->off_value;
    };
    Density d(std::move(id), n, m, std::move(eval), true, std::move(description));
    d.indicator_ = std::move(shared);
    return d;
  }

  const std::string& id() const { return id_; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  bool claimed_lsc() const { return claimed_lsc_; }
  const std::string& description() const { return description_; }

  // Indicator payload when this density is a set indicator, else nullptr.
  const IndicatorSpec<S>* indicator_spec() const { return indicator_.get(); }

  S operator()(std::span<const S> x) const { return eval_(x); }
  S operator()(const Point<S>& x) const { return eval_(std::span<const S>(x)); }

  S operator()(const GradientPoint<S>& x) const {
    if (x.size() != n_ * m_)
      throw InputError("Density: point has " + std::to_string(x.size()) +
                       " entries but density expects " + std::to_string(n_ * m_));
    return eval_(x.flat());
  }

 private:
  std::string id_;
  std::size_t n_, m_;
  Eval eval_;
  bool claimed_lsc_;
  std::string description_;
  std::shared_ptr<const IndicatorSpec<S>> indicator_;
};

template <class S>
S eval_density(const Density<S>& d, const GradientPoint<S>& x) {
  return d(x);
}

namespace detail {

template <class S>
std::string points_to_id(std::initializer_list<const Point<S>*> pts) {
  std::string out;
  for (const Point<S>* p : pts)
    for (const S& c : *p) {
      if (!out.empty()) out += ",";
      out += scalar_to_string(c);
    }
  return out;
}

}  // namespace detail

/// Indicator of the segment between a and b in R^2, vanishing on the segment
/// and 1 elsewhere. The (n, m) split of the gradient space is caller
/// metadata; the default reads R^2 as gradients of scalar maps on the plane.
template <class S>
Density<S> make_segment_indicator_2d(Point<S> a, Point<S> b, std::size_t n = 2, std::size_t m = 1) {
  if (a.size() != 2 || b.size() != 2)
    throw InputError("make_segment_indicator_2d: endpoints must be 2-dimensional");
  if (a == b)
    throw InputError(
        "make_segment_indicator_2d: degenerate segment; use make_point_indicator_2d");
  if (n * m != 2) throw InputError("make_segment_indicator_2d: n*m must equal 2");
  std::string id = "segment2d(" + detail::points_to_id<S>({&a, &b}) + ")";
  SegmentUnionSet<S> set(2, {Segment<S>{std::move(a), std::move(b)}});
  return Density<S>::indicator(std::move(id), n, m,
                               IndicatorSpec<S>{std::move(set), S(0), S(1),
                                                default_indicator_tolerance<S>()},
                               "indicator of a line segment in R^2");
}

/// Degenerate single-point variant; explicit so the two-point constructor can
/// reject accidental a == b inputs.
template <class S>
Density<S> make_point_indicator_2d(Point<S> a, std::size_t n = 2, std::size_t m = 1) {
  if (a.size() != 2) throw InputError("make_point_indicator_2d: point must be 2-dimensional");
  if (n * m != 2) throw InputError("make_point_indicator_2d: n*m must equal 2");
  std::string id = "point2d(" + detail::points_to_id<S>({&a}) + ")";
  SegmentUnionSet<S> set(2, {Segment<S>{a, a}});
  return Density<S>::indicator(std::move(id), n, m,
                               IndicatorSpec<S>{std::move(set), S(0), S(1),
                                                default_indicator_tolerance<S>()},
                               "indicator of a single point in R^2");
}

/// Indicator of the closed square boundary OMRN in R^4 = R^{2x2}, with
/// O = (0,0,0,0), M = (1,0,0,0), N = (0,0,1,0), R = (1,0,1,0); 0 on the four
/// segments OM, ON, MR, NR and 1 elsewhere.
template <class S>
Density<S> make_square_boundary_4d() {
  const Point<S> O(4, S(0));
  Point<S> M(4, S(0));
  M[0] = S(1);
  Point<S> N(4, S(0));
  N[2] = S(1);
  Point<S> R(4, S(0));
  R[0] = S(1);
  R[2] = S(1);
  SegmentUnionSet<S> set(4, {Segment<S>{O, M}, Segment<S>{O, N}, Segment<S>{M, R},
                             Segment<S>{N, R}});
  return Density<S>::indicator(
      "square4d", 2, 2,
      IndicatorSpec<S>{std::move(set), S(0), S(1), default_indicator_tolerance<S>()},
      "indicator of the square boundary OMRN in R^4");
}

/// Gallery lookup: "square4d" or "segment2d(a1,a2,b1,b2)".
template <class S>
Density<S> parse_density_id(const std::string& id) {
  if (id == "square4d") return make_square_boundary_4d<S>();
  auto parse_args = [&id](const std::string& prefix) -> std::optional<std::vector<S>> {
    if (id.rfind(prefix + "(", 0) != 0 || id.back() != ')') return std::nullopt;
    std::string body = id.substr(prefix.size() + 1, id.size() - prefix.size() - 2);
    std::vector<S> vals;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t comma = body.find(',', pos);
      if (comma == std::string::npos) comma = body.size();
      vals.push_back(parse_scalar<S>(body.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    return vals;
  };
  if (auto args = parse_args("segment2d")) {
    if (args->size() != 4)
      throw InputError("density id: segment2d expects 4 coordinates, got " +
                       std::to_string(args->size()));
    return make_segment_indicator_2d<S>({(*args)[0], (*args)[1]}, {(*args)[2], (*args)[3]});
  }
  if (auto args = parse_args("point2d")) {
    if (args->size() != 2)
      throw InputError("density id: point2d expects 2 coordinates, got " +
                       std::to_string(args->size()));
    return make_point_indicator_2d<S>({(*args)[0], (*args)[1]});
  }
  throw InputError("unknown density id: " + id);
}

/// Serializable descriptor; defined for indicator densities only.
template <class S>
nlohmann::json density_descriptor(const Density<S>& d) {
  const IndicatorSpec<S>* spec = d.indicator_spec();
  if (spec == nullptr)
    throw InputError("density_descriptor: density '" + d.id() + "' is not an indicator");
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& seg : spec->set.segments())
    segs.push_back({checkers::detail::point_to_json<S>(seg.a),
                    checkers::detail::point_to_json<S>(seg.b)});
  return {{"id", d.id()},
          {"n", d.n()},
          {"m", d.m()},
          {"on_value", scalar_to_json(spec->on_value)},
          {"off_value", scalar_to_json(spec->off_value)},
          {"tolerance", scalar_to_json(spec->tolerance)},
          {"segments", std::move(segs)}};
}

struct SampleBudget {
  std::uint64_t count = 1000;
};

enum class PairSource { vertices, random, both };

inline PairSource pair_source_from_string(const std::string& s) {
  if (s == "vertices") return PairSource::vertices;
  if (s == "random") return PairSource::random;
  if (s == "both") return PairSource::both;
  throw InputError("unknown pair source: " + s + " (want vertices|random|both)");
}

namespace detail {

// Draws a point of the sublevel set {f <= s}, or nothing if the draw budget
// runs dry. For indicators the set representation is sampled directly.
template <class S>
std::optional<Point<S>> draw_sublevel_point(const Density<S>& d, const S& s, RngStream& rng) {
  const std::size_t dim = d.n() * d.m();
  const IndicatorSpec<S>* spec = d.indicator_spec();
  if (spec != nullptr) {
    if (s < spec->on_value) return std::nullopt;  // empty sublevel set
    if (s < spec->off_value) {
      // sublevel set is the segment union; sample it exactly
      const auto& segs = spec->set.segments();
      const Segment<S>& seg = segs[rng.index(segs.size())];
      S t = rng.uniform_scalar01<S>();
      Point<S> x(dim);
      for (std::size_t i = 0; i < dim; ++i) x[i] = seg.a[i] + t * (seg.b[i] - seg.a[i]);
      return x;
    }
    // s >= off_value: the sublevel set is everything; draw from an inflated box
    auto [lo, hi] = spec->set.bounding_box();
    Point<S> x(dim);
    for (std::size_t i = 0; i < dim; ++i)
      x[i] = rng.uniform_scalar<S>(lo[i] - S(1), hi[i] + S(1));
    return x;
  }
  // general density: rejection sampling in a default box
  for (int attempt = 0; attempt < 64; ++attempt) {
    Point<S> x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = rng.uniform_scalar<S>(S(-2), S(2));
    if (d(x) <= s) return x;
  }
  return std::nullopt;
}

}  // namespace detail

/// Midpoint test of sublevel-set convexity at level s: draw x, y with
/// f(x) <= s and f(y) <= s and require f((x+y)/2) <= s. Sound for
/// falsification only; a pass is "no violation found within budget". When the
/// density is an indicator, all pairs of set vertices are enumerated first,
/// deterministically, before any random draws.
template <class S>
checkers::Verdict<S> sublevel_midpoint_convexity(const Density<S>& d, const S& s,
                                                 SampleBudget samples, std::uint64_t rng_seed,
                                                 PairSource source = PairSource::both) {
  if (samples.count == 0) throw InputError("sublevel_midpoint_convexity: sample budget is zero");
  const std::size_t dim = d.n() * d.m();
  checkers::Verdict<S> verdict;
  verdict.budget_spent = 0;
  std::uint64_t sublevel_points_seen = 0;

  auto test_pair = [&](const Point<S>& x, const Point<S>& y) -> bool {
    ++verdict.budget_spent;
    Point<S> mid(dim);
    for (std::size_t i = 0; i < dim; ++i) mid[i] = (x[i] + y[i]) / S(2);
    S fm = d(mid);
    if (fm <= s) return false;
    checkers::Witness<S> w;
    w.kind = checkers::WitnessKind::nonconvex_sublevel;
    w.density_id = d.id();
    w.A = GradientPoint<S>(d.n(), d.m(), mid);
    w.f_at_A = fm;
    w.sublevel_s = s;
    w.pair_x = x;
    w.pair_y = y;
    w.rng_seed = rng_seed;
    verdict.witnesses.push_back(std::move(w));
    verdict.status = checkers::VerdictStatus::violated;
    return true;
  };

  if (source != PairSource::random && d.indicator_spec() != nullptr) {
    std::vector<Point<S>> verts;
    for (auto& v : d.indicator_spec()->set.vertices())
      if (d(v) <= s) verts.push_back(std::move(v));
    sublevel_points_seen += verts.size();
    for (std::size_t i = 0; i < verts.size(); ++i)
      for (std::size_t j = i + 1; j < verts.size(); ++j)
        if (test_pair(verts[i], verts[j])) return verdict;
  }

  if (source != PairSource::vertices) {
    for (std::uint64_t trial = 0; trial < samples.count; ++trial) {
      RngStream rng(rng_seed, trial);
      auto x = detail::draw_sublevel_point(d, s, rng);
      auto y = detail::draw_sublevel_point(d, s, rng);
      if (!x || !y) continue;
      sublevel_points_seen += 2;
      if (test_pair(*x, *y)) return verdict;
    }
  }

  if (sublevel_points_seen == 0) {
    verdict.status = checkers::VerdictStatus::inconclusive;
    verdict.note = "no sublevel points found within budget of " +
                   std::to_string(samples.count) + " draws";
    return verdict;
  }
  verdict.status = checkers::VerdictStatus::no_violation_within_budget;
  verdict.note = "no violation found within budget: " + std::to_string(verdict.budget_spent) +
                 " midpoint tests";
  return verdict;
}

}  // namespace morrey::density
