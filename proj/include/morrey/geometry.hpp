#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morrey/scalar.hpp"
#include "morrey/util.hpp"

namespace morrey {

template <class S>
using Point = std::vector<S>;

template <class S>
S dot(std::span<const S> a, std::span<const S> b) {
  S acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <class S>
S distance_sq(std::span<const S> a, std::span<const S> b) {
  S acc{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    S d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// A point of the gradient space R^{nm}, stored flat in component-major order:
// entry(i, j) = entries[i*n + j] pairs component i of the map with axis j, so
// a point (A_1, A_2) splits into the per-component blocks the shifted
// evaluation f(A_1 + Du_1, A_2 + Du_2, ...) expects.
template <class S>
class GradientPoint {
 public:
  GradientPoint(std::size_t n, std::size_t m, std::vector<S> entries)
      : n_(n), m_(m), entries_(std::move(entries)) {
    if (n_ == 0 || m_ == 0) throw InputError("GradientPoint: n and m must be positive");
    if (entries_.size() != n_ * m_)
      throw InputError("GradientPoint: expected " + std::to_string(n_ * m_) + " entries, got " +
                       std::to_string(entries_.size()));
  }

  static GradientPoint zero(std::size_t n, std::size_t m) {
    return GradientPoint(n, m, std::vector<S>(n * m, S{}));
  }

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t size() const { return entries_.size(); }

  const std::vector<S>& entries() const { return entries_; }
  std::span<const S> flat() const { return entries_; }

  const S& entry(std::size_t comp, std::size_t axis) const { return entries_[comp * n_ + axis]; }
  S& entry(std::size_t comp, std::size_t axis) { return entries_[comp * n_ + axis]; }

  bool operator==(const GradientPoint& other) const {
    return n_ == other.n_ && m_ == other.m_ && entries_ == other.entries_;
  }

 private:
  std::size_t n_, m_;
  std::vector<S> entries_;
};

template <class S>
struct Segment {
  Point<S> a;
  Point<S> b;

  bool degenerate() const { return a == b; }
};

// A closed subset of R^d given as a finite union of line segments.
template <class S>
class SegmentUnionSet {
 public:
  SegmentUnionSet(std::size_t dim, std::vector<Segment<S>> segments)
      : dim_(dim), segments_(std::move(segments)) {
    if (dim_ == 0) throw InputError("SegmentUnionSet: dim must be positive");
    if (segments_.empty()) throw InputError("SegmentUnionSet: at least one segment required");
    for (const auto& seg : segments_) {
      if (seg.a.size() != dim_ || seg.b.size() != dim_)
        throw InputError("SegmentUnionSet: segment endpoint dimension mismatch");
    }
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Segment<S>>& segments() const { return segments_; }

  bool has_degenerate_segment() const {
    return std::any_of(segments_.begin(), segments_.end(),
                       [](const Segment<S>& s) { return s.degenerate(); });
  }

  // Distinct endpoints in order of first appearance.
  std::vector<Point<S>> vertices() const {
    std::vector<Point<S>> out;
    auto push = [&out](const Point<S>& p) {
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    };
    for (const auto& seg : segments_) {
      push(seg.a);
      push(seg.b);
    }
    return out;
  }

  std::pair<Point<S>, Point<S>> bounding_box() const {
    Point<S> lo = segments_.front().a;
    Point<S> hi = segments_.front().a;
    for (const auto& seg : segments_) {
      for (const Point<S>* p : {&seg.a, &seg.b}) {
        for (std::size_t i = 0; i < dim_; ++i) {
          if ((*p)[i] < lo[i]) lo[i] = (*p)[i];
          if ((*p)[i] > hi[i]) hi[i] = (*p)[i];
        }
      }
    }
    return {lo, hi};
  }

 private:
  std::size_t dim_;
  std::vector<Segment<S>> segments_;
};

// Squared Euclidean distance from x to the segment [a, b]; exact in rational
// mode, which is why the squared form is the primitive.
template <class S>
S point_segment_distance_sq(const Segment<S>& seg, std::span<const S> x) {
  const std::size_t d = seg.a.size();
  S dir_dot{};
  S proj{};
  for (std::size_t i = 0; i < d; ++i) {
    S dir = seg.b[i] - seg.a[i];
    dir_dot += dir * dir;
    proj += (x[i] - seg.a[i]) * dir;
  }
  S t{};
  if (dir_dot > S{}) {
    t = proj / dir_dot;
    if (t < S{}) t = S{};
    if (t > S(1)) t = S(1);
  }
  S acc{};
  for (std::size_t i = 0; i < d; ++i) {
    S diff = x[i] - (seg.a[i] + t * (seg.b[i] - seg.a[i]));
    acc += diff * diff;
  }
  return acc;
}

template <class S>
S segment_distance_sq(const SegmentUnionSet<S>& set, std::span<const S> x) {
  if (x.size() != set.dim())
    throw InputError("segment_distance: point dimension " + std::to_string(x.size()) +
                     " does not match set dimension " + std::to_string(set.dim()));
  bool first = true;
  S best{};
  for (const auto& seg : set.segments()) {
    S d2 = point_segment_distance_sq(seg, x);
    if (first || d2 < best) {
      best = d2;
      first = false;
    }
    if (best == S{}) break;  // on the set, cannot improve
  }
  return best;
}

// Euclidean point-to-set distance. The exact primitive is the squared form;
// the root is reported as a double.
template <class S>
double segment_distance(const SegmentUnionSet<S>& set, std::span<const S> x) {
  return std::sqrt(to_double(segment_distance_sq(set, x)));
}

}  // namespace morrey
