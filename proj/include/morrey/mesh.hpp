#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include <json.hpp>

#include "morrey/geometry.hpp"
#include "morrey/scalar.hpp"
#include "morrey/util.hpp"

namespace morrey::mesh {

// Kuhn (Freudenthal) triangulation of the unit cube [0,1]^n with k
// subdivisions per axis. Nodes are the lattice points (i_1/k, ..., i_n/k),
// ordered lexicographically with i_1 most significant; that ordering is part
// of the serialization contract. Each lattice cell splits into n! simplices,
// one per axis permutation: starting at the cell base corner, the simplex for
// permutation pi walks one lattice step along pi(0), then pi(1), ...
// Cells are ordered like nodes, permutations lexicographically, and
// simplex id = cell_id * n! + perm_id.
class CubeMesh {
 public:
  static constexpr std::size_t kMaxDim = 4;
  static constexpr std::size_t kMaxNodes = std::size_t{1} << 26;

  CubeMesh(std::size_t n, std::size_t k) : n_(n), k_(k) {
    if (n_ < 1 || n_ > kMaxDim)
      throw InputError("CubeMesh: spatial dimension must be in [1, 4], got " + std::to_string(n_));
    if (k_ < 1) throw InputError("CubeMesh: subdivision count must be positive");
    double node_estimate = 1.0;
    for (std::size_t j = 0; j < n_; ++j) node_estimate *= static_cast<double>(k_ + 1);
    if (node_estimate > static_cast<double>(kMaxNodes))
      throw SizeError("CubeMesh: (k+1)^n = " + std::to_string(node_estimate) +
                      " nodes exceeds the memory budget");

    node_count_ = 1;
    cell_count_ = 1;
    for (std::size_t j = 0; j < n_; ++j) {
      node_count_ *= k_ + 1;
      cell_count_ *= k_;
    }
    node_strides_.assign(n_, 1);
    cell_strides_.assign(n_, 1);
    for (std::size_t j = n_; j-- > 1;) {
      node_strides_[j - 1] = node_strides_[j] * (k_ + 1);
      cell_strides_[j - 1] = cell_strides_[j] * k_;
    }

    std::array<std::uint8_t, kMaxDim> perm{};
    std::iota(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_), std::uint8_t{0});
    do {
      perms_.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_)));
  }

  std::size_t dim() const { return n_; }
  std::size_t subdivisions() const { return k_; }
  std::size_t node_count() const { return node_count_; }
  std::size_t cell_count() const { return cell_count_; }
  std::size_t perm_count() const { return perms_.size(); }
  std::size_t simplex_count() const { return cell_count_ * perms_.size(); }

  const std::vector<std::array<std::uint8_t, kMaxDim>>& permutations() const { return perms_; }

  std::size_t node_stride(std::size_t axis) const { return node_strides_[axis]; }

  using Lattice = std::array<std::uint32_t, kMaxDim>;

  Lattice node_lattice(std::size_t node) const {
    Lattice idx{};
    for (std::size_t j = n_; j-- > 0;) {
      idx[j] = static_cast<std::uint32_t>(node % (k_ + 1));
      node /= k_ + 1;
    }
    return idx;
  }

  std::size_t node_index(const Lattice& idx) const {
    std::size_t id = 0;
    for (std::size_t j = 0; j < n_; ++j) id += idx[j] * node_strides_[j];
    return id;
  }

  bool boundary_node(std::size_t node) const {
    Lattice idx = node_lattice(node);
    for (std::size_t j = 0; j < n_; ++j)
      if (idx[j] == 0 || idx[j] == k_) return true;
    return false;
  }

  // Node id of the base corner (lowest lattice corner) of a cell.
  std::size_t cell_base_node(std::size_t cell) const {
    std::size_t id = 0;
    for (std::size_t j = n_; j-- > 0;) {
      id += (cell % k_) * node_strides_[j];
      cell /= k_;
    }
    return id;
  }

  std::array<std::size_t, kMaxDim + 1> simplex_nodes(std::size_t simplex) const {
    std::array<std::size_t, kMaxDim + 1> nodes{};
    const std::size_t pid = simplex % perms_.size();
    std::size_t v = cell_base_node(simplex / perms_.size());
    nodes[0] = v;
    const auto& perm = perms_[pid];
    for (std::size_t t = 0; t < n_; ++t) {
      v += node_strides_[perm[t]];
      nodes[t + 1] = v;
    }
    return nodes;
  }

  template <class S>
  Point<S> node_point(std::size_t node) const {
    Lattice idx = node_lattice(node);
    Point<S> p(n_);
    for (std::size_t j = 0; j < n_; ++j)
      p[j] = fraction<S>(static_cast<long long>(idx[j]), static_cast<long long>(k_));
    return p;
  }

  // All simplices are congruent with volume 1/(k^n n!).
  template <class S>
  S simplex_volume() const {
    S v = fraction<S>(1, static_cast<long long>(k_));
    S vol(1);
    for (std::size_t j = 0; j < n_; ++j) vol *= v;
    return vol / S(static_cast<long long>(perms_.size()));
  }

  // Containing simplex for a point of [0,1]^n: pick the cell by floor (points
  // on the x_j = 1 face fold into the last cell), then the permutation
  // sorting the fractional parts in descending order. Ties resolve toward the
  // lower axis; boundary points lie in several simplices and any consistent
  // choice is valid. frac receives the within-cell coordinates.
  template <class S>
  std::size_t locate_with_frac(std::span<const S> x, std::array<S, kMaxDim>& frac) const {
    if (x.size() != n_) throw InputError("locate: point dimension mismatch");
    std::size_t cell = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      S scaled = x[j] * S(static_cast<long long>(k_));
      auto c = static_cast<long long>(to_double(scalar_floor(scaled)));
      if (c < 0) c = 0;
      if (c > static_cast<long long>(k_) - 1) c = static_cast<long long>(k_) - 1;
      cell += static_cast<std::size_t>(c) * cell_strides_[j];
      frac[j] = scaled - S(c);
    }
    std::array<std::uint8_t, kMaxDim> order{};
    std::iota(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_), std::uint8_t{0});
    for (std::size_t i = 1; i < n_; ++i) {  // insertion sort, stable
      std::size_t p = i;
      while (p > 0 && frac[order[p]] > frac[order[p - 1]]) {
        std::swap(order[p], order[p - 1]);
        --p;
      }
    }
    std::size_t pid = 0;
    while (pid < perms_.size() && perms_[pid] != order) ++pid;
    return cell * perms_.size() + pid;
  }

  template <class S>
  std::size_t locate(std::span<const S> x) const {
    std::array<S, kMaxDim> frac{};
    return locate_with_frac(x, frac);
  }

 private:
  std::size_t n_, k_;
  std::size_t node_count_ = 0, cell_count_ = 0;
  std::vector<std::size_t> node_strides_, cell_strides_;
  std::vector<std::array<std::uint8_t, kMaxDim>> perms_;
};

inline std::shared_ptr<const CubeMesh> build_kuhn_mesh(std::size_t n, std::size_t k) {
  return std::make_shared<const CubeMesh>(n, k);
}

// m-row by n-column matrix with inline storage; rows index map components,
// columns index spatial axes. Row-major flat layout matches GradientPoint.
template <class S>
struct SmallMatrix {
  std::size_t rows = 0, cols = 0;
  std::array<S, CubeMesh::kMaxDim * CubeMesh::kMaxDim> a{};

  const S& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
  S& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  std::span<const S> flat() const { return {a.data(), rows * cols}; }

  bool operator==(const SmallMatrix& o) const {
    if (rows != o.rows || cols != o.cols) return false;
    for (std::size_t i = 0; i < rows * cols; ++i)
      if (a[i] != o.a[i]) return false;
    return true;
  }
};

// Continuous piecewise-affine map Q -> R^m determined by nodal values on a
// CubeMesh. Immutable once built; zero_boundary is true iff every boundary
// node carries the zero vector.
template <class S>
class PwAffineMap {
 public:
  PwAffineMap(std::shared_ptr<const CubeMesh> mesh, std::size_t m, std::vector<S> nodal)
      : mesh_(std::move(mesh)), m_(m), nodal_(std::move(nodal)) {
    if (m_ < 1 || m_ > CubeMesh::kMaxDim)
      throw InputError("PwAffineMap: codomain dimension must be in [1, 4]");
    if (nodal_.size() != mesh_->node_count() * m_)
      throw InputError("PwAffineMap: expected " + std::to_string(mesh_->node_count() * m_) +
                       " nodal scalars, got " + std::to_string(nodal_.size()));
    zero_boundary_ = true;
    for (std::size_t v = 0; v < mesh_->node_count() && zero_boundary_; ++v) {
      if (!mesh_->boundary_node(v)) continue;
      for (std::size_t c = 0; c < m_; ++c)
        if (nodal_[v * m_ + c] != S{}) {
          zero_boundary_ = false;
          break;
        }
    }
  }

  const std::shared_ptr<const CubeMesh>& mesh() const { return mesh_; }
  std::size_t m() const { return m_; }
  bool zero_boundary() const { return zero_boundary_; }
  const std::vector<S>& nodal_values() const { return nodal_; }

  std::span<const S> value(std::size_t node) const { return {nodal_.data() + node * m_, m_}; }

  PwAffineMap scaled(const S& factor) const {
    std::vector<S> nodal = nodal_;
    for (auto& v : nodal) v *= factor;
    return PwAffineMap(mesh_, m_, std::move(nodal));
  }

 private:
  std::shared_ptr<const CubeMesh> mesh_;
  std::size_t m_;
  std::vector<S> nodal_;
  bool zero_boundary_ = false;
};

template <class S>
PwAffineMap<S> zero_map(std::shared_ptr<const CubeMesh> mesh, std::size_t m) {
  std::vector<S> nodal(mesh->node_count() * m, S{});
  return PwAffineMap<S>(std::move(mesh), m, std::move(nodal));
}

namespace detail {

// Streams the constant gradient of each simplex in [lo, hi) into a reused
// matrix. The walk along the permutation path makes each gradient column
// k * (value difference across one lattice step), which is the exact solution
// of the (n+1)-vertex affine system for Kuhn simplices.
template <class S, class F>
void for_each_simplex_gradient(const PwAffineMap<S>& u, std::size_t lo, std::size_t hi, F&& fn) {
  const CubeMesh& msh = *u.mesh();
  const std::size_t n = msh.dim();
  const std::size_t m = u.m();
  const std::size_t pc = msh.perm_count();
  const S kk(static_cast<long long>(msh.subdivisions()));

  SmallMatrix<S> g;
  g.rows = m;
  g.cols = n;

  std::size_t cell = hi > lo ? lo / pc : 0;
  std::size_t base = hi > lo ? msh.cell_base_node(cell) : 0;
  for (std::size_t sid = lo; sid < hi; ++sid) {
    if (sid / pc != cell) {
      cell = sid / pc;
      base = msh.cell_base_node(cell);
    }
    const auto& perm = msh.permutations()[sid % pc];
    std::size_t v = base;
    std::span<const S> prev = u.value(v);
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t axis = perm[t];
      v += msh.node_stride(axis);
      std::span<const S> cur = u.value(v);
      for (std::size_t c = 0; c < m; ++c) g.at(c, axis) = kk * (cur[c] - prev[c]);
      prev = cur;
    }
    fn(sid, g);
  }
}

}  // namespace detail

/// Constant gradient (m x n Jacobian) of the affine interpolant on a simplex.
template <class S>
SmallMatrix<S> simplex_gradient(const PwAffineMap<S>& u, std::size_t simplex) {
  if (simplex >= u.mesh()->simplex_count()) throw InputError("simplex_gradient: id out of range");
  SmallMatrix<S> out;
  detail::for_each_simplex_gradient(u, simplex, simplex + 1,
                                    [&out](std::size_t, const SmallMatrix<S>& g) { out = g; });
  return out;
}

/// Max over boundary nodes of the squared euclidean norm of the nodal value.
/// Exact; the square root is generally irrational.
template <class S>
S boundary_sup_sq(const PwAffineMap<S>& u) {
  const CubeMesh& msh = *u.mesh();
  S best{};
  for (std::size_t v = 0; v < msh.node_count(); ++v) {
    if (!msh.boundary_node(v)) continue;
    S norm_sq{};
    for (const S& c : u.value(v)) norm_sq += c * c;
    if (norm_sq > best) best = norm_sq;
  }
  return best;
}

/// Max over the boundary of |u(x)| (euclidean). For a piecewise-affine map
/// the max over boundary nodes equals the max over all of the boundary.
template <class S>
double boundary_sup(const PwAffineMap<S>& u) {
  return std::sqrt(to_double(boundary_sup_sq(u)));
}

/// L-infinity norm of the gradient: max over simplices of the largest
/// absolute matrix entry.
template <class S>
S grad_sup_norm(const PwAffineMap<S>& u) {
  S best{};
  detail::for_each_simplex_gradient(u, 0, u.mesh()->simplex_count(),
                                    [&best](std::size_t, const SmallMatrix<S>& g) {
                                      for (std::size_t i = 0; i < g.rows * g.cols; ++i) {
                                        S v = scalar_abs(g.a[i]);
                                        if (v > best) best = v;
                                      }
                                    });
  return best;
}

/// Nodal interpolant of a total function psi: Q -> R^m.
/// psi(point, out) must fill out[0..m).
template <class S, class Fn>
PwAffineMap<S> interpolate(Fn&& psi, std::shared_ptr<const CubeMesh> mesh, std::size_t m) {
  std::vector<S> nodal(mesh->node_count() * m, S{});
  for (std::size_t v = 0; v < mesh->node_count(); ++v) {
    Point<S> p = mesh->template node_point<S>(v);
    psi(std::span<const S>(p), std::span<S>(nodal.data() + v * m, m));
  }
  return PwAffineMap<S>(std::move(mesh), m, std::move(nodal));
}

/// Value of the interpolant at an arbitrary point of Q (exact in rational
/// mode): locate the containing simplex, then accumulate the barycentric walk.
template <class S>
Point<S> eval_map(const PwAffineMap<S>& u, std::span<const S> x) {
  const CubeMesh& msh = *u.mesh();
  const std::size_t n = msh.dim();
  std::array<S, CubeMesh::kMaxDim> frac{};
  const std::size_t sid = msh.template locate_with_frac<S>(x, frac);
  const auto nodes = msh.simplex_nodes(sid);
  const auto& perm = msh.permutations()[sid % msh.perm_count()];

  Point<S> out(u.value(nodes[0]).begin(), u.value(nodes[0]).end());
  for (std::size_t t = 0; t < n; ++t) {
    std::span<const S> hi = u.value(nodes[t + 1]);
    std::span<const S> lo = u.value(nodes[t]);
    for (std::size_t c = 0; c < u.m(); ++c) out[c] += frac[perm[t]] * (hi[c] - lo[c]);
  }
  return out;
}

template <class S>
nlohmann::json to_json(const PwAffineMap<S>& u) {
  nlohmann::json values = nlohmann::json::array();
  for (std::size_t v = 0; v < u.mesh()->node_count(); ++v) {
    nlohmann::json node = nlohmann::json::array();
    for (const S& c : u.value(v)) node.push_back(scalar_to_json(c));
    values.push_back(std::move(node));
  }
  return {{"n", u.mesh()->dim()},
          {"m", u.m()},
          {"k", u.mesh()->subdivisions()},
          {"nodal_values", std::move(values)},
          {"zero_boundary", u.zero_boundary()}};
}

template <class S>
PwAffineMap<S> pw_affine_map_from_json(const nlohmann::json& j) {
  auto mesh = build_kuhn_mesh(j.at("n").get<std::size_t>(), j.at("k").get<std::size_t>());
  const auto m = j.at("m").get<std::size_t>();
  const auto& values = j.at("nodal_values");
  if (values.size() != mesh->node_count())
    throw InputError("pw_affine_map_from_json: wrong node count");
  std::vector<S> nodal;
  nodal.reserve(values.size() * m);
  for (const auto& node : values) {
    if (node.size() != m) throw InputError("pw_affine_map_from_json: wrong component count");
    for (const auto& c : node) nodal.push_back(scalar_from_json<S>(c));
  }
  PwAffineMap<S> map(std::move(mesh), m, std::move(nodal));
  if (j.contains("zero_boundary") && j.at("zero_boundary").get<bool>() != map.zero_boundary())
    throw InputError("pw_affine_map_from_json: zero_boundary flag does not match nodal data");
  return map;
}

}  // namespace morrey::mesh
