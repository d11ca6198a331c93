#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "morrey/mesh.hpp"
#include "morrey/scalar.hpp"
#include "morrey/util.hpp"

namespace morrey::constructions {

using morrey::mesh::CubeMesh;
using morrey::mesh::PwAffineMap;

/// Periodic tent profile: t on [0, 1/2], 1-t on [1/2, 1], extended with
/// period 1. Range [0, 1/2], slope +-1 almost everywhere.
template <class S>
S zigzag(const S& t) {
  S u = t - scalar_floor(t);
  return u <= fraction<S>(1, 2) ? u : S(1) - u;
}

// The oscillation scale epsilon = 1/q with q a positive even integer; the
// evenness makes the lifted profile vanish at both x = 0 and x = 1.
struct ZigZagProfile {
  std::int64_t inv_epsilon = 2;  // q

  static ZigZagProfile with_inv_epsilon(std::int64_t q) {
    if (q <= 0 || q % 2 != 0)
      throw InputError("ZigZagProfile: 1/epsilon must be a positive even integer, got " +
                       std::to_string(q));
    return ZigZagProfile{q};
  }

  // Accepts epsilon itself, e.g. "1/4".
  static ZigZagProfile from_epsilon(const Rational& eps) {
    if (eps <= 0) throw InputError("ZigZagProfile: epsilon must be positive");
    Rational inv = 1 / eps;
    if (denominator(inv) != 1)
      throw InputError("ZigZagProfile: 1/epsilon must be an integer, got epsilon = " +
                       scalar_to_string(eps));
    return with_inv_epsilon(numerator(inv).convert_to<std::int64_t>());
  }

  template <class S>
  S epsilon() const {
    return fraction<S>(1, inv_epsilon);
  }

  std::string epsilon_string() const { return "1/" + std::to_string(inv_epsilon); }
};

namespace detail {

// Kinks of (eps/2) * zigzag(x/eps) sit at multiples of eps/2; they land on
// mesh lines exactly when k*eps/2 is a positive integer.
inline void check_profile_mesh_compatibility(const ZigZagProfile& profile, const CubeMesh& mesh) {
  const auto k = static_cast<std::int64_t>(mesh.subdivisions());
  const std::int64_t period_cells = 2 * profile.inv_epsilon;  // k per kink interval
  if (k % period_cells != 0 || k / period_cells < 1)
    throw CompatibilityError(
        "construction/mesh mismatch: need k*epsilon/2 to be a positive integer (k = " +
        std::to_string(k) + ", epsilon = " + profile.epsilon_string() + ")");
}

}  // namespace detail

/// Profile value of the lifted oscillation at coordinate t: (eps/2)*zigzag(t/eps).
template <class S>
S zigzag_lift(const ZigZagProfile& profile, const S& t) {
  S eps = profile.template epsilon<S>();
  return eps / S(2) * zigzag<S>(t / eps);
}

/// The planar two-component oscillation u_1(x) = u_2(x) = (eps/2)*zigzag(x_1/eps)
/// as an exact piecewise-affine map on a compatible mesh. Both components have
/// gradient (+-1/2, 0) on every simplex; the map vanishes on the x_1 faces of
/// Q but not on the x_2 faces, so zero_boundary is false.
template <class S>
PwAffineMap<S> zigzag_test_map(const ZigZagProfile& profile,
                               std::shared_ptr<const CubeMesh> mesh) {
  if (mesh->dim() != 2)
    throw InputError("zigzag_test_map: requires a planar mesh (n = 2)");
  detail::check_profile_mesh_compatibility(profile, *mesh);
  const std::size_t m = 2;
  std::vector<S> nodal(mesh->node_count() * m, S{});
  // value depends on the x_1 lattice coordinate only
  const std::size_t k = mesh->subdivisions();
  std::vector<S> column(k + 1);
  for (std::size_t i = 0; i <= k; ++i)
    column[i] = zigzag_lift<S>(
        profile, fraction<S>(static_cast<long long>(i), static_cast<long long>(k)));
  for (std::size_t v = 0; v < mesh->node_count(); ++v) {
    const auto idx = mesh->node_lattice(v);
    nodal[v * m] = column[idx[0]];
    nodal[v * m + 1] = column[idx[0]];
  }
  return PwAffineMap<S>(std::move(mesh), m, std::move(nodal));
}

// Single-direction laminate family: u(x) = (eps/2) * zigzag(x.a / eps) * b.
// Gradients alternate between +-(1/2) b (x) a on laminate strips. Reduces to
// the planar oscillation above for a = e_1, b = (1, 1). Only axis-aligned
// directions are supported.
template <class S>
struct LaminateSpec {
  Point<S> direction;      // must be a standard basis vector
  std::vector<S> amplitude;  // b, one entry per map component
  ZigZagProfile profile;

  static LaminateSpec axis(std::size_t axis_index, std::size_t n, std::vector<S> amplitude,
                           ZigZagProfile profile) {
    if (axis_index >= n) throw InputError("LaminateSpec: axis index out of range");
    Point<S> dir(n, S{});
    dir[axis_index] = S(1);
    return LaminateSpec{std::move(dir), std::move(amplitude), profile};
  }

  std::size_t axis_index() const {
    std::optional<std::size_t> axis;
    for (std::size_t j = 0; j < direction.size(); ++j) {
      if (direction[j] == S{}) continue;
      if (direction[j] != S(1) || axis)
        throw InputError("laminate_test_map: only axis-aligned directions are supported");
      axis = j;
    }
    if (!axis) throw InputError("laminate_test_map: zero direction");
    return *axis;
  }
};

template <class S>
PwAffineMap<S> laminate_test_map(const LaminateSpec<S>& spec,
                                 std::shared_ptr<const CubeMesh> mesh) {
  if (spec.direction.size() != mesh->dim())
    throw InputError("laminate_test_map: direction dimension does not match the mesh");
  if (spec.amplitude.empty()) throw InputError("laminate_test_map: empty amplitude");
  const std::size_t axis = spec.axis_index();
  detail::check_profile_mesh_compatibility(spec.profile, *mesh);
  const std::size_t m = spec.amplitude.size();
  const std::size_t k = mesh->subdivisions();
  std::vector<S> column(k + 1);
  for (std::size_t i = 0; i <= k; ++i)
    column[i] = zigzag_lift<S>(
        spec.profile, fraction<S>(static_cast<long long>(i), static_cast<long long>(k)));
  std::vector<S> nodal(mesh->node_count() * m, S{});
  for (std::size_t v = 0; v < mesh->node_count(); ++v) {
    const auto idx = mesh->node_lattice(v);
    const S& base = column[idx[axis]];
    for (std::size_t c = 0; c < m; ++c) nodal[v * m + c] = base * spec.amplitude[c];
  }
  return PwAffineMap<S>(std::move(mesh), m, std::move(nodal));
}

/// CLI-facing construction ids: "zigzag(eps)" and "laminate(axis,b...,eps)"
/// with a 1-based axis, e.g. "laminate(1,1,1,1/4)" for axis e_1, b = (1,1).
template <class S>
PwAffineMap<S> build_construction(const std::string& id, std::shared_ptr<const CubeMesh> mesh) {
  auto args_of = [&id](const std::string& prefix) -> std::optional<std::vector<std::string>> {
    if (id.rfind(prefix + "(", 0) != 0 || id.back() != ')') return std::nullopt;
    std::string body = id.substr(prefix.size() + 1, id.size() - prefix.size() - 2);
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t comma = body.find(',', pos);
      if (comma == std::string::npos) comma = body.size();
      parts.push_back(body.substr(pos, comma - pos));
      pos = comma + 1;
    }
    return parts;
  };
  if (auto args = args_of("zigzag")) {
    if (args->size() != 1) throw InputError("construction id: zigzag expects one epsilon");
    return zigzag_test_map<S>(ZigZagProfile::from_epsilon(parse_scalar<Rational>((*args)[0])),
                              std::move(mesh));
  }
  if (auto args = args_of("laminate")) {
    if (args->size() < 3)
      throw InputError("construction id: laminate expects (axis, b..., eps)");
    long axis_1based = std::stol((*args)[0]);
    if (axis_1based < 1 || static_cast<std::size_t>(axis_1based) > mesh->dim())
      throw InputError("construction id: laminate axis out of range");
    std::vector<S> amplitude;
    for (std::size_t i = 1; i + 1 < args->size(); ++i)
      amplitude.push_back(parse_scalar<S>((*args)[i]));
    auto profile = ZigZagProfile::from_epsilon(parse_scalar<Rational>(args->back()));
    return laminate_test_map<S>(
        LaminateSpec<S>::axis(static_cast<std::size_t>(axis_1based - 1), mesh->dim(),
                              std::move(amplitude), profile),
        std::move(mesh));
  }
  throw InputError("unknown construction id: " + id);
}

inline std::string zigzag_id(const ZigZagProfile& profile) {
  return "zigzag(" + profile.epsilon_string() + ")";
}

template <class S>
std::string laminate_id(const LaminateSpec<S>& spec) {
  std::string out = "laminate(" + std::to_string(spec.axis_index() + 1);
  for (const S& b : spec.amplitude) out += "," + scalar_to_string(b);
  out += "," + spec.profile.epsilon_string() + ")";
  return out;
}

}  // namespace morrey::constructions
