#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "morrey/scalar.hpp"

namespace morrey {

// Rejected inputs (dimension mismatches, malformed ids, bad parameters).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested discretization exceeds the memory budget.
class SizeError : public InputError {
 public:
  using InputError::InputError;
};

// Construction parameters do not fit the mesh (kinks off the lattice).
class CompatibilityError : public InputError {
 public:
  using InputError::InputError;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic stream-indexed RNG. Results depend only on (seed, stream,
// draw order), never on threading, so concurrent searches stay reproducible.
// Uniform doubles are built from raw engine bits; the standard distributions
// are implementation-defined and would break byte-stable reports.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
    std::uint64_t b = splitmix64(s);
    gen_.seed(a ^ (b << 1));
  }

  std::uint64_t next_u64() { return gen_(); }

  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  // Uniform in [0,1); dyadic with denominator 2^24 so exact mode stays cheap.
  template <class S>
  S uniform_scalar01() {
    if constexpr (is_exact_scalar_v<S>) {
      return fraction<S>(static_cast<long long>(next_u64() >> 40), 1LL << 24);
    } else {
      return uniform01();
    }
  }

  template <class S>
  S uniform_scalar(const S& lo, const S& hi) {
    return lo + (hi - lo) * uniform_scalar01<S>();
  }

  // Uniform in [-r, r].
  template <class S>
  S uniform_symmetric(const S& r) {
    return uniform_scalar<S>(-r, r);
  }

 private:
  std::mt19937_64 gen_;
};

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

// Worker cap: MORREY_THREADS env var, else hardware concurrency.
inline unsigned thread_budget() {
  if (const char* env = std::getenv("MORREY_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(begin, end) over disjoint contiguous stripes of [0, count).
// Callers must make per-stripe results combinable independent of order.
template <class Fn>
void run_stripes(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2 * threads) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = lo + chunk < count ? lo + chunk : count;
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace morrey
