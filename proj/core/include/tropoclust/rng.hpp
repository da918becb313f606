#pragma once

// Deterministic random draws: every consumer of randomness goes through
// these helpers so that a seed fixes the output bit-for-bit, in both
// arithmetic modes. Exact-mode draws are dyadic rationals.

#include <cstdint>
#include <random>
#include <vector>

#include "tropoclust/scalar.hpp"

namespace tropo {

using Rng = std::mt19937_64;

inline std::uint64_t rng_u64(Rng& rng) { return rng(); }

// Uniform index in [0, n), rejection-sampled to avoid modulo bias.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw ValidationError("uniform_index: empty range");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return static_cast<std::size_t>(v % n);
}

constexpr std::uint64_t kDyadicDen = std::uint64_t(1) << 53;

// 53-bit uniform in [0, 1).
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// Strictly interior uniform draw on (lo, hi); dyadic in exact mode.
template <class S>
inline S uniform_scalar_open(Rng& rng, const S& lo, const S& hi) {
  if (!(lo < hi)) throw ValidationError("uniform_scalar_open: empty interval");
  std::uint64_t k = (rng() >> 11);
  if (k == 0) k = 1;  // keep the draw off both endpoints
  if constexpr (is_exact_v<S>) {
    return lo + (hi - lo) * Rat(BigInt(k), BigInt(kDyadicDen));
  } else {
    return lo + (hi - lo) * (static_cast<double>(k) / 9007199254740992.0);
  }
}

// Small random rational p/q with |p| <= max_num, 1 <= q <= max_den.
inline Rat random_small_rat(Rng& rng, int max_num, int max_den) {
  int p = static_cast<int>(uniform_index(rng, 2 * max_num + 1)) - max_num;
  int q = 1 + static_cast<int>(uniform_index(rng, max_den));
  return Rat(p, q);
}

// Index draw with probability proportional to nonnegative weights; the
// total must be positive (zero-weight indices are never picked).
template <class S>
inline std::size_t weighted_pick(Rng& rng, const std::vector<S>& weights) {
  S total(0);
  for (const S& w : weights) {
    if (w < S(0)) throw ValidationError("weighted_pick: negative weight");
    total += w;
  }
  if (total == S(0)) throw ValidationError("weighted_pick: all weights zero");
  std::uint64_t k = rng() >> 11;
  S threshold;
  if constexpr (is_exact_v<S>) {
    threshold = total * Rat(BigInt(k), BigInt(kDyadicDen));
  } else {
    threshold = total * (static_cast<double>(k) / 9007199254740992.0);
  }
  S acc(0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (threshold < acc && weights[i] > S(0)) return i;
  }
  // Numerical edge: return the last positive-weight index.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > S(0)) return i;
  return 0;
}

}  // namespace tropo
