#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace auxopt {

/// Identifies one reproducible noise realization. The same token always
/// yields the same sequence of draws; there is no hidden generator state.
struct RandomToken {
  std::uint64_t stream_id = 0;
  std::uint64_t draw_index = 0;

  friend bool operator==(const RandomToken&, const RandomToken&) = default;
};

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

}  // namespace detail

/// Child stream of `parent`, deterministic in (parent, label).
constexpr RandomToken stream_fork(const RandomToken& parent,
                                  std::uint64_t label) noexcept {
  const std::uint64_t base =
      detail::hash_combine(parent.stream_id, parent.draw_index);
  return RandomToken{detail::hash_combine(base, label ^ 0xa0761d6478bd642fULL),
                     0};
}

/// Root token for a user-facing integer seed.
constexpr RandomToken root_token(std::uint64_t seed) noexcept {
  return RandomToken{detail::mix64(seed), 0};
}

/// Counter-based generator reading the draws of one token in order.
///
/// Draw i of a token is a pure function of (stream_id, draw_index, i), so two
/// NoiseStreams built from equal tokens produce identical sequences.
class NoiseStream {
 public:
  explicit NoiseStream(const RandomToken& token) noexcept
      : key_(detail::hash_combine(token.stream_id, token.draw_index)) {}

  std::uint64_t next_u64() noexcept {
    return detail::hash_combine(key_, counter_++);
  }

  /// Uniform in the open interval (0, 1).
  double next_uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Rejection sampling keeps it unbiased.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be > 0");
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t r = next_u64();
    while (r >= limit) r = next_u64();
    return r % bound;
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double next_gaussian() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Rademacher sign, +1 or -1 with equal probability.
  double next_sign() noexcept { return (next_u64() >> 63) ? 1.0 : -1.0; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Uniform random permutation of 0..n-1 (Fisher-Yates).
inline std::vector<std::size_t> random_permutation(std::size_t n,
                                                   const RandomToken& token) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  NoiseStream stream(token);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = stream.next_below(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

/// `count` distinct indices drawn uniformly from 0..n-1, in draw order.
inline std::vector<std::size_t> sample_without_replacement(
    std::size_t n, std::size_t count, const RandomToken& token) {
  if (count > n) {
    throw std::invalid_argument("sample_without_replacement: count > n");
  }
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  NoiseStream stream(token);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + stream.next_below(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace auxopt
