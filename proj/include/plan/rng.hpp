#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace plan {

/// Role of one component in a stream-derivation path. Streams derived along
/// distinct (label, index) paths share no state.
enum class StreamLabel : std::uint64_t {
  scenario = 1,
  instance = 2,
  future = 3,
  beta = 4,
  assign = 5,
  ea_init = 6,
  ea_offspring = 7,
  prob_perturb = 8,
  weight_perturb = 9,
};

namespace detail {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kLabelSalt = 0xFF51AFD7ED558CCDull;

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

/// Identity of one derived random stream. Keys are produced by hashing the
/// master seed with each (label, index) path component in order; equal paths
/// give equal keys and distinct paths give unrelated keys.
class StreamKey {
 public:
  explicit constexpr StreamKey(std::uint64_t master_seed) noexcept
      : state_(detail::mix64(master_seed ^ detail::kGamma)) {}

  [[nodiscard]] constexpr StreamKey child(StreamLabel label,
                                          std::uint64_t index) const noexcept {
    std::uint64_t h = state_;
    h = detail::mix64(h ^ (static_cast<std::uint64_t>(label) * detail::kLabelSalt));
    h = detail::mix64(h ^ index);
    return StreamKey(raw_tag{}, h);
  }

  [[nodiscard]] constexpr std::uint64_t value() const noexcept { return state_; }

  constexpr bool operator==(const StreamKey&) const noexcept = default;

 private:
  struct raw_tag {};
  constexpr StreamKey(raw_tag, std::uint64_t state) noexcept : state_(state) {}
  std::uint64_t state_;
};

/// Counter-based pseudo-random stream (SplitMix64). One instance per derived
/// key; instances hold no shared state, so concurrent use of distinct streams
/// is safe. All draw primitives are fixed here so results do not depend on
/// any standard-library distribution implementation.
class RandomStream {
 public:
  explicit constexpr RandomStream(StreamKey key) noexcept : state_(key.value()) {}

  constexpr std::uint64_t next_u64() noexcept {
    state_ += detail::kGamma;
    return detail::mix64(state_);
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double next_uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; safe as a log() argument.
  double next_uniform_pos() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi); returns exactly lo when lo == hi.
  double next_uniform(double lo, double hi) noexcept {
    return lo + next_uniform() * (hi - lo);
  }

  /// Unbiased-in-practice index in [0, n); n must be >= 1.
  std::size_t next_index(std::size_t n) noexcept {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double next_normal() noexcept {
    const double u1 = next_uniform_pos();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double next_normal(double mean, double stddev) noexcept {
    return mean + stddev * next_normal();
  }

 private:
  std::uint64_t state_;
};

struct PathComponent {
  StreamLabel label;
  std::uint64_t index;
};

/// Pure function of (master_seed, path): identical arguments always yield a
/// stream emitting identical draws.
inline RandomStream derive_stream(std::uint64_t master_seed,
                                  std::initializer_list<PathComponent> path) {
  StreamKey key(master_seed);
  for (const PathComponent& pc : path) {
    key = key.child(pc.label, pc.index);
  }
  return RandomStream(key);
}

}  // namespace plan
