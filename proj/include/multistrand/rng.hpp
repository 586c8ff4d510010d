#pragma once
// Deterministic randomness for simulations.
//
// Everything here is specified down to the bit so traces are identical across
// platforms, not just across runs: splitmix64 expands seeds, xoshiro256**
// generates streams, bounded integers use 128-bit multiply-shift reduction,
// and exponential variates come from von Neumann's comparison-based sampler
// (integer compares plus one IEEE division — no libm, whose last-ulp behavior
// varies between implementations).

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace multistrand {

/// Fixed-point resolution for exponential inter-arrival times: event times
/// live on an integer grid of time units; arrival processes are tracked at
/// 2^20 subticks per unit so grid quantization cannot distort configured
/// rates.
inline constexpr std::uint64_t kSubticksPerUnit = std::uint64_t{1} << 20;

[[nodiscard]] constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for an independent stream: hashes (root, stream) through
/// splitmix64 twice so related stream ids do not yield related states.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t root,
                                                  std::uint64_t stream) {
  std::uint64_t state = root;
  const std::uint64_t a = splitmix64_next(state);
  state = a ^ (stream * 0xd6e8feb86659fd93ULL + 0x2545f4914f6cdd1dULL);
  std::uint64_t out = splitmix64_next(state);
  out ^= splitmix64_next(state);
  return out;
}

/// xoshiro256** — fast, well-tested 64-bit generator with a fully specified
/// output sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t state = seed;
    for (auto& word : s_) word = splitmix64_next(state);
  }

  [[nodiscard]] std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound), bound >= 1 (multiply-shift reduction).
  [[nodiscard]] std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  /// Uniform integer in [lo, hi] inclusive.
  [[nodiscard]] std::uint64_t in_range(std::uint64_t lo, std::uint64_t hi) {
    return lo + below(hi - lo + 1);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  [[nodiscard]] double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  void fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
      std::uint64_t word = next();
      for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
        out[i] = static_cast<std::uint8_t>(word);
        word >>= 8;
      }
    }
  }

 private:
  [[nodiscard]] static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

/// Exp(1) variate via von Neumann's 1951 method: draw uniforms until the
/// initial non-increasing run ends; an odd run length accepts the FIRST draw
/// as the fractional part, an even one adds 1 to the integer part and
/// retries. Exact (no approximation) and built entirely from integer
/// comparisons.
[[nodiscard]] inline double sample_exp1(Rng& rng) {
  std::uint64_t whole = 0;
  for (;;) {
    const std::uint64_t first = rng.next();
    std::uint64_t prev = first;
    std::uint64_t run_length = 1;
    for (;;) {
      const std::uint64_t u = rng.next();
      if (u < prev) {
        prev = u;
        ++run_length;
      } else {
        break;
      }
    }
    if (run_length % 2 == 1) {
      const double fraction = static_cast<double>(first >> 11) * 0x1.0p-53;
      return static_cast<double>(whole) + fraction;
    }
    ++whole;
  }
}

/// Exponential inter-arrival gap in subticks at `rate` events per time unit.
/// The division and the power-of-two scaling are both exactly rounded under
/// IEEE 754, so results are platform-independent. Always at least 1.
[[nodiscard]] inline std::uint64_t sample_exp_gap_subticks(Rng& rng, double rate) {
  const double x = sample_exp1(rng);
  const double scaled = (x / rate) * static_cast<double>(kSubticksPerUnit);
  constexpr double kCap = 9.0e18;  // < 2^63, keeps the conversion defined
  if (!(scaled < kCap)) return static_cast<std::uint64_t>(kCap);
  const auto gap = static_cast<std::uint64_t>(scaled);
  return gap == 0 ? 1 : gap;
}

}  // namespace multistrand
