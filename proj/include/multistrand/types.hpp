#pragma once
// Foundational value types shared by every layer: 32-byte digests, protocol
// parameters, big-endian integer codecs, and hex helpers.
//
// Every multi-byte integer in a canonical serialization is big-endian; the
// helpers here are the single source of that rule.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace multistrand {

// ==========================================================================
// Bytes and digests
// ==========================================================================

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// A 32-byte digest. Wrapped in a struct (rather than a bare std::array
/// alias) so it can carry a std::hash specialization and cannot be confused
/// with other 32-byte quantities such as public keys.
struct Hash256 {
  std::array<std::uint8_t, 32> bytes{};

  [[nodiscard]] const std::uint8_t* data() const noexcept { return bytes.data(); }
  [[nodiscard]] std::uint8_t* data() noexcept { return bytes.data(); }
  [[nodiscard]] static constexpr std::size_t size() noexcept { return 32; }
  [[nodiscard]] std::uint8_t operator[](std::size_t i) const { return bytes[i]; }
  [[nodiscard]] std::uint8_t& operator[](std::size_t i) { return bytes[i]; }

  friend bool operator==(const Hash256&, const Hash256&) = default;
  friend auto operator<=>(const Hash256&, const Hash256&) = default;
};

/// Strand identifier: an integer in [0, strand_count_n).
using ChainIndex = std::uint32_t;

/// Simulated clock value: a 64-bit count of integer time units.
using SimTime = std::int64_t;

// ==========================================================================
// Errors
// ==========================================================================

/// Canonical bytes that cannot be decoded: truncation, wrong arity, stray
/// trailing data, malformed hex, bad magic.
struct CodecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ==========================================================================
// Hex helpers
// ==========================================================================

[[nodiscard]] std::string to_hex(ByteView data);
[[nodiscard]] std::string to_hex(const Hash256& digest);
[[nodiscard]] Bytes from_hex(std::string_view hex);         // throws CodecError
[[nodiscard]] Hash256 hash_from_hex(std::string_view hex);  // throws CodecError

// ==========================================================================
// Big-endian integer codecs
// ==========================================================================

void append_u16_be(Bytes& out, std::uint16_t value);
void append_u32_be(Bytes& out, std::uint32_t value);
void append_u64_be(Bytes& out, std::uint64_t value);
void store_u64_be(std::uint8_t* out, std::uint64_t value);

[[nodiscard]] std::uint16_t load_u16_be(const std::uint8_t* in);
[[nodiscard]] std::uint32_t load_u32_be(const std::uint8_t* in);
[[nodiscard]] std::uint64_t load_u64_be(const std::uint8_t* in);

// ==========================================================================
// Protocol parameters
// ==========================================================================

/// Largest supported strand exponent. ChainIndex is 32-bit and strand state
/// is held in memory per strand, so 2^30 is already far beyond practical use.
inline constexpr std::uint32_t kMaxStrandExponent = 30;

struct Params {
  std::uint32_t strand_exponent_p = 0;  ///< n = 2^p strands
  std::uint32_t strand_count_n = 1;     ///< must equal 2^strand_exponent_p
  std::uint32_t difficulty_bits = 0;    ///< required leading zero bits of a ticket hash
  std::string hash_algo_id = "sha256";
  std::string sig_algo_id = "ed25519";

  [[nodiscard]] static Params make(std::uint32_t strand_exponent_p,
                                   std::uint32_t difficulty_bits);

  /// Throws std::invalid_argument when any invariant is broken:
  /// n == 2^p, p <= kMaxStrandExponent, difficulty_bits + p <= 256,
  /// and both algorithm ids name supported algorithms.
  void validate() const;
};

[[nodiscard]] bool operator==(const Params& a, const Params& b);

}  // namespace multistrand

template <>
struct std::hash<multistrand::Hash256> {
  std::size_t operator()(const multistrand::Hash256& h) const noexcept {
    // Digests are uniformly distributed; the first eight bytes are already a
    // high-quality hash value.
    return static_cast<std::size_t>(multistrand::load_u64_be(h.data()));
  }
};
