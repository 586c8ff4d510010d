#include "multistrand/types.hpp"

#include <bit>

namespace multistrand {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

[[nodiscard]] int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

// ─── hex ──────────────────────────────────────────────────────────────────

std::string to_hex(ByteView data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

std::string to_hex(const Hash256& digest) {
  return to_hex(ByteView{digest.bytes});
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw CodecError("hex string has odd length");
  }
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = hex_nibble(hex[i]);
    const int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw CodecError("invalid hex digit");
    }
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

Hash256 hash_from_hex(std::string_view hex) {
  const Bytes raw = from_hex(hex);
  if (raw.size() != Hash256::size()) {
    throw CodecError("digest hex must decode to exactly 32 bytes");
  }
  Hash256 h;
  std::copy(raw.begin(), raw.end(), h.bytes.begin());
  return h;
}

// ─── big-endian codecs ────────────────────────────────────────────────────

void append_u16_be(Bytes& out, std::uint16_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value));
}

void append_u32_be(Bytes& out, std::uint32_t value) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(value >> shift));
  }
}

void append_u64_be(Bytes& out, std::uint64_t value) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(value >> shift));
  }
}

void store_u64_be(std::uint8_t* out, std::uint64_t value) {
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>(value);
    value >>= 8;
  }
}

std::uint16_t load_u16_be(const std::uint8_t* in) {
  return static_cast<std::uint16_t>((in[0] << 8) | in[1]);
}

std::uint32_t load_u32_be(const std::uint8_t* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in[i];
  return v;
}

std::uint64_t load_u64_be(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
  return v;
}

// ─── parameters ───────────────────────────────────────────────────────────

Params Params::make(std::uint32_t strand_exponent_p, std::uint32_t difficulty_bits) {
  Params p;
  p.strand_exponent_p = strand_exponent_p;
  p.strand_count_n = strand_exponent_p <= kMaxStrandExponent
                         ? (std::uint32_t{1} << strand_exponent_p)
                         : 0;
  p.difficulty_bits = difficulty_bits;
  p.validate();
  return p;
}

void Params::validate() const {
  if (strand_exponent_p > kMaxStrandExponent) {
    throw std::invalid_argument("strand_exponent_p exceeds supported maximum");
  }
  if (strand_count_n != (std::uint32_t{1} << strand_exponent_p)) {
    throw std::invalid_argument("strand_count_n must equal 2^strand_exponent_p");
  }
  if (difficulty_bits + strand_exponent_p > 256) {
    throw std::invalid_argument("difficulty_bits + strand_exponent_p must be <= 256");
  }
  if (hash_algo_id != "sha256") {
    throw std::invalid_argument("unsupported hash_algo_id: " + hash_algo_id);
  }
  if (sig_algo_id != "ed25519") {
    throw std::invalid_argument("unsupported sig_algo_id: " + sig_algo_id);
  }
}

bool operator==(const Params& a, const Params& b) {
  return a.strand_exponent_p == b.strand_exponent_p &&
         a.strand_count_n == b.strand_count_n &&
         a.difficulty_bits == b.difficulty_bits &&
         a.hash_algo_id == b.hash_algo_id && a.sig_algo_id == b.sig_algo_id;
}

}  // namespace multistrand
