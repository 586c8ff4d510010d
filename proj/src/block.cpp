#include "multistrand/block.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

namespace multistrand {

namespace {

constexpr std::string_view kGenesisTag = "MULTISTRAND-GENESIS";

void append_hash(Bytes& out, const Hash256& h) {
  out.insert(out.end(), h.bytes.begin(), h.bytes.end());
}

}  // namespace

// ─── ticket ───────────────────────────────────────────────────────────────

std::size_t ticket_wire_size(const Params& params) {
  return std::size_t{32} * params.strand_count_n + 40;
}

void append_ticket(Bytes& out, const Ticket& ticket) {
  for (const Hash256& tip : ticket.tip_hashes) {
    append_hash(out, tip);
  }
  out.insert(out.end(), ticket.pubkey.begin(), ticket.pubkey.end());
  append_u64_be(out, ticket.nonce);
}

Bytes serialize_ticket(const Ticket& ticket) {
  Bytes out;
  out.reserve(32 * ticket.tip_hashes.size() + 40);
  append_ticket(out, ticket);
  return out;
}

Ticket deserialize_ticket(ByteView bytes, const Params& params) {
  const std::size_t expected = ticket_wire_size(params);
  if (bytes.size() != expected) {
    throw CodecError("ticket has wrong size for the configured strand count");
  }
  Ticket t;
  t.tip_hashes.resize(params.strand_count_n);
  std::size_t off = 0;
  for (Hash256& tip : t.tip_hashes) {
    std::memcpy(tip.data(), bytes.data() + off, 32);
    off += 32;
  }
  std::memcpy(t.pubkey.data(), bytes.data() + off, kPublicKeySize);
  off += kPublicKeySize;
  t.nonce = load_u64_be(bytes.data() + off);
  return t;
}

// ─── block ────────────────────────────────────────────────────────────────

Hash256 block_id(const Block& block, const Params& params) {
  const Hash256 payload_digest = hash_bytes(ByteView{block.payload}, params);
  const Hash256 ticket_digest = hash_bytes(ByteView{serialize_ticket(block.ticket)}, params);
  Bytes preimage;
  preimage.reserve(4 + 32 + 32 + 32);
  append_u32_be(preimage, block.chain_index);
  append_hash(preimage, block.prev_hash);
  append_hash(preimage, payload_digest);
  append_hash(preimage, ticket_digest);
  return hash_bytes(ByteView{preimage}, params);
}

Bytes serialize_block(const Block& block, const Params& params) {
  if (block.payload.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw CodecError("payload too large for the wire format");
  }
  Bytes out;
  out.reserve(4 + 32 + 4 + block.payload.size() + ticket_wire_size(params) + 2 +
              kSignatureSize);
  append_u32_be(out, block.chain_index);
  append_hash(out, block.prev_hash);
  append_u32_be(out, static_cast<std::uint32_t>(block.payload.size()));
  out.insert(out.end(), block.payload.begin(), block.payload.end());
  append_ticket(out, block.ticket);
  append_u16_be(out, static_cast<std::uint16_t>(kSignatureSize));
  out.insert(out.end(), block.signature.begin(), block.signature.end());
  return out;
}

Block deserialize_block(ByteView bytes, const Params& params) {
  const auto need = [&](std::size_t off, std::size_t len) {
    if (off + len > bytes.size()) {
      throw CodecError("block bytes truncated");
    }
  };

  Block b;
  std::size_t off = 0;

  need(off, 4);
  b.chain_index = load_u32_be(bytes.data() + off);
  off += 4;

  need(off, 32);
  std::memcpy(b.prev_hash.data(), bytes.data() + off, 32);
  off += 32;

  need(off, 4);
  const std::uint32_t payload_len = load_u32_be(bytes.data() + off);
  off += 4;
  need(off, payload_len);
  b.payload.assign(bytes.begin() + off, bytes.begin() + off + payload_len);
  off += payload_len;

  const std::size_t ticket_len = ticket_wire_size(params);
  need(off, ticket_len);
  b.ticket = deserialize_ticket(bytes.subspan(off, ticket_len), params);
  off += ticket_len;

  need(off, 2);
  const std::uint16_t sig_len = load_u16_be(bytes.data() + off);
  off += 2;
  if (sig_len != kSignatureSize) {
    throw CodecError("unexpected signature length");
  }
  need(off, sig_len);
  std::memcpy(b.signature.data(), bytes.data() + off, sig_len);
  off += sig_len;

  if (off != bytes.size()) {
    throw CodecError("trailing bytes after block");
  }
  return b;
}

// ─── genesis ──────────────────────────────────────────────────────────────

Hash256 genesis_block_id(ChainIndex chain_index, const Params& params) {
  Bytes preimage;
  preimage.reserve(kGenesisTag.size() + 4 + 1 + 2);
  preimage.insert(preimage.end(), kGenesisTag.begin(), kGenesisTag.end());
  append_u32_be(preimage, chain_index);
  preimage.push_back(static_cast<std::uint8_t>(params.strand_exponent_p));
  append_u16_be(preimage, static_cast<std::uint16_t>(params.difficulty_bits));
  return hash_bytes(ByteView{preimage}, params);
}

}  // namespace multistrand
