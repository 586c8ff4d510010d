#pragma once
// Tickets, blocks, and their canonical byte layouts.
//
// Canonical forms (all integers big-endian):
//
//   ticket  = tip_hashes[0..n-1] (32 bytes each)
//           | pubkey (32 bytes)
//           | nonce (8 bytes)                          -> 32n + 40 bytes
//
//   block id preimage
//           = chain_index (4 bytes)
//           | prev_hash (32 bytes)
//           | hash(payload) (32 bytes)
//           | ticket_hash (32 bytes)                   -> block_id = hash(preimage)
//
//   block wire format (header fields in block-id order, payload carried
//   in full with a length prefix, signature appended)
//           = chain_index (4 bytes)
//           | prev_hash (32 bytes)
//           | payload_len (4 bytes) | payload
//           | ticket (32n + 40 bytes)
//           | sig_len (2 bytes) | signature
//
// The signature is excluded from the block id: it signs the id, so including
// it would be circular.

#include <cstdint>
#include <vector>

#include "multistrand/crypto.hpp"
#include "multistrand/types.hpp"

namespace multistrand {

// ==========================================================================
// Ticket
// ==========================================================================

/// Proof-of-work lottery entry. The tip hashes pin the ticket to a snapshot
/// of every strand's best tip (freshness); the pubkey binds the ticket to one
/// keypair (anti-hijack); the nonce is the scanned quantity.
struct Ticket {
  std::vector<Hash256> tip_hashes;  ///< arity must equal strand_count_n
  PublicKey pubkey{};
  std::uint64_t nonce = 0;

  friend bool operator==(const Ticket&, const Ticket&) = default;
};

/// Serialized ticket size for the given parameters: 32n + 40.
[[nodiscard]] std::size_t ticket_wire_size(const Params& params);

[[nodiscard]] Bytes serialize_ticket(const Ticket& ticket);
void append_ticket(Bytes& out, const Ticket& ticket);

/// Decodes a ticket of exactly ticket_wire_size(params) bytes.
/// Throws CodecError on any size mismatch.
[[nodiscard]] Ticket deserialize_ticket(ByteView bytes, const Params& params);

// ==========================================================================
// Block
// ==========================================================================

struct Block {
  ChainIndex chain_index = 0;
  Hash256 prev_hash{};
  Bytes payload;  ///< opaque transaction data
  Ticket ticket;
  Signature signature{};

  friend bool operator==(const Block&, const Block&) = default;
};

/// Content-addressed block identifier (signature excluded, see layout above).
[[nodiscard]] Hash256 block_id(const Block& block, const Params& params);

[[nodiscard]] Bytes serialize_block(const Block& block, const Params& params);

/// Decodes a full block from exactly `bytes` (no trailing data permitted).
/// Throws CodecError on truncation, bad lengths, or trailing bytes.
[[nodiscard]] Block deserialize_block(ByteView bytes, const Params& params);

// ==========================================================================
// Genesis
// ==========================================================================

/// Each strand starts from a deterministic genesis id so independent
/// implementations agree byte-for-byte:
///   hash("MULTISTRAND-GENESIS" | chain_index (4 bytes) | p (1 byte)
///        | difficulty_bits (2 bytes))
[[nodiscard]] Hash256 genesis_block_id(ChainIndex chain_index, const Params& params);

}  // namespace multistrand
