#include "multistrand/pow.hpp"

#include <bit>
#include <stdexcept>

namespace multistrand {

std::uint32_t leading_zero_bits(const Hash256& digest) {
  std::uint32_t bits = 0;
  for (std::uint8_t byte : digest.bytes) {
    if (byte == 0) {
      bits += 8;
      continue;
    }
    bits += static_cast<std::uint32_t>(std::countl_zero(byte));
    break;
  }
  return bits;
}

ChainIndex chain_index_of(const Hash256& digest, std::uint32_t strand_exponent_p) {
  if (strand_exponent_p > kMaxStrandExponent) {
    throw std::invalid_argument("strand_exponent_p exceeds supported maximum");
  }
  if (strand_exponent_p == 0) {
    return 0;
  }
  // Last p bits of the big-endian digest: the low bits of the trailing bytes.
  const std::uint32_t tail = load_u32_be(digest.data() + 28);
  const std::uint32_t mask = (std::uint32_t{1} << strand_exponent_p) - 1;
  return tail & mask;
}

Hash256 ticket_hash(const Ticket& ticket, const Params& params) {
  return hash_bytes(ByteView{serialize_ticket(ticket)}, params);
}

TicketJudgement judge_ticket(const Ticket& ticket, const Params& params) {
  TicketJudgement j;
  j.ticket_hash = ticket_hash(ticket, params);
  j.leading_zero_bits = leading_zero_bits(j.ticket_hash);
  j.chain_index = chain_index_of(j.ticket_hash, params.strand_exponent_p);
  j.meets_difficulty = j.leading_zero_bits >= params.difficulty_bits;
  return j;
}

std::optional<MinedTicket> mine_ticket(std::span<const Hash256> tips,
                                       const PublicKey& pubkey, const Params& params,
                                       std::uint64_t nonce_start,
                                       std::uint64_t max_attempts,
                                       const CancelFlag* cancel) {
  if (tips.size() != params.strand_count_n) {
    throw std::invalid_argument("tips snapshot arity must equal strand_count_n");
  }

  // The preimage is fixed except for its final 8 bytes; serialize once and
  // patch the nonce in place per attempt.
  Ticket candidate;
  candidate.tip_hashes.assign(tips.begin(), tips.end());
  candidate.pubkey = pubkey;
  candidate.nonce = nonce_start;
  Bytes preimage = serialize_ticket(candidate);
  std::uint8_t* nonce_slot = preimage.data() + preimage.size() - 8;

  for (std::uint64_t i = 0; i < max_attempts; ++i) {
    if (cancel != nullptr && (i & 0xff) == 0 && cancel->stop_requested()) {
      return std::nullopt;
    }
    const std::uint64_t nonce = nonce_start + i;
    store_u64_be(nonce_slot, nonce);
    const Hash256 digest = hash_bytes(ByteView{preimage}, params);
    if (leading_zero_bits(digest) >= params.difficulty_bits) {
      candidate.nonce = nonce;
      TicketJudgement j;
      j.ticket_hash = digest;
      j.leading_zero_bits = leading_zero_bits(digest);
      j.chain_index = chain_index_of(digest, params.strand_exponent_p);
      j.meets_difficulty = true;
      return MinedTicket{std::move(candidate), j};
    }
  }
  return std::nullopt;
}

}  // namespace multistrand
