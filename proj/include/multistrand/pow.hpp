#pragma once
// Proof-of-work engine: ticket hashing, the two validity conditions, and the
// nonce scan.
//
// A ticket is judged by hashing its canonical bytes once. Two properties of
// that single digest decide everything:
//   * difficulty — the digest must start with at least difficulty_bits zero
//     bits;
//   * strand assignment — the digest's last p bits ARE the chain index. The
//     index is an output of mining, never an input: a miner cannot choose it.

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>

#include "multistrand/block.hpp"
#include "multistrand/types.hpp"

namespace multistrand {

// ==========================================================================
// Judgement
// ==========================================================================

struct TicketJudgement {
  Hash256 ticket_hash{};
  std::uint32_t leading_zero_bits = 0;
  ChainIndex chain_index = 0;       ///< hash-derived; the only valid declaration
  bool meets_difficulty = false;

  friend bool operator==(const TicketJudgement&, const TicketJudgement&) = default;
};

/// Number of leading zero bits of the digest, counting from the most
/// significant bit of byte 0. Range [0, 256].
[[nodiscard]] std::uint32_t leading_zero_bits(const Hash256& digest);

/// The digest's last p bits as an integer (big-endian digest, so the low bits
/// of the trailing bytes). p must be <= kMaxStrandExponent.
[[nodiscard]] ChainIndex chain_index_of(const Hash256& digest,
                                        std::uint32_t strand_exponent_p);

/// Hash of the ticket's canonical serialization.
[[nodiscard]] Hash256 ticket_hash(const Ticket& ticket, const Params& params);

/// Full judgement of one ticket: one hash, then the two derived properties.
[[nodiscard]] TicketJudgement judge_ticket(const Ticket& ticket, const Params& params);

// ==========================================================================
// Mining
// ==========================================================================

/// Cooperative cancellation token for long scans. Shared by reference; safe
/// to signal from another thread.
class CancelFlag {
 public:
  void request_stop() noexcept { stop_.store(true, std::memory_order_relaxed); }
  [[nodiscard]] bool stop_requested() const noexcept {
    return stop_.load(std::memory_order_relaxed);
  }

 private:
  std::atomic<bool> stop_{false};
};

struct MinedTicket {
  Ticket ticket;
  TicketJudgement judgement;
};

/// Scans nonces upward from nonce_start, at most max_attempts of them,
/// against the fixed (tips, pubkey) preimage. Returns the ticket with the
/// smallest qualifying nonce, or nullopt when the budget is exhausted or
/// cancellation was requested. tips.size() must equal strand_count_n.
[[nodiscard]] std::optional<MinedTicket> mine_ticket(
    std::span<const Hash256> tips, const PublicKey& pubkey, const Params& params,
    std::uint64_t nonce_start, std::uint64_t max_attempts,
    const CancelFlag* cancel = nullptr);

}  // namespace multistrand
