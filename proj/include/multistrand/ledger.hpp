#pragma once
// Per-strand block trees with longest-chain fork choice, the four-step block
// validation checklist, and canonical export/import.
//
// Validation checklist, evaluated in this order; a verdict reports every
// step's outcome plus the FIRST failure as its reason:
//   V1  declared chain_index equals the ticket hash's last-p-bits index
//   V2  ticket.tip_hashes[chain_index] equals prev_hash AND prev_hash names a
//       block present in that strand (existence, not best-tip status: honest
//       forks are permitted, stale tickets are not)
//   V3  ticket hash has at least difficulty_bits leading zero bits
//   V4  signature verifies the block id under the ticket's pubkey
//
// Fork choice per strand: greatest height wins; at equal height the
// first-seen block keeps the tip. A reorg happens when a block makes a side
// branch strictly higher than the incumbent best path.

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "multistrand/block.hpp"
#include "multistrand/pow.hpp"
#include "multistrand/types.hpp"

namespace multistrand {

// ==========================================================================
// Verdicts
// ==========================================================================

enum class RejectReason : std::uint8_t {
  malformed,                // structural: ticket arity or declared index out of range
  chain_index_mismatch,     // V1
  ticket_tip_mismatch,      // V2: ticket's own-strand tip hash differs from prev_hash
  unknown_parent,           // V2: prev_hash absent from the strand
  insufficient_difficulty,  // V3
  bad_signature,            // V4
  duplicate_block,          // apply-time: block id already stored
};

[[nodiscard]] const char* to_string(RejectReason reason);

/// Checklist step (1..4) a reason belongs to; nullopt for malformed/duplicate.
[[nodiscard]] std::optional<int> check_number(RejectReason reason);

/// Outcome of the stateless checklist subset: everything decidable from the
/// block bytes and params alone (V1, V3, V4, and the tip==prev half of V2).
/// The simulator computes this once per published block and shares it across
/// replicas; outcomes are identical to full per-replica validation.
struct StatelessCheck {
  bool well_formed = false;
  TicketJudgement judgement{};
  Hash256 id{};
  bool v1_ok = false;
  bool v2_tip_matches_prev = false;
  bool v3_ok = false;
  bool v4_ok = false;
};

[[nodiscard]] StatelessCheck check_stateless(const Block& block, const Params& params);

struct Verdict {
  bool accepted = false;
  std::optional<RejectReason> reason;  // first failed step
  bool v1_chain_index_ok = false;
  bool v2_freshness_ok = false;
  bool v3_difficulty_ok = false;
  bool v4_signature_ok = false;
  TicketJudgement judgement{};
  Hash256 id{};
};

// ==========================================================================
// Apply outcome
// ==========================================================================

struct ApplyOutcome {
  enum class Kind : std::uint8_t {
    extended_best_tip,
    stored_side_branch,
    caused_reorg,
    rejected,
  };

  Kind kind = Kind::rejected;
  Hash256 id{};
  std::uint64_t height = 0;            ///< stored height (unset when rejected)
  std::uint64_t reorg_depth = 0;       ///< abandoned best-path blocks (caused_reorg)
  std::optional<RejectReason> reason;  ///< set when rejected

  [[nodiscard]] bool accepted() const { return kind != Kind::rejected; }
};

// ==========================================================================
// Ledger
// ==========================================================================

class Ledger {
 public:
  explicit Ledger(Params params);

  [[nodiscard]] const Params& params() const { return params_; }

  /// Full checklist against current state. Does not modify the ledger and
  /// does not test for duplicates (that is apply_block's concern).
  [[nodiscard]] Verdict validate_block(const Block& block) const;

  /// Validate, then insert and run fork choice. Duplicates are rejected
  /// idempotently without state change.
  ApplyOutcome apply_block(const Block& block);

  /// Fast path for callers that already hold the block's stateless results.
  ApplyOutcome apply_block(std::shared_ptr<const Block> block,
                           const StatelessCheck& stateless);

  /// Best-tip hash per strand, in strand order — exactly the snapshot a
  /// fresh ticket must embed.
  [[nodiscard]] std::vector<Hash256> tips() const;

  [[nodiscard]] std::uint64_t strand_height(ChainIndex strand) const;
  [[nodiscard]] const Hash256& strand_tip(ChainIndex strand) const;
  [[nodiscard]] const Hash256& strand_genesis(ChainIndex strand) const;
  [[nodiscard]] bool contains(ChainIndex strand, const Hash256& id) const;
  [[nodiscard]] std::optional<std::uint64_t> height_of(ChainIndex strand,
                                                       const Hash256& id) const;
  /// The stored block for an id (nullptr for genesis or unknown ids).
  [[nodiscard]] std::shared_ptr<const Block> find_block(ChainIndex strand,
                                                        const Hash256& id) const;

  /// Walk back_steps prev-links from the strand's best tip.
  /// back_steps must be <= strand_height.
  [[nodiscard]] Hash256 best_path_ancestor(ChainIndex strand,
                                           std::uint64_t back_steps) const;

  /// Non-genesis block ids on the strand's best path, lowest height first.
  [[nodiscard]] std::vector<Hash256> best_path(ChainIndex strand) const;

  [[nodiscard]] std::uint64_t strand_block_count(ChainIndex strand) const;
  [[nodiscard]] std::uint64_t total_blocks() const;

  /// (best_tip, best_height) per strand — the fork-choice state, used by
  /// determinism and import checks.
  [[nodiscard]] std::vector<std::pair<Hash256, std::uint64_t>> tip_cache() const;

  /// Canonical export: params header followed by every non-genesis block,
  /// strand by strand, in per-strand insertion order. Insertion order is
  /// topological (parents validated before children) and reproduces
  /// first-seen tie-breaks exactly, so import yields an identical tip cache.
  [[nodiscard]] Bytes export_blocks() const;

  /// Rebuilds a ledger from export_blocks output. Throws CodecError on a
  /// malformed stream or any block that fails validation.
  [[nodiscard]] static Ledger import_blocks(ByteView bytes);

 private:
  struct StoredBlock {
    std::shared_ptr<const Block> block;  // nullptr for genesis
    Hash256 prev{};
    std::uint64_t height = 0;
  };

  struct Strand {
    std::unordered_map<Hash256, StoredBlock> blocks;
    std::vector<Hash256> insertion_order;  // excludes genesis
    Hash256 genesis_id{};
    Hash256 best_tip{};
    std::uint64_t best_height = 0;
  };

  [[nodiscard]] Verdict validate_with(const Block& block,
                                      const StatelessCheck& stateless) const;
  ApplyOutcome insert_validated(std::shared_ptr<const Block> block, const Hash256& id);
  [[nodiscard]] const Hash256& ancestor_at_height(const Strand& strand,
                                                  const Hash256& from,
                                                  std::uint64_t target_height) const;

  Params params_;
  std::vector<Strand> strands_;
};

}  // namespace multistrand
