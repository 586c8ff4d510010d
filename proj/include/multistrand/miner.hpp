#pragma once
// Miner policies: the honest mining procedure plus the adversary strategies
// (targeted, hoarder, equivocator, private forker).
//
// Two surfaces:
//   * one-shot step functions (honest_step / targeted_step / equivocate_step)
//     — a single bounded mining call against a tips snapshot, used by tests
//     and the demo command;
//   * MinerAgent — the stateful per-miner machine the simulator drives, which
//     adds mining sessions (real-hash nonce continuation), hoard timers, and
//     the private fork ledger.
//
// Freshness discipline: tips are re-snapshotted at every mining call; any
// change starts a new session with a fresh keypair (one keypair per ticket).
// Mid-search tip changes on other strands are harmless — validation only
// checks the ticket's own-strand tip.

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "multistrand/ledger.hpp"
#include "multistrand/pow.hpp"
#include "multistrand/rng.hpp"
#include "multistrand/types.hpp"

namespace multistrand {

// ==========================================================================
// Payload provider
// ==========================================================================

/// Injected payload provider. Payloads are chosen AFTER the ticket is judged,
/// so the miner knows which strand (and so which height) the block will land
/// on. `variant` distinguishes the equivocator's copies.
class PayloadSource {
 public:
  virtual ~PayloadSource() = default;
  [[nodiscard]] virtual Bytes payload_for(std::uint32_t miner_id, ChainIndex strand,
                                          std::uint64_t height,
                                          std::uint32_t variant) = 0;
};

/// Deterministic pseudo-random payload bytes keyed by (miner, strand, height,
/// variant): a SHA-256 stream over the key tuple. Keeps traces reproducible
/// without modeling transactions.
class DefaultPayloadSource final : public PayloadSource {
 public:
  explicit DefaultPayloadSource(std::size_t payload_size = 32)
      : payload_size_(payload_size) {}

  [[nodiscard]] Bytes payload_for(std::uint32_t miner_id, ChainIndex strand,
                                  std::uint64_t height, std::uint32_t variant) override;

 private:
  std::size_t payload_size_;
};

// ==========================================================================
// Policies and configuration
// ==========================================================================

struct HonestPolicy {};
struct TargetedPolicy {
  ChainIndex target = 0;
};
struct HoarderPolicy {
  SimTime hold_duration = 0;
};
struct EquivocatorPolicy {
  std::uint32_t copies = 2;
};
struct PrivateForkerPolicy {
  ChainIndex target = 0;
  std::uint64_t withhold_depth = 0;
};

using Policy = std::variant<HonestPolicy, TargetedPolicy, HoarderPolicy,
                            EquivocatorPolicy, PrivateForkerPolicy>;

[[nodiscard]] const char* policy_kind_name(const Policy& policy);

struct MinerConfig {
  std::uint32_t miner_id = 0;
  /// Attempts per unit time (analytic mode) or attempts per step (real-hash
  /// mode); the two coincide because a step is one time unit.
  double hash_rate = 1.0;
  Policy policy = HonestPolicy{};

  void validate(const Params& params) const;  // throws std::invalid_argument
};

// ==========================================================================
// Products and snapshots
// ==========================================================================

struct MinedProduct {
  std::vector<Block> blocks;  ///< 1 for honest/targeted, `copies` for equivocator
  std::uint64_t discarded_tickets = 0;
};

/// Best tip and height per strand — the ledger view a ticket is mined
/// against.
struct TipsSnapshot {
  std::vector<Hash256> tips;
  std::vector<std::uint64_t> heights;

  [[nodiscard]] static TipsSnapshot of(const Ledger& ledger);
  friend bool operator==(const TipsSnapshot&, const TipsSnapshot&) = default;
};

struct AssembledBlock {
  Block block;
  Hash256 id{};
};

/// Builds and signs the block for a successful ticket: prev_hash is forced to
/// the ticket's own-strand tip hash; the signature covers the block id.
[[nodiscard]] AssembledBlock assemble_block(const MinedTicket& mined,
                                            const Keypair& key, Bytes payload,
                                            const Params& params);

// ==========================================================================
// One-shot step operations
// ==========================================================================

inline constexpr std::uint64_t kDefaultStepAttempts = 1u << 16;

/// One bounded mining call: fresh keypair, scan up to max_attempts nonces,
/// and on success assemble exactly one signed block for the ticket-determined
/// strand. Absence means the budget ran out.
[[nodiscard]] std::optional<MinedProduct> honest_step(
    const TipsSnapshot& view, const Params& params, std::uint64_t rng_seed,
    PayloadSource& payloads, std::uint32_t miner_id = 0,
    std::uint64_t max_attempts = kDefaultStepAttempts);

/// Like honest_step, but any successful ticket whose index differs from
/// `target` is discarded (counted in the product) and mining resumes with a
/// fresh keypair until the budget is spent.
[[nodiscard]] std::optional<MinedProduct> targeted_step(
    const TipsSnapshot& view, const Params& params, std::uint64_t rng_seed,
    PayloadSource& payloads, ChainIndex target, std::uint32_t miner_id = 0,
    std::uint64_t max_attempts = kDefaultStepAttempts);

/// Like honest_step, but emits `copies` blocks sharing the one ticket with
/// differing payloads — no extra proof-of-work.
[[nodiscard]] std::optional<MinedProduct> equivocate_step(
    const TipsSnapshot& view, const Params& params, std::uint64_t rng_seed,
    PayloadSource& payloads, std::uint32_t copies, std::uint32_t miner_id = 0,
    std::uint64_t max_attempts = kDefaultStepAttempts);

// ==========================================================================
// Simulator-driven agent
// ==========================================================================

/// Once a private fork falls this many blocks behind the public strand the
/// forker abandons the attack and re-anchors. At any minority hash share the
/// comeback probability from this deficit is negligible (q=0.3: ~1e-18), so
/// the bail-out does not measurably truncate catch-up statistics.
inline constexpr std::uint64_t kForkerBailOutDeficit = 40;

/// Callbacks an agent uses to act on the world; implemented by the simulator.
class MinerOutbox {
 public:
  virtual ~MinerOutbox() = default;
  virtual void publish(Block block) = 0;
  virtual void note_ticket_found(ChainIndex strand) = 0;
  virtual void schedule_wakeup(SimTime at) = 0;
};

struct MinerCounters {
  std::uint64_t tickets_found = 0;
  std::uint64_t tickets_discarded = 0;
  std::uint64_t hash_attempts = 0;  // real-hash mode only
};

class MinerAgent {
 public:
  /// `params` must be the machinery params the replicas validate with (the
  /// simulator zeroes difficulty in analytic mode).
  MinerAgent(MinerConfig config, Params params, std::uint64_t seed,
             std::shared_ptr<PayloadSource> payloads);

  /// Real-hash turn: spend this step's attempt budget on the nonce scan. A
  /// completed ticket consumes the remainder of the step (assembly and
  /// publication), so each step yields at most one ticket.
  void step_real(SimTime now, const Ledger& replica, MinerOutbox& out);

  /// Analytic turn: one pre-sampled ticket find materializes. The ticket is
  /// real (fresh keypair, random nonce, hash-derived chain index); only the
  /// difficulty search is abstracted away.
  void on_analytic_find(SimTime now, const Ledger& replica, MinerOutbox& out);

  /// Timer callback: the hoarder spends every stored ticket that has come
  /// due, claiming the CURRENT tip of the ticket's strand.
  void on_wakeup(SimTime now, const Ledger& replica, MinerOutbox& out);

  /// Notification that the miner's replica changed (a block arrived or its
  /// own publication was applied). The private forker re-evaluates its anchor
  /// here — at the moment it observes the public strand move — so anchoring
  /// at depth z never coincides with one of its own ticket finds.
  void on_replica_update(SimTime now, const Ledger& replica);

  [[nodiscard]] const MinerConfig& config() const { return config_; }
  [[nodiscard]] const MinerCounters& counters() const { return counters_; }

  /// Private forker bookkeeping: how many attacks ended (published or
  /// abandoned). Zero for every other policy.
  [[nodiscard]] std::uint64_t attack_resolutions() const {
    return forker_.successes + forker_.abandons;
  }
  [[nodiscard]] std::uint64_t attack_successes() const { return forker_.successes; }

 private:
  struct Session {
    bool active = false;
    TipsSnapshot view;
    Keypair key{};
    std::uint64_t next_nonce = 0;
  };

  struct ForkerState {
    bool anchored = false;
    std::uint64_t fork_base_height = 0;
    Hash256 private_tip{};
    std::uint64_t private_height = 0;
    std::vector<Block> private_chain;
    std::uint64_t successes = 0;
    std::uint64_t abandons = 0;
  };

  struct HoardEntry {
    SimTime due = 0;
    MinedTicket mined;
    Keypair key{};
  };

  [[nodiscard]] Keypair fresh_keypair();
  [[nodiscard]] TipsSnapshot current_view(const Ledger& replica) const;
  void refresh_policy_state(const Ledger& replica);
  [[nodiscard]] std::uint64_t take_step_budget();
  void begin_session(TipsSnapshot view);
  void handle_find(SimTime now, const TipsSnapshot& view, const MinedTicket& mined,
                   const Keypair& key, const Ledger& replica, MinerOutbox& out);

  MinerConfig config_;
  Params params_;
  Rng rng_;
  std::shared_ptr<PayloadSource> payloads_;
  Session session_;
  ForkerState forker_;
  std::deque<HoardEntry> hoard_;
  MinerCounters counters_;
  std::uint64_t step_budget_fp_ = 0;   // fixed-point attempts-per-step
  std::uint64_t budget_accum_fp_ = 0;  // carries fractional attempts across steps
};

}  // namespace multistrand
