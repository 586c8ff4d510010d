#pragma once
// Deterministic discrete-time network simulator.
//
// Time model: integer time units. In real-hash mode every miner takes one
// mining step per unit (its per-unit attempt budget); in analytic mode ticket
// finds arrive per miner as a Poisson process with rate hash_rate / 2^d per
// unit, quantized to the unit grid. In both modes a completed ticket consumes
// the remainder of the miner's unit (assembly and publication), so each miner
// completes at most one ticket per unit.
//
// Within one time unit, work is processed in a fixed order: miner turns
// (ticket finds / mining steps / hoard wakeups) in miner-id order first, then
// block arrivals in recipient order. Publications made at time t are applied
// to the publisher's own replica immediately and reach every other replica as
// an arrival at t + latency, so blocks published in the same unit are mutually
// invisible until the next unit even at zero latency.
//
// Analytic mode produces real blocks — fresh keypair, random nonce, a real
// ticket hash that sets the chain index, a real signature — and abstracts only
// the difficulty search into the arrival rate: validation runs with
// difficulty_bits forced to 0 (see effective_params) while index, freshness,
// and signature checks stay fully enforced.
//
// An observer ledger receives every published block at publication time. The
// summary's final heights, the orphan/fork accounting, and replay all refer to
// this observer, making the trace self-contained: replaying the publication
// events into a fresh ledger must reproduce the recorded final heights.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "multistrand/block.hpp"
#include "multistrand/ledger.hpp"
#include "multistrand/miner.hpp"
#include "multistrand/types.hpp"

namespace multistrand {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ==========================================================================
// Configuration
// ==========================================================================

struct LatencyModel {
  enum class Kind : std::uint8_t { zero, fixed, uniform };
  Kind kind = Kind::zero;
  SimTime delay = 0;  // fixed
  SimTime lo = 0;     // uniform (inclusive)
  SimTime hi = 0;     // uniform (inclusive)

  [[nodiscard]] static LatencyModel zero_latency() { return LatencyModel{}; }
  [[nodiscard]] static LatencyModel fixed(SimTime delay) {
    return LatencyModel{Kind::fixed, delay, 0, 0};
  }
  [[nodiscard]] static LatencyModel uniform(SimTime lo, SimTime hi) {
    return LatencyModel{Kind::uniform, 0, lo, hi};
  }
};

enum class SimMode : std::uint8_t { real_hash, analytic };

[[nodiscard]] std::string to_string(SimMode mode);
[[nodiscard]] std::string to_string(LatencyModel::Kind kind);

struct SimConfig {
  Params params;
  std::vector<MinerConfig> miners;
  LatencyModel latency_model;
  SimMode mode = SimMode::real_hash;
  SimTime duration = 0;
  std::uint64_t seed = 0;
  std::size_t payload_size = 32;
  /// When false, block_arrival events still happen but are not recorded in
  /// the trace (they dominate event volume in large many-miner runs).
  bool record_arrivals = true;
  /// Stop as soon as any private forker resolves an attack (publishes its
  /// fork or abandons it). Used to run attack races to completion.
  bool stop_on_attack_resolution = false;

  void validate() const;  // throws ConfigError
};

/// The params the simulation machinery (replicas, observer, replay) validates
/// with: identical to config.params in real-hash mode; difficulty_bits forced
/// to 0 in analytic mode, where difficulty lives in the arrival rate instead.
[[nodiscard]] Params effective_params(const SimConfig& config);

[[nodiscard]] SimConfig parse_config(const std::string& json_text);  // throws ConfigError
[[nodiscard]] std::string config_to_json(const SimConfig& config);

// ==========================================================================
// Trace
// ==========================================================================

enum class EventKind : std::uint8_t {
  ticket_found = 0,
  block_published = 1,
  block_arrival = 2,
  fork_resolved = 3,
};

[[nodiscard]] std::string to_string(EventKind kind);

struct SimEvent {
  SimTime time = 0;
  EventKind kind = EventKind::ticket_found;
  /// Finder / publisher / recipient, depending on kind. For fork_resolved:
  /// the publisher of the block that caused the reorganization.
  std::int64_t miner = -1;
  std::int64_t strand = -1;
  Hash256 block_id{};                       // zero for ticket_found
  std::shared_ptr<const Block> block;       // block_published only
  std::uint64_t depth = 0;                  // fork_resolved: blocks displaced
};

struct MinerSummary {
  std::uint32_t miner_id = 0;
  std::uint64_t tickets_found = 0;
  std::uint64_t tickets_discarded = 0;
  std::uint64_t blocks_accepted_best = 0;  ///< publications on the observer's final best paths
  std::uint64_t blocks_orphaned = 0;       ///< accepted by the observer, later displaced
  std::uint64_t blocks_rejected = 0;       ///< rejected outright by the observer
  std::uint64_t hash_attempts = 0;         ///< real-hash mode only
};

struct SimTrace {
  SimConfig config;
  std::vector<SimEvent> events;
  std::vector<std::uint64_t> final_heights;  ///< observer, per strand
  std::vector<MinerSummary> miners;
};

// ==========================================================================
// Running, replaying, serializing
// ==========================================================================

/// Optional instrumentation for tests: called after each processed work item
/// with the current time and read access to the replicas.
struct RunHooks {
  std::function<void(SimTime now, const std::vector<Ledger>& replicas)> after_item;
};

[[nodiscard]] SimTrace run_simulation(const SimConfig& config);
[[nodiscard]] SimTrace run_simulation(const SimConfig& config, const RunHooks& hooks);

/// Applies the trace's block_published events, in trace order, to a fresh
/// ledger under effective_params(trace.config) and returns its final
/// per-strand heights. A trace is internally consistent iff this equals
/// trace.final_heights.
[[nodiscard]] std::vector<std::uint64_t> replay_heights(const SimTrace& trace);

/// Same replay, returning the reconstructed ledger for further inspection.
[[nodiscard]] Ledger replay_ledger(const SimTrace& trace);

/// JSON Lines: one config line, one line per event, one summary footer.
void write_trace(std::ostream& out, const SimTrace& trace);
void write_trace_file(const std::string& path, const SimTrace& trace);  // throws TraceError on IO
[[nodiscard]] SimTrace read_trace(std::istream& in);                    // throws TraceError
[[nodiscard]] SimTrace read_trace_file(const std::string& path);        // throws TraceError

}  // namespace multistrand
