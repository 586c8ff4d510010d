#pragma once
// Post-hoc analysis over simulation traces: throughput and scaling,
// chi-square uniformity of ticket indices, orphan accounting via replay, and
// private-fork catch-up races with their closed-form reference curve.
//
// Statistical gates default to significance 0.001 so routine runs almost
// never trip them by chance.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multistrand/netsim.hpp"
#include "multistrand/types.hpp"

namespace multistrand {

// ==========================================================================
// Throughput
// ==========================================================================

struct ThroughputReport {
  std::vector<double> per_strand_rate;  ///< final best-path height / duration
  double total_rate = 0.0;              ///< sum over strands
  std::optional<double> baseline_rate;
  std::optional<double> scaling_factor;  ///< total_rate / baseline_rate
};

[[nodiscard]] ThroughputReport throughput(const SimTrace& trace);
[[nodiscard]] ThroughputReport throughput(const SimTrace& trace,
                                          const SimTrace& baseline);

// ==========================================================================
// Uniformity of ticket chain indices
// ==========================================================================

struct UniformityReport {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  double chi_square = 0.0;
  std::uint64_t dof = 0;
  double critical_value = 0.0;
  double significance = 0.0;
  bool uniform = false;  ///< chi_square <= critical_value
};

/// Pearson chi-square against the uniform distribution over counts.size()
/// cells. Requires at least 2 cells and an expected count of at least 50 per
/// cell (throws std::invalid_argument otherwise).
[[nodiscard]] UniformityReport uniformity_from_counts(std::vector<std::uint64_t> counts,
                                                      double significance = 0.001);

/// Per-strand ticket_found counts recorded in a trace.
[[nodiscard]] std::vector<std::uint64_t> ticket_counts_by_strand(const SimTrace& trace);

/// Uniformity of the trace's ticket indices across strands.
[[nodiscard]] UniformityReport ticket_uniformity(const SimTrace& trace,
                                                 double significance = 0.001);

// ==========================================================================
// Orphan accounting
// ==========================================================================

struct OrphanReport {
  std::uint64_t published = 0;      ///< block_published events
  std::uint64_t accepted = 0;       ///< accepted by the replayed observer
  std::uint64_t on_best_path = 0;   ///< accepted and on a final best path
  std::uint64_t orphaned = 0;       ///< accepted, later displaced
  std::uint64_t rejected = 0;       ///< rejected outright
  double orphan_rate = 0.0;         ///< orphaned / accepted
};

/// Replays the trace's publications into a fresh ledger and classifies every
/// published block. Self-contained: works on traces read from disk.
[[nodiscard]] OrphanReport orphan_report(const SimTrace& trace);

// ==========================================================================
// Cross-run consistency checks
// ==========================================================================

struct RateComparison {
  double rate_a = 0.0;
  double rate_b = 0.0;
  double z = 0.0;        ///< two-sample Poisson rate z-statistic
  double z_limit = 0.0;  ///< two-sided normal quantile at the significance
  double significance = 0.0;
  bool consistent = false;  ///< |z| <= z_limit
};

[[nodiscard]] RateComparison compare_rates(std::uint64_t count_a, double exposure_a,
                                           std::uint64_t count_b, double exposure_b,
                                           double significance = 0.001);

struct HomogeneityReport {
  double chi_square = 0.0;
  std::uint64_t dof = 0;
  double critical_value = 0.0;
  double significance = 0.0;
  bool consistent = false;  ///< chi_square <= critical_value
};

/// Chi-square homogeneity test on a 2 x n contingency table: do two runs
/// distribute their counts across strands identically?
[[nodiscard]] HomogeneityReport strand_homogeneity(
    const std::vector<std::uint64_t>& counts_a,
    const std::vector<std::uint64_t>& counts_b, double significance = 0.001);

// ==========================================================================
// Private-fork catch-up races
// ==========================================================================

/// Probability that a private fork starting `deficit_z` blocks behind ever
/// gets strictly longer than the public strand, when the attacker holds a
/// fraction q of the hash rate: (q / (1-q))^(z+1) for q < 1/2, else 1.
[[nodiscard]] double catchup_reference(double q, std::uint64_t deficit_z);

struct CatchupPoint {
  std::uint64_t deficit_z = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  double reference = 0.0;  ///< closed-form catchup_reference
};

struct CatchupCurve {
  double attacker_share_q = 0.0;
  std::uint64_t trials_per_point = 0;
  std::vector<CatchupPoint> points;
};

struct CatchupOptions {
  double q = 0.3;                              ///< attacker share of hash rate
  std::vector<std::uint64_t> deficits{1, 2, 4, 6};
  std::uint64_t trials = 1000;                 ///< per deficit
  std::uint64_t seed = 1;
  double find_rate = 0.02;                     ///< combined finds per unit; kept
                                               ///< small so units rarely carry
                                               ///< two finds at once
  SimTime max_duration = 1'000'000;            ///< per-trial cutoff
};

/// Runs each race as a full two-miner simulation (honest vs private forker on
/// a single strand, zero latency, analytic mode) and counts the trials whose
/// attack ends with the fork adopted as the best chain.
[[nodiscard]] CatchupCurve catchup_curve(const CatchupOptions& options);

/// The per-trial race configuration, exposed for inspection and tests.
[[nodiscard]] SimConfig catchup_trial_config(const CatchupOptions& options,
                                             std::uint64_t deficit_z,
                                             std::uint64_t trial);

/// Whether a finished race trace counts as a successful attack: the forker
/// published and its branch sits on the final best path.
[[nodiscard]] bool catchup_trial_succeeded(const SimTrace& trace);

// ==========================================================================
// Report emission
// ==========================================================================

[[nodiscard]] std::string to_json_line(const ThroughputReport& report);
[[nodiscard]] std::string to_json_line(const UniformityReport& report);
[[nodiscard]] std::string to_json_line(const OrphanReport& report);
[[nodiscard]] std::string to_json_line(const CatchupCurve& curve);
[[nodiscard]] std::string to_csv(const CatchupCurve& curve);

}  // namespace multistrand
