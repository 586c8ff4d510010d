#include "multistrand/analysis.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "json.hpp"
#include "multistrand/rng.hpp"

namespace multistrand {
namespace {

using nlohmann::ordered_json;

double chi_square_critical(std::uint64_t dof, double significance) {
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 1.0 - significance);
}

void check_significance(double significance) {
  if (!(significance > 0.0) || !(significance < 1.0)) {
    throw std::invalid_argument("significance must be in (0, 1)");
  }
}

}  // namespace

// -------------------------------------------------------------------------
// Throughput
// -------------------------------------------------------------------------

ThroughputReport throughput(const SimTrace& trace) {
  ThroughputReport report;
  const double duration = static_cast<double>(trace.config.duration);
  if (duration <= 0.0) {
    throw std::invalid_argument("trace has non-positive duration");
  }
  report.per_strand_rate.reserve(trace.final_heights.size());
  double total = 0.0;
  for (const std::uint64_t h : trace.final_heights) {
    const double rate = static_cast<double>(h) / duration;
    report.per_strand_rate.push_back(rate);
    total += rate;
  }
  report.total_rate = total;
  return report;
}

ThroughputReport throughput(const SimTrace& trace, const SimTrace& baseline) {
  ThroughputReport report = throughput(trace);
  const ThroughputReport base = throughput(baseline);
  report.baseline_rate = base.total_rate;
  if (base.total_rate > 0.0) {
    report.scaling_factor = report.total_rate / base.total_rate;
  }
  return report;
}

// -------------------------------------------------------------------------
// Uniformity
// -------------------------------------------------------------------------

UniformityReport uniformity_from_counts(std::vector<std::uint64_t> counts,
                                        double significance) {
  check_significance(significance);
  if (counts.size() < 2) {
    throw std::invalid_argument("uniformity test needs at least 2 cells");
  }
  UniformityReport report;
  report.counts = std::move(counts);
  for (const std::uint64_t c : report.counts) report.total += c;
  const double expected =
      static_cast<double>(report.total) / static_cast<double>(report.counts.size());
  if (expected < 50.0) {
    throw std::invalid_argument(
        "uniformity test needs an expected count of at least 50 per cell (got " +
        std::to_string(expected) + ")");
  }
  double chi = 0.0;
  for (const std::uint64_t c : report.counts) {
    const double diff = static_cast<double>(c) - expected;
    chi += diff * diff / expected;
  }
  report.chi_square = chi;
  report.dof = report.counts.size() - 1;
  report.significance = significance;
  report.critical_value = chi_square_critical(report.dof, significance);
  report.uniform = report.chi_square <= report.critical_value;
  return report;
}

std::vector<std::uint64_t> ticket_counts_by_strand(const SimTrace& trace) {
  std::vector<std::uint64_t> counts(trace.config.params.strand_count_n, 0);
  for (const SimEvent& ev : trace.events) {
    if (ev.kind != EventKind::ticket_found) continue;
    if (ev.strand < 0 || static_cast<std::uint64_t>(ev.strand) >= counts.size()) {
      throw std::invalid_argument("trace records a ticket on a nonexistent strand");
    }
    ++counts[static_cast<std::size_t>(ev.strand)];
  }
  return counts;
}

UniformityReport ticket_uniformity(const SimTrace& trace, double significance) {
  return uniformity_from_counts(ticket_counts_by_strand(trace), significance);
}

// -------------------------------------------------------------------------
// Orphan accounting
// -------------------------------------------------------------------------

OrphanReport orphan_report(const SimTrace& trace) {
  OrphanReport report;
  Ledger ledger(effective_params(trace.config));
  struct Applied {
    Hash256 id;
    bool accepted;
  };
  std::vector<Applied> applied;
  for (const SimEvent& ev : trace.events) {
    if (ev.kind != EventKind::block_published) continue;
    if (ev.block == nullptr) {
      throw std::invalid_argument("block_published event carries no block bytes");
    }
    ++report.published;
    const ApplyOutcome outcome =
        ledger.apply_block(ev.block, check_stateless(*ev.block, ledger.params()));
    applied.push_back(Applied{outcome.id, outcome.accepted()});
  }
  std::unordered_set<Hash256> best_ids;
  for (ChainIndex s = 0; s < ledger.params().strand_count_n; ++s) {
    for (const Hash256& id : ledger.best_path(s)) best_ids.insert(id);
  }
  for (const Applied& a : applied) {
    if (!a.accepted) {
      ++report.rejected;
    } else if (best_ids.count(a.id) != 0) {
      ++report.on_best_path;
      ++report.accepted;
    } else {
      ++report.orphaned;
      ++report.accepted;
    }
  }
  report.orphan_rate = report.accepted == 0
                           ? 0.0
                           : static_cast<double>(report.orphaned) /
                                 static_cast<double>(report.accepted);
  return report;
}

// -------------------------------------------------------------------------
// Cross-run consistency
// -------------------------------------------------------------------------

RateComparison compare_rates(std::uint64_t count_a, double exposure_a,
                             std::uint64_t count_b, double exposure_b,
                             double significance) {
  check_significance(significance);
  if (!(exposure_a > 0.0) || !(exposure_b > 0.0)) {
    throw std::invalid_argument("exposures must be positive");
  }
  RateComparison cmp;
  cmp.significance = significance;
  cmp.rate_a = static_cast<double>(count_a) / exposure_a;
  cmp.rate_b = static_cast<double>(count_b) / exposure_b;
  const double var = static_cast<double>(count_a) / (exposure_a * exposure_a) +
                     static_cast<double>(count_b) / (exposure_b * exposure_b);
  cmp.z = var > 0.0 ? (cmp.rate_a - cmp.rate_b) / std::sqrt(var) : 0.0;
  const boost::math::normal_distribution<double> normal;
  cmp.z_limit = boost::math::quantile(normal, 1.0 - significance / 2.0);
  cmp.consistent = std::abs(cmp.z) <= cmp.z_limit;
  return cmp;
}

HomogeneityReport strand_homogeneity(const std::vector<std::uint64_t>& counts_a,
                                     const std::vector<std::uint64_t>& counts_b,
                                     double significance) {
  check_significance(significance);
  if (counts_a.size() != counts_b.size() || counts_a.empty()) {
    throw std::invalid_argument("homogeneity test needs two equal-length count vectors");
  }
  double row_a = 0.0;
  double row_b = 0.0;
  for (const std::uint64_t c : counts_a) row_a += static_cast<double>(c);
  for (const std::uint64_t c : counts_b) row_b += static_cast<double>(c);
  const double total = row_a + row_b;
  if (row_a <= 0.0 || row_b <= 0.0) {
    throw std::invalid_argument("homogeneity test needs non-empty rows");
  }

  double chi = 0.0;
  std::uint64_t used_columns = 0;
  for (std::size_t i = 0; i < counts_a.size(); ++i) {
    const double col = static_cast<double>(counts_a[i]) + static_cast<double>(counts_b[i]);
    if (col == 0.0) continue;  // structural zero: no information in this column
    ++used_columns;
    const double ea = row_a * col / total;
    const double eb = row_b * col / total;
    const double da = static_cast<double>(counts_a[i]) - ea;
    const double db = static_cast<double>(counts_b[i]) - eb;
    chi += da * da / ea + db * db / eb;
  }

  HomogeneityReport report;
  report.chi_square = chi;
  report.significance = significance;
  if (used_columns < 2) {
    report.dof = 0;
    report.critical_value = 0.0;
    report.consistent = true;
    return report;
  }
  report.dof = used_columns - 1;
  report.critical_value = chi_square_critical(report.dof, significance);
  report.consistent = report.chi_square <= report.critical_value;
  return report;
}

// -------------------------------------------------------------------------
// Catch-up races
// -------------------------------------------------------------------------

double catchup_reference(double q, std::uint64_t deficit_z) {
  if (!(q >= 0.0) || !(q <= 1.0)) {
    throw std::invalid_argument("attacker share q must be in [0, 1]");
  }
  if (q >= 0.5) return 1.0;
  return std::pow(q / (1.0 - q), static_cast<double>(deficit_z + 1));
}

namespace {

void validate_catchup_options(const CatchupOptions& options) {
  if (!(options.q > 0.0) || !(options.q < 1.0)) {
    throw std::invalid_argument("attacker share q must be in (0, 1)");
  }
  if (options.deficits.empty()) {
    throw std::invalid_argument("catch-up curve needs at least one deficit");
  }
  if (options.trials == 0) {
    throw std::invalid_argument("catch-up curve needs at least one trial per deficit");
  }
  if (!(options.find_rate > 0.0) || options.find_rate > 0.5) {
    // Above ~0.5 finds per unit the one-find-per-unit grid visibly distorts
    // the race odds; keep trials in the sparse regime.
    throw std::invalid_argument("find_rate must be in (0, 0.5]");
  }
  if (options.max_duration <= 0) {
    throw std::invalid_argument("max_duration must be positive");
  }
}

}  // namespace

SimConfig catchup_trial_config(const CatchupOptions& options, std::uint64_t deficit_z,
                               std::uint64_t trial) {
  validate_catchup_options(options);
  SimConfig config;
  // Single strand, difficulty folded into the analytic find rate.
  config.params = Params::make(0, 0);

  MinerConfig honest;
  honest.miner_id = 0;
  honest.hash_rate = (1.0 - options.q) * options.find_rate;
  honest.policy = HonestPolicy{};

  MinerConfig attacker;
  attacker.miner_id = 1;
  attacker.hash_rate = options.q * options.find_rate;
  PrivateForkerPolicy fork;
  fork.target = 0;
  fork.withhold_depth = deficit_z;
  attacker.policy = fork;

  config.miners = {honest, attacker};
  config.latency_model = LatencyModel::zero_latency();
  config.mode = SimMode::analytic;
  config.duration = options.max_duration;
  config.seed = derive_seed(derive_seed(options.seed, 1000 + deficit_z), trial);
  config.payload_size = 8;
  config.record_arrivals = false;
  config.stop_on_attack_resolution = true;
  return config;
}

bool catchup_trial_succeeded(const SimTrace& trace) {
  for (std::size_t i = 0; i < trace.config.miners.size(); ++i) {
    if (std::holds_alternative<PrivateForkerPolicy>(trace.config.miners[i].policy)) {
      return trace.miners.at(i).blocks_accepted_best > 0;
    }
  }
  throw std::invalid_argument("trace has no private forker");
}

CatchupCurve catchup_curve(const CatchupOptions& options) {
  validate_catchup_options(options);
  CatchupCurve curve;
  curve.attacker_share_q = options.q;
  curve.trials_per_point = options.trials;
  curve.points.reserve(options.deficits.size());
  for (const std::uint64_t z : options.deficits) {
    CatchupPoint point;
    point.deficit_z = z;
    point.trials = options.trials;
    for (std::uint64_t t = 0; t < options.trials; ++t) {
      const SimTrace trace = run_simulation(catchup_trial_config(options, z, t));
      if (catchup_trial_succeeded(trace)) ++point.successes;
    }
    point.success_rate =
        static_cast<double>(point.successes) / static_cast<double>(point.trials);
    point.reference = catchup_reference(options.q, z);
    curve.points.push_back(point);
  }
  return curve;
}

// -------------------------------------------------------------------------
// Report emission
// -------------------------------------------------------------------------

std::string to_json_line(const ThroughputReport& report) {
  ordered_json j;
  j["report"] = "throughput";
  j["per_strand_rate"] = report.per_strand_rate;
  j["total_rate"] = report.total_rate;
  if (report.baseline_rate) j["baseline_rate"] = *report.baseline_rate;
  if (report.scaling_factor) j["scaling_factor"] = *report.scaling_factor;
  return j.dump();
}

std::string to_json_line(const UniformityReport& report) {
  ordered_json j;
  j["report"] = "uniformity";
  j["counts"] = report.counts;
  j["total"] = report.total;
  j["chi_square"] = report.chi_square;
  j["dof"] = report.dof;
  j["critical_value"] = report.critical_value;
  j["significance"] = report.significance;
  j["uniform"] = report.uniform;
  return j.dump();
}

std::string to_json_line(const OrphanReport& report) {
  ordered_json j;
  j["report"] = "orphans";
  j["published"] = report.published;
  j["accepted"] = report.accepted;
  j["on_best_path"] = report.on_best_path;
  j["orphaned"] = report.orphaned;
  j["rejected"] = report.rejected;
  j["orphan_rate"] = report.orphan_rate;
  return j.dump();
}

std::string to_json_line(const CatchupCurve& curve) {
  ordered_json j;
  j["report"] = "catchup";
  j["attacker_share_q"] = curve.attacker_share_q;
  j["trials_per_point"] = curve.trials_per_point;
  j["points"] = ordered_json::array();
  for (const CatchupPoint& p : curve.points) {
    ordered_json pj;
    pj["deficit_z"] = p.deficit_z;
    pj["trials"] = p.trials;
    pj["successes"] = p.successes;
    pj["success_rate"] = p.success_rate;
    pj["reference"] = p.reference;
    j["points"].push_back(std::move(pj));
  }
  return j.dump();
}

std::string to_csv(const CatchupCurve& curve) {
  std::ostringstream out;
  out.precision(10);
  out << "q,deficit_z,trials,successes,success_rate,reference\n";
  for (const CatchupPoint& p : curve.points) {
    out << curve.attacker_share_q << ',' << p.deficit_z << ',' << p.trials << ','
        << p.successes << ',' << p.success_rate << ',' << p.reference << '\n';
  }
  return out.str();
}

}  // namespace multistrand
