#include "multistrand/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "json.hpp"
#include "multistrand/crypto.hpp"
#include "multistrand/rng.hpp"

namespace multistrand {
namespace {

using nlohmann::ordered_json;

constexpr SimTime kMaxDuration = SimTime{1} << 40;

// -------------------------------------------------------------------------
// Enum names
// -------------------------------------------------------------------------

SimMode mode_from_string(const std::string& s) {
  if (s == "real_hash") return SimMode::real_hash;
  if (s == "analytic") return SimMode::analytic;
  throw ConfigError("unknown mode: \"" + s + "\" (expected real_hash or analytic)");
}

LatencyModel::Kind latency_kind_from_string(const std::string& s) {
  if (s == "zero") return LatencyModel::Kind::zero;
  if (s == "fixed") return LatencyModel::Kind::fixed;
  if (s == "uniform") return LatencyModel::Kind::uniform;
  throw ConfigError("unknown latency kind: \"" + s + "\"");
}

EventKind event_kind_from_string(const std::string& s) {
  if (s == "ticket_found") return EventKind::ticket_found;
  if (s == "block_published") return EventKind::block_published;
  if (s == "block_arrival") return EventKind::block_arrival;
  if (s == "fork_resolved") return EventKind::fork_resolved;
  throw TraceError("unknown event kind: \"" + s + "\"");
}

}  // namespace

std::string to_string(SimMode mode) {
  return mode == SimMode::real_hash ? "real_hash" : "analytic";
}

std::string to_string(LatencyModel::Kind kind) {
  switch (kind) {
    case LatencyModel::Kind::zero: return "zero";
    case LatencyModel::Kind::fixed: return "fixed";
    case LatencyModel::Kind::uniform: return "uniform";
  }
  return "zero";
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ticket_found: return "ticket_found";
    case EventKind::block_published: return "block_published";
    case EventKind::block_arrival: return "block_arrival";
    case EventKind::fork_resolved: return "fork_resolved";
  }
  return "ticket_found";
}

// -------------------------------------------------------------------------
// Config validation
// -------------------------------------------------------------------------

void SimConfig::validate() const {
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid params: ") + e.what());
  }
  if (duration <= 0 || duration > kMaxDuration) {
    throw ConfigError("duration must be in [1, 2^40] time units");
  }
  if (miners.empty() || miners.size() > 4096) {
    throw ConfigError("miner count must be in [1, 4096]");
  }
  for (std::size_t i = 0; i < miners.size(); ++i) {
    if (miners[i].miner_id != i) {
      throw ConfigError("miner_id values must be 0..N-1 in order");
    }
    try {
      miners[i].validate(params);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("miner " + std::to_string(i) + ": " + e.what());
    }
  }
  switch (latency_model.kind) {
    case LatencyModel::Kind::zero:
      break;
    case LatencyModel::Kind::fixed:
      if (latency_model.delay < 0 || latency_model.delay > kMaxDuration) {
        throw ConfigError("fixed latency delay must be in [0, 2^40]");
      }
      break;
    case LatencyModel::Kind::uniform:
      if (latency_model.lo < 0 || latency_model.hi < latency_model.lo ||
          latency_model.hi > kMaxDuration) {
        throw ConfigError("uniform latency requires 0 <= lo <= hi <= 2^40");
      }
      break;
  }
  if (payload_size > (1u << 20)) {
    throw ConfigError("payload_size must be at most 1 MiB");
  }
}

Params effective_params(const SimConfig& config) {
  Params p = config.params;
  if (config.mode == SimMode::analytic) {
    // Difficulty is modeled by the ticket arrival rate; every completed
    // ticket already "won" the difficulty lottery, so replicas check the
    // other rules at difficulty 0.
    p.difficulty_bits = 0;
  }
  return p;
}

// -------------------------------------------------------------------------
// Config JSON
// -------------------------------------------------------------------------

namespace {

ordered_json policy_to_json(const Policy& policy) {
  ordered_json j;
  j["kind"] = policy_kind_name(policy);
  if (const auto* tp = std::get_if<TargetedPolicy>(&policy)) {
    j["target"] = tp->target;
  } else if (const auto* hp = std::get_if<HoarderPolicy>(&policy)) {
    j["hold_duration"] = hp->hold_duration;
  } else if (const auto* ep = std::get_if<EquivocatorPolicy>(&policy)) {
    j["copies"] = ep->copies;
  } else if (const auto* fp = std::get_if<PrivateForkerPolicy>(&policy)) {
    j["target"] = fp->target;
    j["withhold_depth"] = fp->withhold_depth;
  }
  return j;
}

Policy policy_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ConfigError("policy must be an object with a \"kind\" field");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "honest") return HonestPolicy{};
  if (kind == "targeted") {
    TargetedPolicy p;
    p.target = j.at("target").get<ChainIndex>();
    return p;
  }
  if (kind == "hoarder") {
    HoarderPolicy p;
    p.hold_duration = j.at("hold_duration").get<SimTime>();
    return p;
  }
  if (kind == "equivocator") {
    EquivocatorPolicy p;
    p.copies = j.at("copies").get<std::uint32_t>();
    return p;
  }
  if (kind == "private_forker") {
    PrivateForkerPolicy p;
    p.target = j.at("target").get<ChainIndex>();
    p.withhold_depth = j.at("withhold_depth").get<std::uint64_t>();
    return p;
  }
  throw ConfigError("unknown policy kind: \"" + kind + "\"");
}

ordered_json config_to_json_obj(const SimConfig& c) {
  ordered_json j;
  j["params"] = {
      {"strand_exponent_p", c.params.strand_exponent_p},
      {"strand_count_n", c.params.strand_count_n},
      {"difficulty_bits", c.params.difficulty_bits},
      {"hash_algo_id", c.params.hash_algo_id},
      {"sig_algo_id", c.params.sig_algo_id},
  };
  j["miners"] = ordered_json::array();
  for (const MinerConfig& m : c.miners) {
    ordered_json mj;
    mj["miner_id"] = m.miner_id;
    mj["hash_rate"] = m.hash_rate;
    mj["policy"] = policy_to_json(m.policy);
    j["miners"].push_back(std::move(mj));
  }
  ordered_json lj;
  lj["kind"] = to_string(c.latency_model.kind);
  if (c.latency_model.kind == LatencyModel::Kind::fixed) {
    lj["delay"] = c.latency_model.delay;
  } else if (c.latency_model.kind == LatencyModel::Kind::uniform) {
    lj["lo"] = c.latency_model.lo;
    lj["hi"] = c.latency_model.hi;
  }
  j["latency_model"] = std::move(lj);
  j["mode"] = to_string(c.mode);
  j["duration"] = c.duration;
  j["seed"] = c.seed;
  j["payload_size"] = c.payload_size;
  j["record_arrivals"] = c.record_arrivals;
  j["stop_on_attack_resolution"] = c.stop_on_attack_resolution;
  return j;
}

SimConfig config_from_json(const ordered_json& j) {
  try {
    SimConfig c;
    const auto& pj = j.at("params");
    const auto p = pj.at("strand_exponent_p").get<std::uint32_t>();
    const auto d = pj.at("difficulty_bits").get<std::uint32_t>();
    c.params = Params::make(p, d);
    if (pj.contains("strand_count_n") &&
        pj.at("strand_count_n").get<std::uint64_t>() != c.params.strand_count_n) {
      throw ConfigError("strand_count_n does not equal 2^strand_exponent_p");
    }
    if (pj.contains("hash_algo_id")) {
      c.params.hash_algo_id = pj.at("hash_algo_id").get<std::string>();
    }
    if (pj.contains("sig_algo_id")) {
      c.params.sig_algo_id = pj.at("sig_algo_id").get<std::string>();
    }

    if (!j.contains("miners") || !j.at("miners").is_array()) {
      throw ConfigError("config requires a \"miners\" array");
    }
    std::size_t index = 0;
    for (const auto& mj : j.at("miners")) {
      MinerConfig m;
      m.miner_id = mj.contains("miner_id") ? mj.at("miner_id").get<std::uint32_t>()
                                           : static_cast<std::uint32_t>(index);
      m.hash_rate = mj.at("hash_rate").get<double>();
      m.policy = mj.contains("policy") ? policy_from_json(mj.at("policy"))
                                       : Policy{HonestPolicy{}};
      c.miners.push_back(std::move(m));
      ++index;
    }

    if (j.contains("latency_model")) {
      const auto& lj = j.at("latency_model");
      c.latency_model.kind = latency_kind_from_string(lj.at("kind").get<std::string>());
      if (c.latency_model.kind == LatencyModel::Kind::fixed) {
        c.latency_model.delay = lj.at("delay").get<SimTime>();
      } else if (c.latency_model.kind == LatencyModel::Kind::uniform) {
        c.latency_model.lo = lj.at("lo").get<SimTime>();
        c.latency_model.hi = lj.at("hi").get<SimTime>();
      }
    }

    c.mode = mode_from_string(j.at("mode").get<std::string>());
    c.duration = j.at("duration").get<SimTime>();
    c.seed = j.value("seed", std::uint64_t{0});
    c.payload_size = j.value("payload_size", std::size_t{32});
    c.record_arrivals = j.value("record_arrivals", true);
    c.stop_on_attack_resolution = j.value("stop_on_attack_resolution", false);

    c.validate();
    return c;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

}  // namespace

SimConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::string config_to_json(const SimConfig& config) {
  return config_to_json_obj(config).dump(2);
}

// -------------------------------------------------------------------------
// Simulation core
// -------------------------------------------------------------------------

namespace {

SimTime sample_latency(Rng& rng, const LatencyModel& lm) {
  switch (lm.kind) {
    case LatencyModel::Kind::zero:
      return 0;
    case LatencyModel::Kind::fixed:
      return lm.delay;
    case LatencyModel::Kind::uniform:
      return static_cast<SimTime>(rng.in_range(static_cast<std::uint64_t>(lm.lo),
                                               static_cast<std::uint64_t>(lm.hi)));
  }
  return 0;
}

class SimCore final : public MinerOutbox {
 public:
  SimCore(const SimConfig& config, const RunHooks& hooks)
      : config_(config),
        hooks_(hooks),
        eff_params_(effective_params(config)),
        observer_(eff_params_),
        latency_rng_(derive_seed(config.seed, 0)),
        payloads_(std::make_shared<DefaultPayloadSource>(config.payload_size)) {
    const std::size_t m = config_.miners.size();
    agents_.reserve(m);
    replicas_.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      agents_.emplace_back(config_.miners[i], eff_params_,
                           derive_seed(config_.seed, 2 * i + 1), payloads_);
      replicas_.emplace_back(eff_params_);
    }
    if (config_.mode == SimMode::analytic) {
      arrival_rngs_.reserve(m);
      find_cursors_.assign(m, 0);
      lambdas_.reserve(m);
      for (std::size_t i = 0; i < m; ++i) {
        arrival_rngs_.emplace_back(derive_seed(config_.seed, 2 * i + 2));
        lambdas_.push_back(std::ldexp(config_.miners[i].hash_rate,
                                      -static_cast<int>(config_.params.difficulty_bits)));
      }
    }
  }

  SimTrace run() {
    if (config_.mode == SimMode::real_hash) {
      for (std::uint32_t m = 0; m < agents_.size(); ++m) {
        push_item(0, kRankMinerTurn, m, ItemKind::mining_step, nullptr, Hash256{});
      }
    } else {
      for (std::uint32_t m = 0; m < agents_.size(); ++m) {
        schedule_next_find(m, 0);
      }
    }

    while (!queue_.empty() && !stopped_) {
      WorkItem item = queue_.top();
      queue_.pop();
      now_ = item.time;
      current_miner_ = item.actor;
      switch (item.kind) {
        case ItemKind::mining_step:
          agents_[item.actor].step_real(now_, replicas_[item.actor], *this);
          if (now_ + 1 < config_.duration) {
            push_item(now_ + 1, kRankMinerTurn, item.actor, ItemKind::mining_step,
                      nullptr, Hash256{});
          }
          after_turn(item.actor);
          break;
        case ItemKind::analytic_find:
          agents_[item.actor].on_analytic_find(now_, replicas_[item.actor], *this);
          schedule_next_find(item.actor,
                             static_cast<std::uint64_t>(now_ + 1) * kSubticksPerUnit);
          after_turn(item.actor);
          break;
        case ItemKind::wakeup:
          agents_[item.actor].on_wakeup(now_, replicas_[item.actor], *this);
          after_turn(item.actor);
          break;
        case ItemKind::arrival:
          deliver(item.actor, item.block, item.id);
          break;
      }
      if (hooks_.after_item) {
        hooks_.after_item(now_, replicas_);
      }
    }
    return finalize();
  }

  // ---- MinerOutbox ----

  void publish(Block block) override {
    auto ptr = std::make_shared<const Block>(std::move(block));
    const StatelessCheck chk = check_stateless(*ptr, eff_params_);
    SimEvent ev;
    ev.time = now_;
    ev.kind = EventKind::block_published;
    ev.miner = current_miner_;
    ev.strand = ptr->chain_index;
    ev.block_id = chk.id;
    ev.block = ptr;
    events_.push_back(std::move(ev));
    stateless_.emplace(chk.id, chk);

    // The publisher's own replica adopts the block immediately; everyone else
    // hears about it after the network delay.
    replicas_[current_miner_].apply_block(ptr, chk);
    const ApplyOutcome outcome = observer_.apply_block(ptr, chk);
    publications_.push_back(
        PubRecord{static_cast<std::uint32_t>(current_miner_), chk.id, outcome.accepted()});
    if (outcome.kind == ApplyOutcome::Kind::caused_reorg) {
      SimEvent fork;
      fork.time = now_;
      fork.kind = EventKind::fork_resolved;
      fork.miner = current_miner_;
      fork.strand = ptr->chain_index;
      fork.block_id = chk.id;
      fork.depth = outcome.reorg_depth;
      events_.push_back(std::move(fork));
    }

    for (std::uint32_t r = 0; r < agents_.size(); ++r) {
      if (r == current_miner_) continue;
      const SimTime at = now_ + sample_latency(latency_rng_, config_.latency_model);
      if (at < config_.duration) {
        push_item(at, kRankArrival, r, ItemKind::arrival, ptr, chk.id);
      }
    }
  }

  void note_ticket_found(ChainIndex strand) override {
    SimEvent ev;
    ev.time = now_;
    ev.kind = EventKind::ticket_found;
    ev.miner = current_miner_;
    ev.strand = strand;
    events_.push_back(std::move(ev));
  }

  void schedule_wakeup(SimTime at) override {
    if (at < config_.duration) {
      push_item(at, kRankMinerTurn, static_cast<std::uint32_t>(current_miner_),
                ItemKind::wakeup, nullptr, Hash256{});
    }
  }

 private:
  static constexpr int kRankMinerTurn = 0;
  static constexpr int kRankArrival = 1;

  enum class ItemKind : std::uint8_t { mining_step, analytic_find, wakeup, arrival };

  struct WorkItem {
    SimTime time = 0;
    int rank = 0;
    std::uint32_t actor = 0;
    std::uint64_t seq = 0;
    ItemKind kind = ItemKind::mining_step;
    std::shared_ptr<const Block> block;  // arrival only
    Hash256 id{};                        // arrival only
  };

  struct WorkOrder {
    bool operator()(const WorkItem& a, const WorkItem& b) const {
      return std::tie(a.time, a.rank, a.actor, a.seq) >
             std::tie(b.time, b.rank, b.actor, b.seq);
    }
  };

  struct PubRecord {
    std::uint32_t miner = 0;
    Hash256 id{};
    bool observer_accepted = false;
  };

  void push_item(SimTime time, int rank, std::uint32_t actor, ItemKind kind,
                 std::shared_ptr<const Block> block, const Hash256& id) {
    WorkItem item;
    item.time = time;
    item.rank = rank;
    item.actor = actor;
    item.seq = next_seq_++;
    item.kind = kind;
    item.block = std::move(block);
    item.id = id;
    queue_.push(std::move(item));
  }

  void schedule_next_find(std::uint32_t miner, std::uint64_t from_subtick) {
    std::uint64_t& cursor = find_cursors_[miner];
    if (from_subtick > cursor) cursor = from_subtick;
    const std::uint64_t gap = sample_exp_gap_subticks(arrival_rngs_[miner], lambdas_[miner]);
    if (gap > std::numeric_limits<std::uint64_t>::max() - cursor) return;
    cursor += gap;
    const SimTime tick = static_cast<SimTime>(cursor / kSubticksPerUnit);
    if (tick >= config_.duration) return;
    push_item(tick, kRankMinerTurn, miner, ItemKind::analytic_find, nullptr, Hash256{});
  }

  void deliver(std::uint32_t recipient, const std::shared_ptr<const Block>& block,
               const Hash256& id) {
    replicas_[recipient].apply_block(block, stateless_.at(id));
    agents_[recipient].on_replica_update(now_, replicas_[recipient]);
    if (config_.record_arrivals) {
      SimEvent ev;
      ev.time = now_;
      ev.kind = EventKind::block_arrival;
      ev.miner = recipient;
      ev.strand = block->chain_index;
      ev.block_id = id;
      events_.push_back(std::move(ev));
    }
  }

  // After a miner's own turn its replica may have changed through its own
  // publications; notify it once the turn has fully unwound (calling back
  // into the agent mid-publication would re-enter its policy state).
  void after_turn(std::uint32_t miner) {
    agents_[miner].on_replica_update(now_, replicas_[miner]);
    if (config_.stop_on_attack_resolution && agents_[miner].attack_resolutions() > 0) {
      stopped_ = true;
    }
  }

  SimTrace finalize() {
    SimTrace trace;
    trace.config = config_;

    // Present each time unit in a fixed order: finds, publications, arrivals,
    // fork resolutions; ties within a kind by miner, preserving emission
    // order otherwise (parents stay ahead of children).
    std::stable_sort(events_.begin(), events_.end(),
                     [](const SimEvent& a, const SimEvent& b) {
                       return std::tie(a.time, a.kind, a.miner) <
                              std::tie(b.time, b.kind, b.miner);
                     });
    trace.events = std::move(events_);

    trace.final_heights.reserve(config_.params.strand_count_n);
    for (ChainIndex s = 0; s < config_.params.strand_count_n; ++s) {
      trace.final_heights.push_back(observer_.strand_height(s));
    }

    std::unordered_set<Hash256> best_ids;
    for (ChainIndex s = 0; s < config_.params.strand_count_n; ++s) {
      for (const Hash256& id : observer_.best_path(s)) {
        best_ids.insert(id);
      }
    }

    trace.miners.reserve(agents_.size());
    for (std::uint32_t m = 0; m < agents_.size(); ++m) {
      MinerSummary s;
      s.miner_id = m;
      s.tickets_found = agents_[m].counters().tickets_found;
      s.tickets_discarded = agents_[m].counters().tickets_discarded;
      s.hash_attempts = agents_[m].counters().hash_attempts;
      trace.miners.push_back(s);
    }
    for (const PubRecord& rec : publications_) {
      MinerSummary& s = trace.miners[rec.miner];
      if (!rec.observer_accepted) {
        ++s.blocks_rejected;
      } else if (best_ids.count(rec.id) != 0) {
        ++s.blocks_accepted_best;
      } else {
        ++s.blocks_orphaned;
      }
    }
    return trace;
  }

  SimConfig config_;
  RunHooks hooks_;
  Params eff_params_;
  Ledger observer_;
  Rng latency_rng_;
  std::shared_ptr<DefaultPayloadSource> payloads_;
  std::vector<MinerAgent> agents_;
  std::vector<Ledger> replicas_;
  std::vector<Rng> arrival_rngs_;           // analytic mode
  std::vector<std::uint64_t> find_cursors_;  // analytic mode, subticks
  std::vector<double> lambdas_;              // analytic mode, finds per unit

  std::priority_queue<WorkItem, std::vector<WorkItem>, WorkOrder> queue_;
  std::vector<SimEvent> events_;
  std::vector<PubRecord> publications_;
  std::unordered_map<Hash256, StatelessCheck> stateless_;
  std::uint64_t next_seq_ = 0;
  SimTime now_ = 0;
  std::int64_t current_miner_ = -1;
  bool stopped_ = false;
};

}  // namespace

SimTrace run_simulation(const SimConfig& config) {
  return run_simulation(config, RunHooks{});
}

SimTrace run_simulation(const SimConfig& config, const RunHooks& hooks) {
  config.validate();
  SimCore core(config, hooks);
  return core.run();
}

// -------------------------------------------------------------------------
// Replay
// -------------------------------------------------------------------------

Ledger replay_ledger(const SimTrace& trace) {
  Ledger ledger(effective_params(trace.config));
  for (const SimEvent& ev : trace.events) {
    if (ev.kind != EventKind::block_published) continue;
    if (ev.block == nullptr) {
      throw TraceError("block_published event carries no block bytes");
    }
    ledger.apply_block(ev.block, check_stateless(*ev.block, ledger.params()));
  }
  return ledger;
}

std::vector<std::uint64_t> replay_heights(const SimTrace& trace) {
  const Ledger ledger = replay_ledger(trace);
  std::vector<std::uint64_t> heights;
  heights.reserve(trace.config.params.strand_count_n);
  for (ChainIndex s = 0; s < trace.config.params.strand_count_n; ++s) {
    heights.push_back(ledger.strand_height(s));
  }
  return heights;
}

// -------------------------------------------------------------------------
// Trace serialization (JSON Lines)
// -------------------------------------------------------------------------

void write_trace(std::ostream& out, const SimTrace& trace) {
  const Params eff = effective_params(trace.config);
  {
    ordered_json line;
    line["kind"] = "config";
    line["config"] = config_to_json_obj(trace.config);
    out << line.dump() << '\n';
  }
  for (const SimEvent& ev : trace.events) {
    ordered_json line;
    line["time"] = ev.time;
    line["kind"] = to_string(ev.kind);
    line["miner"] = ev.miner;
    line["strand"] = ev.strand;
    switch (ev.kind) {
      case EventKind::ticket_found:
        break;
      case EventKind::block_published:
        line["block_id"] = to_hex(ByteView(ev.block_id.data(), ev.block_id.size()));
        line["block"] = to_hex(serialize_block(*ev.block, eff));
        break;
      case EventKind::block_arrival:
        line["block_id"] = to_hex(ByteView(ev.block_id.data(), ev.block_id.size()));
        break;
      case EventKind::fork_resolved:
        line["block_id"] = to_hex(ByteView(ev.block_id.data(), ev.block_id.size()));
        line["depth"] = ev.depth;
        break;
    }
    out << line.dump() << '\n';
  }
  {
    ordered_json line;
    line["kind"] = "summary";
    line["final_heights"] = trace.final_heights;
    line["miners"] = ordered_json::array();
    for (const MinerSummary& m : trace.miners) {
      ordered_json mj;
      mj["miner_id"] = m.miner_id;
      mj["tickets_found"] = m.tickets_found;
      mj["tickets_discarded"] = m.tickets_discarded;
      mj["blocks_accepted_best"] = m.blocks_accepted_best;
      mj["blocks_orphaned"] = m.blocks_orphaned;
      mj["blocks_rejected"] = m.blocks_rejected;
      mj["hash_attempts"] = m.hash_attempts;
      line["miners"].push_back(std::move(mj));
    }
    line["event_count"] = trace.events.size();
    out << line.dump() << '\n';
  }
}

void write_trace_file(const std::string& path, const SimTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceError("cannot open trace file for writing: " + path);
  write_trace(out, trace);
  out.flush();
  if (!out.good()) throw TraceError("failed while writing trace file: " + path);
}

SimTrace read_trace(std::istream& in) {
  SimTrace trace;
  bool have_config = false;
  bool have_summary = false;
  std::uint64_t declared_events = 0;
  Params eff = Params::make(0, 0);

  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    const std::string where = "trace line " + std::to_string(line_no) + ": ";
    ordered_json j;
    try {
      j = ordered_json::parse(text);
    } catch (const ordered_json::exception& e) {
      throw TraceError(where + "not valid JSON: " + e.what());
    }
    try {
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "config") {
        if (have_config) throw TraceError(where + "duplicate config line");
        trace.config = config_from_json(j.at("config"));
        eff = effective_params(trace.config);
        have_config = true;
        continue;
      }
      if (!have_config) {
        throw TraceError(where + "trace must start with a config line");
      }
      if (have_summary) {
        throw TraceError(where + "content after the summary footer");
      }
      if (kind == "summary") {
        trace.final_heights =
            j.at("final_heights").get<std::vector<std::uint64_t>>();
        for (const auto& mj : j.at("miners")) {
          MinerSummary m;
          m.miner_id = mj.at("miner_id").get<std::uint32_t>();
          m.tickets_found = mj.at("tickets_found").get<std::uint64_t>();
          m.tickets_discarded = mj.at("tickets_discarded").get<std::uint64_t>();
          m.blocks_accepted_best = mj.at("blocks_accepted_best").get<std::uint64_t>();
          m.blocks_orphaned = mj.at("blocks_orphaned").get<std::uint64_t>();
          m.blocks_rejected = mj.at("blocks_rejected").get<std::uint64_t>();
          m.hash_attempts = mj.value("hash_attempts", std::uint64_t{0});
          trace.miners.push_back(m);
        }
        declared_events = j.at("event_count").get<std::uint64_t>();
        have_summary = true;
        continue;
      }

      SimEvent ev;
      ev.time = j.at("time").get<SimTime>();
      ev.kind = event_kind_from_string(kind);
      ev.miner = j.at("miner").get<std::int64_t>();
      ev.strand = j.at("strand").get<std::int64_t>();
      if (ev.kind != EventKind::ticket_found) {
        ev.block_id = hash_from_hex(j.at("block_id").get<std::string>());
      }
      if (ev.kind == EventKind::block_published) {
        const Bytes raw = from_hex(j.at("block").get<std::string>());
        Block b = deserialize_block(ByteView(raw.data(), raw.size()), eff);
        const Hash256 id = block_id(b, eff);
        if (id != ev.block_id) {
          throw TraceError(where + "block bytes do not match the recorded block_id");
        }
        ev.block = std::make_shared<const Block>(std::move(b));
      }
      if (ev.kind == EventKind::fork_resolved) {
        ev.depth = j.at("depth").get<std::uint64_t>();
      }
      trace.events.push_back(std::move(ev));
    } catch (const TraceError&) {
      throw;
    } catch (const ConfigError& e) {
      throw TraceError(where + e.what());
    } catch (const CodecError& e) {
      throw TraceError(where + "bad block encoding: " + e.what());
    } catch (const ordered_json::exception& e) {
      throw TraceError(where + "missing or mistyped field: " + e.what());
    }
  }
  if (!have_config) throw TraceError("trace has no config line");
  if (!have_summary) throw TraceError("trace has no summary footer");
  if (declared_events != trace.events.size()) {
    throw TraceError("summary event_count " + std::to_string(declared_events) +
                     " does not match " + std::to_string(trace.events.size()) +
                     " recorded events");
  }
  return trace;
}

SimTrace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError("cannot open trace file: " + path);
  return read_trace(in);
}

}  // namespace multistrand
