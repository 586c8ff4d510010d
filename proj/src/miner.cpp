#include "multistrand/miner.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "multistrand/block.hpp"
#include "multistrand/crypto.hpp"

namespace multistrand {
namespace {

constexpr char kPayloadDomain[] = "MULTISTRAND-PAYLOAD";

Keypair keypair_from(Rng& rng, const Params& params) {
  KeySeed seed{};
  rng.fill(std::span<std::uint8_t>(seed.data(), seed.size()));
  return keygen(seed, params);
}

}  // namespace

Bytes DefaultPayloadSource::payload_for(std::uint32_t miner_id, ChainIndex strand,
                                        std::uint64_t height, std::uint32_t variant) {
  Bytes key;
  key.reserve(sizeof(kPayloadDomain) + 20);
  key.insert(key.end(), kPayloadDomain, kPayloadDomain + sizeof(kPayloadDomain) - 1);
  append_u32_be(key, miner_id);
  append_u32_be(key, strand);
  append_u64_be(key, height);
  append_u32_be(key, variant);

  Bytes out;
  out.reserve(payload_size_);
  Hash256 chunk = sha256(key);
  while (out.size() < payload_size_) {
    const std::size_t need = payload_size_ - out.size();
    const std::size_t take = need < chunk.size() ? need : chunk.size();
    out.insert(out.end(), chunk.bytes.begin(), chunk.bytes.begin() + take);
    if (out.size() < payload_size_) {
      chunk = sha256(ByteView(chunk.data(), chunk.size()));
    }
  }
  return out;
}

const char* policy_kind_name(const Policy& policy) {
  struct Visitor {
    const char* operator()(const HonestPolicy&) const { return "honest"; }
    const char* operator()(const TargetedPolicy&) const { return "targeted"; }
    const char* operator()(const HoarderPolicy&) const { return "hoarder"; }
    const char* operator()(const EquivocatorPolicy&) const { return "equivocator"; }
    const char* operator()(const PrivateForkerPolicy&) const { return "private_forker"; }
  };
  return std::visit(Visitor{}, policy);
}

void MinerConfig::validate(const Params& params) const {
  if (!std::isfinite(hash_rate) || hash_rate <= 0.0 || hash_rate > 1e12) {
    throw std::invalid_argument("miner hash_rate must be in (0, 1e12]");
  }
  struct Visitor {
    const Params& params;
    void operator()(const HonestPolicy&) const {}
    void operator()(const TargetedPolicy& p) const {
      if (p.target >= params.strand_count_n) {
        throw std::invalid_argument("targeted policy: target strand out of range");
      }
    }
    void operator()(const HoarderPolicy& p) const {
      if (p.hold_duration < 0) {
        throw std::invalid_argument("hoarder policy: hold_duration must be >= 0");
      }
    }
    void operator()(const EquivocatorPolicy& p) const {
      if (p.copies < 2 || p.copies > 4096) {
        throw std::invalid_argument("equivocator policy: copies must be in [2, 4096]");
      }
    }
    void operator()(const PrivateForkerPolicy& p) const {
      if (p.target >= params.strand_count_n) {
        throw std::invalid_argument("private_forker policy: target strand out of range");
      }
    }
  };
  std::visit(Visitor{params}, policy);
}

TipsSnapshot TipsSnapshot::of(const Ledger& ledger) {
  TipsSnapshot snap;
  snap.tips = ledger.tips();
  snap.heights.reserve(snap.tips.size());
  for (ChainIndex i = 0; i < snap.tips.size(); ++i) {
    snap.heights.push_back(ledger.strand_height(i));
  }
  return snap;
}

AssembledBlock assemble_block(const MinedTicket& mined, const Keypair& key,
                              Bytes payload, const Params& params) {
  AssembledBlock out;
  out.block.chain_index = mined.judgement.chain_index;
  out.block.prev_hash = mined.ticket.tip_hashes.at(mined.judgement.chain_index);
  out.block.payload = std::move(payload);
  out.block.ticket = mined.ticket;
  out.id = block_id(out.block, params);
  out.block.signature = sign(out.id, key.secret_key, params);
  return out;
}

// --------------------------------------------------------------------------
// One-shot step operations
// --------------------------------------------------------------------------

std::optional<MinedProduct> honest_step(const TipsSnapshot& view, const Params& params,
                                        std::uint64_t rng_seed, PayloadSource& payloads,
                                        std::uint32_t miner_id,
                                        std::uint64_t max_attempts) {
  Rng rng(rng_seed);
  const Keypair key = keypair_from(rng, params);
  auto mined = mine_ticket(view.tips, key.public_key, params, 0, max_attempts);
  if (!mined) return std::nullopt;
  const ChainIndex idx = mined->judgement.chain_index;
  MinedProduct product;
  product.blocks.push_back(
      assemble_block(*mined, key,
                     payloads.payload_for(miner_id, idx, view.heights.at(idx) + 1, 0),
                     params)
          .block);
  return product;
}

std::optional<MinedProduct> targeted_step(const TipsSnapshot& view, const Params& params,
                                          std::uint64_t rng_seed, PayloadSource& payloads,
                                          ChainIndex target, std::uint32_t miner_id,
                                          std::uint64_t max_attempts) {
  if (target >= params.strand_count_n) {
    throw std::invalid_argument("targeted_step: target strand out of range");
  }
  Rng rng(rng_seed);
  std::uint64_t remaining = max_attempts;
  std::uint64_t discarded = 0;
  while (remaining > 0) {
    const Keypair key = keypair_from(rng, params);
    auto mined = mine_ticket(view.tips, key.public_key, params, 0, remaining);
    if (!mined) return std::nullopt;
    remaining -= mined->ticket.nonce + 1;
    if (mined->judgement.chain_index != target) {
      ++discarded;  // valid proof-of-work, unusable index: throw it away
      continue;
    }
    MinedProduct product;
    product.discarded_tickets = discarded;
    product.blocks.push_back(
        assemble_block(*mined, key,
                       payloads.payload_for(miner_id, target,
                                            view.heights.at(target) + 1, 0),
                       params)
            .block);
    return product;
  }
  return std::nullopt;
}

std::optional<MinedProduct> equivocate_step(const TipsSnapshot& view, const Params& params,
                                            std::uint64_t rng_seed,
                                            PayloadSource& payloads, std::uint32_t copies,
                                            std::uint32_t miner_id,
                                            std::uint64_t max_attempts) {
  if (copies < 2) {
    throw std::invalid_argument("equivocate_step: copies must be >= 2");
  }
  Rng rng(rng_seed);
  const Keypair key = keypair_from(rng, params);
  auto mined = mine_ticket(view.tips, key.public_key, params, 0, max_attempts);
  if (!mined) return std::nullopt;
  const ChainIndex idx = mined->judgement.chain_index;
  MinedProduct product;
  product.blocks.reserve(copies);
  for (std::uint32_t c = 0; c < copies; ++c) {
    product.blocks.push_back(
        assemble_block(*mined, key,
                       payloads.payload_for(miner_id, idx, view.heights.at(idx) + 1, c),
                       params)
            .block);
  }
  return product;
}

// --------------------------------------------------------------------------
// MinerAgent
// --------------------------------------------------------------------------

MinerAgent::MinerAgent(MinerConfig config, Params params, std::uint64_t seed,
                       std::shared_ptr<PayloadSource> payloads)
    : config_(std::move(config)),
      params_(std::move(params)),
      rng_(seed),
      payloads_(std::move(payloads)) {
  config_.validate(params_);
  if (payloads_ == nullptr) {
    throw std::invalid_argument("MinerAgent: payload source must not be null");
  }
  // Attempts-per-step in fixed point so fractional hash rates accumulate
  // exactly and identically on every platform.
  step_budget_fp_ = static_cast<std::uint64_t>(
      std::llround(config_.hash_rate * static_cast<double>(kSubticksPerUnit)));
}

Keypair MinerAgent::fresh_keypair() { return keypair_from(rng_, params_); }

TipsSnapshot MinerAgent::current_view(const Ledger& replica) const {
  TipsSnapshot view = TipsSnapshot::of(replica);
  if (const auto* fp = std::get_if<PrivateForkerPolicy>(&config_.policy);
      fp != nullptr && forker_.anchored) {
    view.tips.at(fp->target) = forker_.private_tip;
    view.heights.at(fp->target) = forker_.private_height;
  }
  return view;
}

void MinerAgent::refresh_policy_state(const Ledger& replica) {
  const auto* fp = std::get_if<PrivateForkerPolicy>(&config_.policy);
  if (fp == nullptr) return;
  const std::uint64_t public_height = replica.strand_height(fp->target);
  if (forker_.anchored &&
      public_height >= forker_.private_height + kForkerBailOutDeficit) {
    forker_.anchored = false;
    forker_.private_chain.clear();
    ++forker_.abandons;
  }
  if (!forker_.anchored && public_height >= fp->withhold_depth) {
    forker_.anchored = true;
    forker_.private_tip = replica.best_path_ancestor(fp->target, fp->withhold_depth);
    forker_.fork_base_height = public_height - fp->withhold_depth;
    forker_.private_height = forker_.fork_base_height;
    forker_.private_chain.clear();
  }
}

std::uint64_t MinerAgent::take_step_budget() {
  budget_accum_fp_ += step_budget_fp_;
  const std::uint64_t budget = budget_accum_fp_ / kSubticksPerUnit;
  budget_accum_fp_ %= kSubticksPerUnit;
  return budget;
}

void MinerAgent::begin_session(TipsSnapshot view) {
  session_.active = true;
  session_.view = std::move(view);
  session_.key = fresh_keypair();
  session_.next_nonce = 0;
}

void MinerAgent::step_real(SimTime now, const Ledger& replica, MinerOutbox& out) {
  refresh_policy_state(replica);
  TipsSnapshot view = current_view(replica);
  if (!session_.active || !(session_.view == view)) {
    begin_session(std::move(view));
  }
  const std::uint64_t budget = take_step_budget();
  if (budget == 0) return;
  auto mined = mine_ticket(session_.view.tips, session_.key.public_key, params_,
                           session_.next_nonce, budget);
  if (!mined) {
    counters_.hash_attempts += budget;
    session_.next_nonce += budget;
    return;
  }
  counters_.hash_attempts += mined->ticket.nonce - session_.next_nonce + 1;
  const Keypair key = session_.key;
  const TipsSnapshot found_view = session_.view;
  // The find consumes the remainder of the step (assembly + publication), and
  // every new ticket gets a fresh keypair, so the session always ends here.
  session_.active = false;
  handle_find(now, found_view, *mined, key, replica, out);
}

void MinerAgent::on_analytic_find(SimTime now, const Ledger& replica, MinerOutbox& out) {
  refresh_policy_state(replica);
  const TipsSnapshot view = current_view(replica);
  const Keypair key = fresh_keypair();
  MinedTicket mined;
  mined.ticket.tip_hashes = view.tips;
  mined.ticket.pubkey = key.public_key;
  mined.ticket.nonce = rng_.next();
  mined.judgement = judge_ticket(mined.ticket, params_);
  handle_find(now, view, mined, key, replica, out);
}

void MinerAgent::on_replica_update(SimTime /*now*/, const Ledger& replica) {
  refresh_policy_state(replica);
}

void MinerAgent::on_wakeup(SimTime /*now*/, const Ledger& replica, MinerOutbox& out) {
  // Spend every ticket that has come due. The block claims the CURRENT tip of
  // the ticket's strand; whether the stored ticket still authorizes that slot
  // is for validation to decide.
  while (!hoard_.empty()) {
    // Entries are FIFO by due time (constant hold duration).
    HoardEntry& front = hoard_.front();
    const ChainIndex idx = front.mined.judgement.chain_index;
    Block b;
    b.chain_index = idx;
    b.prev_hash = replica.strand_tip(idx);
    b.payload = payloads_->payload_for(config_.miner_id, idx,
                                       replica.strand_height(idx) + 1, 0);
    b.ticket = front.mined.ticket;
    b.signature = sign(block_id(b, params_), front.key.secret_key, params_);
    hoard_.pop_front();
    out.publish(std::move(b));
  }
}

void MinerAgent::handle_find(SimTime now, const TipsSnapshot& view,
                             const MinedTicket& mined, const Keypair& key,
                             const Ledger& replica, MinerOutbox& out) {
  ++counters_.tickets_found;
  const ChainIndex idx = mined.judgement.chain_index;
  out.note_ticket_found(idx);

  if (std::holds_alternative<HonestPolicy>(config_.policy)) {
    Bytes payload = payloads_->payload_for(config_.miner_id, idx,
                                           view.heights.at(idx) + 1, 0);
    out.publish(assemble_block(mined, key, std::move(payload), params_).block);
    return;
  }
  if (const auto* tp = std::get_if<TargetedPolicy>(&config_.policy)) {
    if (idx != tp->target) {
      ++counters_.tickets_discarded;
      return;
    }
    Bytes payload = payloads_->payload_for(config_.miner_id, idx,
                                           view.heights.at(idx) + 1, 0);
    out.publish(assemble_block(mined, key, std::move(payload), params_).block);
    return;
  }
  if (const auto* hp = std::get_if<HoarderPolicy>(&config_.policy)) {
    HoardEntry entry;
    entry.due = now + hp->hold_duration;
    entry.mined = mined;
    entry.key = key;
    hoard_.push_back(std::move(entry));
    out.schedule_wakeup(now + hp->hold_duration);
    return;
  }
  if (const auto* ep = std::get_if<EquivocatorPolicy>(&config_.policy)) {
    for (std::uint32_t c = 0; c < ep->copies; ++c) {
      Bytes payload = payloads_->payload_for(config_.miner_id, idx,
                                             view.heights.at(idx) + 1, c);
      out.publish(assemble_block(mined, key, std::move(payload), params_).block);
    }
    return;
  }
  const auto& fp = std::get<PrivateForkerPolicy>(config_.policy);
  if (!forker_.anchored || idx != fp.target) {
    ++counters_.tickets_discarded;
    return;
  }
  Bytes payload = payloads_->payload_for(config_.miner_id, fp.target,
                                         forker_.private_height + 1, 0);
  AssembledBlock ab = assemble_block(mined, key, std::move(payload), params_);
  forker_.private_tip = ab.id;
  ++forker_.private_height;
  forker_.private_chain.push_back(std::move(ab.block));
  if (forker_.private_height > replica.strand_height(fp.target)) {
    for (Block& b : forker_.private_chain) {
      out.publish(std::move(b));
    }
    forker_.private_chain.clear();
    forker_.anchored = false;
    ++forker_.successes;
  }
}

}  // namespace multistrand
