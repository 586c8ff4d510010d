// Mining strategies: the one-shot step operations (honest, targeted,
// equivocating), block assembly, and the simulator-driven agent with its
// hoarding and private-fork behaviors.

#include "multistrand/miner.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <memory>
#include <vector>

#include "multistrand/crypto.hpp"
#include "multistrand/ledger.hpp"
#include "multistrand/pow.hpp"
#include "multistrand/rng.hpp"
#include "multistrand/types.hpp"

namespace ms = multistrand;

namespace {

// Records everything the agent asks the world to do.
struct RecordingOutbox final : ms::MinerOutbox {
  std::vector<ms::Block> published;
  std::vector<ms::ChainIndex> found_strands;
  std::vector<ms::SimTime> wakeups;

  void publish(ms::Block block) override { published.push_back(std::move(block)); }
  void note_ticket_found(ms::ChainIndex strand) override {
    found_strands.push_back(strand);
  }
  void schedule_wakeup(ms::SimTime at) override { wakeups.push_back(at); }
};

ms::MinedTicket mine_for(const ms::Ledger& ledger, const ms::Keypair& key,
                         std::uint64_t nonce_start) {
  const auto mined = ms::mine_ticket(ledger.tips(), key.public_key, ledger.params(),
                                     nonce_start, std::uint64_t{1} << 20, nullptr);
  EXPECT_TRUE(mined.has_value());
  return *mined;
}

ms::Keypair key_from_byte(std::uint8_t b, const ms::Params& params) {
  ms::KeySeed seed{};
  seed[0] = b;
  return ms::keygen(seed, params);
}

}  // namespace

TEST(AssembleBlock, ForcesPrevToTicketTipAndSignsTheId) {
  const ms::Params params = ms::Params::make(2, 0);
  ms::Ledger ledger(params);
  const ms::Keypair key = key_from_byte(1, params);
  const ms::MinedTicket mined = mine_for(ledger, key, 0);

  const ms::AssembledBlock assembled =
      ms::assemble_block(mined, key, {1, 2, 3}, params);
  EXPECT_EQ(assembled.block.chain_index, mined.judgement.chain_index);
  EXPECT_EQ(assembled.block.prev_hash,
            mined.ticket.tip_hashes[mined.judgement.chain_index]);
  EXPECT_EQ(assembled.id, ms::block_id(assembled.block, params));
  EXPECT_TRUE(
      ms::verify(assembled.id, assembled.block.signature, key.public_key, params));
  EXPECT_TRUE(ledger.validate_block(assembled.block).accepted);
}

TEST(HonestStep, ProducesOneAcceptableBlockDeterministically) {
  const ms::Params params = ms::Params::make(2, 4);
  ms::Ledger ledger(params);
  ms::DefaultPayloadSource payloads(24);
  const ms::TipsSnapshot view = ms::TipsSnapshot::of(ledger);

  const auto a = ms::honest_step(view, params, 42, payloads, 3);
  const auto b = ms::honest_step(view, params, 42, payloads, 3);
  ASSERT_TRUE(a.has_value());
  ASSERT_TRUE(b.has_value());
  ASSERT_EQ(a->blocks.size(), 1u);
  EXPECT_EQ(a->blocks, b->blocks) << "same seed, same view, same block";
  EXPECT_EQ(a->discarded_tickets, 0u);

  const ms::Block& block = a->blocks[0];
  const ms::TicketJudgement judgement = ms::judge_ticket(block.ticket, params);
  EXPECT_TRUE(judgement.meets_difficulty);
  EXPECT_EQ(block.chain_index, judgement.chain_index);
  EXPECT_TRUE(ledger.apply_block(block).accepted());
}

TEST(HonestStep, DifferentSeedsGiveDifferentBlocks) {
  const ms::Params params = ms::Params::make(1, 0);
  ms::Ledger ledger(params);
  ms::DefaultPayloadSource payloads(24);
  const ms::TipsSnapshot view = ms::TipsSnapshot::of(ledger);

  const auto a = ms::honest_step(view, params, 1, payloads);
  const auto b = ms::honest_step(view, params, 2, payloads);
  ASSERT_TRUE(a.has_value() && b.has_value());
  EXPECT_NE(a->blocks[0], b->blocks[0]);
}

TEST(HonestStep, ExhaustedBudgetYieldsNothing) {
  // 48 difficulty bits cannot be met within a one-attempt budget.
  const ms::Params params = ms::Params::make(1, 48);
  ms::Ledger ledger(params);
  ms::DefaultPayloadSource payloads(24);
  EXPECT_FALSE(
      ms::honest_step(ms::TipsSnapshot::of(ledger), params, 7, payloads, 0, 1)
          .has_value());
}

TEST(TargetedStep, EmitsOnlyTargetStrandAndCountsDiscards) {
  const ms::Params params = ms::Params::make(2, 0);
  ms::Ledger ledger(params);
  ms::DefaultPayloadSource payloads(24);
  const ms::TipsSnapshot view = ms::TipsSnapshot::of(ledger);
  const ms::ChainIndex target = 2;

  std::uint64_t produced = 0;
  std::uint64_t discarded = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto product = ms::targeted_step(view, params, seed, payloads, target);
    ASSERT_TRUE(product.has_value()) << "difficulty 0 cannot exhaust the budget";
    for (const auto& block : product->blocks) {
      EXPECT_EQ(block.chain_index, target);
      EXPECT_EQ(ms::judge_ticket(block.ticket, params).chain_index, target);
    }
    produced += product->blocks.size();
    discarded += product->discarded_tickets;
  }
  EXPECT_GT(produced, 0u);
  EXPECT_GT(discarded, 0u) << "at n=4 roughly 3 in 4 tickets land off-target";
  // Off-target fraction should look like 3/4 (loose 5-sigma style bound).
  const double frac =
      static_cast<double>(discarded) / static_cast<double>(discarded + produced);
  EXPECT_GT(frac, 0.5);
  EXPECT_LT(frac, 0.95);
}

TEST(EquivocateStep, SharesOneTicketAcrossDistinctBlocks) {
  const ms::Params params = ms::Params::make(2, 0);
  ms::Ledger ledger(params);
  ms::DefaultPayloadSource payloads(24);

  const auto product =
      ms::equivocate_step(ms::TipsSnapshot::of(ledger), params, 9, payloads, 4);
  ASSERT_TRUE(product.has_value());
  ASSERT_EQ(product->blocks.size(), 4u);

  const ms::Block& first = product->blocks[0];
  for (std::size_t i = 1; i < product->blocks.size(); ++i) {
    const ms::Block& copy = product->blocks[i];
    EXPECT_EQ(copy.ticket, first.ticket) << "one proof of work, shared";
    EXPECT_EQ(copy.chain_index, first.chain_index);
    EXPECT_EQ(copy.prev_hash, first.prev_hash);
    EXPECT_NE(copy.payload, first.payload) << "copies must differ in content";
    EXPECT_NE(ms::block_id(copy, params), ms::block_id(first, params));
  }
  // Every copy carries a valid signature over its own id.
  for (const auto& block : product->blocks) {
    EXPECT_TRUE(ms::verify(ms::block_id(block, params), block.signature,
                           block.ticket.pubkey, params));
  }
}

TEST(PayloadSource, DistinctAcrossMinersStrandsHeightsAndVariants) {
  ms::DefaultPayloadSource payloads(32);
  const ms::Bytes base = payloads.payload_for(0, 0, 1, 0);
  EXPECT_EQ(base.size(), 32u);
  EXPECT_EQ(payloads.payload_for(0, 0, 1, 0), base) << "deterministic";
  EXPECT_NE(payloads.payload_for(1, 0, 1, 0), base);
  EXPECT_NE(payloads.payload_for(0, 1, 1, 0), base);
  EXPECT_NE(payloads.payload_for(0, 0, 2, 0), base);
  EXPECT_NE(payloads.payload_for(0, 0, 1, 1), base);
}

TEST(MinerConfig, ValidateRejectsBadSettings) {
  const ms::Params params = ms::Params::make(2, 4);
  ms::MinerConfig config;
  config.hash_rate = 0.0;
  EXPECT_THROW(config.validate(params), std::invalid_argument);
  config.hash_rate = -1.0;
  EXPECT_THROW(config.validate(params), std::invalid_argument);

  config.hash_rate = 1.0;
  config.policy = ms::TargetedPolicy{7};  // only strands 0..3 exist
  EXPECT_THROW(config.validate(params), std::invalid_argument);

  config.policy = ms::EquivocatorPolicy{1};  // fewer than 2 copies is not equivocation
  EXPECT_THROW(config.validate(params), std::invalid_argument);

  config.policy = ms::PrivateForkerPolicy{9, 1};
  EXPECT_THROW(config.validate(params), std::invalid_argument);

  config.policy = ms::HoarderPolicy{-3};
  EXPECT_THROW(config.validate(params), std::invalid_argument);

  config.policy = ms::HonestPolicy{};
  EXPECT_NO_THROW(config.validate(params));
}

TEST(PolicyNames, AreStable) {
  EXPECT_STREQ(ms::policy_kind_name(ms::HonestPolicy{}), "honest");
  EXPECT_STREQ(ms::policy_kind_name(ms::TargetedPolicy{}), "targeted");
  EXPECT_STREQ(ms::policy_kind_name(ms::HoarderPolicy{}), "hoarder");
  EXPECT_STREQ(ms::policy_kind_name(ms::EquivocatorPolicy{}), "equivocator");
  EXPECT_STREQ(ms::policy_kind_name(ms::PrivateForkerPolicy{}), "private_forker");
}

TEST(MinerAgent, HonestRealStepsPublishFreshBlocks) {
  const ms::Params params = ms::Params::make(1, 0);
  ms::Ledger replica(params);
  auto payloads = std::make_shared<ms::DefaultPayloadSource>(16);

  ms::MinerConfig config;
  config.miner_id = 0;
  config.hash_rate = 4.0;
  ms::MinerAgent agent(config, params, 99, payloads);

  RecordingOutbox out;
  for (ms::SimTime t = 0; t < 5; ++t) {
    agent.step_real(t, replica, out);
    // The simulator applies published blocks to the publisher's replica and
    // then notifies it; mirror that here.
    for (std::size_t i = replica.total_blocks(); i < out.published.size(); ++i) {
      ASSERT_TRUE(replica.apply_block(out.published[i]).accepted())
          << "agent output must be self-consistent with its replica";
    }
    agent.on_replica_update(t, replica);
  }

  // Difficulty 0: every step finds, so five publications on fresh tips.
  EXPECT_EQ(out.published.size(), 5u);
  EXPECT_EQ(agent.counters().tickets_found, 5u);
  EXPECT_EQ(agent.counters().tickets_discarded, 0u);
  EXPECT_GT(agent.counters().hash_attempts, 0u);
  EXPECT_EQ(out.found_strands.size(), 5u);
  EXPECT_EQ(replica.strand_height(0) + replica.strand_height(1), 5u);
}

TEST(MinerAgent, FractionalHashRateAccumulatesAcrossSteps) {
  // At 0.5 attempts per step and difficulty 0, a find happens exactly every
  // other step: budgets 0,1,0,1,...
  const ms::Params params = ms::Params::make(0, 0);
  ms::Ledger replica(params);
  auto payloads = std::make_shared<ms::DefaultPayloadSource>(8);

  ms::MinerConfig config;
  config.hash_rate = 0.5;
  ms::MinerAgent agent(config, params, 5, payloads);

  RecordingOutbox out;
  for (ms::SimTime t = 0; t < 10; ++t) {
    agent.step_real(t, replica, out);
    for (std::size_t i = replica.total_blocks(); i < out.published.size(); ++i) {
      ASSERT_TRUE(replica.apply_block(out.published[i]).accepted());
    }
    agent.on_replica_update(t, replica);
  }
  EXPECT_EQ(out.published.size(), 5u);
  EXPECT_EQ(agent.counters().hash_attempts, 5u);
}

TEST(MinerAgent, AnalyticFindsProduceRealValidBlocks) {
  const ms::Params params = ms::Params::make(2, 0);
  ms::Ledger replica(params);
  auto payloads = std::make_shared<ms::DefaultPayloadSource>(16);

  ms::MinerConfig config;
  config.hash_rate = 1.0;
  ms::MinerAgent agent(config, params, 1234, payloads);

  RecordingOutbox out;
  for (ms::SimTime t = 0; t < 20; ++t) {
    agent.on_analytic_find(t, replica, out);
    for (std::size_t i = replica.total_blocks(); i < out.published.size(); ++i) {
      ASSERT_TRUE(replica.apply_block(out.published[i]).accepted());
    }
    agent.on_replica_update(t, replica);
  }
  EXPECT_EQ(out.published.size(), 20u);
  // Block ids and strand assignment are hash-derived, hence the strand mix.
  bool multiple_strands = false;
  for (const auto& block : out.published) {
    if (block.chain_index != out.published[0].chain_index) multiple_strands = true;
  }
  EXPECT_TRUE(multiple_strands);
}

TEST(MinerAgent, HoarderStashesAndSpendsOnWakeup) {
  const ms::Params params = ms::Params::make(1, 0);
  ms::Ledger replica(params);
  auto payloads = std::make_shared<ms::DefaultPayloadSource>(16);

  ms::MinerConfig config;
  config.hash_rate = 2.0;
  config.policy = ms::HoarderPolicy{10};
  ms::MinerAgent agent(config, params, 77, payloads);

  RecordingOutbox out;
  agent.step_real(0, replica, out);
  EXPECT_TRUE(out.published.empty()) << "the find is hoarded, not published";
  ASSERT_EQ(out.wakeups.size(), 1u);
  EXPECT_EQ(out.wakeups[0], 10);
  EXPECT_EQ(out.found_strands.size(), 1u);

  // At the due time the stored ticket is spent against the current tip.
  agent.on_wakeup(10, replica, out);
  ASSERT_EQ(out.published.size(), 1u);
  EXPECT_TRUE(replica.apply_block(out.published[0]).accepted())
      << "strand did not advance during the hold, so the spend is fresh";
}

TEST(MinerAgent, HoarderSpendRejectedWhenStrandAdvanced) {
  const ms::Params params = ms::Params::make(0, 0);
  ms::Ledger replica(params);
  auto payloads = std::make_shared<ms::DefaultPayloadSource>(16);

  ms::MinerConfig config;
  config.hash_rate = 2.0;
  config.policy = ms::HoarderPolicy{5};
  ms::MinerAgent agent(config, params, 78, payloads);

  RecordingOutbox out;
  agent.step_real(0, replica, out);
  ASSERT_EQ(out.wakeups.size(), 1u);

  // Another miner extends strand 0 during the hold.
  ms::Rng rng(79);
  ms::KeySeed seed{};
  rng.fill(seed);
  const ms::Keypair other = ms::keygen(seed, params);
  const auto other_found = ms::mine_ticket(replica.tips(), other.public_key, params,
                                           rng.next(), 1 << 20, nullptr);
  ASSERT_TRUE(other_found.has_value());
  const auto other_block = ms::assemble_block(*other_found, other, {'z'}, params);
  ASSERT_TRUE(replica.apply_block(other_block.block).accepted());
  agent.on_replica_update(3, replica);

  agent.on_wakeup(5, replica, out);
  ASSERT_EQ(out.published.size(), 1u);
  // The spend claims the new tip but embeds the old one: check 2 rejects it.
  const ms::Verdict verdict = replica.validate_block(out.published[0]);
  EXPECT_FALSE(verdict.accepted);
  EXPECT_EQ(verdict.reason, ms::RejectReason::ticket_tip_mismatch);
}

namespace {

// Drives a private forker through a complete race: the public strand gains
// `public_blocks` while the forker receives `finds` analytic tickets.
struct ForkerHarness {
  ms::Params params = ms::Params::make(0, 0);
  ms::Ledger replica{params};
  std::shared_ptr<ms::DefaultPayloadSource> payloads =
      std::make_shared<ms::DefaultPayloadSource>(8);
  ms::MinerAgent agent;
  RecordingOutbox out;
  ms::Rng rng{424242};
  ms::SimTime now = 0;

  explicit ForkerHarness(std::uint64_t withhold_depth)
      : agent(make_config(withhold_depth), params, 11, payloads) {}

  static ms::MinerConfig make_config(std::uint64_t withhold_depth) {
    ms::MinerConfig config;
    config.miner_id = 0;
    config.hash_rate = 1.0;
    config.policy = ms::PrivateForkerPolicy{0, withhold_depth};
    return config;
  }

  void advance_public() {
    ms::KeySeed seed{};
    rng.fill(seed);
    const ms::Keypair key = ms::keygen(seed, params);
    const auto mined = ms::mine_ticket(replica.tips(), key.public_key, params,
                                       rng.next(), 1 << 20, nullptr);
    ASSERT_TRUE(mined.has_value());
    const auto block = ms::assemble_block(*mined, key, {'p'}, params);
    ASSERT_TRUE(replica.apply_block(block.block).accepted());
    agent.on_replica_update(++now, replica);
  }

  void forker_find() { agent.on_analytic_find(++now, replica, out); }
};

}  // namespace

TEST(MinerAgent, ForkerWithholdsUntilStrictlyAhead) {
  ForkerHarness h(1);

  // Public strand reaches depth 1: the forker anchors one block back.
  h.advance_public();

  // First private find: fork height 1 vs public 1 — still withheld.
  h.forker_find();
  EXPECT_TRUE(h.out.published.empty());
  EXPECT_EQ(h.agent.attack_resolutions(), 0u);

  // Second private find: fork height 2 > public 1 — the whole branch ships.
  h.forker_find();
  ASSERT_EQ(h.out.published.size(), 2u);
  EXPECT_EQ(h.agent.attack_successes(), 1u);
  EXPECT_EQ(h.agent.attack_resolutions(), 1u);

  // The published branch links from the anchor and overtakes the public tip.
  ASSERT_TRUE(h.replica.apply_block(h.out.published[0]).accepted());
  const ms::ApplyOutcome top = h.replica.apply_block(h.out.published[1]);
  EXPECT_EQ(top.kind, ms::ApplyOutcome::Kind::caused_reorg);
  EXPECT_EQ(h.replica.strand_height(0), 2u);
  EXPECT_EQ(h.replica.strand_tip(0),
            ms::block_id(h.out.published[1], h.params));
}

TEST(MinerAgent, ForkerDiscardsOffTargetTickets) {
  // At p=0 every ticket hits the target; use p=1 and many finds to see both.
  const ms::Params params = ms::Params::make(1, 0);
  ms::Ledger replica(params);
  auto payloads = std::make_shared<ms::DefaultPayloadSource>(8);

  ms::MinerConfig config;
  config.hash_rate = 1.0;
  config.policy = ms::PrivateForkerPolicy{0, 0};
  ms::MinerAgent agent(config, params, 31, payloads);

  RecordingOutbox out;
  for (ms::SimTime t = 0; t < 40; ++t) {
    agent.on_analytic_find(t, replica, out);
    for (std::size_t i = replica.total_blocks(); i < out.published.size(); ++i) {
      ASSERT_TRUE(replica.apply_block(out.published[i]).accepted());
    }
    agent.on_replica_update(t, replica);
  }
  EXPECT_GT(agent.counters().tickets_discarded, 0u)
      << "roughly half the tickets land on the non-target strand";
  EXPECT_GT(agent.counters().tickets_found, agent.counters().tickets_discarded);
  for (const auto& block : out.published) {
    EXPECT_EQ(block.chain_index, 0u);
  }
}

TEST(MinerAgent, ForkerAbandonsHopelessRace) {
  ForkerHarness h(1);
  h.advance_public();  // anchor at deficit 1

  // The public strand runs away; at 40 blocks ahead the attack is abandoned.
  for (int i = 0; i < static_cast<int>(ms::kForkerBailOutDeficit) + 1; ++i) {
    h.advance_public();
  }
  EXPECT_EQ(h.agent.attack_resolutions(), 1u);
  EXPECT_EQ(h.agent.attack_successes(), 0u);
  EXPECT_TRUE(h.out.published.empty());
}
