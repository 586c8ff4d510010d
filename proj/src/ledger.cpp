#include "multistrand/ledger.hpp"

#include <algorithm>
#include <cstring>

namespace multistrand {

namespace {

constexpr std::string_view kExportMagic = "MSL1";
constexpr std::uint8_t kExportVersion = 1;

}  // namespace

// ─── verdict plumbing ─────────────────────────────────────────────────────

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::malformed: return "malformed";
    case RejectReason::chain_index_mismatch: return "chain_index_mismatch";
    case RejectReason::ticket_tip_mismatch: return "ticket_tip_mismatch";
    case RejectReason::unknown_parent: return "unknown_parent";
    case RejectReason::insufficient_difficulty: return "insufficient_difficulty";
    case RejectReason::bad_signature: return "bad_signature";
    case RejectReason::duplicate_block: return "duplicate_block";
  }
  return "unknown";
}

std::optional<int> check_number(RejectReason reason) {
  switch (reason) {
    case RejectReason::chain_index_mismatch: return 1;
    case RejectReason::ticket_tip_mismatch: return 2;
    case RejectReason::unknown_parent: return 2;
    case RejectReason::insufficient_difficulty: return 3;
    case RejectReason::bad_signature: return 4;
    case RejectReason::malformed:
    case RejectReason::duplicate_block: return std::nullopt;
  }
  return std::nullopt;
}

StatelessCheck check_stateless(const Block& block, const Params& params) {
  StatelessCheck out;
  if (block.ticket.tip_hashes.size() != params.strand_count_n ||
      block.chain_index >= params.strand_count_n) {
    return out;  // well_formed stays false
  }
  out.well_formed = true;
  out.judgement = judge_ticket(block.ticket, params);
  out.id = block_id(block, params);
  out.v1_ok = out.judgement.chain_index == block.chain_index;
  out.v2_tip_matches_prev = block.ticket.tip_hashes[block.chain_index] == block.prev_hash;
  out.v3_ok = out.judgement.meets_difficulty;
  out.v4_ok = verify(out.id, block.signature, block.ticket.pubkey, params);
  return out;
}

// ─── construction ─────────────────────────────────────────────────────────

Ledger::Ledger(Params params) : params_(std::move(params)) {
  params_.validate();
  strands_.resize(params_.strand_count_n);
  for (ChainIndex i = 0; i < params_.strand_count_n; ++i) {
    Strand& s = strands_[i];
    s.genesis_id = genesis_block_id(i, params_);
    s.best_tip = s.genesis_id;
    s.best_height = 0;
    s.blocks.emplace(s.genesis_id, StoredBlock{nullptr, Hash256{}, 0});
  }
}

// ─── validation ───────────────────────────────────────────────────────────

Verdict Ledger::validate_with(const Block& block, const StatelessCheck& st) const {
  Verdict v;
  v.judgement = st.judgement;
  v.id = st.id;
  if (!st.well_formed) {
    v.reason = RejectReason::malformed;
    return v;
  }

  const Strand& strand = strands_[block.chain_index];
  const bool parent_known = strand.blocks.contains(block.prev_hash);

  v.v1_chain_index_ok = st.v1_ok;
  v.v2_freshness_ok = st.v2_tip_matches_prev && parent_known;
  v.v3_difficulty_ok = st.v3_ok;
  v.v4_signature_ok = st.v4_ok;

  if (!v.v1_chain_index_ok) {
    v.reason = RejectReason::chain_index_mismatch;
  } else if (!st.v2_tip_matches_prev) {
    v.reason = RejectReason::ticket_tip_mismatch;
  } else if (!parent_known) {
    v.reason = RejectReason::unknown_parent;
  } else if (!v.v3_difficulty_ok) {
    v.reason = RejectReason::insufficient_difficulty;
  } else if (!v.v4_signature_ok) {
    v.reason = RejectReason::bad_signature;
  } else {
    v.accepted = true;
  }
  return v;
}

Verdict Ledger::validate_block(const Block& block) const {
  return validate_with(block, check_stateless(block, params_));
}

// ─── apply ────────────────────────────────────────────────────────────────

ApplyOutcome Ledger::apply_block(const Block& block) {
  return apply_block(std::make_shared<const Block>(block),
                     check_stateless(block, params_));
}

ApplyOutcome Ledger::apply_block(std::shared_ptr<const Block> block,
                                 const StatelessCheck& stateless) {
  const Verdict verdict = validate_with(*block, stateless);
  if (!verdict.accepted) {
    ApplyOutcome out;
    out.kind = ApplyOutcome::Kind::rejected;
    out.id = verdict.id;
    out.reason = verdict.reason;
    return out;
  }
  if (strands_[block->chain_index].blocks.contains(verdict.id)) {
    ApplyOutcome out;
    out.kind = ApplyOutcome::Kind::rejected;
    out.id = verdict.id;
    out.reason = RejectReason::duplicate_block;
    return out;
  }
  return insert_validated(std::move(block), verdict.id);
}

ApplyOutcome Ledger::insert_validated(std::shared_ptr<const Block> block,
                                      const Hash256& id) {
  Strand& strand = strands_[block->chain_index];
  const StoredBlock& parent = strand.blocks.at(block->prev_hash);
  const std::uint64_t height = parent.height + 1;
  const Hash256 prev = block->prev_hash;

  strand.blocks.emplace(id, StoredBlock{std::move(block), prev, height});
  strand.insertion_order.push_back(id);

  ApplyOutcome out;
  out.id = id;
  out.height = height;

  if (height <= strand.best_height) {
    // First-seen tie-break: an equal-height arrival never displaces the tip.
    out.kind = ApplyOutcome::Kind::stored_side_branch;
    return out;
  }

  const Hash256 old_tip = strand.best_tip;
  const std::uint64_t old_height = strand.best_height;
  strand.best_tip = id;
  strand.best_height = height;

  if (prev == old_tip) {
    out.kind = ApplyOutcome::Kind::extended_best_tip;
    return out;
  }

  // The new tip grew from a side branch. Find the fork point against the old
  // best path; its depth below the old tip is the number of abandoned blocks.
  Hash256 a = ancestor_at_height(strand, id, old_height);
  Hash256 b = old_tip;
  std::uint64_t common_height = old_height;
  while (a != b) {
    a = strand.blocks.at(a).prev;
    b = strand.blocks.at(b).prev;
    --common_height;
  }
  out.kind = ApplyOutcome::Kind::caused_reorg;
  out.reorg_depth = old_height - common_height;
  return out;
}

const Hash256& Ledger::ancestor_at_height(const Strand& strand, const Hash256& from,
                                          std::uint64_t target_height) const {
  const Hash256* cursor = &from;
  const StoredBlock* stored = &strand.blocks.at(from);
  while (stored->height > target_height) {
    cursor = &stored->prev;
    stored = &strand.blocks.at(*cursor);
  }
  return *cursor;
}

// ─── queries ──────────────────────────────────────────────────────────────

std::vector<Hash256> Ledger::tips() const {
  std::vector<Hash256> out;
  out.reserve(strands_.size());
  for (const Strand& s : strands_) out.push_back(s.best_tip);
  return out;
}

std::uint64_t Ledger::strand_height(ChainIndex strand) const {
  return strands_.at(strand).best_height;
}

const Hash256& Ledger::strand_tip(ChainIndex strand) const {
  return strands_.at(strand).best_tip;
}

const Hash256& Ledger::strand_genesis(ChainIndex strand) const {
  return strands_.at(strand).genesis_id;
}

bool Ledger::contains(ChainIndex strand, const Hash256& id) const {
  return strands_.at(strand).blocks.contains(id);
}

std::optional<std::uint64_t> Ledger::height_of(ChainIndex strand,
                                               const Hash256& id) const {
  const Strand& s = strands_.at(strand);
  const auto it = s.blocks.find(id);
  if (it == s.blocks.end()) return std::nullopt;
  return it->second.height;
}

std::shared_ptr<const Block> Ledger::find_block(ChainIndex strand,
                                                const Hash256& id) const {
  const Strand& s = strands_.at(strand);
  const auto it = s.blocks.find(id);
  if (it == s.blocks.end()) return nullptr;
  return it->second.block;
}

Hash256 Ledger::best_path_ancestor(ChainIndex strand, std::uint64_t back_steps) const {
  const Strand& s = strands_.at(strand);
  if (back_steps > s.best_height) {
    throw std::out_of_range("back_steps exceeds strand height");
  }
  return ancestor_at_height(s, s.best_tip, s.best_height - back_steps);
}

std::vector<Hash256> Ledger::best_path(ChainIndex strand) const {
  const Strand& s = strands_.at(strand);
  std::vector<Hash256> out;
  out.reserve(s.best_height);
  Hash256 cursor = s.best_tip;
  while (cursor != s.genesis_id) {
    out.push_back(cursor);
    cursor = s.blocks.at(cursor).prev;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::uint64_t Ledger::strand_block_count(ChainIndex strand) const {
  return strands_.at(strand).insertion_order.size();
}

std::uint64_t Ledger::total_blocks() const {
  std::uint64_t total = 0;
  for (const Strand& s : strands_) total += s.insertion_order.size();
  return total;
}

std::vector<std::pair<Hash256, std::uint64_t>> Ledger::tip_cache() const {
  std::vector<std::pair<Hash256, std::uint64_t>> out;
  out.reserve(strands_.size());
  for (const Strand& s : strands_) out.emplace_back(s.best_tip, s.best_height);
  return out;
}

// ─── export / import ──────────────────────────────────────────────────────

Bytes Ledger::export_blocks() const {
  Bytes out;
  out.insert(out.end(), kExportMagic.begin(), kExportMagic.end());
  out.push_back(kExportVersion);
  out.push_back(static_cast<std::uint8_t>(params_.strand_exponent_p));
  append_u16_be(out, static_cast<std::uint16_t>(params_.difficulty_bits));
  out.push_back(static_cast<std::uint8_t>(params_.hash_algo_id.size()));
  out.insert(out.end(), params_.hash_algo_id.begin(), params_.hash_algo_id.end());
  out.push_back(static_cast<std::uint8_t>(params_.sig_algo_id.size()));
  out.insert(out.end(), params_.sig_algo_id.begin(), params_.sig_algo_id.end());
  append_u32_be(out, static_cast<std::uint32_t>(total_blocks()));
  for (const Strand& s : strands_) {
    append_u32_be(out, static_cast<std::uint32_t>(s.insertion_order.size()));
    for (const Hash256& id : s.insertion_order) {
      const Bytes wire = serialize_block(*s.blocks.at(id).block, params_);
      append_u32_be(out, static_cast<std::uint32_t>(wire.size()));
      out.insert(out.end(), wire.begin(), wire.end());
    }
  }
  return out;
}

Ledger Ledger::import_blocks(ByteView bytes) {
  std::size_t off = 0;
  const auto need = [&](std::size_t len) {
    if (off + len > bytes.size()) throw CodecError("ledger export truncated");
  };
  const auto read_string = [&]() {
    need(1);
    const std::size_t len = bytes[off++];
    need(len);
    std::string s(reinterpret_cast<const char*>(bytes.data() + off), len);
    off += len;
    return s;
  };

  need(kExportMagic.size());
  if (std::string_view(reinterpret_cast<const char*>(bytes.data()), kExportMagic.size()) !=
      kExportMagic) {
    throw CodecError("not a ledger export (bad magic)");
  }
  off += kExportMagic.size();
  need(1);
  if (bytes[off++] != kExportVersion) throw CodecError("unsupported export version");

  Params params;
  need(1);
  params.strand_exponent_p = bytes[off++];
  if (params.strand_exponent_p > kMaxStrandExponent) {
    throw CodecError("export header has unsupported strand exponent");
  }
  params.strand_count_n = std::uint32_t{1} << params.strand_exponent_p;
  need(2);
  params.difficulty_bits = load_u16_be(bytes.data() + off);
  off += 2;
  params.hash_algo_id = read_string();
  params.sig_algo_id = read_string();
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw CodecError(std::string("export header invalid: ") + e.what());
  }

  need(4);
  const std::uint32_t declared_total = load_u32_be(bytes.data() + off);
  off += 4;

  Ledger ledger(params);
  std::uint64_t applied = 0;
  for (ChainIndex strand = 0; strand < params.strand_count_n; ++strand) {
    need(4);
    const std::uint32_t count = load_u32_be(bytes.data() + off);
    off += 4;
    for (std::uint32_t i = 0; i < count; ++i) {
      need(4);
      const std::uint32_t wire_len = load_u32_be(bytes.data() + off);
      off += 4;
      need(wire_len);
      const Block block = deserialize_block(bytes.subspan(off, wire_len), params);
      off += wire_len;
      if (block.chain_index != strand) {
        throw CodecError("export stream block filed under the wrong strand");
      }
      const ApplyOutcome outcome = ledger.apply_block(block);
      if (!outcome.accepted()) {
        throw CodecError(std::string("export stream contains an invalid block: ") +
                         to_string(*outcome.reason));
      }
      ++applied;
    }
  }
  if (off != bytes.size()) throw CodecError("trailing bytes after ledger export");
  if (applied != declared_total) throw CodecError("export block count mismatch");
  return ledger;
}

}  // namespace multistrand
