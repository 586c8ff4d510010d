// Command-line front end: mine a demo block, run simulations, analyze traces,
// validate blocks against a ledger, export and replay traces.
//
// Exit codes: 0 success; 1 validation verdict "invalid"; 2 bad configuration
// or arguments; 3 file I/O failure; 4 malformed or inconsistent trace;
// 5 undecodable block or ledger bytes.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "multistrand/analysis.hpp"
#include "multistrand/block.hpp"
#include "multistrand/crypto.hpp"
#include "multistrand/ledger.hpp"
#include "multistrand/miner.hpp"
#include "multistrand/netsim.hpp"
#include "multistrand/pow.hpp"
#include "multistrand/rng.hpp"
#include "multistrand/types.hpp"

namespace ms = multistrand;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed while reading file: " + path);
  return buf.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out.good()) throw IoError("failed while writing file: " + path);
}

void write_file(const std::string& path, const ms::Bytes& data) {
  write_file(path, std::string(data.begin(), data.end()));
}

std::string strip_whitespace(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

void emit_output(const std::optional<std::string>& out_path, const std::string& data) {
  if (out_path) {
    write_file(*out_path, data);
  } else {
    std::cout << data;
    if (!data.empty() && data.back() != '\n') std::cout << '\n';
  }
}

std::string hex_of(const ms::Hash256& h) {
  return ms::to_hex(ms::ByteView(h.data(), h.size()));
}

// ---- mine-demo ----

struct MineDemoArgs {
  std::uint32_t p = 2;
  std::uint32_t difficulty = 12;
  std::uint64_t seed = 1;
  std::size_t payload_size = 32;
};

int run_mine_demo(const MineDemoArgs& args) {
  const ms::Params params = ms::Params::make(args.p, args.difficulty);
  ms::Ledger ledger(params);
  ms::DefaultPayloadSource payloads(args.payload_size);

  std::optional<ms::MinedProduct> product;
  std::uint64_t sessions = 0;
  while (!product) {
    product = ms::honest_step(ms::TipsSnapshot::of(ledger), params,
                              ms::derive_seed(args.seed, sessions), payloads,
                              /*miner_id=*/0, ms::kDefaultStepAttempts);
    ++sessions;
  }
  const ms::Block& block = product->blocks.front();
  const ms::TicketJudgement judgement = ms::judge_ticket(block.ticket, params);
  const ms::Hash256 id = ms::block_id(block, params);

  std::cout << "strands: " << params.strand_count_n
            << "  difficulty bits: " << params.difficulty_bits << '\n';
  std::cout << "ticket hash: " << hex_of(judgement.ticket_hash) << '\n';
  std::cout << "leading zero bits: " << judgement.leading_zero_bits << '\n';
  std::cout << "chain index: " << judgement.chain_index << '\n';
  std::cout << "block id: " << hex_of(id) << '\n';

  const ms::ApplyOutcome outcome = ledger.apply_block(block);
  std::cout << "applied to a fresh ledger: "
            << (outcome.accepted() ? "accepted" : "rejected") << " (strand "
            << block.chain_index << ", height " << outcome.height << ")\n";
  return outcome.accepted() ? 0 : 1;
}

// ---- simulate ----

struct SimulateArgs {
  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> mode_override;
  std::optional<std::int64_t> duration_override;
};

int run_simulate(const SimulateArgs& args) {
  ms::SimConfig config = ms::parse_config(read_file(args.config_path));
  if (args.seed_override) config.seed = *args.seed_override;
  if (args.mode_override) {
    config.mode = *args.mode_override == "real_hash" ? ms::SimMode::real_hash
                                                     : ms::SimMode::analytic;
  }
  if (args.duration_override) config.duration = *args.duration_override;
  config.validate();

  const ms::SimTrace trace = ms::run_simulation(config);

  if (args.out_path) {
    ms::write_trace_file(*args.out_path, trace);
  } else {
    ms::write_trace(std::cout, trace);
  }

  std::uint64_t total_height = 0;
  for (const std::uint64_t h : trace.final_heights) total_height += h;
  std::cerr << "simulated " << config.duration << " time units, "
            << config.miners.size() << " miners, " << trace.events.size()
            << " events; best-path blocks: " << total_height << '\n';
  return 0;
}

// ---- analyze ----

struct AnalyzeArgs {
  std::string report;
  std::optional<std::string> trace_path;
  std::optional<std::string> baseline_path;
  std::optional<std::string> out_path;
  double significance = 0.001;
  // catchup
  double q = 0.3;
  std::vector<std::uint64_t> deficits{1, 2, 4, 6};
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  double find_rate = 0.02;
  std::string format = "csv";
};

int run_analyze(const AnalyzeArgs& args) {
  if (args.report == "catchup") {
    ms::CatchupOptions options;
    options.q = args.q;
    options.deficits = args.deficits;
    options.trials = args.trials;
    options.seed = args.seed;
    options.find_rate = args.find_rate;
    const ms::CatchupCurve curve = ms::catchup_curve(options);
    emit_output(args.out_path,
                args.format == "json" ? ms::to_json_line(curve) + "\n"
                                      : ms::to_csv(curve));
    return 0;
  }

  if (!args.trace_path) {
    throw ms::ConfigError("--trace is required for report \"" + args.report + "\"");
  }
  const ms::SimTrace trace = ms::read_trace_file(*args.trace_path);

  if (args.report == "throughput") {
    ms::ThroughputReport report;
    if (args.baseline_path) {
      const ms::SimTrace baseline = ms::read_trace_file(*args.baseline_path);
      report = ms::throughput(trace, baseline);
    } else {
      report = ms::throughput(trace);
    }
    emit_output(args.out_path, ms::to_json_line(report) + "\n");
    return 0;
  }
  if (args.report == "uniformity") {
    emit_output(args.out_path,
                ms::to_json_line(ms::ticket_uniformity(trace, args.significance)) + "\n");
    return 0;
  }
  if (args.report == "orphans") {
    emit_output(args.out_path, ms::to_json_line(ms::orphan_report(trace)) + "\n");
    return 0;
  }
  throw ms::ConfigError("unknown report: \"" + args.report + "\"");
}

// ---- validate ----

struct ValidateArgs {
  std::string block_path;
  std::optional<std::string> ledger_path;
  std::uint32_t p = 0;
  std::uint32_t difficulty = 0;
  bool have_params = false;
};

int run_validate(const ValidateArgs& args) {
  std::optional<ms::Ledger> ledger;
  if (args.ledger_path) {
    const std::string raw = read_file(*args.ledger_path);
    ledger.emplace(ms::Ledger::import_blocks(
        ms::ByteView(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size())));
  } else if (args.have_params) {
    ledger.emplace(ms::Params::make(args.p, args.difficulty));
  } else {
    throw ms::ConfigError("validate needs either --ledger or both --p and --difficulty");
  }

  const ms::Bytes raw_block = ms::from_hex(strip_whitespace(read_file(args.block_path)));
  const ms::Block block = ms::deserialize_block(
      ms::ByteView(raw_block.data(), raw_block.size()), ledger->params());

  const ms::Verdict verdict = ledger->validate_block(block);
  const auto line = [](const char* label, bool ok) {
    std::cout << label << (ok ? "pass" : "FAIL") << '\n';
  };
  std::cout << "block id: " << hex_of(verdict.id) << '\n';
  std::cout << "strand: " << block.chain_index << '\n';
  line("check 1 declared chain index matches ticket hash ... ", verdict.v1_chain_index_ok);
  line("check 2 ticket tips match the parent (freshness) .... ", verdict.v2_freshness_ok);
  line("check 3 proof-of-work difficulty .................... ", verdict.v3_difficulty_ok);
  line("check 4 signature ................................... ", verdict.v4_signature_ok);
  if (verdict.accepted) {
    std::cout << "verdict: valid\n";
    return 0;
  }
  std::cout << "verdict: invalid ("
            << (verdict.reason ? ms::to_string(*verdict.reason) : "unknown") << ")\n";
  return 1;
}

// ---- export ----

struct ExportArgs {
  std::string trace_path;
  std::string out_path;
};

int run_export(const ExportArgs& args) {
  const ms::SimTrace trace = ms::read_trace_file(args.trace_path);
  const ms::Ledger ledger = ms::replay_ledger(trace);
  write_file(args.out_path, ledger.export_blocks());
  std::cerr << "exported " << ledger.total_blocks() << " blocks across "
            << ledger.params().strand_count_n << " strands to " << args.out_path
            << '\n';
  return 0;
}

// ---- replay ----

struct ReplayArgs {
  std::string trace_path;
};

int run_replay(const ReplayArgs& args) {
  const ms::SimTrace trace = ms::read_trace_file(args.trace_path);
  const std::vector<std::uint64_t> heights = ms::replay_heights(trace);
  const auto print_heights = [](const char* label, const std::vector<std::uint64_t>& h) {
    std::cout << label;
    for (std::size_t i = 0; i < h.size(); ++i) std::cout << (i ? " " : "") << h[i];
    std::cout << '\n';
  };
  print_heights("recorded final heights: ", trace.final_heights);
  print_heights("replayed final heights: ", heights);
  if (heights != trace.final_heights) {
    std::cerr << "replay mismatch: trace is not internally consistent\n";
    return 4;
  }
  std::cout << "replay matches the recorded summary\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ticket-based multi-strand proof-of-work toolkit"};
  app.require_subcommand(1);

  MineDemoArgs mine_args;
  CLI::App* mine = app.add_subcommand(
      "mine-demo", "Mine one block at a low difficulty and show its credentials");
  mine->add_option("--p", mine_args.p, "Strand count exponent (n = 2^p)")
      ->check(CLI::Range(0u, 8u))
      ->capture_default_str();
  mine->add_option("--difficulty", mine_args.difficulty,
                   "Required leading zero bits (demo cap: 20)")
      ->check(CLI::Range(0u, 20u))
      ->capture_default_str();
  mine->add_option("--seed", mine_args.seed, "Keypair seed")->capture_default_str();
  mine->add_option("--payload-size", mine_args.payload_size, "Payload bytes")
      ->check(CLI::Range(std::size_t{0}, std::size_t{1} << 20))
      ->capture_default_str();

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "Run a simulation from a JSON config");
  sim->add_option("--config", sim_args.config_path, "Simulation config (JSON)")
      ->required();
  sim->add_option("--out", sim_args.out_path,
                  "Trace output path (JSON Lines; default: stdout)");
  sim->add_option("--seed", sim_args.seed_override, "Override the config seed");
  sim->add_option("--mode", sim_args.mode_override, "Override the config mode")
      ->check(CLI::IsMember({"real_hash", "analytic"}));
  sim->add_option("--duration", sim_args.duration_override,
                  "Override the config duration (time units)")
      ->check(CLI::PositiveNumber);

  AnalyzeArgs an_args;
  CLI::App* an = app.add_subcommand("analyze", "Compute reports from traces");
  an->add_option("--report", an_args.report, "Report kind")
      ->required()
      ->check(CLI::IsMember({"throughput", "uniformity", "orphans", "catchup"}));
  an->add_option("--trace", an_args.trace_path, "Input trace (JSON Lines)");
  an->add_option("--baseline", an_args.baseline_path,
                 "Baseline trace for throughput scaling");
  an->add_option("--out", an_args.out_path, "Report output path (default: stdout)");
  an->add_option("--significance", an_args.significance,
                 "Statistical significance level")
      ->capture_default_str();
  an->add_option("--q", an_args.q, "Catch-up: attacker hash-rate share")
      ->capture_default_str();
  an->add_option("--z", an_args.deficits, "Catch-up: deficits to race (e.g. 1,2,4,6)")
      ->delimiter(',')
      ->capture_default_str();
  an->add_option("--trials", an_args.trials, "Catch-up: trials per deficit")
      ->capture_default_str();
  an->add_option("--seed", an_args.seed, "Catch-up: master seed")->capture_default_str();
  an->add_option("--find-rate", an_args.find_rate,
                 "Catch-up: combined ticket finds per time unit")
      ->capture_default_str();
  an->add_option("--format", an_args.format, "Catch-up output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  ValidateArgs val_args;
  CLI::App* val = app.add_subcommand(
      "validate", "Run the four-step validation of a block against a ledger");
  val->add_option("--block", val_args.block_path, "Block bytes as hex in a file")
      ->required();
  val->add_option("--ledger", val_args.ledger_path,
                  "Ledger file to validate against (from `export`)");
  CLI::Option* val_p = val->add_option("--p", val_args.p, "Strand count exponent");
  val->add_option("--difficulty", val_args.difficulty, "Required leading zero bits")
      ->needs(val_p);

  ExportArgs ex_args;
  CLI::App* ex = app.add_subcommand("export", "Replay a trace and export the ledger");
  ex->add_option("--trace", ex_args.trace_path, "Input trace (JSON Lines)")->required();
  ex->add_option("--out", ex_args.out_path, "Ledger output path")->required();

  ReplayArgs rep_args;
  CLI::App* rep = app.add_subcommand(
      "replay", "Re-apply a trace's publications and check the recorded heights");
  rep->add_option("--trace", rep_args.trace_path, "Input trace (JSON Lines)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  val_args.have_params = val_p->count() > 0;

  try {
    if (mine->parsed()) return run_mine_demo(mine_args);
    if (sim->parsed()) return run_simulate(sim_args);
    if (an->parsed()) return run_analyze(an_args);
    if (val->parsed()) return run_validate(val_args);
    if (ex->parsed()) return run_export(ex_args);
    if (rep->parsed()) return run_replay(rep_args);
  } catch (const ms::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const ms::TraceError& e) {
    std::cerr << "trace error: " << e.what() << '\n';
    return 4;
  } catch (const ms::CodecError& e) {
    std::cerr << "decode error: " << e.what() << '\n';
    return 5;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
