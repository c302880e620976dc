#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "qss/config_io.hpp"
#include "qss/error.hpp"
#include "qss/formulas.hpp"
#include "qss/adversary.hpp"
#include "qss/protocol.hpp"
#include "qss/rng.hpp"
#include "qss/splitting.hpp"

namespace qss::cli {
namespace {

// ---------------------------------------------------------------------------
// CSV

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(fields[i]);
    }
    out_ << "\r\n";
  }

 private:
  std::ostream& out_;
};

std::string num(double v) { return format_number(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string flag(bool v) { return v ? "true" : "false"; }

// ---------------------------------------------------------------------------
// Options shared by the run commands

struct ChannelFlags {
  double survival = 1.0;
  double flip = 0.0;
  double phase = 0.0;
  double depol = 0.0;
  CLI::Option* opts[4] = {};

  void add(CLI::App& app) {
    opts[0] = app.add_option("--survival", survival, "Photon survival probability per leg")->capture_default_str();
    opts[1] = app.add_option("--flip", flip, "Bit-flip probability per leg traversal")->capture_default_str();
    opts[2] = app.add_option("--phase", phase, "Phase-flip probability per leg traversal")->capture_default_str();
    opts[3] = app.add_option("--depol", depol, "Depolarizing replacement probability per leg traversal")->capture_default_str();
  }

  bool given() const {
    for (auto* o : opts) {
      if (o->count() > 0) return true;
    }
    return false;
  }

  // Flags override every leg of a config-provided channel.
  void apply(std::vector<LinkConfig>& links, std::size_t parties) const {
    if (!given()) return;
    if (links.empty()) links.assign(parties, LinkConfig{});
    for (auto& l : links) {
      for (ChannelLeg* leg : {&l.forward, &l.back}) {
        if (opts[0]->count()) leg->survival_prob = survival;
        if (opts[1]->count()) leg->noise.flip_prob = flip;
        if (opts[2]->count()) leg->noise.phase_prob = phase;
        if (opts[3]->count()) leg->noise.depol_prob = depol;
      }
    }
  }
};

struct AttackFlags {
  std::string kind = "none";
  std::string basis = "Z";
  std::vector<std::size_t> targets;
  std::size_t dishonest = 0;
  std::string legs = "forward";
  CLI::Option* kind_opt = nullptr;

  void add(CLI::App& app) {
    kind_opt = app.add_option("--attack", kind, "Attack: none, ir-random, ir-fixed, dishonest")
                   ->check(CLI::IsMember({"none", "ir-random", "ir-fixed", "dishonest"}))
                   ->capture_default_str();
    app.add_option("--attack-basis", basis, "Measurement basis for ir-fixed (Z or X)")
        ->check(CLI::IsMember({"Z", "X"}))
        ->capture_default_str();
    app.add_option("--attack-targets", targets, "Tapped party indices (0-based) for ir-* attacks")->delimiter(',');
    app.add_option("--dishonest-agent", dishonest, "Index of the dishonest agent")->capture_default_str();
    app.add_option("--attack-legs", legs, "Tapped legs: forward, return, both")
        ->check(CLI::IsMember({"forward", "return", "both"}))
        ->capture_default_str();
  }

  void apply(AttackStrategy& attack) const {
    if (kind_opt->count() == 0) return;
    attack = {};
    attack.kind = attack_kind_from_string(kind);
    attack.basis = basis_from_string(basis);
    attack.legs = leg_selection_from_string(legs);
    attack.dishonest_agent = dishonest;
    if (attack.kind != AttackKind::DishonestAgent) attack.targets = targets;
  }
};

struct CommonFlags {
  std::string config;
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "json";
  std::size_t reps = 1;
  std::string transcript;
  bool fail_on_abort = false;
  CLI::Option* seed_opt = nullptr;

  void add(CLI::App& app, const std::string& default_format = "json") {
    format = default_format;
    app.add_option("--config", config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
    seed_opt = app.add_option("--seed", seed, "PRNG seed (default: from the config, else OS entropy)");
    app.add_option("--output,-o", output, "Write results to this file instead of stdout");
    app.add_option("--format", format, "Output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--reps", reps, "Repetitions (seed, seed+1, ...)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--transcript", transcript, "Dump one JSON record per round/photon to this file");
    app.add_flag("--fail-on-abort", fail_on_abort, "Exit with status 2 if any run aborts");
  }
};

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// Resolves the seed from flag, then config, then OS entropy.
std::uint64_t resolve_seed(const CommonFlags& common, std::optional<std::uint64_t> from_config,
                           std::ostream& err) {
  if (common.seed_opt->count() > 0) return common.seed;
  if (from_config) return *from_config;
  const std::uint64_t seed = entropy_seed();
  err << "seed: " << seed << " (drawn from OS entropy)\n";
  return seed;
}

struct RunFlags {
  std::size_t agents = 2;
  std::uint64_t photons = 10000;
  double delta1 = 0.1;
  double delta2 = 0.1;
  double delta = 0.1;
  double eps_max = kDefaultAbortThreshold;
  CLI::Option *agents_opt, *photons_opt, *delta1_opt, *delta2_opt, *delta_opt, *eps_opt;

  void add(CLI::App& app) {
    agents_opt = app.add_option("--agents", agents, "Number of agents")->capture_default_str();
    photons_opt = app.add_option("--photons", photons, "Photons (rounds) per agent")->capture_default_str();
    delta1_opt = app.add_option("--delta1", delta1, "First-check (agent sampling) fraction, 0 < δ ≤ 1/2")
                     ->capture_default_str();
    delta2_opt = app.add_option("--delta2", delta2, "Second-check (dealer sampling) fraction, 0 < δ ≤ 1/2")
                     ->capture_default_str();
    delta_opt = app.add_option("--delta", delta, "Set both check fractions");
    eps_opt = app.add_option("--eps-max", eps_max, "Abort threshold on any check error rate")->capture_default_str();
  }

  void apply(RunConfig& cfg) const {
    if (agents_opt->count()) cfg.n_agents = agents;
    if (photons_opt->count()) cfg.n_photons = photons;
    if (delta_opt->count()) cfg.check1_fraction = cfg.check2_fraction = delta;
    if (delta1_opt->count()) cfg.check1_fraction = delta1;
    if (delta2_opt->count()) cfg.check2_fraction = delta2;
    if (eps_opt->count()) cfg.abort_threshold = eps_max;
  }
};

struct SplitFlags {
  std::string mode = "pingpong";
  std::string secret;
  std::size_t secret_length = 128;
  double ps = 0.1;
  double delta1 = 0.1;
  double redundancy = 0.1;
  double eps_max = kDefaultAbortThreshold;
  std::size_t window = 20;
  std::uint64_t budget = 0;
  std::uint64_t block_size = 0;
  CLI::Option *mode_opt, *secret_opt, *length_opt, *ps_opt, *delta1_opt, *r_opt, *eps_opt, *window_opt,
      *budget_opt, *block_opt;

  void add(CLI::App& app) {
    mode_opt = app.add_option("--mode", mode, "Splitting variant: pingpong or block")
                   ->check(CLI::IsMember({"pingpong", "block"}))
                   ->capture_default_str();
    secret_opt = app.add_option("--secret", secret, "Secret as a string of 0/1");
    length_opt = app.add_option("--secret-length", secret_length, "Length of a random secret drawn from the seed")
                     ->capture_default_str();
    ps_opt = app.add_option("--ps", ps, "Ping-pong control-mode probability p_s")->capture_default_str();
    delta1_opt = app.add_option("--delta1", delta1, "Block-mode check fraction")->capture_default_str();
    r_opt = app.add_option("--redundancy", redundancy, "Redundancy rate r")->capture_default_str();
    eps_opt = app.add_option("--eps-max", eps_max, "Abort threshold on control error rate")->capture_default_str();
    window_opt = app.add_option("--window", window, "Ping-pong: comparable control events between abort checks")
                     ->capture_default_str();
    budget_opt = app.add_option("--budget", budget, "Ping-pong photon budget per sender (0 = automatic)")
                     ->capture_default_str();
    block_opt = app.add_option("--block-size", block_size, "Block size per sender (0 = automatic)")
                    ->capture_default_str();
    secret_opt->excludes(length_opt);
  }

  void apply(SplitConfig& cfg, std::uint64_t seed, bool from_config) const {
    if (mode_opt->count()) cfg.mode = split_mode_from_string(mode);
    if (ps_opt->count()) cfg.control_prob = ps;
    if (delta1_opt->count()) cfg.check_fraction = delta1;
    if (r_opt->count()) cfg.redundancy_rate = redundancy;
    if (eps_opt->count()) cfg.abort_threshold = eps_max;
    if (window_opt->count()) cfg.check_window = window;
    if (budget_opt->count()) cfg.photon_budget = budget;
    if (block_opt->count()) cfg.block_size = block_size;
    if (secret_opt->count()) {
      try {
        cfg.secret = BitString::from_string(secret);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("secret", e.what());
      }
    } else if (length_opt->count() || !from_config) {
      Rng rng(Rng::derive_seed(seed, 0x5ec2e7));
      cfg.secret = BitString::random(secret_length, rng);
    }
  }
};

// ---------------------------------------------------------------------------
// Output

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("output", "cannot open '" + path + "' for writing");
    }
    out_ = file_ ? file_.get() : &fallback;
  }

  std::ostream& stream() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

std::ofstream open_transcript(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("transcript", "cannot open '" + path + "' for writing");
  return f;
}

void write_json_documents(std::ostream& out, const std::vector<Json>& docs) {
  if (docs.size() == 1) {
    out << docs.front().dump(2) << '\n';
    return;
  }
  // One compact document per line.
  for (const Json& d : docs) out << d.dump() << '\n';
}

const std::vector<std::string> kRunCsvHeader = {
    "rep", "seed", "protocol", "agents", "photons", "accepted", "reason", "key_length", "void_rounds",
    "check1_error_max", "check2_error_max", "consistency_error", "b_s", "q_t", "b_t", "eta_nominal", "eta_full"};

std::vector<std::string> run_csv_row(std::size_t rep, const RunReport& r) {
  double c1 = 0.0, c2 = 0.0;
  for (const auto& a : r.agents) {
    c1 = std::max(c1, a.check1.error_rate());
    c2 = std::max(c2, a.check2.error_rate());
  }
  return {num(std::uint64_t{rep}), num(r.seed), r.protocol, num(std::uint64_t{r.agents.size()}),
          num(r.n_photons), flag(r.decision.accepted), r.decision.reason,
          num(std::uint64_t{r.dealer_key.size()}), num(r.void_rounds), num(c1), num(c2),
          num(r.consistency.error_rate()), num(r.efficiency.secret_bits), num(r.efficiency.qubits),
          num(r.efficiency.classical_bits), num(r.eta_nominal), num(r.eta_full)};
}

const std::vector<std::string> kSplitCsvHeader = {
    "rep", "seed", "mode", "secret_length", "accepted", "reason", "recovered_ok", "bob_control_error",
    "charlie_control_error", "encode_ops", "bob_photons", "charlie_photons", "bob_detected", "charlie_detected"};

std::vector<std::string> split_csv_row(std::size_t rep, const SplitReport& r) {
  const auto& b = r.senders[kBob];
  const auto& c = r.senders[kCharlie];
  return {num(std::uint64_t{rep}), num(r.seed), std::string(to_string(r.mode)),
          num(std::uint64_t{r.secret.size()}), flag(r.decision.accepted), r.decision.reason,
          flag(r.recovered == r.secret), num(b.control.error_rate()), num(c.control.error_rate()),
          num(r.encode_ops()), num(b.photons_sent), num(c.photons_sent), flag(b.detection.detected),
          flag(c.detection.detected)};
}

// ---------------------------------------------------------------------------
// Commands

struct RunCommand {
  CommonFlags common;
  RunFlags run;
  ChannelFlags channel;
  AttackFlags attack;
};

RunConfig build_run_config(const RunCommand& cmd, ExperimentKind kind, std::ostream& err) {
  RunConfig cfg;
  std::optional<std::uint64_t> config_seed;
  if (!cmd.common.config.empty()) {
    LoadedConfig loaded = load_config(cmd.common.config);
    if (loaded.kind == ExperimentKind::Split) {
      throw ConfigError("kind", "config describes a split experiment, not " + std::string(to_string(kind)));
    }
    cfg = std::get<RunConfig>(loaded.config);
    if (!loaded.seed_from_entropy) config_seed = cfg.seed;
  }
  cmd.run.apply(cfg);
  cmd.channel.apply(cfg.links, cfg.n_agents);
  cmd.attack.apply(cfg.attack);
  cfg.seed = resolve_seed(cmd.common, config_seed, err);
  cfg.record_transcript = cfg.record_transcript || !cmd.common.transcript.empty();
  cfg.validate();
  return cfg;
}

int run_protocol(const RunCommand& cmd, ExperimentKind kind, std::ostream& out, std::ostream& err) {
  const RunConfig base = build_run_config(cmd, kind, err);
  std::optional<std::ofstream> transcript;
  if (!cmd.common.transcript.empty()) transcript = open_transcript(cmd.common.transcript);

  std::vector<RunReport> reports;
  for (std::size_t rep = 0; rep < cmd.common.reps; ++rep) {
    RunConfig cfg = base;
    cfg.seed = base.seed + rep;
    RunReport r = kind == ExperimentKind::Naive ? run_naive_qss(cfg) : run_keygen(cfg);
    if (transcript) {
      for (const RoundTranscript& round : r.transcript) {
        Json line = round;
        line["rep"] = rep;
        *transcript << line.dump() << '\n';
      }
      r.transcript.clear();
    }
    reports.push_back(std::move(r));
  }

  Output sink(cmd.common.output, out);
  if (cmd.common.format == "csv") {
    CsvWriter csv(sink.stream());
    csv.row(kRunCsvHeader);
    for (std::size_t i = 0; i < reports.size(); ++i) csv.row(run_csv_row(i, reports[i]));
  } else {
    std::vector<Json> docs(reports.begin(), reports.end());
    write_json_documents(sink.stream(), docs);
  }

  const bool aborted = std::any_of(reports.begin(), reports.end(), [](const RunReport& r) { return !r.decision.accepted; });
  return aborted && cmd.common.fail_on_abort ? kAborted : kOk;
}

struct SplitCommand {
  CommonFlags common;
  SplitFlags split;
  ChannelFlags channel;
  AttackFlags attack;
};

int run_split_command(const SplitCommand& cmd, std::ostream& out, std::ostream& err) {
  SplitConfig base;
  std::optional<std::uint64_t> config_seed;
  bool from_config = false;
  if (!cmd.common.config.empty()) {
    LoadedConfig loaded = load_config(cmd.common.config);
    if (loaded.kind != ExperimentKind::Split) throw ConfigError("kind", "config does not describe a split experiment");
    base = std::get<SplitConfig>(loaded.config);
    if (!loaded.seed_from_entropy) config_seed = base.seed;
    from_config = true;
  }
  base.seed = resolve_seed(cmd.common, config_seed, err);
  cmd.split.apply(base, base.seed, from_config);
  cmd.channel.apply(base.links, 2);
  cmd.attack.apply(base.attack);
  base.validate();

  std::optional<std::ofstream> transcript;
  if (!cmd.common.transcript.empty()) transcript = open_transcript(cmd.common.transcript);

  std::vector<SplitReport> reports;
  for (std::size_t rep = 0; rep < cmd.common.reps; ++rep) {
    SplitConfig cfg = base;
    cfg.seed = base.seed + rep;
    SplitReport r = run_split(cfg);
    if (transcript) {
      const Json doc = r;
      for (std::size_t s = 0; s < doc["senders"].size(); ++s) {
        for (Json photon : doc["senders"][s]["photons"]) {
          photon["rep"] = rep;
          photon["sender"] = s;
          *transcript << photon.dump() << '\n';
        }
      }
    }
    reports.push_back(std::move(r));
  }

  Output sink(cmd.common.output, out);
  if (cmd.common.format == "csv") {
    CsvWriter csv(sink.stream());
    csv.row(kSplitCsvHeader);
    for (std::size_t i = 0; i < reports.size(); ++i) csv.row(split_csv_row(i, reports[i]));
  } else {
    std::vector<Json> docs(reports.begin(), reports.end());
    write_json_documents(sink.stream(), docs);
  }
  const bool aborted = std::any_of(reports.begin(), reports.end(), [](const SplitReport& r) { return !r.decision.accepted; });
  return aborted && cmd.common.fail_on_abort ? kAborted : kOk;
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepCommand {
  RunCommand base;
  std::string param = "delta";
  std::vector<double> values;
};

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats summarize(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

RunConfig sweep_cell_config(RunConfig cfg, const std::string& param, double value) {
  if (param == "delta") {
    cfg.check1_fraction = cfg.check2_fraction = value;
    return cfg;
  }
  if (cfg.links.empty()) cfg.links.assign(cfg.n_agents, LinkConfig{});
  for (auto& l : cfg.links) {
    for (ChannelLeg* leg : {&l.forward, &l.back}) {
      if (param == "depol") leg->noise.depol_prob = value;
      if (param == "flip") leg->noise.flip_prob = value;
      if (param == "phase") leg->noise.phase_prob = value;
    }
  }
  return cfg;
}

int run_sweep(const SweepCommand& cmd, std::ostream& out, std::ostream& err) {
  if (cmd.values.empty()) throw ConfigError("values", "a sweep needs at least one value");
  const RunConfig base = build_run_config(cmd.base, ExperimentKind::Keygen, err);
  const std::size_t reps = cmd.base.common.reps;
  const std::size_t cells = cmd.values.size();

  std::vector<RunConfig> configs;
  for (double v : cmd.values) {
    RunConfig cfg = sweep_cell_config(base, cmd.param, v);
    cfg.record_transcript = false;
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("values", "value " + format_number(v) + " is invalid for " + cmd.param + ": " + e.what());
    }
    configs.push_back(cfg);
  }

  // Each (cell, rep) job writes its own slot, so the result does not depend
  // on scheduling.
  std::vector<RunReport> results(cells * reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < results.size(); job = next++) {
      RunConfig cfg = configs[job / reps];
      cfg.seed = base.seed + job;  // base + cell * reps + rep
      results[job] = run_keygen(cfg);
      results[job].attack.learned_bits.clear();
    }
  };
  const unsigned n_threads = std::min<unsigned>(worker_threads(), static_cast<unsigned>(results.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Output sink(cmd.base.common.output, out);
  Json rows = Json::array();
  CsvWriter csv(sink.stream());
  const bool as_csv = cmd.base.common.format == "csv";
  if (as_csv) {
    if (cmd.param == "delta") {
      csv.row({"delta", "eta_theory", "eta_empirical_mean", "eta_empirical_std"});
    } else {
      csv.row({cmd.param, "check1_error_mean", "check2_error_mean", "abort_fraction", "eta_empirical_mean",
               "eta_empirical_std"});
    }
  }
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<double> eta, c1, c2;
    std::size_t aborted = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const RunReport& r = results[c * reps + rep];
      eta.push_back(r.eta_nominal);
      double e1 = 0.0, e2 = 0.0;
      for (const auto& a : r.agents) {
        e1 = std::max(e1, a.check1.error_rate());
        e2 = std::max(e2, a.check2.error_rate());
      }
      c1.push_back(e1);
      c2.push_back(e2);
      aborted += !r.decision.accepted;
    }
    const Stats s = summarize(eta);
    const double v = cmd.values[c];
    const double abort_fraction = static_cast<double>(aborted) / static_cast<double>(reps);
    if (cmd.param == "delta") {
      const double theory = efficiency_vs_delta(v);
      if (as_csv) {
        csv.row({num(v), num(theory), num(s.mean), num(s.stddev)});
      } else {
        rows.push_back({{"delta", v}, {"eta_theory", theory}, {"eta_empirical_mean", s.mean},
                        {"eta_empirical_std", s.stddev}, {"reps", reps}});
      }
    } else if (as_csv) {
      csv.row({num(v), num(summarize(c1).mean), num(summarize(c2).mean), num(abort_fraction), num(s.mean),
               num(s.stddev)});
    } else {
      rows.push_back({{cmd.param, v}, {"check1_error_mean", summarize(c1).mean},
                      {"check2_error_mean", summarize(c2).mean}, {"abort_fraction", abort_fraction},
                      {"eta_empirical_mean", s.mean}, {"eta_empirical_std", s.stddev}, {"reps", reps}});
    }
  }
  if (!as_csv) sink.stream() << rows.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// Formulas

struct FormulasCommand {
  bool detection = false;
  bool info = false;
  bool eff = false;
  bool table = false;
  bool eta = false;
  std::uint64_t n = 10000;
  double ps = 0.1;
  double eps = 0.1;
  double delta = 0.1;
  double bs = 1.0, qt = 1.0, bt = 0.0;
  std::string format = "csv";
  std::string output;
};

int run_formulas(const FormulasCommand& cmd, std::ostream& out) {
  if (!(cmd.detection || cmd.info || cmd.eff || cmd.table || cmd.eta)) {
    throw ConfigError("formulas", "choose at least one of --detection, --info, --efficiency, --eta, --table");
  }
  std::vector<std::pair<std::string, double>> rows;
  try {
    if (cmd.detection) {
      const SurvivalProbability p = detection_survival(cmd.n, cmd.ps, cmd.eps);
      rows.emplace_back("detection_survival", p.value);
      rows.emplace_back("detection_survival_log10", p.log10());
    }
    if (cmd.info) rows.emplace_back("information_bound", information_bound(cmd.eps));
    if (cmd.eff) rows.emplace_back("efficiency_vs_delta", efficiency_vs_delta(cmd.delta));
    if (cmd.eta) rows.emplace_back("efficiency", efficiency({cmd.bs, cmd.qt, cmd.bt}));
    if (cmd.table) {
      for (const ComparisonRow& row : comparison_table(cmd.delta)) rows.emplace_back("eta_" + row.protocol, row.eta);
    }
  } catch (const std::domain_error& e) {
    throw ConfigError("formulas", e.what());
  }

  Output sink(cmd.output, out);
  if (cmd.format == "json") {
    Json doc = Json::object();
    for (const auto& [k, v] : rows) doc[k] = v;
    sink.stream() << doc.dump(2) << '\n';
  } else {
    CsvWriter csv(sink.stream());
    csv.row({"quantity", "value"});
    for (const auto& [k, v] : rows) csv.row({k, num(v)});
  }
  return kOk;
}

struct ReferenceEntry {
  const char* key;
  const char* applies;
  const char* fallback;
  const char* meaning;
};

constexpr ReferenceEntry kReference[] = {
    {"kind", "all", "\"keygen\"", "keygen, naive or split"},
    {"seed", "all", "OS entropy (echoed in the report)", "PRNG seed"},
    {"agents", "keygen, naive", "2", "number of agents (naive requires 2)"},
    {"photons", "keygen, naive", "10000", "photons per agent"},
    {"delta1", "all", "0.1", "first-check fraction (keygen) / block check fraction (split); 0 < δ ≤ 1/2"},
    {"delta2", "keygen, naive", "0.1", "second-check fraction (keygen) / subset fraction (naive); 0 < δ ≤ 1/2"},
    {"eps_max", "all", "0.11", "abort threshold on any check error rate"},
    {"transcript", "keygen, naive", "false", "keep per-round transcripts in the report"},
    {"channel", "all", "ideal", "{survival, flip, phase, depol} applied to every leg"},
    {"links", "all", "ideal", "per-party [{forward: {...}, return: {...}}]; excludes channel"},
    {"attack.kind", "all", "\"none\"", "none, ir-random, ir-fixed, dishonest"},
    {"attack.basis", "all", "\"Z\"", "basis for ir-fixed"},
    {"attack.targets", "all", "[]", "tapped party indices for ir-* attacks"},
    {"attack.dishonest_agent", "all", "0", "index of the dishonest agent"},
    {"attack.legs", "all", "\"forward\"", "forward, return or both"},
    {"mode", "split", "\"pingpong\"", "pingpong or block"},
    {"secret", "split", "-", "secret as a 0/1 string"},
    {"secret_length", "split", "-", "length of a random secret derived from the seed"},
    {"ps", "split", "0.1", "ping-pong control-mode probability, 0 < p_s < 1"},
    {"redundancy", "split", "0.1", "redundancy rate, 0 <= r < 1"},
    {"window", "split", "20", "ping-pong comparable control events between abort checks"},
    {"budget", "split", "0 (automatic)", "ping-pong photon budget per sender"},
    {"block_size", "split", "0 (automatic)", "block size per sender"},
};

}  // namespace

std::string config_reference() {
  std::ostringstream s;
  s << "# Config file reference\n\n"
    << "Config files are JSON objects. Unknown keys are rejected. Command-line flags override\n"
    << "values from the file.\n\n"
    << "| key | applies to | default | meaning |\n|---|---|---|---|\n";
  for (const auto& e : kReference) {
    s << "| `" << e.key << "` | " << e.applies << " | " << e.fallback << " | " << e.meaning << " |\n";
  }
  s << "\nChannel legs take `survival` (default 1), `flip`, `phase` and `depol` (default 0).\n";
  return s.str();
}

unsigned worker_threads() {
  if (const char* env = std::getenv("QSS_SIM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bidirectional quantum secret sharing simulator"};
  app.name(args.empty() ? "qss-sim" : args.front());
  app.require_subcommand(1);

  RunCommand keygen;
  auto* keygen_cmd = app.add_subcommand("keygen", "Multi-party key generation with bidirectional photons");
  keygen.common.add(*keygen_cmd);
  keygen.run.add(*keygen_cmd);
  keygen.channel.add(*keygen_cmd);
  keygen.attack.add(*keygen_cmd);

  RunCommand naive;
  auto* naive_cmd = app.add_subcommand("naive", "Baseline: one BB84 session per agent, XOR-combined");
  naive.common.add(*naive_cmd);
  naive.run.add(*naive_cmd);
  naive.channel.add(*naive_cmd);
  naive.attack.add(*naive_cmd);

  SplitCommand split;
  auto* split_cmd = app.add_subcommand("split", "Secret splitting (ping-pong or block variant)");
  split.common.add(*split_cmd);
  split.split.add(*split_cmd);
  split.channel.add(*split_cmd);
  split.attack.add(*split_cmd);

  SweepCommand sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Repeated keygen runs over a parameter grid");
  sweep.base.common.add(*sweep_cmd, "csv");
  sweep.base.run.add(*sweep_cmd);
  sweep.base.channel.add(*sweep_cmd);
  sweep.base.attack.add(*sweep_cmd);
  sweep_cmd->add_option("--param", sweep.param, "Swept parameter: delta, depol, flip, phase")
      ->check(CLI::IsMember({"delta", "depol", "flip", "phase"}))
      ->capture_default_str();
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated values")->delimiter(',')->required();

  FormulasCommand formulas;
  auto* formulas_cmd = app.add_subcommand("formulas", "Closed-form quantities");
  formulas_cmd->add_flag("--detection", formulas.detection, "Eavesdropper survival probability P(n, p_s, eps)");
  formulas_cmd->add_flag("--info", formulas.info, "Information bound I0(eps)");
  formulas_cmd->add_flag("--efficiency", formulas.eff, "Efficiency (1 - delta)^2");
  formulas_cmd->add_flag("--eta", formulas.eta, "Total efficiency b_s / (q_t + b_t)");
  formulas_cmd->add_flag("--table", formulas.table, "Efficiency comparison table at --delta");
  formulas_cmd->add_option("--n", formulas.n, "Eavesdropped bits")->capture_default_str();
  formulas_cmd->add_option("--ps", formulas.ps, "Control probability")->capture_default_str();
  formulas_cmd->add_option("--eps", formulas.eps, "Error rate")->capture_default_str();
  formulas_cmd->add_option("--delta", formulas.delta, "Check fraction")->capture_default_str();
  formulas_cmd->add_option("--bs", formulas.bs, "Secret bits")->capture_default_str();
  formulas_cmd->add_option("--qt", formulas.qt, "Qubits")->capture_default_str();
  formulas_cmd->add_option("--bt", formulas.bt, "Classical bits")->capture_default_str();
  formulas_cmd->add_option("--format", formulas.format, "Output format: csv or json")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  formulas_cmd->add_option("--output,-o", formulas.output, "Write results to this file");

  auto* reference_cmd = app.add_subcommand("reference", "Print the config file reference (Markdown)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (keygen_cmd->parsed()) return run_protocol(keygen, ExperimentKind::Keygen, out, err);
    if (naive_cmd->parsed()) return run_protocol(naive, ExperimentKind::Naive, out, err);
    if (split_cmd->parsed()) return run_split_command(split, out, err);
    if (sweep_cmd->parsed()) return run_sweep(sweep, out, err);
    if (formulas_cmd->parsed()) return run_formulas(formulas, out);
    if (reference_cmd->parsed()) {
      out << config_reference();
      return kOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace qss::cli
