#include "qss/config_io.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "qss/error.hpp"
#include "qss/rng.hpp"

namespace qss {
namespace {

// Reads the members of one JSON object, tracking which keys were consumed so
// that unknown keys can be rejected by name.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(prefix_.empty() ? "config" : prefix_, "expected an object");
  }

  std::string field(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback) {
    const Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) throw ConfigError(field(key), "expected a number");
    return v->get<double>();
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
      throw ConfigError(field(key), "expected a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) throw ConfigError(field(key), "expected a string");
    return v->get<std::string>();
  }

  // Runs `parse` on a string value, turning std::invalid_argument into a
  // ConfigError for this key.
  template <typename T, typename Parse>
  T parsed(const std::string& key, T fallback, Parse parse) {
    const Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) throw ConfigError(field(key), "expected a string");
    try {
      return parse(v->get<std::string>());
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field(key), e.what());
    }
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(field(key), "unknown field");
    }
  }

 private:
  const Json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

ChannelLeg leg_from_json(const Json& j, const std::string& prefix) {
  ObjectReader r(j, prefix);
  ChannelLeg leg;
  leg.survival_prob = r.number("survival", 1.0);
  leg.noise.flip_prob = r.number("flip", 0.0);
  leg.noise.phase_prob = r.number("phase", 0.0);
  leg.noise.depol_prob = r.number("depol", 0.0);
  r.reject_unknown();
  return leg;
}

std::vector<LinkConfig> links_from(ObjectReader& r, std::size_t parties) {
  const Json* channel = r.find("channel");
  const Json* links = r.find("links");
  if (channel && links) throw ConfigError("links", "give either 'channel' or 'links', not both");
  std::vector<LinkConfig> out;
  if (channel) {
    const ChannelLeg leg = leg_from_json(*channel, "channel");
    leg.validate("channel");
    if (!leg.ideal()) out.assign(parties, LinkConfig{leg, leg});
  } else if (links) {
    if (!links->is_array()) throw ConfigError("links", "expected an array");
    for (std::size_t i = 0; i < links->size(); ++i) {
      const std::string prefix = "links[" + std::to_string(i) + "]";
      ObjectReader lr((*links)[i], prefix);
      LinkConfig link;
      if (const Json* f = lr.find("forward")) link.forward = leg_from_json(*f, prefix + ".forward");
      if (const Json* b = lr.find("return")) link.back = leg_from_json(*b, prefix + ".return");
      lr.reject_unknown();
      out.push_back(link);
    }
  }
  return out;
}

AttackStrategy attack_from(ObjectReader& r) {
  const Json* j = r.find("attack");
  if (j == nullptr) return {};
  ObjectReader a(*j, "attack");
  AttackStrategy s;
  s.kind = a.parsed("kind", AttackKind::None, attack_kind_from_string);
  s.basis = a.parsed("basis", Basis::Z, basis_from_string);
  s.legs = a.parsed("legs", LegSelection::Forward, leg_selection_from_string);
  s.dishonest_agent = a.count("dishonest_agent", 0);
  if (const Json* t = a.find("targets")) {
    if (!t->is_array()) throw ConfigError("attack.targets", "expected an array of agent indices");
    for (const Json& v : *t) {
      if (!v.is_number_unsigned()) throw ConfigError("attack.targets", "expected non-negative integers");
      s.targets.push_back(v.get<std::size_t>());
    }
  }
  a.reject_unknown();
  return s;
}

std::uint64_t seed_from(ObjectReader& r, bool& from_entropy) {
  if (r.find("seed") != nullptr) {
    from_entropy = false;
    return r.count("seed", 0);
  }
  from_entropy = true;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

RunConfig run_config_from(ObjectReader& r, bool& from_entropy) {
  RunConfig cfg;
  cfg.n_agents = r.count("agents", cfg.n_agents);
  cfg.n_photons = r.count("photons", cfg.n_photons);
  cfg.check1_fraction = r.number("delta1", cfg.check1_fraction);
  cfg.check2_fraction = r.number("delta2", cfg.check2_fraction);
  cfg.abort_threshold = r.number("eps_max", cfg.abort_threshold);
  cfg.record_transcript = r.boolean("transcript", false);
  cfg.links = links_from(r, cfg.n_agents);
  cfg.attack = attack_from(r);
  cfg.seed = seed_from(r, from_entropy);
  r.reject_unknown();
  cfg.validate();
  return cfg;
}

SplitConfig split_config_from(ObjectReader& r, bool& from_entropy) {
  SplitConfig cfg;
  cfg.mode = r.parsed("mode", SplitMode::PingPong, split_mode_from_string);
  cfg.control_prob = r.number("ps", cfg.control_prob);
  cfg.check_fraction = r.number("delta1", cfg.check_fraction);
  cfg.redundancy_rate = r.number("redundancy", cfg.redundancy_rate);
  cfg.abort_threshold = r.number("eps_max", cfg.abort_threshold);
  cfg.check_window = r.count("window", cfg.check_window);
  cfg.photon_budget = r.count("budget", 0);
  cfg.block_size = r.count("block_size", 0);
  cfg.links = links_from(r, 2);
  cfg.attack = attack_from(r);
  cfg.seed = seed_from(r, from_entropy);
  const bool has_secret = r.has("secret");
  cfg.secret = r.parsed("secret", BitString{}, [](const std::string& s) { return BitString::from_string(s); });
  const std::uint64_t length = r.count("secret_length", 0);
  if (has_secret && length != 0) throw ConfigError("secret_length", "give either 'secret' or 'secret_length'");
  if (!has_secret && length != 0) {
    // Random secret, reproducible from the seed.
    Rng rng(Rng::derive_seed(cfg.seed, 0x5ec2e7));
    cfg.secret = BitString::random(length, rng);
  }
  r.reject_unknown();
  cfg.validate();
  return cfg;
}

Json leg_json(const ChannelLeg& leg) {
  return {{"survival", leg.survival_prob},
          {"flip", leg.noise.flip_prob},
          {"phase", leg.noise.phase_prob},
          {"depol", leg.noise.depol_prob}};
}

Json links_json(const std::vector<LinkConfig>& links) {
  Json out = Json::array();
  for (const auto& l : links) out.push_back({{"forward", leg_json(l.forward)}, {"return", leg_json(l.back)}});
  return out;
}

Json tally_json(const CheckTally& t) {
  return {{"announced", t.announced},
          {"comparable", t.comparable},
          {"mismatches", t.mismatches},
          {"error_rate", t.error_rate()}};
}

CheckTally tally_from(const Json& j) {
  return {j.at("announced").get<std::uint64_t>(), j.at("comparable").get<std::uint64_t>(),
          j.at("mismatches").get<std::uint64_t>()};
}

Json counts_json(const EfficiencyCounts& c) {
  return {{"b_s", c.secret_bits}, {"q_t", c.qubits}, {"b_t", c.classical_bits}};
}

EfficiencyCounts counts_from(const Json& j) {
  return {j.at("b_s").get<std::uint64_t>(), j.at("q_t").get<std::uint64_t>(),
          j.at("b_t").get<std::uint64_t>()};
}

Json decision_json(const Decision& d) {
  return {{"accepted", d.accepted}, {"reason", d.reason}};
}

Decision decision_from(const Json& j) {
  return {j.at("accepted").get<bool>(), j.at("reason").get<std::string>()};
}

std::string prep_text(const PrepRecord& p) {
  return std::string(to_string(p.basis)) + (p.bit ? "1" : "0");
}

PrepRecord prep_from(const Json& j) {
  const auto s = j.get<std::string>();
  if (s.size() != 2 || (s[1] != '0' && s[1] != '1')) throw std::invalid_argument("bad prep record '" + s + "'");
  return {basis_from_string(s.substr(0, 1)), static_cast<Bit>(s[1] - '0')};
}

BitString bits_from(const Json& j) { return BitString::from_string(j.get<std::string>()); }

template <typename T, typename F>
std::optional<T> optional_from(const Json& j, const char* key, F convert) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return convert(*it);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Keygen: return "keygen";
    case ExperimentKind::Naive: return "naive";
    case ExperimentKind::Split: return "split";
  }
  return "keygen";
}

ExperimentKind experiment_kind_from_string(std::string_view s) {
  if (s == "keygen") return ExperimentKind::Keygen;
  if (s == "naive") return ExperimentKind::Naive;
  if (s == "split") return ExperimentKind::Split;
  throw std::invalid_argument("unknown experiment kind '" + std::string(s) +
                              "' (expected keygen, naive or split)");
}

LoadedConfig parse_config(const Json& doc) {
  ObjectReader r(doc, "");
  LoadedConfig out;
  out.kind = r.parsed("kind", ExperimentKind::Keygen, experiment_kind_from_string);
  if (out.kind == ExperimentKind::Split) {
    out.config = split_config_from(r, out.seed_from_entropy);
  } else {
    out.config = run_config_from(r, out.seed_from_entropy);
  }
  return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config", std::string("parse error in '") + path.string() + "': " + e.what());
  }
  return parse_config(doc);
}

RunConfig run_config_from_json(const Json& doc) {
  ObjectReader r(doc, "");
  r.find("kind");
  bool from_entropy = false;
  return run_config_from(r, from_entropy);
}

SplitConfig split_config_from_json(const Json& doc) {
  ObjectReader r(doc, "");
  r.find("kind");
  bool from_entropy = false;
  return split_config_from(r, from_entropy);
}

void to_json(Json& j, const ChannelLeg& leg) { j = leg_json(leg); }

void to_json(Json& j, const AttackStrategy& a) {
  j = {{"kind", to_string(a.kind)}, {"legs", to_string(a.legs)}};
  if (a.kind == AttackKind::InterceptResendFixedBasis) j["basis"] = to_string(a.basis);
  if (a.kind == AttackKind::DishonestAgent) {
    j["dishonest_agent"] = a.dishonest_agent;
  } else if (a.kind != AttackKind::None) {
    j["targets"] = a.targets;
  }
}

void to_json(Json& j, const RunConfig& cfg) {
  j = {{"agents", cfg.n_agents},  {"photons", cfg.n_photons},
       {"delta1", cfg.check1_fraction}, {"delta2", cfg.check2_fraction},
       {"eps_max", cfg.abort_threshold}, {"seed", cfg.seed},
       {"attack", cfg.attack}};
  if (!cfg.links.empty()) j["links"] = links_json(cfg.links);
  if (cfg.record_transcript) j["transcript"] = true;
}

void to_json(Json& j, const SplitConfig& cfg) {
  j = {{"kind", "split"},
       {"mode", to_string(cfg.mode)},
       {"secret", cfg.secret.to_string()},
       {"ps", cfg.control_prob},
       {"delta1", cfg.check_fraction},
       {"redundancy", cfg.redundancy_rate},
       {"eps_max", cfg.abort_threshold},
       {"window", cfg.check_window},
       {"seed", cfg.seed},
       {"attack", cfg.attack}};
  if (cfg.photon_budget != 0) j["budget"] = cfg.photon_budget;
  if (cfg.block_size != 0) j["block_size"] = cfg.block_size;
  if (!cfg.links.empty()) j["links"] = links_json(cfg.links);
}

void to_json(Json& j, const AttackLedger& ledger) {
  Json bits = Json::array();
  for (const auto& r : ledger.learned_bits) {
    bits.push_back({r.round, r.leg.party, to_string(r.leg.direction), to_string(r.basis), r.guessed,
                    prep_text(r.reference)});
  }
  j = {{"intercept_count", ledger.intercept_count()},
       {"guess_accuracy", ledger.guess_accuracy()},
       {"learned_bits", std::move(bits)}};
}

void from_json(const Json& j, AttackLedger& ledger) {
  ledger.learned_bits.clear();
  for (const Json& e : j.at("learned_bits")) {
    InterceptRecord r;
    r.round = e.at(0).get<std::uint64_t>();
    r.leg = {e.at(1).get<std::size_t>(), direction_from_string(e.at(2).get<std::string>())};
    r.basis = basis_from_string(e.at(3).get<std::string>());
    r.guessed = e.at(4).get<Bit>();
    r.reference = prep_from(e.at(5));
    ledger.learned_bits.push_back(r);
  }
}

void to_json(Json& j, const RoundTranscript& round) {
  Json agents = Json::array();
  for (const AgentRound& a : round.agents) {
    Json e = {{"prep", prep_text(a.prep)}, {"lost", a.lost}};
    if (const auto* c = std::get_if<AgentCheck>(&a.event)) {
      e["check"] = {{"basis", to_string(c->basis)}, {"outcome", c->outcome}};
    } else {
      e["op"] = to_string(std::get<EncodeOp>(a.event));
    }
    e["dealer_outcome"] = a.dealer_outcome ? Json(*a.dealer_outcome) : Json(nullptr);
    agents.push_back(std::move(e));
  }
  j = {{"round", round.round}, {"void", round.void_round}, {"check2", round.check2}, {"agents", std::move(agents)}};
}

void from_json(const Json& j, RoundTranscript& round) {
  round.round = j.at("round").get<std::uint64_t>();
  round.void_round = j.at("void").get<bool>();
  round.check2 = j.at("check2").get<bool>();
  round.agents.clear();
  for (const Json& e : j.at("agents")) {
    AgentRound a;
    a.prep = prep_from(e.at("prep"));
    a.lost = e.at("lost").get<bool>();
    if (e.contains("check")) {
      const Json& c = e.at("check");
      a.event = AgentCheck{basis_from_string(c.at("basis").get<std::string>()), c.at("outcome").get<Bit>()};
    } else {
      a.event = op_from_string(e.at("op").get<std::string>());
    }
    a.dealer_outcome = optional_from<Bit>(e, "dealer_outcome", [](const Json& v) { return v.get<Bit>(); });
    round.agents.push_back(a);
  }
}

void to_json(Json& j, const RunReport& report) {
  Json agents = Json::array();
  for (const AgentReport& a : report.agents) {
    agents.push_back({{"key", a.key.to_string()},
                      {"dealer_key", a.dealer_key.to_string()},
                      {"check1", tally_json(a.check1)},
                      {"check2", tally_json(a.check2)},
                      {"efficiency", counts_json(a.efficiency)}});
  }
  j = {{"protocol", report.protocol},
       {"seed", report.seed},
       {"n_photons", report.n_photons},
       {"void_rounds", report.void_rounds},
       {"decision", decision_json(report.decision)},
       {"eta_nominal", report.eta_nominal},
       {"eta_full", report.eta_full},
       {"efficiency", counts_json(report.efficiency)},
       {"dealer_key", report.dealer_key.to_string()},
       {"consistency", tally_json(report.consistency)},
       {"agents", std::move(agents)},
       {"attack", report.attack}};
  if (!report.transcript.empty()) j["transcript"] = report.transcript;
}

void from_json(const Json& j, RunReport& report) {
  report.protocol = j.at("protocol").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.n_photons = j.at("n_photons").get<std::uint64_t>();
  report.void_rounds = j.at("void_rounds").get<std::uint64_t>();
  report.decision = decision_from(j.at("decision"));
  report.eta_nominal = j.at("eta_nominal").get<double>();
  report.eta_full = j.at("eta_full").get<double>();
  report.efficiency = counts_from(j.at("efficiency"));
  report.dealer_key = bits_from(j.at("dealer_key"));
  report.consistency = tally_from(j.at("consistency"));
  report.agents.clear();
  for (const Json& a : j.at("agents")) {
    report.agents.push_back({bits_from(a.at("key")), bits_from(a.at("dealer_key")),
                             tally_from(a.at("check1")), tally_from(a.at("check2")),
                             counts_from(a.at("efficiency"))});
  }
  report.attack = j.at("attack").get<AttackLedger>();
  report.transcript = j.contains("transcript") ? j.at("transcript").get<std::vector<RoundTranscript>>()
                                               : std::vector<RoundTranscript>{};
}

void to_json(Json& j, const SplitReport& report) {
  Json senders = Json::array();
  for (const SenderReport& s : report.senders) {
    Json photons = Json::array();
    for (const PhotonRecord& p : s.photons) {
      Json e = {{"index", p.index}, {"prep", prep_text(p.prep)}, {"mode", to_string(p.mode)}};
      if (p.alice_basis) e["alice_basis"] = to_string(*p.alice_basis);
      if (p.alice_outcome) e["alice_outcome"] = *p.alice_outcome;
      if (p.op) e["op"] = to_string(*p.op);
      if (p.decoded) e["decoded"] = *p.decoded;
      photons.push_back(std::move(e));
    }
    senders.push_back({{"expected", s.expected.to_string()},
                       {"share", s.share.to_string()},
                       {"control", tally_json(s.control)},
                       {"photons_sent", s.photons_sent},
                       {"encode_ops", s.encode_ops},
                       {"message_bits_delivered", s.message_bits_delivered},
                       {"detection",
                        {{"detected", s.detection.detected},
                         {"message_bits_before_detection", s.detection.message_bits_before_detection},
                         {"control_events_before_detection", s.detection.control_events_before_detection}}},
                       {"photons", std::move(photons)}});
  }
  Json log = Json::array();
  for (const Announcement& a : report.classical_log) {
    Json e = {{"kind", to_string(a.kind)}, {"sender", a.sender}, {"photon", a.photon}};
    if (a.state) e["state"] = prep_text(*a.state);
    if (!a.positions.empty()) e["positions"] = a.positions;
    log.push_back(std::move(e));
  }
  j = {{"mode", to_string(report.mode)},
       {"seed", report.seed},
       {"secret", report.secret.to_string()},
       {"recovered", report.recovered.to_string()},
       {"decision", decision_json(report.decision)},
       {"encode_ops", report.encode_ops()},
       {"senders", std::move(senders)},
       {"classical_log", std::move(log)},
       {"attack", report.attack}};
}

void from_json(const Json& j, SplitReport& report) {
  report.mode = split_mode_from_string(j.at("mode").get<std::string>());
  report.seed = j.at("seed").get<std::uint64_t>();
  report.secret = bits_from(j.at("secret"));
  report.recovered = bits_from(j.at("recovered"));
  report.decision = decision_from(j.at("decision"));
  report.senders.clear();
  for (const Json& s : j.at("senders")) {
    SenderReport out;
    out.expected = bits_from(s.at("expected"));
    out.share = bits_from(s.at("share"));
    out.control = tally_from(s.at("control"));
    out.photons_sent = s.at("photons_sent").get<std::uint64_t>();
    out.encode_ops = s.at("encode_ops").get<std::uint64_t>();
    out.message_bits_delivered = s.at("message_bits_delivered").get<std::uint64_t>();
    const Json& d = s.at("detection");
    out.detection = {d.at("detected").get<bool>(), d.at("message_bits_before_detection").get<std::uint64_t>(),
                     d.at("control_events_before_detection").get<std::uint64_t>()};
    for (const Json& e : s.at("photons")) {
      PhotonRecord p;
      p.index = e.at("index").get<std::uint64_t>();
      p.prep = prep_from(e.at("prep"));
      p.mode = photon_mode_from_string(e.at("mode").get<std::string>());
      p.alice_basis = optional_from<Basis>(e, "alice_basis", [](const Json& v) { return basis_from_string(v.get<std::string>()); });
      p.alice_outcome = optional_from<Bit>(e, "alice_outcome", [](const Json& v) { return v.get<Bit>(); });
      p.op = optional_from<EncodeOp>(e, "op", [](const Json& v) { return op_from_string(v.get<std::string>()); });
      p.decoded = optional_from<Bit>(e, "decoded", [](const Json& v) { return v.get<Bit>(); });
      out.photons.push_back(p);
    }
    report.senders.push_back(std::move(out));
  }
  report.classical_log.clear();
  for (const Json& e : j.at("classical_log")) {
    Announcement a;
    a.kind = announcement_kind_from_string(e.at("kind").get<std::string>());
    a.sender = e.at("sender").get<std::size_t>();
    a.photon = e.at("photon").get<std::uint64_t>();
    a.state = optional_from<PrepRecord>(e, "state", prep_from);
    if (e.contains("positions")) a.positions = e.at("positions").get<std::vector<std::uint64_t>>();
    report.classical_log.push_back(std::move(a));
  }
  report.attack = j.at("attack").get<AttackLedger>();
}

}  // namespace qss
