// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracle/outcome_tree.hpp"
#include "qss/adversary.hpp"
#include "qss/error.hpp"
#include "qss/estimators.hpp"
#include "qss/formulas.hpp"
#include "qss/protocol.hpp"
#include "qss/rng.hpp"
#include "qss/splitting.hpp"

namespace {

using namespace qss;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double v) { return format_number(v); }

// 1. Information bound values.
void formula_information(Outcome& o) {
  const double i01 = information_bound(0.1);
  o.require(std::abs(i01 - 0.4690) <= 0.0001, "I0(0.1) = 0.4690 +- 0.0001");
  o.require(information_bound(0.0) == 0.0, "I0(0) = 0");
  o.require(information_bound(0.5) == 1.0, "I0(0.5) = 1");
  o.detail << " I0(0.1)=" << fmt(i01) << " I0(0)=" << fmt(information_bound(0.0))
           << " I0(0.5)=" << fmt(information_bound(0.5));
}

// 2. Eavesdropper survival probability.
void formula_detection(Outcome& o) {
  const SurvivalProbability p = detection_survival(10000, 0.1, 0.1);
  o.require(p.value >= 1e-49 && p.value <= 1e-47, "P in [1e-49, 1e-47]");
  o.require(std::isfinite(p.log10()) && p.log10() >= -49 && p.log10() <= -47, "log10 P in [-49, -47]");
  o.detail << " P(10000,0.1,0.1)=" << fmt(p.value) << " log10=" << fmt(p.log10());
}

// 3. Efficiency constants.
void efficiency_constants(Outcome& o) {
  const auto rows = comparison_table(0.1);
  const std::array<std::pair<const char*, double>, 4> expected = {
      {{"BB84", 0.25}, {"HBB99", 0.20}, {"KKI", 0.20}, {"naive-QKD-QSS", 0.125}}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    o.require(rows.size() > i && rows[i].protocol == expected[i].first && rows[i].eta == expected[i].second,
              std::string(expected[i].first) + " = " + fmt(expected[i].second));
    if (rows.size() > i) o.detail << ' ' << rows[i].protocol << '=' << fmt(rows[i].eta);
  }
  o.require(efficiency_vs_delta(0.5) == 0.25, "eta(0.5) = 0.25");
  o.detail << " eta(delta=0.5)=" << fmt(efficiency_vs_delta(0.5));
}

// 4. Ideal keygen runs.
void ideal_runs(Outcome& o) {
  for (std::size_t agents : {2u, 3u, 4u}) {
    RunConfig cfg;
    cfg.n_agents = agents;
    cfg.n_photons = 100000;
    cfg.seed = 4000 + agents;
    const RunReport r = run_keygen(cfg);
    const std::string tag = "n_agents=" + std::to_string(agents) + ": ";
    o.require(r.decision.accepted, tag + "accepted");
    const double p = (1 - cfg.check1_fraction) * (1 - cfg.check2_fraction);
    const double mean = cfg.n_photons * p;
    const double sigma = std::sqrt(cfg.n_photons * p * (1 - p));
    std::size_t common = r.agents[0].key.size();
    double worst_z = 0.0;
    for (std::size_t i = 0; i < agents; ++i) {
      const AgentReport& a = r.agents[i];
      o.require(a.check1.comparable > 0 && a.check1.error_rate() == 0.0, tag + "check-1 error 0");
      o.require(a.check2.comparable > 0 && a.check2.error_rate() == 0.0, tag + "check-2 error 0");
      const double z = std::abs(static_cast<double>(a.key.size()) - mean) / sigma;
      worst_z = std::max(worst_z, z);
      o.require(z <= 3.0, tag + "key length within 3 sigma");
      common = std::min(common, a.key.size());
    }
    BitString xored(common);
    for (const auto& a : r.agents) xored ^= a.key.prefix(common);
    o.require(r.dealer_key == xored && !xored.empty(), tag + "K_A = xor K_i");
    o.detail << ' ' << agents << " agents: |K_A|=" << r.dealer_key.size() << " max|z|=" << fmt(std::round(worst_z * 100) / 100);
  }
}

// 5. Forward-leg intercept-resend on one agent.
void attack_detection(Outcome& o) {
  RunConfig cfg;
  cfg.n_agents = 2;
  cfg.n_photons = 100000;
  cfg.check1_fraction = 0.5;
  cfg.check2_fraction = 0.5;
  cfg.seed = 5005;
  cfg.attack = AttackStrategy::random_basis({0}, LegSelection::Forward);
  const RunReport r = run_keygen(cfg);
  const double want2 = oracle::two_way_decode_error(true, false);
  const double want1 = oracle::matched_check_error();
  const double e1 = r.agents[0].check1.error_rate();
  const double e2 = r.agents[0].check2.error_rate();
  o.require(std::abs(want1 - 0.25) < 1e-12 && std::abs(want2 - 0.25) < 1e-12, "oracle gives 1/4");
  o.require(std::abs(e2 - want2) <= 0.01, "tapped check-2 = 0.25 +- 0.01");
  o.require(std::abs(e1 - want1) <= 0.01, "tapped check-1 = 0.25 +- 0.01");
  o.require(r.agents[1].check1.error_rate() == 0.0 && r.agents[1].check2.error_rate() == 0.0,
            "untapped agent error 0");
  o.detail << " oracle=" << fmt(want2) << " tapped check1=" << fmt(e1) << " (n=" << r.agents[0].check1.comparable
           << ") check2=" << fmt(e2) << " (n=" << r.agents[0].check2.comparable
           << ") untapped=" << fmt(r.agents[1].check1.error_rate()) << "/" << fmt(r.agents[1].check2.error_rate());
}

// 6. Undetected fraction of ping-pong runs against the survival law.
void detection_law(Outcome& o) {
  const int runs = 10000;
  const std::size_t n = 50;
  const double ps = 0.2;
  const double eps = oracle::control_detection_probability();
  int undetected = 0;
  Rng secrets(6006);
  for (int k = 0; k < runs; ++k) {
    SplitConfig cfg;
    cfg.secret = BitString::random(n, secrets);
    cfg.control_prob = ps;
    cfg.redundancy_rate = 0.0;
    cfg.abort_threshold = 1.0;
    cfg.attack = AttackStrategy::random_basis({kCharlie}, LegSelection::Both);
    cfg.seed = 600000 + static_cast<std::uint64_t>(k);
    const SplitReport r = run_split_pingpong(cfg);
    undetected += !r.senders[kCharlie].detection.detected;
  }
  const double expected = detection_survival(n, ps, eps).value;
  const double observed = undetected / static_cast<double>(runs);
  const double sigma = std::sqrt(expected * (1 - expected) / runs);
  o.require(std::abs(eps - 0.125) < 1e-12, "oracle eps = 1/8");
  o.require(std::abs(observed - expected) <= 3 * sigma, "within 3 sigma");
  o.detail << " eps=" << fmt(eps) << " expected=" << fmt(expected) << " observed=" << fmt(observed)
           << " sigma=" << fmt(sigma) << " runs=" << runs;
}

// 7. Splitting correctness and the block-mode abort.
void splitting(Outcome& o) {
  Rng secrets(7007);
  int recovered[2] = {0, 0};
  for (int k = 0; k < 100; ++k) {
    const BitString s = BitString::random(256, secrets);
    for (SplitMode mode : {SplitMode::PingPong, SplitMode::Block}) {
      SplitConfig cfg;
      cfg.secret = s;
      cfg.mode = mode;
      cfg.seed = 700000 + static_cast<std::uint64_t>(k);
      const SplitReport r = run_split(cfg);
      recovered[static_cast<int>(mode)] += r.decision.accepted && r.recovered == s;
    }
  }
  o.require(recovered[0] == 100, "ping-pong recovers 100/100");
  o.require(recovered[1] == 100, "block recovers 100/100");

  SplitConfig cfg;
  cfg.secret = BitString::random(256, secrets);
  cfg.mode = SplitMode::Block;
  cfg.check_fraction = 0.5;
  cfg.seed = 7777;
  cfg.attack = AttackStrategy::random_basis({kBob, kCharlie}, LegSelection::Forward);
  const SplitReport r = run_split(cfg);
  bool any_op = false;
  for (const auto& s : r.senders) {
    for (const auto& p : s.photons) any_op = any_op || p.op.has_value();
  }
  o.require(!r.decision.accepted, "block attack aborts");
  o.require(r.encode_ops() == 0 && !any_op, "zero encode operations");
  o.detail << " pingpong=" << recovered[0] << "/100 block=" << recovered[1] << "/100 attacked block: accepted="
           << (r.decision.accepted ? "true" : "false") << " encode_ops=" << r.encode_ops() << " reason=\""
           << r.decision.reason << "\"";
}

std::string run_binary(const std::string& args) {
  std::string out;
  FILE* pipe = popen((std::string(QSS_SIM_PATH) + " " + args + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return out;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  pclose(pipe);
  return out;
}

// 8. Identical seeds give byte-identical reports.
void determinism(Outcome& o) {
  const std::vector<std::string> commands = {
      "keygen --agents 3 --photons 20000 --seed 42 --format json --depol 0.02 --survival 0.95 --transcript /dev/null",
      "keygen --photons 20000 --seed 43 --attack ir-random --attack-targets 1 --attack-legs both",
      "naive --photons 20000 --seed 44",
      "split --mode pingpong --secret-length 256 --seed 45 --attack ir-random --attack-targets 1 --eps-max 1",
      "split --mode block --secret-length 256 --seed 46 --survival 0.99",
  };
  std::size_t bytes = 0;
  for (const auto& c : commands) {
    const std::string a = run_binary(c);
    const std::string b = run_binary(c);
    o.require(!a.empty() && a == b, "byte-identical: " + c);
    bytes += a.size();
  }
  o.detail << ' ' << commands.size() << " command pairs, " << bytes << " bytes compared";
}

// 9. Learned-bit mutual information never exceeds the bound at the measured error rate.
void information_direction(Outcome& o) {
  struct Case {
    std::string name;
    double mi;
    double eps;
  };
  std::vector<Case> cases;

  auto party_mi = [](const AttackLedger& ledger, std::size_t party) {
    AttackLedger sub;
    for (const auto& rec : ledger.learned_bits) {
      if (rec.leg.party == party) sub.learned_bits.push_back(rec);
    }
    return learned_bit_mutual_information(sub);
  };
  auto keygen_case = [&](const std::string& name, AttackStrategy attack, std::size_t agents,
                         std::vector<std::size_t> tapped, std::uint64_t seed) {
    RunConfig cfg;
    cfg.n_agents = agents;
    cfg.n_photons = 50000;
    cfg.check1_fraction = cfg.check2_fraction = 0.2;
    cfg.attack = std::move(attack);
    cfg.seed = seed;
    const RunReport r = run_keygen(cfg);
    for (std::size_t t : tapped) {
      cases.push_back({name + " agent " + std::to_string(t), party_mi(r.attack, t), r.agents[t].check2.error_rate()});
    }
  };

  keygen_case("keygen ir-random forward", AttackStrategy::random_basis({0}), 2, {0}, 9001);
  keygen_case("keygen ir-random return", AttackStrategy::random_basis({1}, LegSelection::Return), 2, {1}, 9002);
  keygen_case("keygen ir-random both", AttackStrategy::random_basis({0}, LegSelection::Both), 2, {0}, 9003);
  keygen_case("keygen ir-fixed Z forward", AttackStrategy::fixed_basis(Basis::Z, {1}), 2, {1}, 9004);
  keygen_case("keygen ir-fixed X both", AttackStrategy::fixed_basis(Basis::X, {0}, LegSelection::Both), 2, {0}, 9005);
  keygen_case("keygen dishonest", AttackStrategy::dishonest(0, LegSelection::Both), 3, {1, 2}, 9006);

  {
    RunConfig cfg;
    cfg.n_photons = 50000;
    cfg.seed = 9007;
    cfg.attack = AttackStrategy::random_basis({0});
    const RunReport r = run_naive_qss(cfg);
    cases.push_back({"naive ir-random", learned_bit_mutual_information(r.attack), r.consistency.error_rate()});
  }
  {
    Rng rng(9008);
    SplitConfig cfg;
    cfg.secret = BitString::random(20000, rng);
    cfg.control_prob = 0.3;
    cfg.abort_threshold = 1.0;
    cfg.seed = 9008;
    cfg.attack = AttackStrategy::random_basis({kCharlie}, LegSelection::Both);
    const SplitReport r = run_split(cfg);
    cases.push_back({"pingpong ir-random both", learned_bit_mutual_information(r.attack),
                     r.senders[kCharlie].control.error_rate()});
  }

  for (const Case& c : cases) {
    const double bound = information_bound(c.eps);
    o.require(c.mi <= bound, c.name + ": MI <= I0(eps)");
    o.detail << " {" << c.name << ": MI=" << fmt(std::round(c.mi * 1e4) / 1e4)
             << " eps=" << fmt(std::round(c.eps * 1e4) / 1e4) << " I0=" << fmt(std::round(bound * 1e4) / 1e4) << "}";
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"formula fidelity: information bound", formula_information},
      {"formula fidelity: detection survival", formula_detection},
      {"efficiency constants", efficiency_constants},
      {"ideal-run correctness", ideal_runs},
      {"attack detection", attack_detection},
      {"detection-probability law", detection_law},
      {"splitting correctness", splitting},
      {"determinism", determinism},
      {"information-bound direction", information_direction},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " --"
              << o.detail.str() << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
