#include <algorithm>
#include <string>

#include "qss/error.hpp"
#include "qss/protocol.hpp"
#include "qss/rng.hpp"

namespace qss {
namespace {

void require_check_fraction(const std::string& field, double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) {
    throw ConfigError(field, "check fraction must satisfy 0 < δ ≤ 1/2 (got " +
                                 format_number(delta) + ")");
  }
}

// Links with taps attached wherever the attack strategy sits.
std::vector<LinkConfig> effective_links(const RunConfig& cfg) {
  std::vector<LinkConfig> links;
  links.reserve(cfg.n_agents);
  for (std::size_t i = 0; i < cfg.n_agents; ++i) {
    LinkConfig link = cfg.link(i);
    if (cfg.attack.taps(i, Direction::Forward)) link.forward.tap = LegId{i, Direction::Forward};
    if (cfg.attack.taps(i, Direction::Return)) link.back.tap = LegId{i, Direction::Return};
    links.push_back(link);
  }
  return links;
}

BitString xor_prefix(const std::vector<AgentReport>& agents) {
  std::size_t common = agents.empty() ? 0 : agents.front().dealer_key.size();
  for (const auto& a : agents) common = std::min(common, a.dealer_key.size());
  BitString out(common);
  for (const auto& a : agents) out ^= a.dealer_key.prefix(common);
  return out;
}

}  // namespace

LinkConfig RunConfig::link(std::size_t agent) const {
  return links.empty() ? LinkConfig{} : links.at(agent);
}

bool RunConfig::noisy() const {
  return std::any_of(links.begin(), links.end(), [](const LinkConfig& l) {
    return !l.forward.noise.noiseless() || !l.back.noise.noiseless();
  });
}

void RunConfig::validate() const {
  if (n_agents < 2) throw ConfigError("agents", "at least 2 agents are required");
  if (n_photons < 1) throw ConfigError("photons", "at least 1 photon is required");
  require_check_fraction("delta1", check1_fraction);
  require_check_fraction("delta2", check2_fraction);
  require_probability("eps_max", abort_threshold);
  if (!links.empty() && links.size() != n_agents) {
    throw ConfigError("links", "expected one entry per agent (" + std::to_string(n_agents) +
                                   "), got " + std::to_string(links.size()));
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    links[i].forward.validate("links[" + std::to_string(i) + "].forward");
    links[i].back.validate("links[" + std::to_string(i) + "].return");
  }
  attack.validate(n_agents);
}

EncodeOp decode_round(const PrepRecord& prep, Bit outcome) {
  return outcome == prep.bit ? EncodeOp::I : EncodeOp::U;
}

RunReport run_keygen(const RunConfig& cfg) {
  cfg.validate();
  const std::size_t n_agents = cfg.n_agents;
  const std::vector<LinkConfig> links = effective_links(cfg);

  Rng rng(cfg.seed);
  Eavesdropper eve(cfg.attack);
  Tap* tap = cfg.attack.active() ? &eve : nullptr;

  RunReport report;
  report.protocol = "keygen";
  report.seed = cfg.seed;
  report.n_photons = cfg.n_photons;
  report.agents.resize(n_agents);
  if (cfg.record_transcript) report.transcript.reserve(cfg.n_photons);

  for (std::uint64_t r = 0; r < cfg.n_photons; ++r) {
    RoundTranscript round{r, std::vector<AgentRound>(n_agents), false, false};

    for (std::size_t i = 0; i < n_agents; ++i) {
      AgentRound& a = round.agents[i];
      a.prep = random_prep(rng);
      const bool sample = rng.bernoulli(cfg.check1_fraction);
      const auto arrived =
          transmit(links[i].forward, prepare(a.prep), rng, tap, TapContext{r, {}, a.prep});

      if (sample) {
        const Basis basis = random_basis(rng);
        Bit outcome = 0;
        if (arrived) outcome = measure(*arrived, basis, rng).outcome;
        a.event = AgentCheck{basis, outcome};
        a.lost = !arrived;
      } else {
        const EncodeOp op = random_op(rng);
        a.event = op;
        if (!arrived) {
          a.lost = true;
        } else {
          const PrepRecord carried{a.prep.basis, static_cast<Bit>(a.prep.bit ^ op_bit(op))};
          const auto back =
              transmit(links[i].back, apply(op, *arrived), rng, tap, TapContext{r, {}, carried});
          if (back) {
            a.dealer_outcome = measure(*back, a.prep.basis, rng).outcome;
          } else {
            a.lost = true;
          }
        }
      }
      round.void_round = round.void_round || a.lost;
    }

    if (round.void_round) {
      ++report.void_rounds;
    } else {
      round.check2 = rng.bernoulli(cfg.check2_fraction);
      for (std::size_t i = 0; i < n_agents; ++i) {
        const AgentRound& a = round.agents[i];
        AgentReport& out = report.agents[i];
        if (const auto* check = std::get_if<AgentCheck>(&a.event)) {
          ++out.check1.announced;
          if (check->basis == a.prep.basis) {
            ++out.check1.comparable;
            out.check1.mismatches += (check->outcome != a.prep.bit);
          }
          continue;
        }
        const EncodeOp op = std::get<EncodeOp>(a.event);
        const EncodeOp decoded = decode_round(a.prep, *a.dealer_outcome);
        if (round.check2) {
          ++out.check2.announced;
          ++out.check2.comparable;
          out.check2.mismatches += (decoded != op);
        } else {
          out.key.push_back(op_bit(op));
          out.dealer_key.push_back(op_bit(decoded));
        }
      }
    }
    if (cfg.record_transcript) report.transcript.push_back(std::move(round));
  }

  for (std::size_t i = 0; i < n_agents; ++i) {
    AgentReport& a = report.agents[i];
    // Basis + outcome per first-check announcement, the operation per second-check one.
    a.efficiency = {a.dealer_key.size(), cfg.n_photons, 2 * a.check1.announced + a.check2.announced};
    report.efficiency.secret_bits += a.efficiency.secret_bits;
    report.efficiency.qubits += a.efficiency.qubits;
    report.efficiency.classical_bits += a.efficiency.classical_bits;

    if (!report.decision.accepted) continue;
    for (const auto& [name, tally] : {std::pair{"check-1", a.check1}, std::pair{"check-2", a.check2}}) {
      if (tally.error_rate() > cfg.abort_threshold) {
        report.decision = Decision::abort("agent " + std::to_string(i) + " " + name +
                                          " error rate " + format_number(tally.error_rate()) +
                                          " exceeds eps_max " + format_number(cfg.abort_threshold));
        break;
      }
    }
  }

  const auto& e = report.efficiency;
  report.eta_nominal = static_cast<double>(e.secret_bits) / static_cast<double>(e.qubits);
  report.eta_full =
      static_cast<double>(e.secret_bits) / static_cast<double>(e.qubits + e.classical_bits);
  report.dealer_key = xor_prefix(report.agents);
  report.attack = eve.take_ledger();
  return report;
}

}  // namespace qss
