#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "json.hpp"
#include "qss/protocol.hpp"
#include "qss/splitting.hpp"

namespace qss {

using Json = nlohmann::json;

enum class ExperimentKind { Keygen, Naive, Split };

struct LoadedConfig {
  ExperimentKind kind = ExperimentKind::Keygen;
  std::variant<RunConfig, SplitConfig> config;
  bool seed_from_entropy = false;  // no seed given; one was drawn from the OS
};

// Parses and validates a config document. Every problem is reported as a
// ConfigError naming the offending key (e.g. "delta1", "attack.targets").
LoadedConfig parse_config(const Json& doc);
LoadedConfig load_config(const std::filesystem::path& path);

RunConfig run_config_from_json(const Json& doc);
SplitConfig split_config_from_json(const Json& doc);

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view s);

// nlohmann ADL hooks. Reports serialize derived values (error rates, eta)
// alongside the raw counts; parsing ignores the derived values, so
// report -> JSON -> report is the identity.
void to_json(Json& j, const RunConfig& cfg);
void to_json(Json& j, const SplitConfig& cfg);
void to_json(Json& j, const ChannelLeg& leg);
void to_json(Json& j, const AttackStrategy& attack);
void to_json(Json& j, const AttackLedger& ledger);
void from_json(const Json& j, AttackLedger& ledger);
void to_json(Json& j, const RoundTranscript& round);
void from_json(const Json& j, RoundTranscript& round);
void to_json(Json& j, const RunReport& report);
void from_json(const Json& j, RunReport& report);
void to_json(Json& j, const SplitReport& report);
void from_json(const Json& j, SplitReport& report);

}  // namespace qss
