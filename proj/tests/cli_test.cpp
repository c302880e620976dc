#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "qss/config_io.hpp"

namespace qss {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qss-sim");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path;
}

TEST(Cli, KeygenJsonReport) {
  const Result r = run_cli({"keygen", "--agents", "2", "--photons", "2000", "--seed", "42", "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(j["agents"][0]["check1"]["error_rate"], 0.0);
  EXPECT_EQ(j["agents"][1]["check2"]["error_rate"], 0.0);
  EXPECT_GT(j["eta_nominal"].get<double>(), 0.7);
  EXPECT_GT(j["eta_full"].get<double>(), 0.0);
  EXPECT_EQ(j.get<RunReport>().seed, 42u);
}

TEST(Cli, SameSeedIsByteIdentical) {
  const std::vector<std::string> args = {"keygen", "--photons", "3000", "--seed", "7", "--attack", "ir-random",
                                         "--attack-targets", "1", "--depol", "0.02"};
  EXPECT_EQ(run_cli(args).out, run_cli(args).out);
  const std::vector<std::string> split = {"split", "--secret-length", "64", "--seed", "7"};
  EXPECT_EQ(run_cli(split).out, run_cli(split).out);
}

TEST(Cli, MissingSeedIsEchoed) {
  const Result r = run_cli({"keygen", "--photons", "100"});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.err.find("seed: "), std::string::npos);
  const auto seed = Json::parse(r.out)["seed"].get<std::uint64_t>();
  EXPECT_NE(r.err.find(std::to_string(seed)), std::string::npos);
}

TEST(Cli, KeygenCsvHeaderIsStable) {
  const Result r = run_cli({"keygen", "--photons", "500", "--seed", "1", "--reps", "3", "--format", "csv"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0],
            "rep,seed,protocol,agents,photons,accepted,reason,key_length,void_rounds,check1_error_max,"
            "check2_error_max,consistency_error,b_s,q_t,b_t,eta_nominal,eta_full");
  EXPECT_EQ(rows[2].substr(0, 4), "1,2,");
}

TEST(Cli, CsvQuotesFieldsWithCommas) {
  const Result r = run_cli({"keygen", "--photons", "2000", "--seed", "1", "--attack", "ir-random",
                            "--attack-targets", "0", "--format", "csv"});
  ASSERT_EQ(r.code, cli::kOk);
  const auto rows = lines(r.out);
  EXPECT_NE(rows[1].find(",false,agent 0 check-1 error rate"), std::string::npos);
}

TEST(Cli, RepsEmitJsonLines) {
  const Result r = run_cli({"naive", "--photons", "500", "--seed", "3", "--reps", "2"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(Json::parse(rows[1])["seed"], 4);
  EXPECT_EQ(Json::parse(rows[0])["protocol"], "naive");
}

TEST(Cli, AbortExitCodeOnlyWhenAsked) {
  const std::vector<std::string> args = {"keygen", "--photons", "2000", "--seed", "1", "--attack", "ir-random",
                                         "--attack-targets", "0"};
  EXPECT_EQ(run_cli(args).code, cli::kOk);
  auto strict = args;
  strict.push_back("--fail-on-abort");
  EXPECT_EQ(run_cli(strict).code, cli::kAborted);
}

TEST(Cli, UsageErrorsNameTheField) {
  Result r = run_cli({"keygen", "--delta1", "0.6", "--seed", "1"});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("delta1"), std::string::npos);
  EXPECT_NE(r.err.find("0 < δ ≤ 1/2"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  r = run_cli({"keygen", "--bogus"});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("--bogus"), std::string::npos);

  r = run_cli({"keygen", "--config", "/nonexistent/file.json"});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("config"), std::string::npos);

  r = run_cli({"keygen", "--depol", "1.5", "--seed", "1"});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("links[0].forward.depol"), std::string::npos);

  r = run_cli({"split", "--secret", "01a", "--seed", "1"});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("secret"), std::string::npos);

  r = run_cli({});
  EXPECT_EQ(r.code, cli::kUsageError);
}

TEST(Cli, HelpSucceeds) {
  const Result r = run_cli({"keygen", "--help"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("--eps-max"), std::string::npos);
  EXPECT_NE(r.out.find("0.11"), std::string::npos);
}

TEST(Cli, ConfigFileWithOverrides) {
  const auto path = temp_file("qss_cli_cfg.json", R"({"kind": "keygen", "photons": 800, "seed": 11})");
  Result r = run_cli({"keygen", "--config", path.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["seed"], 11);
  EXPECT_EQ(j["n_photons"], 800);

  r = run_cli({"keygen", "--config", path.string(), "--photons", "300", "--seed", "12"});
  j = Json::parse(r.out);
  EXPECT_EQ(j["seed"], 12);
  EXPECT_EQ(j["n_photons"], 300);

  r = run_cli({"split", "--config", path.string()});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("kind"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, SplitRecoversSecret) {
  const Result r = run_cli({"split", "--secret", "1100101", "--mode", "block", "--seed", "5"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["recovered"], "1100101");
  EXPECT_EQ(j["decision"]["accepted"], true);
}

TEST(Cli, SplitCsv) {
  const Result r = run_cli({"split", "--secret-length", "32", "--seed", "5", "--format", "csv", "--reps", "2"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0],
            "rep,seed,mode,secret_length,accepted,reason,recovered_ok,bob_control_error,charlie_control_error,"
            "encode_ops,bob_photons,charlie_photons,bob_detected,charlie_detected");
  EXPECT_NE(rows[1].find(",true,,true,"), std::string::npos);
}

TEST(Cli, TranscriptDump) {
  const auto path = std::filesystem::temp_directory_path() / "qss_cli_transcript.jsonl";
  const Result r = run_cli({"keygen", "--photons", "50", "--seed", "2", "--transcript", path.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(Json::parse(r.out)["transcript"].size(), 0u);
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line); ++n) {
    const Json rec = Json::parse(line);
    EXPECT_EQ(rec["round"], n);
    EXPECT_EQ(rec.get<RoundTranscript>().agents.size(), 2u);
  }
  EXPECT_EQ(n, 50u);
  std::filesystem::remove(path);
}

TEST(Cli, OutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "qss_cli_out.json";
  const Result r = run_cli({"keygen", "--photons", "100", "--seed", "2", "-o", path.string()});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  EXPECT_EQ(Json::parse(in)["seed"], 2);
  std::filesystem::remove(path);
}

TEST(Cli, DeltaSweep) {
  const Result r = run_cli({"sweep", "--param", "delta", "--values", "0.1,0.5", "--reps", "4", "--photons",
                            "2000", "--seed", "1"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "delta,eta_theory,eta_empirical_mean,eta_empirical_std");
  EXPECT_EQ(rows[1].substr(0, 9), "0.1,0.81,");
  EXPECT_EQ(rows[2].substr(0, 9), "0.5,0.25,");
}

TEST(Cli, SweepIsIndependentOfThreadCount) {
  const std::vector<std::string> args = {"sweep", "--param", "depol", "--values", "0,0.1", "--reps", "3",
                                         "--photons", "1000", "--seed", "9"};
  setenv("QSS_SIM_THREADS", "1", 1);
  const Result one = run_cli(args);
  setenv("QSS_SIM_THREADS", "4", 1);
  EXPECT_EQ(cli::worker_threads(), 4u);
  const Result four = run_cli(args);
  unsetenv("QSS_SIM_THREADS");
  ASSERT_EQ(one.code, cli::kOk) << one.err;
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(lines(one.out)[0], "depol,check1_error_mean,check2_error_mean,abort_fraction,eta_empirical_mean,"
                               "eta_empirical_std");
}

TEST(Cli, SweepJsonIsAnArray) {
  const Result r = run_cli({"sweep", "--values", "0.2", "--reps", "2", "--photons", "500", "--seed", "1",
                            "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json j = Json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[0]["delta"], 0.2);
}

TEST(Cli, SweepRejectsBadValue) {
  const Result r = run_cli({"sweep", "--values", "0.7", "--seed", "1"});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("values"), std::string::npos);
}

TEST(Cli, FormulasDetection) {
  const Result r = run_cli({"formulas", "--detection", "--n", "10000", "--ps", "0.1", "--eps", "0.1"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "quantity,value");
  EXPECT_EQ(rows[1].rfind("detection_survival,1.02605627878831", 0), 0u);
  EXPECT_EQ(rows[2].rfind("detection_survival_log10,-47.98882881768", 0), 0u);
}

TEST(Cli, FormulasJsonAndErrors) {
  Result r = run_cli({"formulas", "--info", "--eps", "0.1", "--table", "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["information_bound"].get<double>(), 0.4690, 1e-4);
  EXPECT_EQ(j["eta_naive-QKD-QSS"], 0.125);
  r = run_cli({"formulas", "--info", "--eps", "2"});
  EXPECT_EQ(r.code, cli::kUsageError);
  r = run_cli({"formulas"});
  EXPECT_EQ(r.code, cli::kUsageError);
}

TEST(Cli, ReferencePage) {
  const Result r = run_cli({"reference"});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out, cli::config_reference());
  for (const char* key : {"eps_max", "delta1", "attack.targets", "secret_length", "block_size"}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
}

}  // namespace
}  // namespace qss
