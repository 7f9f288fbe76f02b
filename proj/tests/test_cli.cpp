// Config parsing, command outputs, exit codes and determinism.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ricsol/cli.hpp"

using namespace ricsol;
using namespace ricsol::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ricsol_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  json base(const json& ansatz) const {
    return {{"schema_version", 1}, {"ansatz", ansatz}, {"output_dir", (dir_ / "out").string()}};
  }
  static json cylinder_ansatz(int m = 2) {
    return {{"k", 0}, {"m", m}, {"lambda", 0.5}, {"b0", std::sqrt((m - 1) / 0.5)}};
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  int run(const json& cfg, CommandResult (*cmd)(const RunConfig&), CommandResult* out = nullptr) {
    std::ostringstream err;
    const int code = run_guarded([&] { return cmd(parse_config(cfg)); }, err, out);
    last_error_ = err.str();
    return code;
  }

  fs::path dir_;
  std::string last_error_;
};

} // namespace

TEST_F(CliTest, ConfigValidation) {
  EXPECT_NO_THROW(parse_config(base(cylinder_ansatz())));
  json unknown = base(cylinder_ansatz());
  unknown["colour"] = "blue";
  EXPECT_THROW(parse_config(unknown), ConfigError);
  json nested = base(cylinder_ansatz());
  nested["ansatz"]["lamda"] = 0.1;
  EXPECT_THROW(parse_config(nested), ConfigError);
  json no_version = base(cylinder_ansatz());
  no_version.erase("schema_version");
  EXPECT_THROW(parse_config(no_version), ConfigError);
  json wrong_version = base(cylinder_ansatz());
  wrong_version["schema_version"] = 2;
  EXPECT_THROW(parse_config(wrong_version), ConfigError);
  json tol = base(cylinder_ansatz());
  tol["certify"] = {{"tolerance", 0.0}};
  EXPECT_THROW(parse_config(tol), ConfigError);
  json qtol = base(cylinder_ansatz());
  qtol["quotient"] = {{"tolerance", -1e-10}};
  EXPECT_THROW(parse_config(qtol), ConfigError);
  json type = base(cylinder_ansatz());
  type["ansatz"]["k"] = "one";
  EXPECT_THROW(parse_config(type), ConfigError);
  json kind = base(cylinder_ansatz());
  kind["quotient"] = {{"kind", "mirror"}};
  EXPECT_THROW(parse_config(kind), ConfigError);
}

TEST_F(CliTest, ConfigHashIsStableAndSensitive) {
  const auto a = parse_config(base(cylinder_ansatz()));
  const auto b = parse_config(base(cylinder_ansatz()));
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_NE(a.hash(), parse_config(base(cylinder_ansatz(3))).hash());
}

TEST_F(CliTest, NegativeRadiusIsAValidationError) {
  json cfg = base(cylinder_ansatz());
  cfg["ansatz"]["b0"] = -1.0;
  EXPECT_EQ(run(cfg, cmd_solve), kFail);
  EXPECT_NE(last_error_.find("b0"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "out" / "profile.csv"));
}

TEST_F(CliTest, SolveCylinderWritesConstantRadius) {
  CommandResult r;
  ASSERT_EQ(run(base(cylinder_ansatz()), cmd_solve, &r), kPass);
  EXPECT_EQ(r.report["classification"], "shrinking");
  EXPECT_EQ(r.report["status"], "completed");
  EXPECT_NEAR(r.report["mu_mean"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(r.report["provenance"]["tool_version"], kToolVersion);
  std::ifstream in(dir_ / "out" / "profile.csv");
  const auto prof = read_profile_csv(in, parse_config(base(cylinder_ansatz())).ansatz);
  for (std::size_t i = 0; i < prof.size(); ++i)
    if (prof.t[i] <= 5.0) EXPECT_NEAR(prof.b[i], std::sqrt(2.0), 1e-10);
  for (const auto& entry : fs::directory_iterator(dir_ / "out"))
    EXPECT_NE(entry.path().extension(), ".tmp");
}

TEST_F(CliTest, SolveFlatSteadyHasZeroResiduals) {
  ASSERT_EQ(run(base({{"k", 1}, {"m", 1}, {"lambda", 0.0}, {"b0", 1.0}}), cmd_solve), kPass);
  std::ifstream in(dir_ / "out" / "profile.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::vector<double> v;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) v.push_back(std::stod(f));
    ASSERT_EQ(v.size(), 11u);
    for (int c : {8, 9, 10}) EXPECT_LE(std::abs(v[static_cast<std::size_t>(c)]), 1e-10) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 1001u);
}

TEST_F(CliTest, CertifyRoundTripMatchesInMemoryVerdict) {
  const json cfg = base({{"k", 1}, {"m", 2}, {"lambda", 0.0}, {"b0", 1.0}});
  ASSERT_EQ(run(cfg, cmd_solve), kPass);
  json from_file = cfg;
  from_file["certify"] = {{"profile", (dir_ / "out" / "profile.csv").string()}};
  CommandResult r;
  ASSERT_EQ(run(from_file, cmd_certify, &r), kPass) << last_error_;
  const auto memory = certify_profile(shoot(parse_config(cfg).ansatz)).to_json();
  EXPECT_EQ(r.report["checks"].dump(), memory["checks"].dump());
  EXPECT_EQ(r.report["verdict"], "pass");
}

TEST_F(CliTest, CertifyDetectsPerturbedLambda) {
  ASSERT_EQ(run(base(cylinder_ansatz()), cmd_solve), kPass);
  json cfg = base(cylinder_ansatz());
  cfg["ansatz"]["lambda"] = 0.505;
  cfg["certify"] = {{"profile", (dir_ / "out" / "profile.csv").string()}};
  CommandResult r;
  EXPECT_EQ(run(cfg, cmd_certify, &r), kFail);
  EXPECT_EQ(r.report["verdict"], "fail");
}

TEST_F(CliTest, CertifyMissingOrEmptyProfileIsIoFailure) {
  json cfg = base(cylinder_ansatz());
  cfg["certify"] = {{"profile", (dir_ / "none.csv").string()}};
  EXPECT_EQ(run(cfg, cmd_certify), kIo);
  std::ofstream(dir_ / "empty.csv").close();
  cfg["certify"]["profile"] = (dir_ / "empty.csv").string();
  EXPECT_EQ(run(cfg, cmd_certify), kIo);
  EXPECT_NE(last_error_.find("empty"), std::string::npos);
}

TEST_F(CliTest, QuotientCommands) {
  json cfg = base(cylinder_ansatz());
  cfg["quotient"] = {{"p", 2}, {"kind", "antipodal"}};
  CommandResult r;
  EXPECT_EQ(run(cfg, cmd_quotient, &r), kPass) << last_error_;
  EXPECT_EQ(r.report["verdict"], "pass");
  EXPECT_TRUE(fs::exists(dir_ / "out" / "quotient_certificate.json"));

  cfg["quotient"]["kind"] = "axis_rotation";
  EXPECT_EQ(run(cfg, cmd_quotient, &r), kFail);
  EXPECT_EQ(r.report["free"], false);

  json hopf = base({{"k", 1}, {"m", 2}, {"lambda", 0.0}, {"b0", 1.0}});
  hopf["quotient"] = {{"p", 3}, {"kind", "hopf"}};
  EXPECT_EQ(run(hopf, cmd_quotient), kFail);
  EXPECT_NE(last_error_.find("odd"), std::string::npos);

  hopf["ansatz"]["m"] = 3;
  EXPECT_EQ(run(hopf, cmd_quotient, &r), kPass) << last_error_;
}

TEST_F(CliTest, SweepTables) {
  json one = base(cylinder_ansatz());
  one["sweep"] = {{"k", {0}}, {"m", {2}}, {"lambda", {0.5}}, {"b0", {std::sqrt(2.0)}}};
  CommandResult r;
  ASSERT_EQ(run(one, cmd_sweep, &r), kPass);
  EXPECT_EQ(r.report["rows"], 1);
  EXPECT_EQ(r.report["flagged_rows"], 0);
  const auto csv = slurp(dir_ / "out" / "sweep.csv");
  EXPECT_NE(csv.find(",completed,10,"), std::string::npos);

  json empty = base(cylinder_ansatz());
  empty["sweep"] = {{"k", json::array()}};
  ASSERT_EQ(run(empty, cmd_sweep, &r), kPass);
  EXPECT_EQ(r.report["rows"], 0);
  EXPECT_EQ(slurp(dir_ / "out" / "sweep.csv"), std::string("# schema_version: 1\n") + kSweepHeader + "\n");

  json degenerate = base(cylinder_ansatz());
  degenerate["sweep"] = {{"k", {1}}, {"m", {2}}, {"lambda", {0.0, 0.5}}, {"b0", {1.0}}};
  ASSERT_EQ(run(degenerate, cmd_sweep, &r), kPass);
  EXPECT_EQ(r.report["flagged_rows"], 1);
  EXPECT_NE(slurp(dir_ / "out" / "sweep.csv").find(",degenerate,"), std::string::npos);

  json bad = base(cylinder_ansatz());
  bad["sweep"] = {{"b0", {-1.0}}};
  EXPECT_EQ(run(bad, cmd_sweep), kFail);
}

TEST_F(CliTest, OutputsAreByteIdenticalAcrossRunsAndThreadCounts) {
  json cfg = base({{"k", 1}, {"m", 3}, {"lambda", 0.0}, {"b0", 1.0}, {"t_max", 4.0}});
  cfg["sweep"] = {{"k", {1, 2}}, {"m", {2, 3}}, {"lambda", {-0.1, 0.0, 0.5}}, {"b0", {1.0}}};
  cfg["quotient"] = {{"p", 3}, {"kind", "hopf"}};
  auto collect = [&](unsigned threads) {
    auto c = parse_config(cfg);
    c.sweep.threads = threads;
    std::ostringstream err;
    std::string all;
    for (auto cmd : {cmd_solve, cmd_certify, cmd_quotient, cmd_sweep}) {
      run_guarded([&] { return cmd(c); }, err);
      for (const auto& entry : fs::directory_iterator(dir_ / "out")) all += entry.path().filename().string();
    }
    for (const char* f : {"profile.csv", "solve_summary.json", "certificate.json", "quotient_certificate.json", "sweep.csv"})
      all += slurp(dir_ / "out" / f);
    fs::remove_all(dir_ / "out");
    return all;
  };
  const auto serial = collect(1);
  EXPECT_EQ(serial, collect(4));
  EXPECT_EQ(serial, collect(1));
}

#ifdef RICSOL_CLI_PATH
TEST_F(CliTest, ExecutableExitCodes) {
  const std::string exe = RICSOL_CLI_PATH;
  const auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status(exe + " solve --config " + (dir_ / "missing.json").string()), kIo);
  {
    std::ofstream cfg(dir_ / "cyl.json");
    cfg << base(cylinder_ansatz()).dump();
  }
  EXPECT_EQ(status(exe + " solve --config " + (dir_ / "cyl.json").string() + " --out " + (dir_ / "cli").string()), kPass);
  EXPECT_TRUE(fs::exists(dir_ / "cli" / "profile.csv"));
  EXPECT_EQ(status(exe + " certify --config " + (dir_ / "cyl.json").string() + " --out " + (dir_ / "cli").string() +
                   " --profile " + (dir_ / "cli" / "profile.csv").string()),
            kPass);
  EXPECT_EQ(status(exe + " certify --config " + (dir_ / "cyl.json").string() + " --tolerance -1"), kFail);
  EXPECT_EQ(status(exe + " bogus"), kFail);
}
#endif
