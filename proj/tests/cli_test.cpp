// End-to-end checks of the hqp_cli binary: exit codes, report shapes, and
// output-file plumbing. The binary path comes in through HQP_CLI_PATH.
#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nlohmann/json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch_dir() {
  static const fs::path p = [] {
    fs::path dir = fs::temp_directory_path() / ("hqp_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
  }();
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_doc(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI with HQP_OUT_DIR cleared unless the caller overrides the
// environment prefix.
CliResult run_cli(const std::string& args, const std::string& env_prefix = "env -u HQP_OUT_DIR") {
  static int call = 0;
  const fs::path out_path = scratch_dir() / ("stdout_" + std::to_string(call) + ".txt");
  const fs::path err_path = scratch_dir() / ("stderr_" + std::to_string(call) + ".txt");
  ++call;
  const std::string cmd = env_prefix + " \"" + HQP_CLI_PATH + "\" " + args + " > \"" +
                          out_path.string() + "\" 2> \"" + err_path.string() + "\"";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  return r;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

const char* kConditionalDoc = R"({
  "kind": "conditional",
  "blocks": [[[[1,0],[0,0]],[[0,0],[1,0]]], [[[0,0],[1,0]],[[1,0],[0,0]]]],
  "program": {"basis": 1},
  "data": {"basis": 0}
})";

TEST(CliVerify, PassesEveryInvariantWithExitZero) {
  const CliResult r = run_cli("verify");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(count_occurrences(r.out, "[PASS]"), 21u);
  EXPECT_EQ(count_occurrences(r.out, "[FAIL]"), 0u);
  EXPECT_NE(r.out.find("21/21 invariants passed"), std::string::npos);
}

TEST(CliVerify, FaultInjectionFailsTheTargetedCheckWithExitOne) {
  const CliResult r = run_cli("verify --fault-inject");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("[FAIL] gates.theta_unitary_det1"), std::string::npos);
  EXPECT_EQ(count_occurrences(r.out, "[FAIL]"), 1u);
  EXPECT_NE(r.out.find("20/21 invariants passed"), std::string::npos);
}

TEST(CliSimulate, RunsAConditionalDocument) {
  const fs::path doc = write_doc("cond.json", kConditionalDoc);
  const CliResult r = run_cli("simulate \"" + doc.string() + "\"");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json report = json::parse(r.out);
  EXPECT_EQ(report["kind"], "conditional");
  EXPECT_DOUBLE_EQ(report["output"]["amplitudes"][3][0].get<double>(), 1.0);
  EXPECT_EQ(report["schmidt_rank"], 1);
}

TEST(CliSimulate, MomentumResolutionFlagOverridesTheDocument) {
  const fs::path doc = write_doc("net.json", R"({
    "kind": "network", "qubits": 1, "slots": "canonical",
    "momentum_resolution": 8,
    "program": [{"factor": 0, "value": 1}, {"factor": 1, "value": 0},
                {"factor": 2, "value": 0}],
    "data": {"basis": 0}
  })");
  const CliResult r = run_cli("simulate \"" + doc.string() + "\" --momentum-resolution 4");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["momentum_resolution"], 4);
}

TEST(CliSimulate, InputErrorsNameTheFieldAndExitTwo) {
  const fs::path doc = write_doc("noblocks.json", R"({"kind": "conditional"})");
  const CliResult r = run_cli("simulate \"" + doc.string() + "\"");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("blocks"), std::string::npos);

  const CliResult missing = run_cli("simulate \"" + (scratch_dir() / "nope.json").string() + "\"");
  EXPECT_EQ(missing.exit_code, 2);
  EXPECT_NE(missing.err.find("cannot read"), std::string::npos);

  const fs::path bad = write_doc("bad.json", "{ not json");
  const CliResult malformed = run_cli("simulate \"" + bad.string() + "\"");
  EXPECT_EQ(malformed.exit_code, 2);
  EXPECT_NE(malformed.err.find("cannot parse document"), std::string::npos);
}

TEST(CliSweep, EmitsDeterministicCsv) {
  const fs::path doc = write_doc("sweep.json", R"({
    "kind": "stochastic-sweep", "alpha": 0.8,
    "m_min": 1, "m_max": 3, "trials": 2000
  })");
  const CliResult a = run_cli("sweep \"" + doc.string() + "\"");
  const CliResult b = run_cli("sweep \"" + doc.string() + "\"");
  ASSERT_EQ(a.exit_code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);  // byte-identical without an explicit seed
  EXPECT_TRUE(a.out.starts_with("m,exact,closed_form,mc_frequency,mc_std_error\n"));

  const CliResult seeded = run_cli("sweep \"" + doc.string() + "\" --seed 9");
  const CliResult seeded_again = run_cli("sweep \"" + doc.string() + "\" --seed 9");
  EXPECT_EQ(seeded.out, seeded_again.out);
  EXPECT_NE(seeded.out, a.out);  // seed override shifts the Monte Carlo columns
}

TEST(CliSweep, RejectsABrokenDocument) {
  const fs::path doc = write_doc("sweep_bad.json", R"({
    "kind": "stochastic-sweep", "alpha": 0.8, "m_min": 1, "m_max": 3, "trials": 0
  })");
  const CliResult r = run_cli("sweep \"" + doc.string() + "\"");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("trials"), std::string::npos);
}

TEST(CliCompile, DecomposesAMatrixGivenInline) {
  const CliResult r = run_cli("compile --matrix 0 0 1 0 1 0 0 0");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json report = json::parse(r.out);
  EXPECT_DOUBLE_EQ(report["q1"].get<double>(), 0.25);
  EXPECT_DOUBLE_EQ(report["q2"].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(report["q3"].get<double>(), 0.0);
  EXPECT_LE(report["rebuild_distance"].get<double>(), 1e-12);
}

TEST(CliCompile, AcceptsACompileDocument) {
  const fs::path doc = write_doc("compile.json", R"({
    "kind": "compile",
    "matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]
  })");
  const CliResult r = run_cli("compile \"" + doc.string() + "\"");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_DOUBLE_EQ(json::parse(r.out)["q1"].get<double>(), 0.25);
}

TEST(CliCompile, RejectsNonUnitaryInputAndMissingInput) {
  const CliResult r = run_cli("compile --matrix 1 0 0 0 0 0 0.5 0");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("not unitary"), std::string::npos);

  const CliResult none = run_cli("compile");
  EXPECT_EQ(none.exit_code, 2);
  EXPECT_NE(none.err.find("--matrix"), std::string::npos);
}

TEST(CliOutput, OutFlagWritesACopyOfStdout) {
  const fs::path target = scratch_dir() / "reports" / "x.json";
  const CliResult r = run_cli("compile --matrix 0 0 1 0 1 0 0 0 --out \"" + target.string() + "\"");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(read_file(target), r.out);
}

TEST(CliOutput, EnvDirectoryProvidesDefaultFileAndAnchorsRelativePaths) {
  const fs::path dir = scratch_dir() / "envout";
  fs::create_directories(dir);
  const std::string env = "env HQP_OUT_DIR=\"" + dir.string() + "\"";

  const CliResult r = run_cli("compile --matrix 0 0 1 0 1 0 0 0", env);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(read_file(dir / "compile.json"), r.out);

  const CliResult rel = run_cli("compile --matrix 1 0 0 0 0 0 1 0 --out sub/id.json", env);
  ASSERT_EQ(rel.exit_code, 0) << rel.err;
  EXPECT_EQ(read_file(dir / "sub" / "id.json"), rel.out);
}

TEST(CliParsing, BadInvocationsAreInputErrors) {
  EXPECT_EQ(run_cli("warp").exit_code, 2);
  EXPECT_EQ(run_cli("").exit_code, 2);
  EXPECT_EQ(run_cli("simulate").exit_code, 2);  // doc argument is required
  EXPECT_EQ(run_cli("compile --matrix 1 0 0 0").exit_code, 2);
}

}  // namespace
