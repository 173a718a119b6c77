#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "eegain/eegain.hpp"
#include "support.hpp"

using namespace eegain;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result cli(const std::string& args, const fs::path& dir) {
  const auto log = dir / "cli.log";
  const std::string cmd = std::string(EEGAIN_CLI_PATH) + " " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::ostringstream s;
  s << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  test::TempDir dir("cli-usage");
  EXPECT_EQ(cli("", dir.path()).code, 1);
  EXPECT_EQ(cli("frobnicate", dir.path()).code, 1);
  EXPECT_EQ(cli("report", dir.path()).code, 1);
  EXPECT_EQ(cli("--help", dir.path()).code, 0);
}

TEST(Cli, GenerateInspectValidateRunReport) {
  test::TempDir dir("cli-ok");
  std::ofstream(dir / "spec.toml") << "n_subjects = 2\nn_trials_per_session = 4\ntrial_length_s = 4\n";
  auto r = cli("generate-synthetic " + q(dir / "spec.toml") + " " + q(dir / "data"), dir.path());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "data" / kManifestFileName));

  r = cli("validate " + q(dir / "data"), dir.path());
  EXPECT_EQ(r.code, 0) << r.out;
  r = cli("inspect " + q(dir / "data"), dir.path());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("s01"), std::string::npos) << r.out;

  std::ofstream(dir / "run.toml") << "[dataset]\nmanifest = \"data\"\n[model]\nkind = "
                                     "\"majority_baseline\"\n[logging]\noutput_dir = \"out\"\n";
  r = cli("run " + q(dir / "run.toml"), dir.path());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "out" / kSummaryFile));

  r = cli("report " + q(dir / "out" / kSummaryFile) + " --format csv", dir.path());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.rfind("row,accuracy,", 0), 0u) << r.out;
}

TEST(Cli, DataProblemsExitTwo) {
  test::TempDir dir("cli-data");
  SyntheticSpec spec;
  spec.trial_length_s = 4;
  const auto m = generate_synthetic(spec, dir / "data");
  const auto victim = dir / "data" / m.subjects[0].sessions[0].trials[0].signal_path;
  fs::resize_file(victim, fs::file_size(victim) - 4);
  const auto r = cli("validate " + q(dir / "data"), dir.path());
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("s01/sess01/t01"), std::string::npos) << r.out;

  std::ofstream(dir / "bad.toml") << "[dataset]\nmanifest = \"data\"\n[modle]\n";
  EXPECT_EQ(cli("run " + q(dir / "bad.toml"), dir.path()).code, 2);
}

TEST(Cli, IoProblemsExitThree) {
  test::TempDir dir("cli-io");
  EXPECT_EQ(cli("run " + q(dir / "missing.toml"), dir.path()).code, 3);
  EXPECT_EQ(cli("inspect " + q(dir / "nothing"), dir.path()).code, 3);
}
