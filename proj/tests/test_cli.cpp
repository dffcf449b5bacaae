#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SULREG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Work {
  fs::path dir = fs::temp_directory_path() / "sulreg_cli_test";
  Work() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Work() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

}  // namespace

TEST(Cli, SynthThenRegister) {
  Work w;
  ASSERT_EQ(run("synth --points 500 --corrs 100 --outlier-rate 0.5 --noise 0.002 --seed 3 --out-dir " +
                w.dir.string()),
            0);
  for (auto f : {"source.xyz", "target.xyz", "corr.txt", "gt.json", "true_inliers.txt"})
    EXPECT_TRUE(fs::exists(w / f)) << f;
  EXPECT_EQ(run("register --source " + (w / "source.xyz") + " --target " + (w / "target.xyz") +
                " --corr " + (w / "corr.txt") + " --gt " + (w / "gt.json") + " --tr 0.01 --seed 1 --out " +
                (w / "result.json") + " --dump-histograms " + w.dir.string()),
            0);
  std::ifstream in(w / "result.json");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_NE(text.find("\"rotation_error_deg\""), std::string::npos);
}

TEST(Cli, ExitCodes) {
  Work w;
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("register --source a.xyz"), 1);
  std::ofstream(w / "bad.xyz") << "1 2\n";
  std::ofstream(w / "ok.xyz") << "0 0 0\n1 0 0\n0 1 0\n";
  std::ofstream(w / "c.txt") << "0 0\n1 1\n2 2\n";
  EXPECT_EQ(run("register --source " + (w / "bad.xyz") + " --target " + (w / "ok.xyz") + " --corr " +
                (w / "c.txt") + " --tr 0.01 --seed 1 --out " + (w / "r.json")),
            2);
  EXPECT_EQ(run("register --source " + (w / "missing.xyz") + " --target " + (w / "ok.xyz") +
                " --corr " + (w / "c.txt") + " --tr 0.01 --seed 1 --out " + (w / "r.json")),
            2);
  EXPECT_EQ(run("register --source " + (w / "ok.xyz") + " --target " + (w / "ok.xyz") + " --corr " +
                (w / "c.txt") + " --tr -1 --seed 1 --out " + (w / "r.json")),
            1);
}
