#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "tempdir.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kTool = RFILT_CLI;
const fs::path kGolden = fs::path(RFILT_SOURCE_DIR) / "tests" / "cli" / "golden";
const fs::path kConfigs = fs::path(RFILT_SOURCE_DIR) / "configs" / "phase2";

struct Output {
  int status;
  std::string out;
};

Output run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + kTool.string() + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int rc = pclose(p);
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in, "missing " << p);
  return {std::istreambuf_iterator<char>(in), {}};
}

// RFILT_UPDATE_GOLDEN=1 rewrites the golden file instead of comparing.
void golden(const std::string& name, const std::string& actual) {
  const fs::path p = kGolden / name;
  if (std::getenv("RFILT_UPDATE_GOLDEN")) {
    std::ofstream(p, std::ios::binary) << actual;
    return;
  }
  CHECK_MESSAGE(slurp(p) == actual, "golden mismatch for " << name << ":\n" << actual);
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("phantom") {
  oracle::TempDir d;
  auto r = run("phantom --kind impulse --out " + q(d / "imp.nii.gz"));
  CHECK(r.status == 0);
  golden("phantom_impulse.txt", r.out);
  r = run("phantom --kind orientation --datatype u8 --out " + q(d / "o.nii"));
  CHECK(r.status == 0);
  golden("phantom_orientation.txt", r.out);
  CHECK(run("phantom --kind cube --out " + q(d / "x.nii")).status == 1);
}

TEST_CASE("filter") {
  oracle::TempDir d;
  REQUIRE(run("phantom --kind impulse --out " + q(d / "imp.nii.gz")).status == 0);
  auto r = run("filter --image " + q(d / "imp.nii.gz") + " --out " + q(d / "mean.nii") +
               " --filter mean --M 5 --boundary mirror");
  CHECK(r.status == 0);
  golden("filter_mean.txt", r.out);

  r = run("filter --image " + q(d / "imp.nii.gz") + " --out " + q(d / "log.nii.gz") +
          " --filter log --sigma-mm 5 --cutoff 4");
  CHECK(r.status == 0);
  CHECK(r.out.find("sigma=2.5 vox, M=21") != std::string::npos);
  golden("filter_log.txt", r.out);

  r = run("filter --image " + q(d / "imp.nii.gz") + " --out " + q(d / "laws.nii.gz") +
          " --filter laws --kernel L5E5E5 --invariance right_angle --pooling max --energy-delta-vox 7");
  CHECK(r.status == 0);
  golden("filter_laws.txt", r.out);

  r = run("filter --image " + q(d / "imp.nii.gz") + " --out " + q(d / "x.nii") +
          " --filter gabor --sigma-mm 5 --lambda-vox 2 --gamma 1.5");
  CHECK(r.status != 0);

  r = run("filter --image " + q(d / "missing.nii") + " --out " + q(d / "x.nii") + " --filter mean");
  CHECK(r.status == 1);
  CHECK(r.out.find("not found") != std::string::npos);
}

TEST_CASE("features and compare") {
  oracle::TempDir d;
  REQUIRE(run("phantom --kind sphere --out " + q(d / "s.nii.gz")).status == 0);
  REQUIRE(run("phantom --kind noise --seed 5 --out " + q(d / "n.nii.gz")).status == 0);
  auto r = run("features --image " + q(d / "n.nii.gz") + " --mask " + q(d / "s.nii.gz") + " --test-id noise");
  CHECK(r.status == 0);
  golden("features_noise.csv", r.out);
  REQUIRE(run("features --image " + q(d / "n.nii.gz") + " --out " + q(d / "f.json")).status == 0);
  CHECK(slurp(d / "f.json").find("\"Q4LE\"") != std::string::npos);

  r = run("compare --candidate " + q(d / "n.nii.gz") + " --reference " + q(d / "s.nii.gz") +
          " --abs-tol 128 --diff " + q(d / "diff.nii"));
  CHECK(r.status == 0);
  golden("compare.txt", r.out);
  CHECK(run("compare --strict --candidate " + q(d / "n.nii.gz") + " --reference " + q(d / "s.nii.gz")).status == 2);
  CHECK(run("compare --strict --candidate " + q(d / "n.nii.gz") + " --reference " + q(d / "n.nii.gz")).status == 0);
}

TEST_CASE("consensus") {
  std::string all;
  for (int total = 1; total <= 12; total += 3)
    for (int m = 0; m <= total; m += 2) {
      const auto r = run("consensus --matching " + std::to_string(m) + " --total " + std::to_string(total));
      CHECK(r.status == 0);
      all += std::to_string(m) + "/" + std::to_string(total) + " " + r.out;
    }
  golden("consensus_levels.txt", all);

  oracle::TempDir d;
  std::string maps;
  for (int s = 1; s <= 4; ++s) {
    const auto p = d / ("n" + std::to_string(s) + ".nii.gz");
    REQUIRE(run("phantom --kind noise --seed " + std::to_string(s) + " --out " + q(p)).status == 0);
    maps += " " + q(p);
  }
  REQUIRE(run("phantom --kind checkerboard --out " + q(d / "c.nii.gz")).status == 0);
  maps += " " + q(d / "c.nii.gz");
  const auto r = run("consensus --maps" + maps + " --out " + q(d / "c.csv"));
  CHECK(r.status == 0);
  CHECK(r.out.find("submissions=5") != std::string::npos);
  golden("consensus_maps.csv", slurp(d / "c.csv"));
}

TEST_CASE("run writes response, features and config") {
  oracle::TempDir d;
  REQUIRE(run("phantom --kind noise --seed 2 --out " + q(d / "img.nii.gz")).status == 0);
  REQUIRE(run("phantom --kind sphere --out " + q(d / "mask.nii.gz")).status == 0);
  const auto r = run("run --config " + q(kConfigs / "3A.json") + " --image " + q(d / "img.nii.gz") + " --mask " +
                     q(d / "mask.nii.gz") + " --out " + q(d / "out"));
  CHECK(r.status == 0);
  golden("run_3A.txt", r.out);
  golden("run_3A_features.csv", slurp(d / "out" / "3.A_features.csv"));
  CHECK(fs::exists(d / "out" / "3.A_response.nii.gz"));
  CHECK(fs::exists(d / "out" / "3.A_features.json"));
  CHECK(fs::exists(d / "out" / "3.A_config.json"));
  CHECK(run("run --config " + q(d / "nope.json") + " --image " + q(d / "img.nii.gz") + " --mask " +
            q(d / "mask.nii.gz") + " --out " + q(d / "out"))
            .status == 1);
}

TEST_CASE("thread count does not change outputs") {
  oracle::TempDir d;
  REQUIRE(run("phantom --kind noise --seed 3 --out " + q(d / "img.nii.gz")).status == 0);
  const std::string common = "filter --image " + q(d / "img.nii.gz") +
                             " --filter wavelet --wavelet db3 --level 2 --subband HHL --invariance right_angle"
                             " --pooling average --force-multilevel-invariance";
  REQUIRE(run("--threads 1 " + common + " --out " + q(d / "t1.nii.gz")).status == 0);
  REQUIRE(run("--threads 3 " + common + " --out " + q(d / "t3.nii.gz")).status == 0);
  REQUIRE(run(common + " --out " + q(d / "env.nii.gz"), "RFILT_THREADS=2").status == 0);
  CHECK(slurp(d / "t1.nii.gz") == slurp(d / "t3.nii.gz"));
  CHECK(slurp(d / "t1.nii.gz") == slurp(d / "env.nii.gz"));
  CHECK(run("phantom --kind empty --out " + q(d / "e.nii"), "RFILT_THREADS=zero").status == 1);
}
