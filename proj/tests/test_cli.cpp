#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SSEP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path fresh(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ssep_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("exit codes") {
  const auto dir = fresh("codes");
  CHECK(run("heat --set grid.n=10 --out " + dir.string()) == 0);
  CHECK(std::filesystem::exists(dir / "heat.csv"));
  CHECK(run("heat --set grid.n=2 --out " + dir.string()) == 2);
  CHECK(run("heat --set profile.eps0=0.49 --out " + dir.string()) == 2);
  CHECK(run("heat --format xml --out " + dir.string()) == 2);
  CHECK(run("--out " + dir.string()) == 2);
  CHECK(run("heat --config /nonexistent.ini") == 2);
  // a declared predicate that cannot hold
  CHECK(run("cutoff --set grid.n=8 --set acceptance.gap_max=1e-12 --out " + dir.string()) == 1);
  CHECK(run("--help") == 0);
}

TEST_CASE("config file, flag precedence and byte-stable reruns") {
  const auto dir = fresh("stable");
  std::filesystem::create_directories(dir);
  const auto ini = dir / "tv.ini";
  std::ofstream(ini) << "[experiment]\nid = tv\nseed = 3\n[grid]\nn = 24\nb = 0, 1\n[methods]\ntv = grid, mc\nmc_samples = 4000\n";
  const auto a = dir / "a", b = dir / "b", c = dir / "c";
  const std::string base = "tv --config " + ini.string() + " --format plot";
  REQUIRE(run(base + " --out " + a.string()) == 0);
  REQUIRE(run(base + " --workers 2 --out " + b.string()) == 0);
  REQUIRE(run(base + " --seed 4 --out " + c.string()) == 0);
  CHECK(slurp(a / "tv.csv") == slurp(b / "tv.csv"));
  CHECK(slurp(a / "tv_n24_mc.dat") == slurp(b / "tv_n24_mc.dat"));
  CHECK(slurp(a / "tv.csv") != slurp(c / "tv.csv"));  // the flag overrides the file seed
  CHECK(slurp(a / "tv.csv").find(",3,0\n") != std::string::npos);
  CHECK(run("cutoff --config " + ini.string()) == 2);  // file is for another experiment
}
