#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("qswn_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(QSWN_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const Scratch& s, const std::string& name, const std::string& text) {
  const auto path = s / name;
  std::ofstream(path) << text;
  return path;
}

const char* kSmallAnderson = R"([scenario]
kind = anderson
width = 6
[system]
n = 48
[sweep]
grid = 0:0.3:0.1
realizations = 4
seed = 17
observables = spectrum_entropy, gap_ratio
)";

}  // namespace

TEST_CASE("cli sweep is reproducible and independent of worker count") {
  Scratch s;
  const auto conf = write_config(s, "a.conf", kSmallAnderson);
  const std::string base = "sweep --quiet --config " + conf.string();
  REQUIRE(run(base + " --out " + (s / "one").string() + " --workers 1", s / "log1") == 0);
  REQUIRE(run(base + " --out " + (s / "again").string() + " --workers 1", s / "log2") == 0);
  REQUIRE(run(base + " --out " + (s / "many").string() + " --workers 4", s / "log3") == 0);
  const auto csv = slurp(s / "one" / "sweep.csv");
  CHECK(csv.rfind("grid_value,mean_entropy,stderr_entropy,mean_gap_ratio,realizations\n", 0) == 0);
  CHECK(csv == slurp(s / "again" / "sweep.csv"));
  CHECK(csv == slurp(s / "many" / "sweep.csv"));
  CHECK(fs::exists(s / "one" / "sweep.svg"));
  CHECK(slurp(s / "one" / "sweep.svg").find("<svg") != std::string::npos);

  const auto manifest = nlohmann::json::parse(slurp(s / "one" / "manifest.json"));
  CHECK(manifest.at("master_seed").get<std::uint64_t>() == 17);
  CHECK(manifest.at("complete").get<bool>());
  CHECK(manifest.at("points").size() == 4);

  // Rerunning from the manifest's config snapshot reproduces the CSV.
  const auto snapshot = write_config(s, "snapshot.conf", manifest.at("config").get<std::string>());
  REQUIRE(run("sweep --quiet --config " + snapshot.string() + " --out " + (s / "replay").string(), s / "log4") == 0);
  CHECK(slurp(s / "replay" / "sweep.csv") == csv);
}

TEST_CASE("cli seed precedence") {
  Scratch s;
  const auto conf = write_config(s, "a.conf", kSmallAnderson);
  const std::string base = "sweep --quiet --config " + conf.string();
  REQUIRE(run(base + " --out " + (s / "cfg").string(), s / "log") == 0);
  ::setenv("QSWN_SEED", "5", 1);
  REQUIRE(run(base + " --out " + (s / "env").string(), s / "log") == 0);
  REQUIRE(run(base + " --seed 5 --out " + (s / "flag").string(), s / "log") == 0);
  REQUIRE(run(base + " --seed 17 --out " + (s / "flag17").string(), s / "log") == 0);
  ::unsetenv("QSWN_SEED");
  CHECK(slurp(s / "env" / "sweep.csv") == slurp(s / "flag" / "sweep.csv"));
  CHECK(slurp(s / "env" / "sweep.csv") != slurp(s / "cfg" / "sweep.csv"));
  CHECK(slurp(s / "flag17" / "sweep.csv") == slurp(s / "cfg" / "sweep.csv"));
}

TEST_CASE("cli rejects a malformed grid with the config exit code") {
  Scratch s;
  std::string text = kSmallAnderson;
  text.replace(text.find("0:0.3:0.1"), 9, "0:0.3");
  const auto conf = write_config(s, "bad.conf", text);
  CHECK(run("sweep --quiet --config " + conf.string() + " --out " + (s / "o").string(), s / "log") == 2);
  const auto log = slurp(s / "log");
  CHECK(log.find("sweep.grid") != std::string::npos);
  CHECK(log.find("bad.conf:7") != std::string::npos);

  const auto good = write_config(s, "good.conf", kSmallAnderson);
  CHECK(run("sweep --quiet --config " + good.string() + " --out " + (s / "o").string() + " --set sweep.realizations=0",
            s / "log") == 2);
  CHECK(slurp(s / "log").find("sweep.realizations") != std::string::npos);
}

TEST_CASE("cli usage errors") {
  Scratch s;
  CHECK(run("", s / "log") == 1);
  CHECK(run("sweep --out x", s / "log") == 1);
  CHECK(run("frobnicate", s / "log") == 1);
  CHECK(run("--help", s / "log") == 0);
}

TEST_CASE("cli analyze") {
  Scratch s;
  std::ofstream(s / "flat.csv") << "grid_value,mean_entropy,stderr_entropy,mean_gap_ratio,realizations\n"
                                << "0,0.5,0.01,nan,10\n0.1,0.5,0.01,nan,10\n0.2,0.5,0.01,nan,10\n"
                                << "0.3,0.5,0.01,nan,10\n0.4,0.5,0.01,nan,10\n0.5,0.5,0.01,nan,10\n"
                                << "0.6,0.5,0.01,nan,10\n0.7,0.5,0.01,nan,10\n0.8,0.5,0.01,nan,10\n";
  CHECK(run("analyze " + (s / "flat.csv").string() + " --out " + (s / "flat").string(), s / "log") == 4);
  CHECK(slurp(s / "log").find("no interior transition") != std::string::npos);
  CHECK(slurp(s / "flat" / "analysis.txt").find("flat curve") != std::string::npos);

  std::ostringstream rise;
  rise << "grid_value,mean_entropy,stderr_entropy,mean_gap_ratio,realizations\n";
  for (int i = 0; i <= 20; ++i) {
    const double x = 0.05 * i;
    rise << x << ',' << 1.0 / (1.0 + std::exp(-(x - 0.45) / 0.1)) << ",0.01,nan,10\n";
  }
  std::ofstream(s / "rise.csv") << rise.str();
  REQUIRE(run("analyze " + (s / "rise.csv").string() + " --out " + (s / "rise").string(), s / "log") == 0);
  CHECK(slurp(s / "log").find("p* = ") != std::string::npos);
  CHECK(slurp(s / "rise" / "derivative.csv").rfind("p,dEv_dp\n", 0) == 0);

  std::string holed = rise.str();
  const auto pos = holed.find("\n0.25,");
  holed.replace(holed.find(',', pos + 1) + 1, holed.find(',', holed.find(',', pos + 1) + 1) - holed.find(',', pos + 1) - 1,
                "nan");
  std::ofstream(s / "holed.csv") << holed;
  CHECK(run("analyze " + (s / "holed.csv").string() + " --out " + (s / "h").string(), s / "log") == 3);
  CHECK(run("analyze " + (s / "holed.csv").string() + " --allow-incomplete --out " + (s / "h").string(), s / "log") ==
        0);
}

TEST_CASE("cli graph") {
  Scratch s;
  REQUIRE(run("graph --n 20 -L 4 --seed 3", s / "a") == 0);
  REQUIRE(run("graph --n 20 -L 4 --seed 3 --out " + (s / "g.txt").string() + " --matrix " + (s / "h.txt").string(),
              s / "log") == 0);
  CHECK(slurp(s / "a").rfind("n 20 shortcuts 4 seed 3\n", 0) == 0);
  CHECK(slurp(s / "a") == slurp(s / "g.txt"));
  // 2 (N + L) off-diagonal nonzeros, one triplet line each.
  const auto triplets = slurp(s / "h.txt");
  CHECK(std::count(triplets.begin(), triplets.end(), '\n') >= 48);
  CHECK(run("graph --n 5 -L 9", s / "log") != 0);
}

TEST_CASE("cli profile") {
  Scratch s;
  const auto conf = write_config(s, "h.conf", R"([scenario]
kind = harper
[system]
n = 89
[sweep]
axis = lambda
grid = 1
realizations = 2
seed = 4
)");
  REQUIRE(run("profile --quiet --config " + conf.string() + " --lambda 3 -L 5 --sites --out " + (s / "p").string(),
              s / "log") == 0);
  for (const char* name : {"profile_r0.csv", "profile_r1.csv", "eigenvalues_r0.csv", "sites_r1.csv", "profile.svg",
                           "manifest.json"}) {
    CHECK_MESSAGE(fs::exists(s / "p" / name), name);
  }
  const auto profile = slurp(s / "p" / "profile_r0.csv");
  CHECK(profile.rfind("state_index,eigenvalue,state_entropy_scaled\n", 0) == 0);
  CHECK(std::count(profile.begin(), profile.end(), '\n') == 90);
  const auto sites = slurp(s / "p" / "sites_r0.csv");
  CHECK(std::count(sites.begin(), sites.end(), '\n') == 89 * 89 + 1);

  REQUIRE(run("profile --quiet --config " + conf.string() + " --lambda 3 -L 0 --out " + (s / "q").string(), s / "log") ==
          0);
  CHECK(fs::exists(s / "q" / "profile_r0.csv"));
  CHECK_FALSE(fs::exists(s / "q" / "profile_r1.csv"));

  const auto anderson = write_config(s, "a.conf", kSmallAnderson);
  CHECK(run("profile --quiet --config " + anderson.string() + " --lambda 3 -L 0 --out " + (s / "r").string(),
            s / "log") == 2);
}
