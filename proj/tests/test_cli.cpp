#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
  int rc = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const char* bin = std::getenv("IONCHAIN_BIN");
  REQUIRE(bin != nullptr);
  std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  int status = pclose(p);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

int fieldCount(const std::string& row) {
  return int(std::count(row.begin(), row.end(), ',')) + 1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kCsvHeader =
    "code,basis,p2q,p1q,pms,invT2,rabi,shots,violations,rate,ci_low,ci_high,"
    "p_phys,below_threshold,tail_bound";

}  // namespace

TEST_CASE("codes subcommand lists all four codes") {
  auto r = run("codes");
  REQUIRE(r.rc == 0);
  for (const char* name : {"BaconShor13", "Surface17", "Shor6Z2X", "Shor6X2Z"})
    REQUIRE(r.out.find(name) != std::string::npos);
  REQUIRE(r.out.find("logical Z") != std::string::npos);
}

TEST_CASE("compile prints gate counts per code and basis") {
  auto r = run("compile --code shor6z2x");
  REQUIRE(r.rc == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  REQUIRE(ls[0].find("Shor6Z2X Z:") == 0);
  REQUIRE(ls[0].find("xx=") != std::string::npos);
}

TEST_CASE("chain reports the optimizer result and the published diff") {
  auto r = run("chain --code surface17 --json /tmp/cli_chain.json");
  REQUIRE(r.rc == 0);
  REQUIRE(r.out.find("published ordering is optimal in extra edges") != std::string::npos);
  json all = json::parse(slurp("/tmp/cli_chain.json"));
  REQUIRE(all.size() == 1);
  const json& c = all[0];
  REQUIRE(c["code"] == "Surface17");
  REQUIRE(c["optimal"]["extraEdgeCount"] == 0);
  REQUIRE(c["published"]["extraEdgeCount"] == 0);
  REQUIRE(c["optimal"]["order"].size() == 17);
  REQUIRE(!c["edges"].empty());
}

TEST_CASE("simulate emits the frozen CSV schema") {
  auto r = run("simulate --code surface17 --p2q 1e-3 --shots 2000 --seed 7");
  REQUIRE(r.rc == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 3);
  REQUIRE(ls[0] == kCsvHeader);
  REQUIRE(fieldCount(ls[1]) == 15);
  REQUIRE(ls[1].rfind("Surface17,Z,", 0) == 0);
  REQUIRE(ls[2].rfind("Surface17,X,", 0) == 0);
}

TEST_CASE("fixed seeds give identical result files across thread counts") {
  auto a = run(
      "simulate --code baconshor13 --p2q 1e-3 --shots 6000 --seed 3 --threads 1 "
      "--out /tmp/cli_t1.csv");
  auto b = run(
      "simulate --code baconshor13 --p2q 1e-3 --shots 6000 --seed 3 --threads 8 "
      "--out /tmp/cli_t8.csv");
  REQUIRE(a.rc == 0);
  REQUIRE(b.rc == 0);
  REQUIRE(slurp("/tmp/cli_t1.csv") == slurp("/tmp/cli_t8.csv"));
}

TEST_CASE("config files fill defaults and flags override them") {
  {
    std::ofstream cfg("/tmp/cli_cfg.txt");
    cfg << "# test config\ncode=surface17\np2q=1e-3\nshots=1234\nseed=5\n";
  }
  auto fromFile = run("simulate --config /tmp/cli_cfg.txt");
  REQUIRE(fromFile.rc == 0);
  REQUIRE(lines(fromFile.out).size() == 3);
  REQUIRE(fromFile.out.find(",1234,") != std::string::npos);

  auto overridden = run("simulate --config /tmp/cli_cfg.txt --shots 777");
  REQUIRE(overridden.rc == 0);
  REQUIRE(overridden.out.find(",777,") != std::string::npos);
  REQUIRE(overridden.out.find(",1234,") == std::string::npos);
}

TEST_CASE("bad input is a config error, bad destination an io error") {
  REQUIRE(run("simulate --p2q -1").rc == 2);
  REQUIRE(run("nonsense").rc == 2);
  REQUIRE(run("sweep --x bogus --shots 10").rc == 2);
  REQUIRE(run("simulate --code noSuchCode --shots 10").rc == 2);
  REQUIRE(run("simulate --code surface17 --shots 10 --out /no/such/dir/x.csv").rc == 4);
}

TEST_CASE("sweep writes the grid CSV and a JSON summary") {
  auto r = run(
      "sweep --code surface17 --x p2q:5e-4:2e-3:log:2 --shots 2000 --seed 11 "
      "--out /tmp/cli_sweep.csv --summary /tmp/cli_sweep.json");
  REQUIRE(r.rc == 0);
  auto ls = lines(slurp("/tmp/cli_sweep.csv"));
  REQUIRE(ls.size() == 5);
  REQUIRE(ls[0] == kCsvHeader);
  json s = json::parse(slurp("/tmp/cli_sweep.json"));
  REQUIRE(s["axes"]["x"]["param"] == "p2q");
  REQUIRE(s["axes"]["x"]["values"].size() == 2);
  REQUIRE(s["regions"].size() == 2);
  REQUIRE(s["codes"] == json::array({"Surface17"}));
  REQUIRE(s.contains("pseudothreshold"));
}

TEST_CASE("bias reports the ZZ share of logical failures") {
  auto r = run("bias --code baconshor13 --invT2 2 --shots 4000 --seed 13");
  REQUIRE(r.rc == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  REQUIRE(ls[0].rfind("code,", 0) == 0);
  REQUIRE(ls[1].rfind("BaconShor13,", 0) == 0);
  auto last = ls[1].rfind(',');
  std::string bias = ls[1].substr(last + 1);
  if (!bias.empty()) {
    double v = std::stod(bias);
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
  }
}

TEST_CASE("validate accepts a correct build") {
  auto r = run("validate --code surface17");
  REQUIRE(r.rc == 0);
  REQUIRE(r.out.find("all checks passed") != std::string::npos);
  REQUIRE(r.out.find("FAIL") == std::string::npos);
}
