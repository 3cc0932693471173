#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nstab/cli.hpp"
#include "nstab/error.hpp"

using nlohmann::json;
namespace cli = nstab::cli;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
  json parsed() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "nstab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nstab_cli_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("descriptor and grid parsing") {
  const cli::Descriptor d = cli::parse_descriptor("cube:n=3,p=0.25");
  CHECK(d.name == "cube");
  CHECK(d.integer("n", 0) == 3);
  CHECK(d.number("p", 0.5) == doctest::Approx(0.25));
  CHECK(d.text("range", "pm") == "pm");
  CHECK(cli::parse_descriptor("parity").params.empty());
  const std::vector<double> lin = cli::parse_grid("lin:0.1:0.9:5");
  REQUIRE(lin.size() == 5);
  CHECK(lin[4] == doctest::Approx(0.9));
  const std::vector<double> lg = cli::parse_grid("log:0.01:1:3");
  CHECK(lg[1] == doctest::Approx(0.1));
  CHECK(cli::parse_grid("0.2,0.4").size() == 2);
  CHECK_THROWS(cli::parse_grid("lin:1:2"));
}

TEST_CASE("influences command") {
  const Run maj = run({"influences", "--model", "cube:n=3", "--fn", "majority"});
  REQUIRE(maj.code == cli::kExitPass);
  const json p = maj.parsed()["instances"][0]["profile"];
  REQUIRE(p.size() == 3);
  for (const auto& v : p) CHECK(v.get<double>() == doctest::Approx(1.0));
  const Run c = run({"influences", "--model", "cube:n=3", "--fn", "constant"});
  for (const auto& v : c.parsed()["instances"][0]["profile"]) CHECK(v.get<double>() == 0.0);
  const Run h = run({"influences", "--model", "gaussian:n=1", "--fn", "halfspace:a=0"});
  REQUIRE(h.code == cli::kExitPass);
  CHECK(h.parsed()["instances"][0]["profile"][0].get<double>() ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
}

TEST_CASE("influences CSV") {
  const auto path = temp_file("infl.csv");
  const Run r = run({"influences", "--model", "cube:n=2", "--fn", "dictator", "--csv", path.string()});
  REQUIRE(r.code == cli::kExitPass);
  const std::string csv = slurp(path);
  CHECK(csv.rfind("function_id,direction,value", 0) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("stability command") {
  const Run d = run({"stability", "--model", "cube:n=3", "--fn", "dictator", "--grid", "0.2,0.7"});
  REQUIRE(d.code == cli::kExitPass);
  for (const auto& inst : d.parsed()["instances"]) {
    CHECK(inst["exact"].get<double>() == doctest::Approx(1.0 - inst["eta"].get<double>()));
  }
  const Run p = run({"stability", "--model", "cube:n=4", "--fn", "parity"});
  const json pi = p.parsed()["instances"];
  CHECK(pi.size() == 19);
  for (const auto& inst : pi) {
    CHECK(inst["exact"].get<double>() == doctest::Approx(std::pow(1.0 - inst["eta"].get<double>(), 4)));
  }
  const Run h = run({"stability", "--model", "gaussian:n=1", "--fn", "halfspace:a=0", "--grid", "0.3,0.6"});
  for (const auto& inst : h.parsed()["instances"]) {
    const double eta = inst["eta"].get<double>();
    CHECK(inst["exact"].get<double>() ==
          doctest::Approx(std::asin(std::sqrt(1 - eta * eta)) / (2 * std::numbers::pi)).epsilon(1e-9));
  }
}

TEST_CASE("verify command and exit codes") {
  const Run ok = run({"verify", "--model", "cube:n=12", "--fn", "tribes:w=3,range=01", "--fn", "parity:range=01",
                      "--bound", "T1.6"});
  CHECK(ok.code == cli::kExitPass);
  CHECK(ok.parsed()["summary"]["passed"].get<bool>());
  const Run bad = run({"verify", "--model", "cube:n=3", "--fn", "dictator", "--bound", "T9.9"});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(run({"verify", "--model", "cube:n=3"}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"verify", "--model", "sphere:n=3", "--fn", "dictator"}).code == cli::kExitUsage);
  CHECK(run({"verify", "--model", "cube:n=3", "--fn", "dictator", "--bound", "T1.7"}).code == cli::kExitUsage);
}

TEST_CASE("seeded runs are byte-identical") {
  const std::vector<std::string> args{"verify", "--model", "cube:n=5", "--fn", "random:count=5,range=01",
                                      "--bound", "T1.6", "--seed", "42"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == cli::kExitPass);
  CHECK(a.out == b.out);
  std::vector<std::string> other = args;
  other.back() = "43";
  CHECK(run(other).out != a.out);
  const std::vector<std::string> mc{"stability", "--model", "cube:n=3", "--fn", "majority", "--mc", "2000",
                                    "--seed", "9"};
  CHECK(run(mc).out == run(mc).out);
}

TEST_CASE("output files and CSV reports") {
  const auto json_path = temp_file("report.json");
  const auto csv_path = temp_file("report.csv");
  const Run r = run({"verify", "--model", "cube:n=3", "--fn", "majority:range=01", "--bound", "T1.6", "--grid",
                     "0.5,1", "--out", json_path.string(), "--csv", csv_path.string()});
  REQUIRE(r.code == cli::kExitPass);
  const json j = json::parse(slurp(json_path));
  CHECK(j["instances"].size() == 2);
  const std::string csv = slurp(csv_path);
  CHECK(csv.rfind("function_id,t,eta,lhs,rhs,ratio,vacuous,asserted,passed", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  std::filesystem::remove(json_path);
  std::filesystem::remove(csv_path);
}

TEST_CASE("constants command") {
  const json cube = run({"constants", "--model", "cube:n=3"}).parsed();
  CHECK(cube["spectral_gap"]["computed"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cube["log_sobolev"]["closed_form"].get<double>() == doctest::Approx(1.0));
  CHECK(cube["log_sobolev"]["computed"].get<double>() == doctest::Approx(1.0).epsilon(0.01));
  const json s4 = run({"constants", "--model", "symmetric:n=4"}).parsed();
  CHECK(s4["spectral_gap"]["computed"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  const json biased = run({"constants", "--model", "cube:n=2,p=0.3"}).parsed();
  const double closed = 2.0 * (0.3 - 0.7) / (std::log(0.3) - std::log(0.7));
  CHECK(biased["log_sobolev"]["closed_form"].get<double>() == doctest::Approx(closed));
  CHECK(biased["log_sobolev"]["relative_difference"].get<double>() <= 0.01);
}

TEST_CASE("junta command") {
  const Run d = run({"junta", "--model", "cube:n=4", "--fn", "dictator:i=1,range=01", "--t", "0.05", "--eta", "0.5"});
  REQUIRE(d.code == cli::kExitPass);
  const json inst = d.parsed()["instances"][0];
  CHECK(inst["S"] == json::array({0}));
  CHECK(inst["l1_error"].get<double>() == 0.0);
  const Run tr = run({"junta", "--model", "cube:n=12", "--fn", "tribes:w=3,range=01", "--epsilon", "0.1"});
  REQUIRE(tr.code == cli::kExitPass);
  const json tj = tr.parsed();
  CHECK(tj["summary"]["passed"].get<bool>());
  CHECK(tj["summary"]["achieved_error"].get<double>() <= 0.1);
  const Run big = run({"junta", "--model", "cube:n=5", "--fn", "majority:range=01", "--eta", "100"});
  const json bj = big.parsed()["instances"][0];
  CHECK(bj["S"].empty());
  CHECK(bj["l1_error"].get<double>() <= 1.0);
}

TEST_CASE("config files") {
  const auto path = temp_file("config.json");
  {
    std::ofstream out(path);
    out << R"({"model": "cube:n=3", "fn": ["parity"], "grid": "0.5"})";
  }
  const Run r = run({"stability", "--config", path.string()});
  REQUIRE(r.code == cli::kExitPass);
  CHECK(r.parsed()["instances"][0]["exact"].get<double>() == doctest::Approx(0.125));
  const Run over = run({"stability", "--config", path.string(), "--grid", "0.25"});
  CHECK(over.parsed()["instances"][0]["exact"].get<double>() == doctest::Approx(std::pow(0.75, 3)));
  {
    std::ofstream out(path);
    out << R"({"model": "cube:n=3", "colour": "blue"})";
  }
  CHECK(run({"stability", "--config", path.string()}).code == cli::kExitUsage);
  std::filesystem::remove(path);
}

TEST_CASE("function files") {
  const auto path = temp_file("f.txt");
  {
    std::ofstream out(path);
    out << "00 0\n10 1\n01 1\n11 0\n";
  }
  const Run r = run({"influences", "--model", "cube:n=2", "--fn", "file:path=" + path.string()});
  REQUIRE(r.code == cli::kExitPass);
  for (const auto& v : r.parsed()["instances"][0]["profile"]) CHECK(v.get<double>() == doctest::Approx(1.0));
  CHECK(run({"influences", "--model", "cube:n=3", "--fn", "file:path=" + path.string()}).code == cli::kExitUsage);
  std::filesystem::remove(path);
}

TEST_CASE("cayley models") {
  const Run r = run({"influences", "--model", "symmetric:n=3", "--fn", "coord:i=1,v=1"});
  REQUIRE(r.code == cli::kExitPass);
  const json p = r.parsed()["instances"][0]["profile"];
  REQUIRE(p.size() == 3);
  const Run v = run({"verify", "--model", "torus:m=3,n=2", "--fn", "random:count=3,density=0.4", "--bound", "L6.5"});
  CHECK(v.code == cli::kExitPass);
  CHECK(v.parsed()["summary"].contains("min_empirical_constant"));
}

}
