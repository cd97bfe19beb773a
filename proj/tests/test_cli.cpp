#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace {

struct Result {
  int exit_code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dipe::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli({"coeffs", "--bogus-flag", "1"}).exit_code == 2);
  CHECK(run_cli({"coeffs"}).exit_code == 2);  // missing required --family
  CHECK(run_cli({"simulate", "--rho", "ghz:2", "--sigma", "ghz:3"}).exit_code == 2);
  CHECK(run_cli({"verify", "nonsense"}).exit_code == 2);
  CHECK(run_cli({"plan", "--eps", "2.0"}).exit_code == 2);
  CHECK(run_cli({"coeffs", "--family", "chain:3:9"}).exit_code == 2);
}

TEST_CASE("verify suites pass and report lines") {
  auto kernel = run_cli({"verify", "kernel", "--n", "5"});
  CHECK(kernel.exit_code == 0);
  CHECK(kernel.out.find("alpha = (0,0,0,0,0,1)") != std::string::npos);
  CHECK(kernel.out.find("ALL PASS") != std::string::npos);

  auto ops = run_cli({"verify", "operators"});
  CHECK(ops.exit_code == 0);

  auto bounds = run_cli({"verify", "bounds", "--states", "60"});
  CHECK(bounds.exit_code == 0);
  CHECK(bounds.out.find("36 at the bound 9/4") != std::string::npos);

  auto cert = run_cli({"verify", "certificate", "--families", "all", "--nmax", "10"});
  CHECK(cert.exit_code == 0);
  CHECK(cert.out.find("certificate.ghz") != std::string::npos);
  CHECK(cert.out.find("certificate.w") != std::string::npos);
  CHECK(cert.out.find("certificate.belldimer") != std::string::npos);
}

TEST_CASE("coeffs csv is deterministic and carries provenance") {
  const std::vector<std::string> args{"coeffs", "--family", "ghz:3",     "--family",
                                      "chain:4:2",  "--out",    "csv", "--no-timestamp"};
  auto r1 = run_cli(args);
  auto r2 = run_cli(args);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.out == r2.out);
  CHECK(r1.out.find("closed_form") != std::string::npos);
  CHECK(r1.out.find("stabilizer") != std::string::npos);
  CHECK(r1.out.find("# config: coeffs --family ghz:3") != std::string::npos);
  // header row present
  CHECK(r1.out.find("family,n,param,A,method_A") != std::string::npos);
}

TEST_CASE("simulate json output") {
  auto r = run_cli({"simulate", "--rho", "belldimer:2", "--sigma", "belldimer:2", "--ensemble",
                    "haar", "--nu", "3000", "--nm", "3", "--seed", "42", "--out", "json"});
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["config"]["seed"] == 42);
  CHECK(doc["overlap_exact"].get<double>() == doctest::Approx(1.0));
  CHECK(std::abs(doc["estimate"].get<double>() - 1.0) <
        5.0 * doc["standard_error"].get<double>() + 1e-12);
  // exact decomposition present with A=7, B=29/20 based terms
  CHECK(doc["exact_variance"]["v2"].get<double>() == doctest::Approx(7.0 / 9.0));
  CHECK(doc["exact_variance"]["v4"].get<double>() == doctest::Approx(29.0 / 20.0 * 4.0 / 9.0));

  // reruns with the same seed agree exactly
  auto r2 = run_cli({"simulate", "--rho", "belldimer:2", "--sigma", "belldimer:2", "--ensemble",
                     "haar", "--nu", "3000", "--nm", "3", "--seed", "42", "--out", "json"});
  auto doc2 = nlohmann::json::parse(r2.out);
  CHECK(doc["estimate"].get<double>() == doc2["estimate"].get<double>());

  // CSV output is byte-identical across reruns
  const std::vector<std::string> csv_args{"simulate", "--rho",  "ghz:2", "--sigma", "ghz:2",
                                          "--nu",     "500",    "--nm",  "2",       "--seed",
                                          "7",        "--out",  "csv",   "--no-timestamp",
                                          "--emit-blocks"};
  auto c1 = run_cli(csv_args);
  auto c2 = run_cli(csv_args);
  REQUIRE(c1.exit_code == 0);
  CHECK(c1.out == c2.out);
}

TEST_CASE("simulate shadow protocol") {
  auto r = run_cli({"simulate", "--rho", "prod:1:0:0", "--sigma", "prod:1:0:0", "--ensemble",
                    "shadow", "--nu", "4000", "--seed", "9", "--out", "json"});
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(std::abs(doc["estimate"].get<double>() - 1.0) < 0.1);
}

TEST_CASE("plan outputs") {
  auto r = run_cli({"plan", "--n", "8", "--eps", "0.05", "--delta", "0.01", "--regime",
                    "clifford", "--out", "json"});
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["n_m_star"] == 16);
  CHECK(doc["n_m_continuous"].get<double>() == doctest::Approx(16.0));

  auto table = run_cli({"plan", "--table", "--n", "6", "--no-timestamp"});
  REQUIRE(table.exit_code == 0);
  // five data rows after the header
  int rows = 0;
  std::istringstream lines(table.out);
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '#' && line.find("protocol,") != 0) ++rows;
  CHECK(rows == 5);

  auto shadow = run_cli({"plan", "--n", "1", "--regime", "shadow", "--out", "json"});
  auto sdoc = nlohmann::json::parse(shadow.out);
  CHECK(sdoc["n_star"] == 4002);
}

TEST_CASE("bench sweeps") {
  auto fams = run_cli({"bench", "--mode", "families", "--families", "plusprod,belldimer",
                       "--n-min", "1", "--n-max", "6", "--no-timestamp"});
  REQUIRE(fams.exit_code == 0);
  // plusprod Clifford rows carry log10 B = n log10(1.5)
  std::istringstream lines(fams.out);
  std::string line;
  int checked = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("plusprod", 0) != 0) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() >= 9);
    if (cells[3] != "clifford") continue;
    const int n = std::stoi(cells[1]);
    const double log10b = std::stod(cells[7]);
    CHECK(log10b == doctest::Approx(n * std::log10(1.5)).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked == 6);

  auto chain = run_cli({"bench", "--mode", "chain", "--n-min", "4", "--n-max", "4",
                        "--no-timestamp"});
  REQUIRE(chain.exit_code == 0);
  CHECK(chain.out.find("chain,4,0,") != std::string::npos);
  CHECK(chain.out.find("chain,4,3,") != std::string::npos);

  auto purity = run_cli({"bench", "--mode", "purity", "--n-min", "2", "--n-max", "2",
                         "--p-steps", "5", "--no-timestamp"});
  REQUIRE(purity.exit_code == 0);
  CHECK(purity.out.find("depol_plusprod,2,0,") != std::string::npos);
  CHECK(purity.out.find("depol_plusprod,2,1,") != std::string::npos);
}

TEST_CASE("bench marks uncomputable rows as skipped") {
  auto r = run_cli({"bench", "--mode", "families", "--families", "haar:3", "--n-min", "5",
                    "--n-max", "5", "--ensembles", "haar", "--no-timestamp"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("skipped:") != std::string::npos);
}

TEST_CASE("simulate with outcome-side depolarization") {
  // p=1 fully mixes both outcome strings, so the target is tr[(I/4)(I/4)]·... = 1/4
  auto r = run_cli({"simulate", "--rho", "plusprod:2", "--sigma", "plusprod:2", "--depol", "1.0",
                    "--nu", "20000", "--nm", "2", "--seed", "13", "--out", "json"});
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  const double est = doc["estimate"].get<double>();
  const double se = doc["standard_error"].get<double>();
  CHECK(std::abs(est - 0.25) <= 5.0 * se);
}

TEST_CASE("config file preloads defaults and flags override") {
  const std::string path = "/tmp/dipe_test_config.json";
  {
    std::ofstream f(path);
    f << R"({"n": 7, "eps": 0.2})";
  }
  auto r = run_cli({"plan", "--config", path, "--out", "json"});
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["n"] == 7);
  CHECK(doc["epsilon"].get<double>() == doctest::Approx(0.2));

  // explicit flag wins over the config value
  auto r2 = run_cli({"plan", "--config", path, "--n", "3", "--out", "json"});
  auto doc2 = nlohmann::json::parse(r2.out);
  CHECK(doc2["n"] == 3);

  // the environment variable is the fallback path
  setenv("DIPE_CONFIG", path.c_str(), 1);
  auto r3 = run_cli({"plan", "--out", "json"});
  unsetenv("DIPE_CONFIG");
  REQUIRE(r3.exit_code == 0);
  CHECK(nlohmann::json::parse(r3.out)["n"] == 7);
  std::remove(path.c_str());
}
