#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "tailidx/cli.hpp"
#include "tailidx/distributions.hpp"
#include "tailidx/estimators.hpp"

using namespace tailidx;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "tailidx");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path tmpdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("tailidx_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_data(const std::string& name, const std::vector<double>& xs) {
  const auto p = tmpdir() / name;
  std::ofstream f(p);
  f << "x\n";
  char buf[40];
  for (double x : xs) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    f << buf << '\n';
  }
  return p.string();
}

std::string write_text(const std::string& name, const std::string& text) {
  const auto p = tmpdir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::vector<std::pair<double, double>> parse_csv2(const std::string& csv) {
  std::vector<std::pair<double, double>> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto c = line.find(',');
    rows.emplace_back(std::stod(line.substr(0, c)), std::stod(line.substr(c + 1)));
  }
  return rows;
}

const char* kSmallSim =
    "[distribution]\nfamily = burr\ngamma = 1\nrho = -1\n"
    "[experiment]\nn = 300\nreplications = 24\npipelines = hill, gmr\nestimators = g1:k=40:r=0.2\n"
    "mode = dominance\n[grid]\ncells = 0.5:-0.5, 1:-1, 2:-2\n";

}  // namespace

TEST_CASE("estimate: fixed k passes the library value through") {
  const auto xs = draw({Family::burr, 1, -1, 1}, 2000, 3);
  const auto file = write_data("burr.csv", xs);
  const Sample s(xs);
  auto r = run({"estimate", "--kind", "hill", "--k", "100", file});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["gamma_hat"].get<double>() == hill(s, 100).gamma_hat);
  CHECK(j["k"] == 100);
  CHECK(j["n"] == 2000);
  CHECK(j["ci"]["lower"].get<double>() < j["gamma_hat"].get<double>());
  CHECK(j["ci"]["sigma2"].get<double>() == doctest::Approx(std::pow(hill(s, 100).gamma_hat, 2)));

  r = run({"estimate", "--kind", "g3", "--k", "150", "--r", "-0.3", file});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["gamma_hat"].get<double>() == g3(s, 150, -0.3).gamma_hat);
  CHECK(j["diagnostics"]["G_r1"].get<double>() == g3(s, 150, -0.3).diagnostics.g_r1);

  r = run({"estimate", "--kind", "hme", "--k", "150", "--beta", "0.6", file});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["gamma_hat"].get<double>() == hme(s, 150, 0.6).gamma_hat);

  r = run({"estimate", "--kind", "g1", "--k", "150", "--r", "optimal", file});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["R_star"].is_number());
  CHECK(j["rho_hat"].get<double>() < 0);
  CHECK(j["bias_term"].is_number());
}

TEST_CASE("estimate: adaptive GMR on a seeded Burr file") {
  const auto file = write_data("burr_adaptive.csv", draw({Family::burr, 1, -1, 1}, 1000, 2024));
  const auto r = run({"estimate", "--kind", "gmr", "--adaptive", file});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const double g = j["gamma_hat"].get<double>();
  CHECK(g > 0.5);
  CHECK(g < 1.5);
  CHECK(j["adaptive"] == true);
  CHECK(j["beta_hat"].is_number());
  CHECK(j["r"].get<double>() * j["R_star"].get<double>() > 0);  // r* = R*/gamma-hat shares the sign
}

TEST_CASE("estimate: error exits") {
  const auto bad = write_text("bad.csv", "1.5\n2.5\n3.5\nfour\n");
  auto r = run({"estimate", "--kind", "hill", "--k", "2", bad});
  CHECK(r.code == kExitParse);
  CHECK(r.err.find("line 4") != std::string::npos);
  const auto file = write_data("small.csv", {1, 2, 3, 4, 5});
  CHECK(run({"estimate", "--kind", "hill", "--k", "5", file}).code == kExitDomain);
  CHECK(run({"estimate", "--kind", "nope", "--k", "2", file}).code == kExitParse);
  CHECK(run({"estimate", "--kind", "hill", file}).code == kExitParse);
  CHECK(run({"estimate", "--kind", "hill", "--adaptive", file}).code == kExitDomain);
  const auto flat = write_data("flat.csv", {1, 2, 5, 5, 5});
  r = run({"estimate", "--kind", "moment", "--k", "3", flat});
  CHECK(r.code == kExitDegenerate);
  CHECK(run({"bogus"}).code == kExitParse);
  CHECK(run({"estimate", "--kind", "hill", "--k", "2", "/nonexistent/file"}).code == kExitParse);
}

TEST_CASE("optimal") {
  auto r = run({"optimal", "--j", "3", "--rho", "-1"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["R_star"].get<double>() == doctest::Approx(-0.302776).epsilon(1e-6));
  r = run({"optimal", "--j", "1", "--rho", "-1", "--gamma", "2"});
  j = nlohmann::json::parse(r.out);
  CHECK(j["R_star"].get<double>() == doctest::Approx(0.177124).epsilon(1e-6));
  CHECK(j["r_star"].get<double>() == doctest::Approx(0.177124 / 2).epsilon(1e-6));
  r = run({"optimal", "--j", "2", "--rho", "-1"});
  j = nlohmann::json::parse(r.out);
  CHECK(j["residual"].get<double>() < 1e-8);
  CHECK(j["k_star"].get<int>() >= 2);
  CHECK(run({"optimal", "--j", "1", "--rho", "0.5"}).code == kExitDomain);
  CHECK(run({"optimal", "--j", "4", "--rho", "-1"}).code == kExitDomain);
  CHECK(run({"optimal", "--j", "1", "--rho", "-1", "--beta", "0"}).code == kExitDomain);
  CHECK(run({"optimal", "--rho", "-1"}).code == kExitParse);
}

TEST_CASE("amse curves") {
  auto r = run({"amse", "--curve", "psiMR", "--rho-min", "-1000000", "--rho-max", "-1000000", "--step", "1"});
  REQUIRE(r.code == 0);
  auto rows = parse_csv2(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(std::abs(rows[0].second - 1.6875) < 1e-4);

  r = run({"amse", "--curve", "phi3", "--rho-min", "-10", "--rho-max", "-0.1", "--step", "0.01"});
  rows = parse_csv2(r.out);
  bool bracket = false;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if ((rows[i - 1].second - 1) * (rows[i].second - 1) <= 0 && rows[i - 1].first <= -4.57018 &&
        rows[i].first >= -4.57018)
      bracket = true;
  CHECK(bracket);

  r = run({"amse", "--curve", "psiH", "--rho-min", "-20", "--rho-max", "-0.01", "--step", "0.01"});
  double mx = 0;
  for (auto [x, v] : parse_csv2(r.out)) mx = std::max(mx, v);
  CHECK(mx <= 1.06);
  CHECK(mx >= 1.0);
  CHECK(run({"amse", "--curve", "phi2", "--rho-min", "-2", "--rho-max", "-1", "--step", "0.5"}).code == 0);
  CHECK(run({"amse", "--curve", "psiH", "--rho-min", "-1", "--rho-max", "1"}).code == kExitDomain);
  CHECK(run({"amse", "--curve", "xyz"}).code == kExitParse);
}

TEST_CASE("simulate") {
  const auto cfg = write_text("sim.cfg", kSmallSim);
  const auto a = (tmpdir() / "a").string(), b = (tmpdir() / "b").string();
  REQUIRE(run({"simulate", cfg, "--seed", "7", "--threads", "1", "--out", a}).code == 0);
  REQUIRE(run({"simulate", cfg, "--seed", "7", "--threads", "3", "--out", b}).code == 0);
  CHECK(slurp(a + ".csv") == slurp(b + ".csv"));
  CHECK(slurp(a + ".dominance.csv") == slurp(b + ".dominance.csv"));
  CHECK(slurp(a + ".manifest.json") == slurp(b + ".manifest.json"));
  const auto m = nlohmann::json::parse(slurp(a + ".manifest.json"));
  CHECK(m["seed"] == 7);
  CHECK(m["mode"] == "dominance");

  CHECK(run({"simulate", cfg}).code == kExitParse);  // --seed is mandatory
  const auto seeded = write_text("seeded.cfg", std::string(kSmallSim) + "[experiment2]\n");
  CHECK(run({"simulate", seeded, "--seed", "1"}).code == kExitParse);
  const auto with_seed = write_text("with_seed.cfg", "[distribution]\n[experiment]\nseed = 3\n");
  const auto r = run({"simulate", with_seed, "--seed", "1"});
  CHECK(r.code == kExitParse);
  CHECK(r.err.find("line 3") != std::string::npos);

  const auto pareto = write_text("pareto.cfg",
                                 "[distribution]\nfamily = pareto\n[experiment]\nn = 200\nreplications = 5\n"
                                 "[grid]\ncells = 1:-1, 2:-1\n");
  const auto p = run({"simulate", pareto, "--seed", "1", "--out", (tmpdir() / "p").string()});
  CHECK(p.code == kExitDegenerate);
  CHECK(p.err.find("gamma=1 rho=-1") != std::string::npos);
  CHECK(p.err.find("gamma=2 rho=-1") != std::string::npos);

  const auto ratio = write_text("ratio.cfg",
                                "[distribution]\nfamily = burr\n[experiment]\nmode = ratio\nn = 300\n"
                                "replications = 10\n[ratio]\npair = mr, gmr\nrho = -0.5, -2\n");
  const auto rr = run({"simulate", ratio, "--seed", "1", "--out", (tmpdir() / "r").string()});
  CHECK(rr.code == 0);
  CHECK(slurp(tmpdir() / "r.ratio.csv").rfind("rho,empirical_ratio", 0) == 0);
  const auto rm = nlohmann::json::parse(slurp(tmpdir() / "r.manifest.json"));
  CHECK(rm["ratio"]["rho"].size() == 2);
}

TEST_CASE("robustness") {
  const std::string xs = "1e2,1e4,1e6,1e8,1e10";
  auto r = run({"robustness", "--gamma", "1", "--r", "0.5", "--j", "1", "--x", xs, "--seed", "3"});
  REQUIRE(r.code == 0);
  auto rows = parse_csv2(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows.back().second == doctest::Approx(1.0).epsilon(0.1));
  r = run({"robustness", "--r", "0", "--x", xs, "--seed", "3"});
  rows = parse_csv2(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].second > rows[i - 1].second);
  r = run({"robustness", "--r", "-0.3", "--x", xs, "--seed", "3"});
  rows = parse_csv2(r.out);
  CHECK(std::abs(rows.back().second) < 0.05);
  CHECK(run({"robustness", "--r", "0.5"}).code == kExitParse);
  CHECK(run({"robustness", "--r", "1.5", "--seed", "1"}).code == kExitDomain);
}
