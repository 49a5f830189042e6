#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "tailidx/asymptotics.hpp"
#include "tailidx/error.hpp"
#include "tailidx/montecarlo.hpp"
#include "tailidx/rng.hpp"

using namespace tailidx;

namespace {
ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.dist = {Family::burr, 1, -1, 1};
  cfg.n = 400;
  cfg.replications = 40;
  cfg.seed = 123;
  cfg.fixed = {{EstimatorKind::hill, 50}, {EstimatorKind::g3, 50, -0.3}};
  return cfg;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void check_identical(const CellReport& a, const CellReport& b) {
  REQUIRE(a.estimators.size() == b.estimators.size());
  CHECK(a.failed_replications == b.failed_replications);
  for (std::size_t i = 0; i < a.estimators.size(); ++i) {
    const auto &x = a.estimators[i], &y = b.estimators[i];
    CHECK(x.label == y.label);
    CHECK(x.successes == y.successes);
    CHECK(same_bits(x.mean, y.mean));
    CHECK(same_bits(x.mse, y.mse));
    CHECK(same_bits(x.variance, y.variance));
    CHECK(x.failure_steps == y.failure_steps);
  }
}
}  // namespace

TEST_CASE("serial and parallel cells are bitwise identical") {
  const auto cfg = small_config();
  const Cell cell{1.0, -1.0};
  const auto ref = run_cell_serial(cfg, cell);
  for (int threads : {1, 2, 3, 8}) check_identical(ref, run_cell(cfg, cell, threads));
  check_identical(ref, run_cell(cfg, cell, 0));
}

TEST_CASE("same seed, same bytes; different seed differs") {
  auto cfg = small_config();
  cfg.grid = {{0.5, -0.5}, {2.0, -2.0}};
  const std::string a = to_csv(run_experiment(cfg, 1));
  const std::string b = to_csv(run_experiment(cfg, 4));
  CHECK(a == b);
  cfg.seed = 124;
  CHECK(to_csv(run_experiment(cfg, 2)) != a);
  CHECK(a.rfind("family,gamma,rho,n,estimator,replications,successes,failures,mean,bias,mse,variance,status\n", 0) == 0);
}

TEST_CASE("mse decomposition") {
  auto cfg = small_config();
  cfg.grid = {{0.5, -0.5}, {1.0, -1.0}, {3.0, -3.0}};
  for (const auto& c : run_experiment(cfg).cells)
    for (const auto& e : c.estimators) {
      CHECK(std::abs(e.mse - (e.variance + e.bias * e.bias)) <= 1e-10 * e.mse);
      CHECK(e.bias == doctest::Approx(e.mean - c.cell.gamma).epsilon(1e-14));
    }
}

TEST_CASE("pareto cell with pipelines is degenerate") {
  ExperimentConfig cfg;
  cfg.dist = {Family::pareto, 1, -1, 1};
  cfg.n = 200;
  cfg.replications = 10;
  cfg.seed = 1;
  const auto rep = run_cell(cfg, {1, -1});
  CHECK(rep.degenerate);
  CHECK(rep.failed_replications == 10);
  const auto* h = rep.find("hill");
  REQUIRE(h);
  CHECK(h->failures == 10);
  CHECK(h->failure_steps.at("model") == 10);
  const auto rows = dominance_map(SimReport{cfg, {rep}});
  CHECK(rows[0].winner_mse == "degenerate");
}

TEST_CASE("dominance map and grid") {
  const auto cells = rect_grid(0, 4, 0.5, -5, -0.2, 0.4);
  CHECK(cells.size() == 8 * 12);
  CHECK(cells.front().gamma == doctest::Approx(0.25));
  CHECK(cells.front().rho == doctest::Approx(-0.4));
  auto cfg = small_config();
  cfg.replications = 10;
  cfg.grid = {{0.5, -0.5}, {1, -1}, {1.5, -1.5}};
  const auto rows = dominance_map(cfg);
  CHECK(rows.size() == 3);
  const auto labels = estimator_labels(cfg);
  for (const auto& r : rows) {
    CHECK(std::find(labels.begin(), labels.end(), r.winner_mse) != labels.end());
    CHECK(std::find(labels.begin(), labels.end(), r.winner_bias) != labels.end());
  }
  const auto csv = dominance_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  ExperimentConfig nogrid = small_config();
  CHECK_THROWS_AS(dominance_map(nogrid), Error);
}

TEST_CASE("manifest") {
  const auto cfg = small_config();
  const auto j = nlohmann::json::parse(manifest_json(cfg));
  CHECK(j["seed"] == 123);
  CHECK(j["generator"] == std::string(kGeneratorName));
  CHECK(j["version"] == std::string(kVersion));
  CHECK(j["config"]["n"] == 400);
  CHECK(j["config_hash"].get<std::string>().size() == 16);
  auto other = cfg;
  other.n = 401;
  CHECK(nlohmann::json::parse(manifest_json(other))["config_hash"] != j["config_hash"]);
}

TEST_CASE("theoretical ratio") {
  for (double rho : {-0.5, -1.0, -4.0}) {
    CHECK(theoretical_ratio(Pipeline::mr, Pipeline::gmr, rho) == doctest::Approx(psi_MR(rho)).epsilon(1e-12));
    CHECK(theoretical_ratio(Pipeline::hill, Pipeline::gh, rho) == doctest::Approx(psi_H(rho)).epsilon(1e-12));
    CHECK(theoretical_ratio(Pipeline::gh, Pipeline::gmr, rho) == doctest::Approx(phi3(rho)).epsilon(1e-12));
  }
}

TEST_CASE("ratio curve") {
  ExperimentConfig cfg;
  cfg.dist = {Family::burr, 1, -1, 1};
  cfg.n = 500;
  cfg.replications = 30;
  cfg.seed = 9;
  cfg.pipelines = {Pipeline::mr, Pipeline::gmr};
  const std::vector<double> rhos{-0.5, -2.0};
  const auto pts = ratio_curve(cfg, 1.0, rhos, Pipeline::mr, Pipeline::gmr, 2);
  REQUIRE(pts.size() == 2);
  for (const auto& p : pts) {
    CHECK(p.theoretical == doctest::Approx(psi_MR(p.rho)));
    CHECK(p.empirical > 0);
    CHECK_FALSE(p.degenerate);
  }
  CHECK(ratio_csv(pts).rfind("rho,empirical_ratio,theoretical_ratio,status\n", 0) == 0);
}

TEST_CASE("variance check on strict Pareto") {
  const auto v = variance_check(1.0, 0.0, 1, 4000, 400, 200, 17, 0);
  CHECK(v.theoretical == doctest::Approx(1.0));
  CHECK(v.replications == 200);
  CHECK(v.empirical_var_scaled == doctest::Approx(1.0).epsilon(0.3));
  const auto a = variance_check(1.0, 0.25, 1, 4000, 400, 50, 17, 1);
  const auto b = variance_check(1.0, 0.25, 1, 4000, 400, 50, 17, 3);
  CHECK(same_bits(a.empirical_var_scaled, b.empirical_var_scaled));
  CHECK(a.theoretical == doctest::Approx(1.125));
}

TEST_CASE("contamination") {
  const std::vector<double> xs{1e2, 1e4, 1e6, 1e8, 1e10};
  const auto pos = contamination_experiment(1.0, 0.5, 1, 10000, 1000, 3, xs);
  REQUIRE(pos.size() == xs.size());
  for (std::size_t i = 1; i < pos.size(); ++i) CHECK(pos[i].second > pos[i - 1].second);
  CHECK(pos.back().second == doctest::Approx(1.0).epsilon(0.1));
  // closed-form prediction at x = 1e8: (1 - 1/G0)/r - gamma with G0 ~ 2 + (x/X_{n-k})^r / k
  const double G0 = 2 + std::sqrt(1e8 / 10.0) / 1000;
  CHECK(pos[3].second == doctest::Approx((1 - 1 / G0) / 0.5 - 1).epsilon(0.15));
  const auto neg = contamination_experiment(1.0, -0.3, 1, 10000, 1000, 3, xs);
  CHECK(std::abs(neg.back().second) < 0.05);
  CHECK(std::abs(neg.back().second - neg[3].second) < 1e-3);
  const auto hill0 = contamination_experiment(1.0, 0.0, 1, 10000, 1000, 3, xs);
  for (std::size_t i = 1; i < hill0.size(); ++i) CHECK(hill0[i].second > hill0[i - 1].second);
  // Hill grows by ln(x)/k per decade
  CHECK(hill0[4].second - hill0[3].second == doctest::Approx(std::log(100.0) / 1000).epsilon(1e-6));
  CHECK_THROWS_AS(contamination_experiment(1.0, 1.0, 1, 1000, 100, 3, xs), Error);
}

TEST_CASE("pairwise sum") {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / double(i + 1);
  double naive = 0;
  for (double x : v) naive += x;
  CHECK(pairwise_sum(v) == doctest::Approx(naive).epsilon(1e-14));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("config validation") {
  auto cfg = small_config();
  cfg.replications = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.fixed.push_back({EstimatorKind::hill, 400});
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.n = 50;
  cfg.fixed.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
}
