#ifndef TAILIDX_MONTECARLO_HPP
#define TAILIDX_MONTECARLO_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tailidx/distributions.hpp"
#include "tailidx/estimators.hpp"

namespace tailidx {

inline constexpr std::string_view kVersion = "1.0.0";

// Adaptive pipelines: Hill, generalized Hill, moment ratio, generalized
// moment ratio, each with its plug-in sample fraction.
enum class Pipeline { hill, gh, mr, gmr };

std::string_view to_string(Pipeline p);
std::optional<Pipeline> parse_pipeline(std::string_view name);

struct Cell {
  double gamma = 1.0;
  double rho = -1.0;
};

struct ExperimentConfig {
  DistSpec dist;
  std::size_t n = 1000;
  std::size_t replications = 1000;
  std::uint64_t seed = 0;
  std::vector<Pipeline> pipelines{Pipeline::hill, Pipeline::gh, Pipeline::mr, Pipeline::gmr};
  std::vector<EstimatorSpec> fixed;  // evaluated alongside the pipelines
  std::vector<Cell> grid;            // empty: the single cell (dist.gamma, dist.rho)

  void validate() const;
  std::vector<Cell> cells() const;
};

struct EstimatorStats {
  std::string label;
  std::size_t successes = 0;
  std::size_t failures = 0;
  double mean = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  double variance = 0.0;
  std::map<std::string, std::size_t> failure_steps;
};

struct CellReport {
  Cell cell;
  std::size_t replications = 0;
  std::size_t failed_replications = 0;  // at least one estimator failed
  bool degenerate = false;              // more than half the replications failed
  std::vector<EstimatorStats> estimators;

  const EstimatorStats* find(std::string_view label) const;
};

struct SimReport {
  ExperimentConfig config;
  std::vector<CellReport> cells;
};

// Labels of the estimators a config evaluates, in report order.
std::vector<std::string> estimator_labels(const ExperimentConfig& cfg);

// threads <= 0 uses every available core. Results are bitwise independent of
// the thread count: per-replication streams come from (seed, cell,
// replication) and sums use a fixed pairwise tree in replication order.
CellReport run_cell(const ExperimentConfig& cfg, const Cell& cell, int threads = 0);
// Single-threaded reference implementation of run_cell.
CellReport run_cell_serial(const ExperimentConfig& cfg, const Cell& cell);

SimReport run_experiment(const ExperimentConfig& cfg, int threads = 0);

// One row per cell x estimator, 17 significant digits.
std::string to_csv(const SimReport& report);
// {seed, generator, version, config, config_hash}
std::string manifest_json(const ExperimentConfig& cfg);

struct DominanceRow {
  double gamma = 0.0;
  double rho = 0.0;
  std::string winner_mse;
  std::string winner_bias;
};
std::vector<DominanceRow> dominance_map(const SimReport& report);
std::vector<DominanceRow> dominance_map(const ExperimentConfig& cfg, int threads = 0);
std::string dominance_csv(const std::vector<DominanceRow>& rows);

// Centres of the squares tiling (gamma_min, gamma_max] x (rho_min, rho_max].
std::vector<Cell> rect_grid(double gamma_min, double gamma_max, double gamma_step,
                            double rho_min, double rho_max, double rho_step);

// Asymptotic AMSE ratio of two pipelines at their optimal k and r.
double theoretical_ratio(Pipeline num, Pipeline den, double rho);

struct RatioPoint {
  double rho = 0.0;
  double empirical = 0.0;  // MSE(num) / MSE(den)
  double theoretical = 0.0;
  bool degenerate = false;
};
std::vector<RatioPoint> ratio_curve(const ExperimentConfig& cfg, double gamma,
                                    std::span<const double> rho_grid, Pipeline num,
                                    Pipeline den, int threads = 0);
std::string ratio_csv(const std::vector<RatioPoint>& points);

// Estimator j in {1,2,3} at fixed (k, r).
Estimate estimator_j(const Sample& s, int j, std::size_t k, double r);

struct VarianceCheck {
  double empirical_var_scaled = 0.0;  // variance of sqrt(k)(gamma_hat - gamma)
  double mean_scaled = 0.0;
  double theoretical = 0.0;           // sigma_j^2(r)
  std::size_t replications = 0;
};
// On strict Pareto(gamma) samples, where the second-order bias vanishes.
VarianceCheck variance_check(double gamma, double r, int j, std::size_t n, std::size_t k,
                             std::size_t reps, std::uint64_t seed, int threads = 0);

// Delta(x) = gamma_hat_n(k, r; X_1..X_{n-1}, x) - gamma_hat_{n-1}(k-1, r; X_1..X_{n-1})
// for a strict Pareto(gamma) base sample.
std::vector<std::pair<double, double>> contamination_experiment(double gamma, double r, int j,
                                                                std::size_t n, std::size_t k,
                                                                std::uint64_t seed,
                                                                std::span<const double> xs);

// Fixed-shape pairwise summation.
double pairwise_sum(std::span<const double> v);

}  // namespace tailidx

#endif  // TAILIDX_MONTECARLO_HPP
