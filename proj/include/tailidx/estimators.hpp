#ifndef TAILIDX_ESTIMATORS_HPP
#define TAILIDX_ESTIMATORS_HPP

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "tailidx/statcore.hpp"

namespace tailidx {

enum class EstimatorKind { hill, moment, moment_ratio, g1, g2, g3, hme };

std::string_view to_string(EstimatorKind kind);
// Accepts the canonical names plus the aliases mr, gh, gmr.
std::optional<EstimatorKind> parse_estimator_kind(std::string_view name);

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::hill;
  std::size_t k = 2;
  double r = 0.0;     // g1, g2, g3
  double beta = 1.0;  // hme; evaluated as g1 with r = 1 - beta
};

// The statistics an estimate was built from. g_r0 = G_n(k,r,0) and
// g_r1 = G_n(k,r,1) at the tuning value actually used; g_02 = G_n(k,0,2)
// for the moment-type estimators and NaN otherwise.
struct Diagnostics {
  double g_r0 = std::numeric_limits<double>::quiet_NaN();
  double g_r1 = std::numeric_limits<double>::quiet_NaN();
  double g_02 = std::numeric_limits<double>::quiet_NaN();
};

struct Estimate {
  double gamma_hat = 0.0;
  EstimatorSpec spec;
  std::size_t n = 0;
  Diagnostics diagnostics;
};

Estimate hill(const Sample& s, std::size_t k);
Estimate moment(const Sample& s, std::size_t k);
Estimate moment_ratio(const Sample& s, std::size_t k);

// Generalized Hill (GHE): (G(k,r,0) - 1) / (r G(k,r,0)); Hill at r = 0.
Estimate g1(const Sample& s, std::size_t k, double r);
// 2G / (2rG + 1 + sqrt(4rG + 1)) with G = G(k,r,1); Hill at r = 0.
Estimate g2(const Sample& s, std::size_t k, double r);
// Generalized moment ratio (GMR): (rG(k,r,1) - G(k,r,0) + 1) / (r^2 G(k,r,1));
// moment ratio at r = 0.
Estimate g3(const Sample& s, std::size_t k, double r);
// Harmonic moment estimator; identical to g1 with r = 1 - beta.
Estimate hme(const Sample& s, std::size_t k, double beta);

Estimate estimate(const Sample& s, const EstimatorSpec& spec);

// Closed forms on precomputed statistics. g2_from_stats throws
// Error(domain) when 4rG + 1 < 0.
double g1_from_stats(double g_r0, double r);
double g2_from_stats(double g_r1, double r);
double g3_from_stats(double g_r0, double g_r1, double r);
double moment_from_stats(double g01, double g02);

}  // namespace tailidx

#endif  // TAILIDX_ESTIMATORS_HPP
