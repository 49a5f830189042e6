#include "tailidx/estimators.hpp"

#include <cmath>

#include "tailidx/error.hpp"

namespace tailidx {

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::hill: return "hill";
    case EstimatorKind::moment: return "moment";
    case EstimatorKind::moment_ratio: return "moment_ratio";
    case EstimatorKind::g1: return "g1";
    case EstimatorKind::g2: return "g2";
    case EstimatorKind::g3: return "g3";
    case EstimatorKind::hme: return "hme";
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator_kind(std::string_view name) {
  if (name == "hill") return EstimatorKind::hill;
  if (name == "moment") return EstimatorKind::moment;
  if (name == "moment_ratio" || name == "mr") return EstimatorKind::moment_ratio;
  if (name == "g1" || name == "gh") return EstimatorKind::g1;
  if (name == "g2") return EstimatorKind::g2;
  if (name == "g3" || name == "gmr") return EstimatorKind::g3;
  if (name == "hme") return EstimatorKind::hme;
  return std::nullopt;
}

namespace {

// Power-log sums at tuning r over the top k log-ratios L_i:
//   em1 = mean expm1(rL)            (= G(k,r,0) - 1)
//   g1  = mean e^{rL} L             (= G(k,r,1))
//   h   = mean (rL e^{rL} - expm1(rL))  (= rG(k,r,1) - G(k,r,0) + 1)
struct PowerLogSums {
  double em1 = 0.0;
  double g1 = 0.0;
  double h = 0.0;
};

// z e^z - (e^z - 1) = sum_{m>=2} (m-1) z^m / m!, summed directly near 0.
double zexp_minus_expm1(double z) {
  if (std::abs(z) >= 0.125) return z * std::exp(z) - std::expm1(z);
  double term = z;  // z^m / m! at m = 1
  double sum = 0.0;
  for (int m = 2; m < 30; ++m) {
    term *= z / m;
    const double add = (m - 1) * term;
    sum += add;
    if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

PowerLogSums power_log_sums(const Sample& s, std::size_t k, double r) {
  validate_k(k, s.size());
  const auto xs = s.sorted_desc();
  const double threshold = xs[k];
  PowerLogSums acc;
  for (std::size_t i = 0; i < k; ++i) {
    const double l = std::log(xs[i] / threshold);
    const double z = r * l;
    acc.em1 += std::expm1(z);
    acc.g1 += std::exp(z) * l;
    acc.h += zexp_minus_expm1(z);
  }
  const auto kd = static_cast<double>(k);
  acc.em1 /= kd;
  acc.g1 /= kd;
  acc.h /= kd;
  return acc;
}

Estimate finish(double value, EstimatorSpec spec, std::size_t n, Diagnostics d) {
  if (!std::isfinite(value))
    throw_degenerate(std::string(to_string(spec.kind)) + " estimate is not finite at k=" +
                     std::to_string(spec.k));
  return {value, spec, n, d};
}

}  // namespace

double g1_from_stats(double g_r0, double r) { return (g_r0 - 1.0) / (r * g_r0); }

double g2_from_stats(double g_r1, double r) {
  const double disc = 4.0 * r * g_r1 + 1.0;
  if (disc < 0.0)
    throw_domain("g2 discriminant 4rG(k,r,1)+1 is negative (" + std::to_string(disc) +
                 "); choose a larger r");
  return 2.0 * g_r1 / (2.0 * r * g_r1 + 1.0 + std::sqrt(disc));
}

double g3_from_stats(double g_r0, double g_r1, double r) {
  return (r * g_r1 - g_r0 + 1.0) / (r * r * g_r1);
}

double moment_from_stats(double g01, double g02) {
  if (!(g01 > 0.0)) throw_degenerate("moment estimator: all top values tie the threshold");
  const double ratio = g02 / (g01 * g01);
  if (std::abs(ratio - 1.0) <= 64 * std::numeric_limits<double>::epsilon())
    throw_degenerate("moment estimator: G(k,0,2)/G(k,0,1)^2 = 1 (identical top log-ratios)");
  return g01 + 0.5 * (1.0 - 1.0 / (ratio - 1.0));
}

Estimate hill(const Sample& s, std::size_t k) {
  const double g01 = statistic_G(s, {0.0, 1.0, k});
  return finish(g01, {EstimatorKind::hill, k, 0.0, 1.0}, s.size(), {1.0, g01});
}

Estimate moment(const Sample& s, std::size_t k) {
  const auto m = log_moments(s, k);
  const double v = moment_from_stats(m.m1, m.m2);
  return finish(v, {EstimatorKind::moment, k, 0.0, 1.0}, s.size(), {1.0, m.m1, m.m2});
}

Estimate moment_ratio(const Sample& s, std::size_t k) {
  const auto m = log_moments(s, k);
  if (!(m.m1 > 0.0))
    throw_degenerate("moment ratio estimator: all top values tie the threshold at k=" +
                     std::to_string(k));
  return finish(m.m2 / (2.0 * m.m1), {EstimatorKind::moment_ratio, k, 0.0, 1.0}, s.size(),
                {1.0, m.m1, m.m2});
}

Estimate g1(const Sample& s, std::size_t k, double r) {
  if (is_small_r(r)) {
    auto e = hill(s, k);
    e.spec = {EstimatorKind::g1, k, r, 1.0 - r};
    return e;
  }
  const auto p = power_log_sums(s, k, r);
  // H = (G0 - 1)/r, estimate = H / (1 + rH)
  const double h = p.em1 / r;
  return finish(h / (1.0 + r * h), {EstimatorKind::g1, k, r, 1.0 - r}, s.size(),
                {1.0 + p.em1, p.g1});
}

Estimate g2(const Sample& s, std::size_t k, double r) {
  if (is_small_r(r)) {
    auto e = hill(s, k);
    e.spec = {EstimatorKind::g2, k, r, 1.0};
    return e;
  }
  const auto p = power_log_sums(s, k, r);
  return finish(g2_from_stats(p.g1, r), {EstimatorKind::g2, k, r, 1.0}, s.size(),
                {1.0 + p.em1, p.g1});
}

Estimate g3(const Sample& s, std::size_t k, double r) {
  if (is_small_r(r)) {
    auto e = moment_ratio(s, k);
    e.spec = {EstimatorKind::g3, k, r, 1.0};
    return e;
  }
  const auto p = power_log_sums(s, k, r);
  if (!(p.g1 > 0.0))
    throw_degenerate("g3: G(k,r,1) = 0 (all top values tie the threshold) at k=" +
                     std::to_string(k));
  return finish(p.h / (r * r * p.g1), {EstimatorKind::g3, k, r, 1.0}, s.size(),
                {1.0 + p.em1, p.g1});
}

Estimate hme(const Sample& s, std::size_t k, double beta) {
  auto e = g1(s, k, 1.0 - beta);
  e.spec.kind = EstimatorKind::hme;
  e.spec.beta = beta;
  return e;
}

Estimate estimate(const Sample& s, const EstimatorSpec& spec) {
  switch (spec.kind) {
    case EstimatorKind::hill: return hill(s, spec.k);
    case EstimatorKind::moment: return moment(s, spec.k);
    case EstimatorKind::moment_ratio: return moment_ratio(s, spec.k);
    case EstimatorKind::g1: return g1(s, spec.k, spec.r);
    case EstimatorKind::g2: return g2(s, spec.k, spec.r);
    case EstimatorKind::g3: return g3(s, spec.k, spec.r);
    case EstimatorKind::hme: return hme(s, spec.k, spec.beta);
  }
  throw_domain("unknown estimator kind");
}

}  // namespace tailidx
