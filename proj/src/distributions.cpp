#include "tailidx/distributions.hpp"

#include <cmath>

#include "tailidx/error.hpp"
#include "tailidx/rng.hpp"

namespace tailidx {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::pareto: return "pareto";
    case Family::burr: return "burr";
    case Family::kumaraswamy: return "kumaraswamy";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  if (name == "pareto") return Family::pareto;
  if (name == "burr") return Family::burr;
  if (name == "kumaraswamy") return Family::kumaraswamy;
  return std::nullopt;
}

void DistSpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw_domain("gamma must be positive");
  if (!(C > 0.0) || !std::isfinite(C)) throw_domain("C must be positive");
  if (family != Family::pareto && (!(rho < 0.0) || !std::isfinite(rho)))
    throw_domain("rho must be finite and negative");
}

double cdf(const DistSpec& d, double x) {
  d.validate();
  const double y = x / d.C;
  switch (d.family) {
    case Family::pareto:
      return y <= 1.0 ? 0.0 : -std::expm1(-std::log(y) / d.gamma);
    case Family::burr: {
      if (y <= 0.0) return 0.0;
      // 1 - (1 + y^{-rho/gamma})^{1/rho}
      const double t = std::log1p(std::pow(y, -d.rho / d.gamma));
      return -std::expm1(t / d.rho);
    }
    case Family::kumaraswamy: {
      if (y <= 0.0) return 0.0;
      const double s = std::pow(y, d.rho / d.gamma);
      // 1 - (1 - e^{-s})^{-1/rho}
      const double t = std::log(-std::expm1(-s));
      return -std::expm1(-t / d.rho);
    }
  }
  return 0.0;
}

double quantile(const DistSpec& d, double p) {
  d.validate();
  if (!(p > 0.0 && p < 1.0)) throw_domain("quantile requires 0 < p < 1");
  const double log_q = std::log1p(-p);  // ln(1 - p)
  double x = 0.0;
  switch (d.family) {
    case Family::pareto:
      x = std::exp(-d.gamma * log_q);
      break;
    case Family::burr:
      // ((1-p)^rho - 1)^{-gamma/rho}
      x = std::pow(std::expm1(d.rho * log_q), -d.gamma / d.rho);
      break;
    case Family::kumaraswamy: {
      // (-ln(1 - (1-p)^{-rho}))^{gamma/rho}, powers taken in log space
      const double t = std::exp(-d.rho * log_q);
      x = std::pow(-std::log1p(-t), d.gamma / d.rho);
      break;
    }
  }
  return d.C * x;
}

std::vector<double> draw(const DistSpec& d, std::size_t n, std::uint64_t seed) {
  d.validate();
  if (n < 1) throw_domain("sample size must be at least 1");
  const CounterRng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = quantile(d, rng.uniform(i));
  return out;
}

Sample sample(const DistSpec& d, std::size_t n, std::uint64_t seed) {
  return Sample(draw(d, n, seed));
}

SecondOrderModel hall_model(const DistSpec& d) {
  d.validate();
  switch (d.family) {
    case Family::pareto: return SecondOrderModel::bias_free_model(d.gamma, d.C);
    case Family::burr: return {d.gamma, d.rho, 1.0, d.C, false};
    case Family::kumaraswamy: return {d.gamma, d.rho, 0.5, d.C, false};
  }
  return SecondOrderModel::bias_free_model(d.gamma, d.C);
}

}  // namespace tailidx
