#include "tailidx/secondorder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tailidx/asymptotics.hpp"
#include "tailidx/error.hpp"

namespace tailidx {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Linear-interpolation quantile of sorted data (type 7).
double sorted_quantile(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

template <typename F>
auto tagged(const char* step, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw e.with_step(step);
  }
}

}  // namespace

double rho_from_moments(double g01, double g02, double g03, int tau) {
  if (tau != 0 && tau != 1) throw_domain("tau must be 0 or 1");
  if (!(g01 > 0.0 && g02 > 0.0 && g03 > 0.0))
    throw_degenerate("rho estimator needs positive log-moments G(k,0,1..3)");
  const double m1 = g01;
  const double m2 = g02 / 2.0;
  const double m3 = g03 / 6.0;
  double num = 0.0, den = 0.0, scale = 0.0;
  if (tau == 0) {
    const double a = std::log(m1), b = 0.5 * std::log(m2), c = std::log(m3) / 3.0;
    num = a - b;
    den = b - c;
    scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1.0});
  } else {
    const double a = m1, b = std::sqrt(m2), c = std::cbrt(m3);
    num = a - b;
    den = b - c;
    scale = std::max({a, b, c});
  }
  if (std::abs(den) <= 64.0 * kEps * scale)
    throw_degenerate("rho estimator: T statistic has a vanishing denominator");
  const double t = num / den;
  if (!std::isfinite(t) || t == 3.0) throw_degenerate("rho estimator: T statistic equals 3");
  return -std::abs(3.0 * (t - 1.0) / (t - 3.0));
}

double rho_hat(const Sample& s, std::size_t k, int tau) {
  const auto m = log_moments(s, k);
  try {
    return rho_from_moments(m.m1, m.m2, m.m3, tau);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(e.what()) + " at k=" + std::to_string(k));
  }
}

RhoEstimate estimate_rho(const Sample& s) {
  const std::size_t n = s.size();
  const auto nd = static_cast<double>(n);
  const std::size_t hi = std::min<std::size_t>(
      static_cast<std::size_t>(std::floor(std::pow(nd, 0.995))), n - 1);
  const std::size_t lo = std::max<std::size_t>(
      static_cast<std::size_t>(std::floor(std::pow(nd, 0.90))), 2);
  if (hi < lo) throw_domain("sample too small for the rho window");

  std::vector<std::pair<std::size_t, double>> paths[2];
  for (std::size_t k = lo; k <= hi; ++k) {
    const auto m = log_moments(s, k);
    for (int tau = 0; tau < 2; ++tau) {
      try {
        paths[tau].emplace_back(k, rho_from_moments(m.m1, m.m2, m.m3, tau));
      } catch (const Error&) {
        // undefined at this k; excluded from the path
      }
    }
  }

  RhoEstimate best;
  double best_iqr = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int tau = 0; tau < 2; ++tau) {
    if (paths[tau].empty()) continue;
    std::vector<double> v;
    v.reserve(paths[tau].size());
    for (const auto& [k, r] : paths[tau]) v.push_back(r);
    std::sort(v.begin(), v.end());
    const double iqr = sorted_quantile(v, 0.75) - sorted_quantile(v, 0.25);
    if (!found || iqr < best_iqr) {
      best_iqr = iqr;
      best.tau = tau;
      best.rho_hat = sorted_quantile(v, 0.5);
      best.path = std::move(paths[tau]);
      found = true;
    }
  }
  if (!found) throw_degenerate("rho estimator undefined for every k in the window");
  if (!(best.rho_hat < 0.0)) throw_degenerate("rho estimate is zero");
  if (best.rho_hat < kRhoFloor) {
    best.rho_hat = kRhoFloor;
    best.clamped = true;
  }
  best.k_used = hi;
  return best;
}

double beta_hat(const Sample& s, std::size_t k, double rho) {
  if (!(rho < 0.0) || !std::isfinite(rho)) throw_domain("beta estimator requires rho < 0");
  validate_k(k, s.size());
  const auto xs = s.sorted_desc();
  const auto kd = static_cast<double>(k);
  double sa = 0.0, sw = 0.0, saw = 0.0, sbw = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    // (i/k)^{-rho} <= 1, so the powers cannot overflow
    const double a = std::exp(-rho * std::log(static_cast<double>(i) / kd));
    const double w = static_cast<double>(i) * std::log(xs[i - 1] / xs[i]);
    sa += a;
    sw += w;
    saw += a * w;
    sbw += a * a * w;
  }
  sa /= kd;
  sw /= kd;
  saw /= kd;
  sbw /= kd;
  const double den = sa * saw - sbw;
  if (den == 0.0 || !std::isfinite(den)) throw_degenerate("beta estimator: zero denominator");
  const double scale = std::exp(rho * std::log(kd / static_cast<double>(s.size())));
  const double b = scale * (sa * sw - saw) / den;
  if (!std::isfinite(b)) throw_degenerate("beta estimate is not finite");
  return b;
}

std::size_t adaptive_k(std::size_t n, double rho, double beta, int j, bool generalized) {
  if (!(rho < 0.0) || !std::isfinite(rho)) throw_domain("adaptive k requires rho < 0");
  if (beta == 0.0 || !std::isfinite(beta)) throw_domain("adaptive k requires beta != 0");
  if (j != 1 && j != 3) throw_domain("adaptive k is defined for j = 1 and j = 3");
  if (n < 3) throw_domain("adaptive k requires n >= 3");
  const double R = generalized ? r_star(rho, j) : 0.0;
  const double b = 1.0 - rho - R;
  double log_num = 0.0, log_den = 0.0;
  if (j == 1) {
    log_num = 2.0 * std::log(b);
    log_den = std::log(-2.0 * rho * beta * beta * (1.0 - 2.0 * R));
  } else {
    log_num = 4.0 * std::log(b);
    log_den = std::log(-rho * beta * beta) + 3.0 * std::log(1.0 - 2.0 * R);
  }
  const double e = 1.0 - 2.0 * rho;
  const double k = std::exp((log_num - log_den) / e + (-2.0 * rho / e) * std::log(static_cast<double>(n)));
  const double hi = static_cast<double>(n - 1);
  if (!(k < hi)) return n - 1;  // includes +inf
  return static_cast<std::size_t>(std::clamp(std::round(k), 2.0, hi));
}

std::pair<RhoEstimate, BetaEstimate> estimate_second_order(const Sample& s) {
  auto rho = tagged("rho", [&] { return estimate_rho(s); });
  BetaEstimate beta;
  beta.k_used = rho.k_used;
  beta.beta_hat = tagged("beta", [&] { return beta_hat(s, rho.k_used, rho.rho_hat); });
  beta.near_zero = std::abs(beta.beta_hat) < 1e-6;
  return {std::move(rho), beta};
}

AdaptiveResult adaptive_estimate(const Sample& s, int j, const RhoEstimate& rho,
                                 const BetaEstimate& beta) {
  if (j != 1 && j != 3) throw_domain("adaptive estimation is defined for j = 1 and j = 3");
  if (s.size() < 100) throw_domain("adaptive estimation requires n >= 100");
  AdaptiveResult out;
  out.rho = rho;
  out.beta = beta;
  const std::size_t n = s.size();

  const auto k_c =
      tagged("k_classical", [&] { return adaptive_k(n, rho.rho_hat, beta.beta_hat, j, false); });
  out.classical = tagged("classical", [&] { return j == 1 ? hill(s, k_c) : moment_ratio(s, k_c); });

  tagged("r_star", [&] {
    if (!(out.classical.gamma_hat > 0.0))
      throw_degenerate("classical estimate is not positive; r* = R*/gamma undefined");
    out.R_star = r_star(rho.rho_hat, j);
    out.r_star = out.R_star / out.classical.gamma_hat;
    return 0;
  });

  const auto k_g =
      tagged("k_generalized", [&] { return adaptive_k(n, rho.rho_hat, beta.beta_hat, j, true); });
  out.generalized =
      tagged("generalized", [&] { return j == 1 ? g1(s, k_g, out.r_star) : g3(s, k_g, out.r_star); });
  return out;
}

AdaptiveResult adaptive_estimate(const Sample& s, int j) {
  if (j != 1 && j != 3) throw_domain("adaptive estimation is defined for j = 1 and j = 3");
  if (s.size() < 100) throw_domain("adaptive estimation requires n >= 100");
  const auto [rho, beta] = estimate_second_order(s);
  return adaptive_estimate(s, j, rho, beta);
}

}  // namespace tailidx
