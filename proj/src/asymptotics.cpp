#include "tailidx/asymptotics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "tailidx/error.hpp"
#include "tailidx/statcore.hpp"

namespace tailidx {

namespace {

void require_rho(double rho) {
  if (!(rho < 0.0) || !std::isfinite(rho)) throw_domain("rho must be finite and negative");
}

void require_j(int j) {
  if (j < 1 || j > 3) throw_domain("estimator index j must be 1, 2 or 3");
}

// nu_j and sigma_j^2 written in terms of d_r(1), d_r(2).
BiasVariance constants(double gamma, double rho, double r, int j, bool bias_free) {
  require_j(j);
  const double R = gamma * r;
  if (!(R < 0.5)) throw_domain("asymptotic normality requires gamma*r < 1/2");
  const double d1 = d_r(gamma, r, 1);
  const double d2 = d_r(gamma, r, 2);
  const double g2 = gamma * gamma;
  BiasVariance bv;
  switch (j) {
    case 1:
      bv.nu = d1 / (d1 - rho);
      bv.sigma2 = g2 * d1 * d1 / d2;
      break;
    case 2: {
      if (1.0 + R == 0.0) throw_domain("estimator 2 constants undefined at gamma*r = -1");
      const double R2 = R * R;
      bv.nu = d1 * (1.0 - rho - R2) / ((1.0 + R) * (d1 - rho) * (d1 - rho));
      bv.sigma2 = g2 * d1 * d1 * (d2 + 2.0 * R2 * R2) / ((1.0 + R) * (1.0 + R) * d2 * d2 * d2);
      break;
    }
    case 3:
      bv.nu = d1 * d1 / ((d1 - rho) * (d1 - rho));
      bv.sigma2 = 2.0 * g2 * d1 * d1 * d1 * d1 / (d2 * d2 * d2);
      break;
  }
  if (bias_free) bv.nu = 0.0;
  return bv;
}

}  // namespace

SecondOrderModel SecondOrderModel::bias_free_model(double gamma, double C) {
  SecondOrderModel m;
  m.gamma = gamma;
  m.rho = -std::numeric_limits<double>::infinity();
  m.beta = 0.0;
  m.C = C;
  m.bias_free = true;
  return m;
}

void SecondOrderModel::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw_domain("gamma must be positive");
  if (!(C > 0.0) || !std::isfinite(C)) throw_domain("C must be positive");
  if (bias_free) return;
  require_rho(rho);
  if (beta == 0.0 || !std::isfinite(beta)) throw_domain("Hall beta must be finite and nonzero");
}

double SecondOrderModel::rate(double t) const {
  if (bias_free) return 0.0;
  return gamma * beta * std::pow(t, rho);
}

double xi(double gamma, double r, double u) {
  if (!(gamma > 0.0)) throw_domain("gamma must be positive");
  if (!(gamma * r < 1.0)) throw_domain("xi(r,u) requires gamma*r < 1");
  if (!(u > -1.0)) throw_domain("xi(r,u) requires u > -1");
  return std::pow(gamma, u) * std::tgamma(1.0 + u) / std::pow(1.0 - gamma * r, 1.0 + u);
}

Theorem2Constants theorem2_constants(const SecondOrderModel& m, double r) {
  m.validate();
  const double gamma = m.gamma;
  const double R = gamma * r;
  if (!(R < 0.5)) throw_domain("Theorem 2 constants require gamma*r < 1/2");
  const double d1 = d_r(gamma, r, 1);
  const double d2 = d_r(gamma, r, 2);
  const double g2 = gamma * gamma;
  const double rho = m.rho;
  Theorem2Constants c;
  if (!m.bias_free) {
    c.nu1 = r / (d1 * (d1 - rho));
    c.nu2 = (1.0 - rho - R * R) / (d1 * d1 * (d1 - rho) * (d1 - rho));
  }
  c.s1_sq = g2 * r * r / (d2 * d1 * d1);
  c.s2_sq = g2 * (d2 + 2.0 * R * R * R * R) / (d2 * d2 * d2 * d1 * d1 * d1 * d1);
  c.s12 = g2 * r * (d1 - R * R) / (d2 * d2 * d1 * d1 * d1);
  return c;
}

BiasVariance theorem3_constants(const SecondOrderModel& m, double r, int j) {
  m.validate();
  return constants(m.gamma, m.rho, r, j, m.bias_free);
}

BiasVariance theorem3_reduced(double rho, double R, int j) {
  require_rho(rho);
  return constants(1.0, rho, R, j, false);
}

double amse(const SecondOrderModel& m, double r, int j, std::size_t k, std::size_t n) {
  if (m.bias_free) throw_degenerate("bias-free model has no AMSE trade-off");
  if (k < 2 || k >= n) throw_domain("amse requires 2 <= k < n");
  const auto bv = theorem3_constants(m, r, j);
  const double a = m.rate(static_cast<double>(n) / static_cast<double>(k));
  return bv.nu * bv.nu * a * a + bv.sigma2 / static_cast<double>(k);
}

KStar k_star(const SecondOrderModel& m, double r, int j, std::size_t n) {
  m.validate();
  if (n < 3) throw_domain("k_star requires n >= 3");
  if (m.bias_free)
    throw_degenerate("bias-free model: no finite optimal k, use the largest admissible k");
  const auto bv = theorem3_constants(m, r, j);
  if (bv.nu == 0.0)
    throw_degenerate("bias constant vanishes: no finite optimal k, use the largest admissible k");
  const double rho = m.rho;
  const double e = 1.0 - 2.0 * rho;
  const double log_k = (std::log(bv.sigma2) -
                        std::log(-2.0 * rho * m.beta * m.beta * m.gamma * m.gamma * bv.nu * bv.nu)) /
                           e +
                       (-2.0 * rho / e) * std::log(static_cast<double>(n));
  KStar out;
  out.k_real = std::exp(log_k);
  const double lo = 2.0;
  const double hi = static_cast<double>(n - 1);
  out.clamped = !(out.k_real >= lo && out.k_real <= hi);
  const double centre = std::clamp(std::round(out.k_real), lo, hi);
  const auto c = static_cast<std::size_t>(centre);
  std::size_t best = c;
  double best_v = amse(m, r, j, c, n);
  for (std::size_t cand : {c - 1, c + 1}) {
    if (cand < 2 || cand > n - 1) continue;
    const double v = amse(m, r, j, cand, n);
    if (v < best_v || (v == best_v && cand < best)) {
      best = cand;
      best_v = v;
    }
  }
  out.k = best;
  return out;
}

std::array<double, 10> r2_polynomial(double p) {
  const double q = 1.0 - p;
  return {2.0,
          -2.0 * q,
          -2.0 * (5.0 - 3.0 * p),
          2.0 * (p * p - 3.0 * p + 6.0),
          -2.0 * p * (5.0 - 2.0 * p),
          -6.0 * q * q,
          8.0 * p * p - 22.0 * p + 15.0,
          -2.0 * (5.0 * p * p - 14.0 * p + 9.0),
          4.0 * (p * p - 3.0 * p + 2.0),
          -q};
}

namespace {

template <typename T>
T horner(const std::array<double, 10>& c, T x) {
  T v = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) v = v * x + c[i];
  return v;
}

template <typename T>
T horner_derivative(const std::array<double, 10>& c, T x) {
  T v = 9.0 * c[0];
  for (std::size_t i = 1; i + 1 < c.size(); ++i) v = v * x + static_cast<double>(9 - i) * c[i];
  return v;
}

template <typename T>
T newton_polish(const std::array<double, 10>& c, T x) {
  for (int it = 0; it < 8; ++it) {
    const T d = horner_derivative(c, x);
    if (d == T(0.0)) break;
    const T step = horner(c, x) / d;
    x -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
  }
  return x;
}

}  // namespace

double r2_polynomial_value(double rho, double R) { return horner(r2_polynomial(rho), R); }

R2Solution solve_r2_star(double rho) {
  require_rho(rho);
  const auto c = r2_polynomial(rho);
  Eigen::Matrix<double, 9, 9> companion = Eigen::Matrix<double, 9, 9>::Zero();
  for (int j = 0; j < 9; ++j) companion(0, j) = -c[j + 1] / c[0];
  for (int i = 1; i < 9; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix<double, 9, 9>> solver(companion, false);
  if (solver.info() != Eigen::Success) throw_degenerate("companion eigenvalue solve failed");

  R2Solution out;
  double best_log_eta = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int i = 0; i < 9; ++i) {
    const std::complex<double> z = newton_polish(c, solver.eigenvalues()[i]);
    if (std::abs(z.imag()) >= 1e-9 * (1.0 + std::abs(z.real()))) continue;
    const double R = newton_polish(c, z.real());
    out.real_roots.push_back(R);
    // gamma^(2) is consistent only for R > -1; eta_2 needs R < 1/2.
    if (!(R > -1.0 && R < 0.5)) continue;
    const double le = log_eta(rho, R, 2);
    if (le < best_log_eta) {
      best_log_eta = le;
      out.root = R;
      found = true;
    }
  }
  std::sort(out.real_roots.begin(), out.real_roots.end());
  if (!found)
    throw_degenerate("degree-9 optimality polynomial has no real root in (-1, 1/2) at rho=" +
                     std::to_string(rho));
  out.residual = std::abs(horner(c, out.root)) / c[0];
  return out;
}

double r_star(double rho, int j) {
  require_rho(rho);
  require_j(j);
  const double a = 2.0 - rho;
  switch (j) {
    case 1: return 1.0 / (a + std::sqrt(a * a - 2.0));
    case 3: return 2.0 * rho / (a + std::sqrt(a * a - 4.0 * rho));
    default: return solve_r2_star(rho).root;
  }
}

double log_eta(double rho, double R, int j) {
  const auto bv = theorem3_reduced(rho, R, j);
  return 2.0 * std::log(std::abs(bv.nu)) - 2.0 * rho * std::log(bv.sigma2);
}

double eta(double rho, double R, int j) { return std::exp(log_eta(rho, R, j)); }

double amse_ratio(double rho, int j_num, double R_num, int j_den, double R_den) {
  return std::exp((log_eta(rho, R_num, j_num) - log_eta(rho, R_den, j_den)) / (1.0 - 2.0 * rho));
}

double psi_H(double rho) {
  require_rho(rho);
  const double R = r_star(rho, 1);
  const double num = 2.0 * std::log(1.0 - R - rho) - 2.0 * rho * std::log(1.0 - 2.0 * R);
  const double den = 2.0 * std::log(1.0 - rho) + (2.0 - 4.0 * rho) * std::log(1.0 - R);
  return std::exp((num - den) / (1.0 - 2.0 * rho));
}

double psi_MR(double rho) {
  require_rho(rho);
  const double v = std::sqrt((2.0 - rho) * (2.0 - rho) - 4.0 * rho);
  // v + rho and v - 1 + rho rewritten as quotients to avoid cancellation.
  const double v_plus_rho = (4.0 - 8.0 * rho) / (v - rho);
  const double v_minus_1_plus_rho = (3.0 - 6.0 * rho) / (v + 1.0 - rho);
  const double num = -8.0 * rho * std::log(2.0) + 4.0 * std::log(v - rho) -
                     6.0 * rho * std::log(v_minus_1_plus_rho);
  const double den = 4.0 * std::log(1.0 - rho) + (4.0 - 8.0 * rho) * std::log(v_plus_rho);
  return std::exp((num - den) / (1.0 - 2.0 * rho));
}

double phi2(double rho) {
  require_rho(rho);
  return amse_ratio(rho, 1, r_star(rho, 1), 2, r_star(rho, 2));
}

double phi3(double rho) {
  require_rho(rho);
  const double a = 2.0 - rho;
  const double v = std::sqrt(a * a - 4.0 * rho);
  const double w = std::sqrt(a * a - 2.0);
  const double num = -6.0 * rho * std::log(3.0) + (8.0 - 8.0 * rho) * std::log(v - rho) -
                     2.0 * rho * std::log(w + 1.0 - rho);
  const double den = (3.0 - 5.0 * rho) * std::log(4.0) + 2.0 * std::log(1.0 - 2.0 * rho) -
                     6.0 * rho * std::log(v + 1.0 - rho) + (4.0 - 4.0 * rho) * std::log(w - rho);
  return std::exp((num - den) / (1.0 - 2.0 * rho));
}

double robustness_limit(double gamma, double r, int j) {
  require_j(j);
  if (!(gamma > 0.0)) throw_domain("gamma must be positive");
  if (!(gamma * r < 1.0)) throw_domain("robustness limit requires gamma*r < 1");
  if (is_small_r(r)) return std::numeric_limits<double>::infinity();
  if (r < 0.0) return 0.0;
  return (1.0 - gamma * r) / r;
}

}  // namespace tailidx
