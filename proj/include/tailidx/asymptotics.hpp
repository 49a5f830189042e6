#ifndef TAILIDX_ASYMPTOTICS_HPP
#define TAILIDX_ASYMPTOTICS_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace tailidx {

// Hall-class tail 1-F(x) = (x/C)^{-1/gamma} (1 + (beta/rho)(x/C)^{rho/gamma} + ...),
// second-order rate A(t) = gamma * beta * t^rho.
//
// A strict Pareto tail has no second-order term; it is represented by the
// bias-free sentinel (beta = 0, rho = -inf) which the AMSE routines reject.
struct SecondOrderModel {
  double gamma = 1.0;
  double rho = -1.0;
  double beta = 1.0;
  double C = 1.0;
  bool bias_free = false;

  static SecondOrderModel bias_free_model(double gamma, double C = 1.0);
  void validate() const;
  double rate(double t) const;  // A(t)
};

// d_r(k) = 1 - k gamma r
inline double d_r(double gamma, double r, int k) { return 1.0 - k * gamma * r; }

// Limit of G_n(k,r,u): gamma^u Gamma(1+u) / (1 - gamma r)^{1+u}.
double xi(double gamma, double r, double u);

struct Theorem2Constants {
  double nu1 = 0.0;
  double nu2 = 0.0;
  double s1_sq = 0.0;
  double s2_sq = 0.0;
  double s12 = 0.0;
};
// Joint limit of sqrt(k)(G(k,r,0) - xi(r,0), G(k,r,1) - xi(r,1)).
// Requires gamma r < 1/2.
Theorem2Constants theorem2_constants(const SecondOrderModel& m, double r);

struct BiasVariance {
  double nu = 0.0;
  double sigma2 = 0.0;
};
// Asymptotic bias constant nu_j(r) and variance sigma_j^2(r) of estimator j.
BiasVariance theorem3_constants(const SecondOrderModel& m, double r, int j);
// Same, parametrized by R = gamma r and with gamma = 1. sigma2 scales as gamma^2.
BiasVariance theorem3_reduced(double rho, double R, int j);

// nu_j^2 A^2(n/k) + sigma_j^2 / k
double amse(const SecondOrderModel& m, double r, int j, std::size_t k, std::size_t n);

struct KStar {
  std::size_t k = 2;
  double k_real = 0.0;  // unclamped, unrounded formula value
  bool clamped = false;
};
// AMSE-optimal sample fraction for fixed r. Throws Error(degenerate) when the
// bias constant vanishes or the model is bias-free.
KStar k_star(const SecondOrderModel& m, double r, int j, std::size_t n);

// Coefficients of the degree-9 optimality polynomial for estimator 2,
// highest power first.
std::array<double, 10> r2_polynomial(double rho);
double r2_polynomial_value(double rho, double R);

struct R2Solution {
  double root = 0.0;
  double residual = 0.0;  // |p(root)| / leading coefficient
  std::vector<double> real_roots;
};
R2Solution solve_r2_star(double rho);

// Optimal R*_j(rho); the optimal tuning value is r* = R*_j / gamma.
double r_star(double rho, int j);

// eta_j(R) = nu_j^2 (sigma_j^2)^{-2 rho} with gamma = 1, and its logarithm.
double eta(double rho, double R, int j);
double log_eta(double rho, double R, int j);

// AMSE(numerator estimator at R_num) / AMSE(denominator estimator at R_den),
// each at its own optimal k, in the n -> infinity limit.
double amse_ratio(double rho, int j_num, double R_num, int j_den, double R_den);

// Ratio functions. psi_H, psi_MR and phi3 use their closed forms; phi2 goes
// through the numeric R2* and amse_ratio.
double psi_H(double rho);
double psi_MR(double rho);
double phi2(double rho);
double phi3(double rho);

inline constexpr double kPsiMRLimitNegInf = 27.0 / 16.0;
inline constexpr double kPsiMRLimitZero = 1.0;
inline constexpr double kPhi3LimitNegInf = 27.0 / 32.0;

// Limit of the change in estimator j when one observation goes to infinity:
// 0 for r < 0, +inf at r = 0, (1 - gamma r)/r for 0 < r < 1/gamma.
double robustness_limit(double gamma, double r, int j);

}  // namespace tailidx

#endif  // TAILIDX_ASYMPTOTICS_HPP
