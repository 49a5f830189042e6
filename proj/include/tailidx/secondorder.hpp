#ifndef TAILIDX_SECONDORDER_HPP
#define TAILIDX_SECONDORDER_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "tailidx/estimators.hpp"
#include "tailidx/statcore.hpp"

namespace tailidx {

// rho-hat values below this are clamped and flagged.
inline constexpr double kRhoFloor = -25.0;

// rho_n(k,tau) = -|3(T - 1)/(T - 3)| built from M1 = G(k,0,1),
// M2 = G(k,0,2)/2, M3 = G(k,0,3)/6; tau = 0 uses the log form of T,
// tau = 1 the power form. Throws Error(degenerate) when T is undefined.
double rho_from_moments(double g01, double g02, double g03, int tau);
double rho_hat(const Sample& s, std::size_t k, int tau);

struct RhoEstimate {
  double rho_hat = -1.0;
  int tau = 0;
  std::size_t k_used = 0;
  bool clamped = false;
  std::vector<std::pair<std::size_t, double>> path;  // (k, rho_n(k,tau)) at the chosen tau
};

// Evaluates rho_n(k,tau) over k in [floor(n^0.9), floor(n^0.995)] for both
// tau, keeps the tau whose path has the smaller interquartile range and
// reports that path's median. k_used = floor(n^0.995).
RhoEstimate estimate_rho(const Sample& s);

// Hall beta from the scaled log-spacings W_i = i ln(X_{n-i+1,n}/X_{n-i,n}).
double beta_hat(const Sample& s, std::size_t k, double rho);

struct BetaEstimate {
  double beta_hat = 1.0;
  std::size_t k_used = 0;
  bool near_zero = false;  // |beta_hat| < 1e-6
};

// Printed plug-in sample fractions: classical k-hat_j (r = 0) or
// generalized K-hat_j (r = R*_j(rho)), j in {1, 3}; rounded and clamped to
// [2, n-1].
std::size_t adaptive_k(std::size_t n, double rho, double beta, int j, bool generalized);
inline std::size_t adaptive_k(const Sample& s, double rho, double beta, int j, bool generalized) {
  return adaptive_k(s.size(), rho, beta, j, generalized);
}

struct AdaptiveResult {
  Estimate classical;
  Estimate generalized;
  RhoEstimate rho;
  BetaEstimate beta;
  double R_star = 0.0;
  double r_star = 0.0;
};

// Five-step adaptive estimation for j = 1 (Hill / generalized Hill) or
// j = 3 (moment ratio / generalized moment ratio). Errors carry the step
// tag: "rho", "beta", "k_classical", "classical", "r_star", "k_generalized",
// "generalized".
AdaptiveResult adaptive_estimate(const Sample& s, int j);
// Same with the second-order estimates already computed (shared across j).
AdaptiveResult adaptive_estimate(const Sample& s, int j, const RhoEstimate& rho,
                                 const BetaEstimate& beta);

// Steps 1 and 2.
std::pair<RhoEstimate, BetaEstimate> estimate_second_order(const Sample& s);

}  // namespace tailidx

#endif  // TAILIDX_SECONDORDER_HPP
