#ifndef TAILIDX_DISTRIBUTIONS_HPP
#define TAILIDX_DISTRIBUTIONS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tailidx/asymptotics.hpp"
#include "tailidx/statcore.hpp"

namespace tailidx {

enum class Family { pareto, burr, kumaraswamy };

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view name);

//   pareto:       F(x) = 1 - (x/C)^{-1/gamma},                   x >= C
//   burr:         F(x) = 1 - (1 + (x/C)^{-rho/gamma})^{1/rho},   x >= 0
//   kumaraswamy:  F(x) = 1 - (1 - exp(-(x/C)^{rho/gamma}))^{-1/rho}
// rho is ignored for pareto.
struct DistSpec {
  Family family = Family::burr;
  double gamma = 1.0;
  double rho = -1.0;
  double C = 1.0;

  void validate() const;
};

double cdf(const DistSpec& d, double x);
double quantile(const DistSpec& d, double p);

// n inverse-transform draws from stream `seed`.
std::vector<double> draw(const DistSpec& d, std::size_t n, std::uint64_t seed);
Sample sample(const DistSpec& d, std::size_t n, std::uint64_t seed);

// (gamma, rho, beta, C) of the family in Hall's class; pareto maps to the
// bias-free sentinel.
SecondOrderModel hall_model(const DistSpec& d);

}  // namespace tailidx

#endif  // TAILIDX_DISTRIBUTIONS_HPP
