#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "tailidx/distributions.hpp"
#include "tailidx/error.hpp"
#include "tailidx/rng.hpp"

using namespace tailidx;

namespace ref {
// Distribution functions written from their definitions (long double).
double F(const DistSpec& d, double x) {
  const long double y = x / static_cast<long double>(d.C);
  const long double g = d.gamma, r = d.rho;
  switch (d.family) {
    case Family::pareto: return y < 1 ? 0.0 : double(1 - std::pow(y, -1 / g));
    case Family::burr: return double(1 - std::pow(1 + std::pow(y, -r / g), 1 / r));
    case Family::kumaraswamy: return double(1 - std::pow(1 - std::exp(-std::pow(y, r / g)), -1 / r));
  }
  return 0;
}
}  // namespace ref

TEST_CASE("quantile hand values") {
  CHECK(quantile({Family::burr, 1, -1, 1}, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(quantile({Family::kumaraswamy, 1, -1, 1}, 0.5) == doctest::Approx(1 / std::log(2.0)).epsilon(1e-14));
  CHECK(quantile({Family::pareto, 2, -1, 1}, 0.75) == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(quantile({Family::pareto, 2, -1, 3}, 0.75) == doctest::Approx(48.0).epsilon(1e-14));
}

TEST_CASE("round trip against an independent F") {
  for (Family f : {Family::pareto, Family::burr, Family::kumaraswamy})
    for (double g : {0.2, 1.0, 3.0})
      for (double rho : {-0.2, -1.0, -4.0}) {
        const DistSpec d{f, g, rho, 1.0};
        double prev = 0;
        for (double p = 0.001; p < 0.999; p += 0.001) {
          const double x = quantile(d, p);
          CHECK(ref::F(d, x) == doctest::Approx(p).epsilon(1e-12));
          CHECK(cdf(d, x) == doctest::Approx(p).epsilon(1e-12));
          CHECK(x > prev);
          prev = x;
        }
      }
}

TEST_CASE("KS distance of burr draws") {
  const DistSpec d{Family::burr, 1, -1, 1};
  auto xs = draw(d, 100000, 42);
  std::sort(xs.begin(), xs.end());
  double ks = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double Fx = ref::F(d, xs[i]);
    ks = std::max({ks, std::abs(Fx - i / n), std::abs((i + 1) / n - Fx)});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("tail behaviour") {
  for (Family f : {Family::burr, Family::kumaraswamy})
    for (double g : {0.5, 1.0, 2.0}) {
      const DistSpec d{f, g, -1, 1};
      const double x = 1e6;
      CHECK((1 - ref::F(d, x)) * std::pow(x, 1 / g) == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("sampling") {
  const DistSpec d{Family::kumaraswamy, 1.5, -2, 1};
  CHECK(draw(d, 1000, 7) == draw(d, 1000, 7));
  CHECK(draw(d, 1000, 7) != draw(d, 1000, 8));
  // prefix property of the counter-based stream
  const auto a = draw(d, 100, 7), b = draw(d, 1000, 7);
  CHECK(std::equal(a.begin(), a.end(), b.begin()));
  const auto p = draw({Family::pareto, 1, -1, 1}, 10000, 3);
  CHECK(*std::min_element(p.begin(), p.end()) >= 1.0);
  const CounterRng rng(derive_key(1, 2, 3));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CHECK(rng.uniform(i) > 0.0);
    CHECK(rng.uniform(i) < 1.0);
  }
  CHECK(sample(d, 50, 1).size() == 50);
  // extreme rho does not overflow
  const auto ext = draw({Family::kumaraswamy, 1, -20, 1}, 1000, 5);
  CHECK(std::all_of(ext.begin(), ext.end(), [](double v) { return std::isfinite(v) && v > 0; }));
}

TEST_CASE("hall model") {
  const auto m = hall_model({Family::burr, 2, -0.5, 1});
  CHECK(m.gamma == 2);
  CHECK(m.rho == -0.5);
  CHECK(m.beta == 1);
  CHECK(m.C == 1);
  CHECK(hall_model({Family::kumaraswamy, 1, -1, 1}).beta == 0.5);
  CHECK(hall_model({Family::pareto, 1, -1, 1}).bias_free);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(quantile({Family::burr, -1, -1, 1}, 0.5), Error);
  CHECK_THROWS_AS(quantile({Family::burr, 1, 0.5, 1}, 0.5), Error);
  CHECK_THROWS_AS(quantile({Family::burr, 1, -1, 1}, 1.0), Error);
  CHECK(parse_family("burr") == Family::burr);
  CHECK_FALSE(parse_family("cauchy").has_value());
}
