#ifndef TAILIDX_STATCORE_HPP
#define TAILIDX_STATCORE_HPP

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <vector>

namespace tailidx {

// Tuning values with |r| below this go through the r = 0 limit branch.
// (x^r - 1) / r loses precision long before it underflows.
inline constexpr double kSmallR = 1e-8;

inline bool is_small_r(double r) { return std::abs(r) < kSmallR; }

// Strictly positive observations plus their descending order statistics.
// Immutable after construction; sorted_desc()[i] is X_{n-i,n}, so index 0
// is the sample maximum and index k is the threshold for k top values.
class Sample {
 public:
  explicit Sample(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::span<const double> sorted_desc() const { return sorted_; }
  std::size_t size() const { return values_.size(); }

  // X_{n-i,n}
  double order_desc(std::size_t i) const { return sorted_.at(i); }

  Sample scaled(double c) const;

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
};

// One value per line. A non-numeric first line is treated as a header;
// blank lines are skipped. Throws Error(parse) naming the offending line.
Sample read_sample(std::istream& in);
Sample read_sample_file(const std::filesystem::path& path);

struct GParams {
  double r = 0.0;
  double u = 1.0;
  std::size_t k = 2;
};

// Throws Error(domain) unless u > -1 and 2 <= k <= n-1.
void validate(const GParams& p, std::size_t n);
void validate_k(std::size_t k, std::size_t n);

// g_{r,u}(x) = x^r ln^u(x), x >= 1.
double g(double r, double u, double x);

// G_n(k,r,u): mean of g_{r,u} over the k largest observations divided by
// the (k+1)-th largest.
double statistic_G(const Sample& s, const GParams& p);

// H_n(k,r) = (G_n(k,r,0) - 1) / r, continued by G_n(k,0,1) at r = 0.
// Evaluated as mean(expm1(r ln ratio)) / r.
double statistic_H(const Sample& s, std::size_t k, double r);

// G_n(k,0,u) for u = 1, 2, 3 from a single pass; each entry is bitwise equal
// to the corresponding statistic_G call.
struct LogMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
};
LogMoments log_moments(const Sample& s, std::size_t k);

}  // namespace tailidx

#endif  // TAILIDX_STATCORE_HPP
