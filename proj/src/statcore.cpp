#include "tailidx/statcore.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <string>

#include "tailidx/error.hpp"

namespace tailidx {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::tie: return "tie";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 3)
    throw_domain("sample needs at least 3 observations, got " + std::to_string(values_.size()));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v > 0.0) || !std::isfinite(v))
      throw_domain("observation " + std::to_string(i) + " is not a finite positive value: " +
                   std::to_string(v));
  }
  sorted_ = values_;
  std::sort(sorted_.begin(), sorted_.end(), std::greater<>());
}

Sample Sample::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw_domain("scale factor must be positive");
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return Sample(std::move(v));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

Sample read_sample(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    double v = 0.0;
    if (!parse_double(t, v)) {
      if (!seen_content) {
        seen_content = true;  // header
        continue;
      }
      throw Error(ErrorKind::parse,
                  "line " + std::to_string(lineno) + ": not a number: '" + std::string(t) + "'");
    }
    seen_content = true;
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::parse, "line " + std::to_string(lineno) +
                                        ": observations must be finite and positive");
    values.push_back(v);
  }
  if (values.size() < 3)
    throw Error(ErrorKind::parse,
                "need at least 3 observations, found " + std::to_string(values.size()));
  return Sample(std::move(values));
}

Sample read_sample_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open " + path.string());
  return read_sample(in);
}

void validate_k(std::size_t k, std::size_t n) {
  if (k < 2 || k + 1 > n)
    throw_domain("k must satisfy 2 <= k <= n-1 (k=" + std::to_string(k) +
                 ", n=" + std::to_string(n) + ")");
}

void validate(const GParams& p, std::size_t n) {
  if (!(p.u > -1.0)) throw_domain("u must exceed -1");
  if (!std::isfinite(p.r)) throw_domain("r must be finite");
  validate_k(p.k, n);
}

namespace {

// ln^u for the integer exponents the estimators use, by multiplication so
// that every caller rounds identically.
inline double log_power(double l, double u) {
  if (u == 0.0) return 1.0;
  if (u == 1.0) return l;
  if (u == 2.0) return l * l;
  if (u == 3.0) return l * l * l;
  return std::pow(l, u);
}

inline double g_unchecked(double r, double u, double x) {
  if (x == 1.0) return u > 0.0 ? 0.0 : 1.0;
  const double p = r == 0.0 ? 1.0 : std::pow(x, r);
  return p * log_power(std::log(x), u);
}

}  // namespace

double g(double r, double u, double x) {
  if (!(x >= 1.0)) throw_domain("g_{r,u}(x) requires x >= 1");
  if (u < 0.0 && x == 1.0) throw Error(ErrorKind::tie, "g_{r,u}(1) undefined for u < 0");
  return g_unchecked(r, u, x);
}

double statistic_G(const Sample& s, const GParams& p) {
  validate(p, s.size());
  const auto xs = s.sorted_desc();
  const double threshold = xs[p.k];
  double sum = 0.0;
  for (std::size_t i = 0; i < p.k; ++i) {
    if (p.u < 0.0 && xs[i] == threshold)
      throw Error(ErrorKind::tie, "observation ties the threshold X_{n-k,n} with u < 0");
    sum += g_unchecked(p.r, p.u, xs[i] / threshold);
  }
  return sum / static_cast<double>(p.k);
}

double statistic_H(const Sample& s, std::size_t k, double r) {
  if (is_small_r(r)) return statistic_G(s, {0.0, 1.0, k});
  validate_k(k, s.size());
  const auto xs = s.sorted_desc();
  const double threshold = xs[k];
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::expm1(r * std::log(xs[i] / threshold));
  return sum / static_cast<double>(k) / r;
}

LogMoments log_moments(const Sample& s, std::size_t k) {
  validate_k(k, s.size());
  const auto xs = s.sorted_desc();
  const double threshold = xs[k];
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = xs[i] / threshold;
    if (x == 1.0) continue;  // contributes 0 to every u > 0 moment
    const double l = std::log(x);
    s1 += l;
    s2 += l * l;
    s3 += l * l * l;
  }
  const auto kd = static_cast<double>(k);
  return {s1 / kd, s2 / kd, s3 / kd};
}

}  // namespace tailidx
