#include "tailidx/montecarlo.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include "json.hpp"
#include <sstream>

#include "tailidx/asymptotics.hpp"
#include "tailidx/error.hpp"
#include "tailidx/rng.hpp"
#include "tailidx/secondorder.hpp"

namespace tailidx {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed_label(const EstimatorSpec& s) {
  std::string label(to_string(s.kind));
  label += "(k=" + std::to_string(s.k);
  if (s.kind == EstimatorKind::hme)
    label += ",beta=" + fmt17(s.beta);
  else if (s.kind == EstimatorKind::g1 || s.kind == EstimatorKind::g2 ||
           s.kind == EstimatorKind::g3)
    label += ",r=" + fmt17(s.r);
  return label + ")";
}

std::uint64_t cell_hash(const DistSpec& d, const Cell& c) {
  return mix64(std::bit_cast<std::uint64_t>(c.gamma)) ^
         mix64(std::bit_cast<std::uint64_t>(c.rho) + 0x51ED2701A3F5C9B1ULL) ^
         mix64(std::bit_cast<std::uint64_t>(d.C) + static_cast<std::uint64_t>(d.family));
}

// Outcome of one replication: a value or a failure step per estimator.
struct RepOutcome {
  std::vector<double> values;
  std::vector<std::string> fail_step;  // empty string: success
};

RepOutcome run_replication(const ExperimentConfig& cfg, const DistSpec& dist, std::uint64_t key) {
  const std::size_t m = cfg.pipelines.size() + cfg.fixed.size();
  RepOutcome out{std::vector<double>(m, kNaN), std::vector<std::string>(m)};
  std::optional<Sample> s;
  try {
    s.emplace(sample(dist, cfg.n, key));
  } catch (const Error&) {
    for (auto& f : out.fail_step) f = "sample";
    return out;
  }

  if (!cfg.pipelines.empty()) {
    const bool want1 = std::any_of(cfg.pipelines.begin(), cfg.pipelines.end(),
                                   [](Pipeline p) { return p == Pipeline::hill || p == Pipeline::gh; });
    const bool want3 = std::any_of(cfg.pipelines.begin(), cfg.pipelines.end(),
                                   [](Pipeline p) { return p == Pipeline::mr || p == Pipeline::gmr; });
    std::optional<AdaptiveResult> a1, a3;
    std::string err1, err3;
    if (dist.family == Family::pareto) {
      err1 = err3 = "model";
    } else {
      try {
        const auto [rho, beta] = estimate_second_order(*s);
        if (want1) {
          try {
            a1 = adaptive_estimate(*s, 1, rho, beta);
          } catch (const Error& e) {
            err1 = e.step().empty() ? "pipeline" : e.step();
          }
        }
        if (want3) {
          try {
            a3 = adaptive_estimate(*s, 3, rho, beta);
          } catch (const Error& e) {
            err3 = e.step().empty() ? "pipeline" : e.step();
          }
        }
      } catch (const Error& e) {
        err1 = err3 = e.step().empty() ? "pipeline" : e.step();
      }
    }
    for (std::size_t i = 0; i < cfg.pipelines.size(); ++i) {
      const Pipeline p = cfg.pipelines[i];
      const bool first = p == Pipeline::hill || p == Pipeline::gh;
      const auto& a = first ? a1 : a3;
      if (!a) {
        out.fail_step[i] = first ? err1 : err3;
        continue;
      }
      const bool classical = p == Pipeline::hill || p == Pipeline::mr;
      out.values[i] = classical ? a->classical.gamma_hat : a->generalized.gamma_hat;
    }
  }

  for (std::size_t f = 0; f < cfg.fixed.size(); ++f) {
    const std::size_t i = cfg.pipelines.size() + f;
    try {
      out.values[i] = estimate(*s, cfg.fixed[f]).gamma_hat;
    } catch (const Error&) {
      out.fail_step[i] = "estimate";
    }
  }
  return out;
}

CellReport aggregate(const ExperimentConfig& cfg, const Cell& cell,
                     const std::vector<RepOutcome>& reps) {
  CellReport rep;
  rep.cell = cell;
  rep.replications = reps.size();
  for (const auto& r : reps)
    if (std::any_of(r.fail_step.begin(), r.fail_step.end(), [](const auto& s) { return !s.empty(); }))
      ++rep.failed_replications;
  rep.degenerate = 2 * rep.failed_replications > rep.replications;

  const auto labels = estimator_labels(cfg);
  std::vector<double> vals, sq, dev;
  for (std::size_t e = 0; e < labels.size(); ++e) {
    EstimatorStats st;
    st.label = labels[e];
    vals.clear();
    for (const auto& r : reps) {
      if (r.fail_step[e].empty()) {
        vals.push_back(r.values[e]);
      } else {
        ++st.failures;
        ++st.failure_steps[r.fail_step[e]];
      }
    }
    st.successes = vals.size();
    if (vals.empty()) {
      st.mean = st.bias = st.mse = st.variance = kNaN;
    } else {
      const auto m = static_cast<double>(vals.size());
      st.mean = pairwise_sum(vals) / m;
      st.bias = st.mean - cell.gamma;
      sq.resize(vals.size());
      dev.resize(vals.size());
      for (std::size_t i = 0; i < vals.size(); ++i) {
        const double e1 = vals[i] - cell.gamma;
        const double e2 = vals[i] - st.mean;
        sq[i] = e1 * e1;
        dev[i] = e2 * e2;
      }
      st.mse = pairwise_sum(sq) / m;
      st.variance = pairwise_sum(dev) / m;
    }
    rep.estimators.push_back(std::move(st));
  }
  return rep;
}

DistSpec cell_dist(const ExperimentConfig& cfg, const Cell& cell) {
  DistSpec d = cfg.dist;
  d.gamma = cell.gamma;
  d.rho = cell.rho;
  return d;
}

}  // namespace

std::string_view to_string(Pipeline p) {
  switch (p) {
    case Pipeline::hill: return "hill";
    case Pipeline::gh: return "gh";
    case Pipeline::mr: return "mr";
    case Pipeline::gmr: return "gmr";
  }
  return "unknown";
}

std::optional<Pipeline> parse_pipeline(std::string_view name) {
  if (name == "hill") return Pipeline::hill;
  if (name == "gh") return Pipeline::gh;
  if (name == "mr") return Pipeline::mr;
  if (name == "gmr") return Pipeline::gmr;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  dist.validate();
  if (replications < 1) throw_domain("replications must be at least 1");
  if (n < 3) throw_domain("sample size must be at least 3");
  if (!pipelines.empty() && n < 100) throw_domain("adaptive pipelines require n >= 100");
  if (pipelines.empty() && fixed.empty()) throw_domain("no estimators selected");
  for (const auto& f : fixed) validate_k(f.k, n);
  for (const auto& c : grid) {
    if (!(c.gamma > 0.0)) throw_domain("grid cell gamma must be positive");
    if (dist.family != Family::pareto && !(c.rho < 0.0))
      throw_domain("grid cell rho must be negative");
  }
}

std::vector<Cell> ExperimentConfig::cells() const {
  if (!grid.empty()) return grid;
  return {Cell{dist.gamma, dist.rho}};
}

const EstimatorStats* CellReport::find(std::string_view label) const {
  for (const auto& e : estimators)
    if (e.label == label) return &e;
  return nullptr;
}

std::vector<std::string> estimator_labels(const ExperimentConfig& cfg) {
  std::vector<std::string> labels;
  for (auto p : cfg.pipelines) labels.emplace_back(to_string(p));
  for (const auto& f : cfg.fixed) labels.push_back(fixed_label(f));
  return labels;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

CellReport run_cell_serial(const ExperimentConfig& cfg, const Cell& cell) {
  cfg.validate();
  const DistSpec d = cell_dist(cfg, cell);
  const std::uint64_t ch = cell_hash(d, cell);
  std::vector<RepOutcome> reps(cfg.replications);
  for (std::size_t i = 0; i < cfg.replications; ++i)
    reps[i] = run_replication(cfg, d, derive_key(cfg.seed, ch, i));
  return aggregate(cfg, cell, reps);
}

CellReport run_cell(const ExperimentConfig& cfg, const Cell& cell, int threads) {
  cfg.validate();
  const DistSpec d = cell_dist(cfg, cell);
  const std::uint64_t ch = cell_hash(d, cell);
  std::vector<RepOutcome> reps(cfg.replications);
  const auto count = static_cast<std::int64_t>(cfg.replications);
#pragma omp parallel for schedule(dynamic, 4) num_threads(resolve_threads(threads))
  for (std::int64_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    reps[idx] = run_replication(cfg, d, derive_key(cfg.seed, ch, idx));
  }
  return aggregate(cfg, cell, reps);
}

SimReport run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  SimReport report;
  report.config = cfg;
  for (const auto& c : cfg.cells()) report.cells.push_back(run_cell(cfg, c, threads));
  return report;
}

std::string to_csv(const SimReport& report) {
  std::ostringstream os;
  os << "family,gamma,rho,n,estimator,replications,successes,failures,mean,bias,mse,variance,"
        "status\n";
  const auto& cfg = report.config;
  for (const auto& c : report.cells) {
    for (const auto& e : c.estimators) {
      os << to_string(cfg.dist.family) << ',' << fmt17(c.cell.gamma) << ',' << fmt17(c.cell.rho)
         << ',' << cfg.n << ',' << e.label << ',' << c.replications << ',' << e.successes << ','
         << e.failures << ',' << fmt17(e.mean) << ',' << fmt17(e.bias) << ',' << fmt17(e.mse)
         << ',' << fmt17(e.variance) << ',' << (c.degenerate ? "degenerate" : "ok") << '\n';
    }
  }
  return os.str();
}

namespace {

nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["distribution"] = {{"family", std::string(to_string(cfg.dist.family))},
                       {"gamma", cfg.dist.gamma},
                       {"rho", cfg.dist.rho},
                       {"C", cfg.dist.C}};
  j["n"] = cfg.n;
  j["replications"] = cfg.replications;
  auto& p = j["pipelines"] = nlohmann::json::array();
  for (auto x : cfg.pipelines) p.push_back(std::string(to_string(x)));
  auto& f = j["fixed"] = nlohmann::json::array();
  for (const auto& s : cfg.fixed) f.push_back(fixed_label(s));
  auto& g = j["grid"] = nlohmann::json::array();
  for (const auto& c : cfg.grid) g.push_back({c.gamma, c.rho});
  return j;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string manifest_json(const ExperimentConfig& cfg) {
  const auto conf = config_json(cfg);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a(conf.dump())));
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["generator"] = std::string(kGeneratorName);
  j["version"] = std::string(kVersion);
  j["config"] = conf;
  j["config_hash"] = hash;
  return j.dump(2) + "\n";
}

std::vector<DominanceRow> dominance_map(const SimReport& report) {
  std::vector<DominanceRow> rows;
  for (const auto& c : report.cells) {
    DominanceRow row{c.cell.gamma, c.cell.rho, "degenerate", "degenerate"};
    if (!c.degenerate) {
      double best_mse = std::numeric_limits<double>::infinity();
      double best_bias = std::numeric_limits<double>::infinity();
      for (const auto& e : c.estimators) {
        if (e.successes == 0) continue;
        if (e.mse < best_mse) {
          best_mse = e.mse;
          row.winner_mse = e.label;
        }
        if (std::abs(e.bias) < best_bias) {
          best_bias = std::abs(e.bias);
          row.winner_bias = e.label;
        }
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<DominanceRow> dominance_map(const ExperimentConfig& cfg, int threads) {
  if (cfg.grid.empty()) throw_domain("dominance map needs a non-empty grid");
  return dominance_map(run_experiment(cfg, threads));
}

std::string dominance_csv(const std::vector<DominanceRow>& rows) {
  std::ostringstream os;
  os << "gamma_center,rho_center,winner_mse,winner_bias\n";
  for (const auto& r : rows)
    os << fmt17(r.gamma) << ',' << fmt17(r.rho) << ',' << r.winner_mse << ',' << r.winner_bias
       << '\n';
  return os.str();
}

std::vector<Cell> rect_grid(double gamma_min, double gamma_max, double gamma_step,
                            double rho_min, double rho_max, double rho_step) {
  if (!(gamma_step > 0.0 && rho_step > 0.0)) throw_domain("grid steps must be positive");
  if (!(gamma_max > gamma_min && rho_max > rho_min)) throw_domain("empty grid range");
  const auto ng = static_cast<std::size_t>(std::llround((gamma_max - gamma_min) / gamma_step));
  const auto nr = static_cast<std::size_t>(std::llround((rho_max - rho_min) / rho_step));
  if (ng == 0 || nr == 0) throw_domain("grid step larger than range");
  std::vector<Cell> cells;
  cells.reserve(ng * nr);
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = 0; j < nr; ++j)
      cells.push_back({gamma_min + (static_cast<double>(i) + 0.5) * gamma_step,
                       rho_max - (static_cast<double>(j) + 0.5) * rho_step});
  return cells;
}

double theoretical_ratio(Pipeline num, Pipeline den, double rho) {
  const auto jr = [rho](Pipeline p) -> std::pair<int, double> {
    switch (p) {
      case Pipeline::hill: return {1, 0.0};
      case Pipeline::gh: return {1, r_star(rho, 1)};
      case Pipeline::mr: return {3, 0.0};
      case Pipeline::gmr: return {3, r_star(rho, 3)};
    }
    return {1, 0.0};
  };
  const auto [jn, rn] = jr(num);
  const auto [jd, rd] = jr(den);
  return amse_ratio(rho, jn, rn, jd, rd);
}

std::vector<RatioPoint> ratio_curve(const ExperimentConfig& cfg, double gamma,
                                    std::span<const double> rho_grid, Pipeline num,
                                    Pipeline den, int threads) {
  if (rho_grid.empty()) throw_domain("rho grid is empty");
  ExperimentConfig c = cfg;
  c.pipelines = {num, den};
  c.fixed.clear();
  c.grid.clear();
  std::vector<RatioPoint> out;
  for (double rho : rho_grid) {
    const auto rep = run_cell(c, Cell{gamma, rho}, threads);
    RatioPoint pt;
    pt.rho = rho;
    pt.theoretical = theoretical_ratio(num, den, rho);
    const auto& a = rep.estimators[0];
    const auto& b = rep.estimators[1];
    pt.degenerate = rep.degenerate || a.successes == 0 || b.successes == 0;
    pt.empirical = pt.degenerate ? kNaN : a.mse / b.mse;
    out.push_back(pt);
  }
  return out;
}

std::string ratio_csv(const std::vector<RatioPoint>& points) {
  std::ostringstream os;
  os << "rho,empirical_ratio,theoretical_ratio,status\n";
  for (const auto& p : points)
    os << fmt17(p.rho) << ',' << fmt17(p.empirical) << ',' << fmt17(p.theoretical) << ','
       << (p.degenerate ? "degenerate" : "ok") << '\n';
  return os.str();
}

Estimate estimator_j(const Sample& s, int j, std::size_t k, double r) {
  switch (j) {
    case 1: return g1(s, k, r);
    case 2: return g2(s, k, r);
    case 3: return g3(s, k, r);
  }
  throw_domain("estimator index j must be 1, 2 or 3");
}

VarianceCheck variance_check(double gamma, double r, int j, std::size_t n, std::size_t k,
                             std::size_t reps, std::uint64_t seed, int threads) {
  if (!(gamma * r < 0.5)) throw_domain("variance check requires gamma*r < 1/2");
  if (reps < 2) throw_domain("variance check needs at least 2 replications");
  validate_k(k, n);
  const DistSpec d{Family::pareto, gamma, -1.0, 1.0};
  VarianceCheck out;
  out.theoretical = theorem3_constants(hall_model(d), r, j).sigma2;
  out.replications = reps;
  std::vector<double> scaled(reps);
  const double sk = std::sqrt(static_cast<double>(k));
  const auto count = static_cast<std::int64_t>(reps);
  const std::uint64_t stream = mix64(std::bit_cast<std::uint64_t>(gamma)) ^ 0x7661726961ULL;
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::int64_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const Sample s = sample(d, n, derive_key(seed, stream, idx));
    scaled[idx] = sk * (estimator_j(s, j, k, r).gamma_hat - gamma);
  }
  const auto m = static_cast<double>(reps);
  out.mean_scaled = pairwise_sum(scaled) / m;
  std::vector<double> dev(reps);
  for (std::size_t i = 0; i < reps; ++i) dev[i] = (scaled[i] - out.mean_scaled) * (scaled[i] - out.mean_scaled);
  out.empirical_var_scaled = pairwise_sum(dev) / (m - 1.0);
  return out;
}

std::vector<std::pair<double, double>> contamination_experiment(double gamma, double r, int j,
                                                                std::size_t n, std::size_t k,
                                                                std::uint64_t seed,
                                                                std::span<const double> xs) {
  if (!(gamma * r < 1.0)) throw_domain("contamination experiment requires gamma*r < 1");
  if (n < 4) throw_domain("contamination experiment requires n >= 4");
  validate_k(k, n);
  if (k < 3) throw_domain("contamination experiment requires k >= 3 (baseline uses k-1)");
  const DistSpec d{Family::pareto, gamma, -1.0, 1.0};
  std::vector<double> base = draw(d, n - 1, derive_key(seed, 0x636F6E74616DULL));
  const double baseline = estimator_j(Sample(base), j, k - 1, r).gamma_hat;
  std::vector<std::pair<double, double>> out;
  out.reserve(xs.size());
  base.push_back(0.0);
  for (double x : xs) {
    if (!(x > 0.0) || !std::isfinite(x)) throw_domain("contamination values must be positive");
    base.back() = x;
    out.emplace_back(x, estimator_j(Sample(base), j, k, r).gamma_hat - baseline);
  }
  return out;
}

}  // namespace tailidx
