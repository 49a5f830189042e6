#include "tailidx/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tailidx/asymptotics.hpp"
#include "tailidx/config.hpp"
#include "tailidx/error.hpp"
#include "tailidx/estimators.hpp"
#include "tailidx/montecarlo.hpp"
#include "tailidx/secondorder.hpp"
#include "tailidx/statcore.hpp"

namespace tailidx {

namespace {

using json = nlohmann::json;

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse: return kExitParse;
    case ErrorKind::domain:
    case ErrorKind::tie: return kExitDomain;
    case ErrorKind::degenerate: return kExitDegenerate;
  }
  return kExitDomain;
}

// Estimator j of Theorem 3 and the tuning value it runs at; nullopt when the
// estimator has no asymptotic theory here (moment).
std::optional<int> theory_j(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::hill:
    case EstimatorKind::g1:
    case EstimatorKind::hme: return 1;
    case EstimatorKind::g2: return 2;
    case EstimatorKind::moment_ratio:
    case EstimatorKind::g3: return 3;
    case EstimatorKind::moment: return std::nullopt;
  }
  return std::nullopt;
}

double tuning_r(const EstimatorSpec& spec) {
  switch (spec.kind) {
    case EstimatorKind::g1:
    case EstimatorKind::g2:
    case EstimatorKind::g3: return spec.r;
    case EstimatorKind::hme: return 1.0 - spec.beta;
    default: return 0.0;
  }
}

struct EstimateFlags {
  std::string data;
  std::string kind = "hill";
  std::size_t k = 0;
  bool adaptive = false;
  std::string r = "0";
  double beta = 1.0;
  double z = 1.959963984540054;
};

int cmd_estimate(const EstimateFlags& f, std::ostream& out) {
  const auto kind = parse_estimator_kind(f.kind);
  if (!kind) throw Error(ErrorKind::parse, "unknown estimator kind '" + f.kind + "'");
  const Sample s = read_sample_file(f.data);

  const bool r_optimal = f.r == "optimal";
  double r_value = 0.0;
  if (!r_optimal) {
    std::size_t used = 0;
    try {
      r_value = std::stod(f.r, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != f.r.size() || f.r.empty())
      throw Error(ErrorKind::parse, "--r expects a number or 'optimal', got '" + f.r + "'");
  }

  Estimate est;
  std::optional<RhoEstimate> rho;
  std::optional<BetaEstimate> beta;
  std::optional<double> R_star;

  if (f.adaptive) {
    if (f.k != 0) throw Error(ErrorKind::parse, "--k and --adaptive are exclusive");
    int j = 0;
    bool generalized = false;
    switch (*kind) {
      case EstimatorKind::hill: j = 1; break;
      case EstimatorKind::g1: j = 1; generalized = true; break;
      case EstimatorKind::moment_ratio: j = 3; break;
      case EstimatorKind::g3: j = 3; generalized = true; break;
      default:
        throw_domain("--adaptive supports hill, g1 (gh), moment_ratio (mr) and g3 (gmr)");
    }
    if (!generalized && r_value != 0.0) throw_domain("classical adaptive estimators run at r = 0");
    if (generalized && !r_optimal && f.r != "0")
      throw_domain("adaptive generalized estimators use r = optimal");
    const AdaptiveResult res = adaptive_estimate(s, j);
    est = generalized ? res.generalized : res.classical;
    rho = res.rho;
    beta = res.beta;
    if (generalized) R_star = res.R_star;
  } else {
    if (f.k == 0) throw Error(ErrorKind::parse, "one of --k or --adaptive is required");
    EstimatorSpec spec{*kind, f.k, r_value, f.beta};
    if (r_optimal) {
      if (*kind != EstimatorKind::g1 && *kind != EstimatorKind::g2 && *kind != EstimatorKind::g3)
        throw_domain("--r optimal applies to g1, g2 and g3");
      const auto so = estimate_second_order(s);
      rho = so.first;
      beta = so.second;
      const int j = *theory_j(*kind);
      R_star = r_star(rho->rho_hat, j);
      validate_k(f.k, s.size());
      const double classical =
          j == 3 ? moment_ratio(s, f.k).gamma_hat : hill(s, f.k).gamma_hat;
      if (!(classical > 0.0)) throw_degenerate("classical estimate is not positive; r* undefined");
      spec.r = *R_star / classical;
    }
    est = estimate(s, spec);
  }

  const std::size_t k = est.spec.k;
  const double r = tuning_r(est.spec);
  json report;
  report["estimator"] = std::string(to_string(est.spec.kind));
  report["gamma_hat"] = est.gamma_hat;
  report["k"] = k;
  report["r"] = r;
  if (est.spec.kind == EstimatorKind::hme) report["beta"] = est.spec.beta;
  report["n"] = est.n;
  report["adaptive"] = f.adaptive;
  report["rho_hat"] = rho ? json(rho->rho_hat) : json(nullptr);
  report["beta_hat"] = beta ? json(beta->beta_hat) : json(nullptr);
  report["R_star"] = R_star ? json(*R_star) : json(nullptr);
  if (rho) {
    report["rho_tau"] = rho->tau;
    report["rho_clamped"] = rho->clamped;
  }

  json ci = nullptr;
  json bias = nullptr;
  if (const auto j = theory_j(est.spec.kind); j && est.gamma_hat > 0.0) {
    try {
      SecondOrderModel m;
      m.gamma = est.gamma_hat;
      m.rho = rho ? rho->rho_hat : -1.0;
      m.beta = beta && beta->beta_hat != 0.0 ? beta->beta_hat : 1.0;
      const BiasVariance bv = theorem3_constants(m, r, *j);
      const double half = f.z * std::sqrt(bv.sigma2) / std::sqrt(static_cast<double>(k));
      ci = json{{"z", f.z},
                {"sigma2", bv.sigma2},
                {"lower", est.gamma_hat - half},
                {"upper", est.gamma_hat + half}};
      if (rho && beta) {
        const double t = static_cast<double>(est.n) / static_cast<double>(k);
        bias = num_or_null(bv.nu * m.rate(t));
      }
    } catch (const Error&) {
      ci = nullptr;
    }
  }
  report["ci"] = ci;
  report["bias_term"] = bias;
  report["diagnostics"] = {{"G_r0", num_or_null(est.diagnostics.g_r0)},
                           {"G_r1", num_or_null(est.diagnostics.g_r1)},
                           {"G_02", num_or_null(est.diagnostics.g_02)}};
  out << report.dump(2) << '\n';
  return kExitOk;
}

struct OptimalFlags {
  int j = 1;
  double rho = -1.0;
  double gamma = 1.0;
  double beta = 1.0;
  std::size_t n = 1000;
};

int cmd_optimal(const OptimalFlags& f, std::ostream& out) {
  if (f.j < 1 || f.j > 3) throw_domain("--j must be 1, 2 or 3");
  if (f.n < 3) throw_domain("--n must be at least 3");
  SecondOrderModel m{f.gamma, f.rho, f.beta, 1.0, false};
  m.validate();
  json report;
  report["j"] = f.j;
  report["rho"] = f.rho;
  report["gamma"] = f.gamma;
  report["beta"] = f.beta;
  report["n"] = f.n;
  double R = 0.0;
  if (f.j == 2) {
    const R2Solution sol = solve_r2_star(f.rho);
    R = sol.root;
    report["residual"] = sol.residual;
    report["real_roots"] = sol.real_roots;
  } else {
    R = r_star(f.rho, f.j);
  }
  const double r = R / f.gamma;
  const KStar ks = k_star(m, r, f.j, f.n);
  report["R_star"] = R;
  report["r_star"] = r;
  report["k_star"] = ks.k;
  report["k_star_real"] = ks.k_real;
  report["k_star_clamped"] = ks.clamped;
  report["amse"] = amse(m, r, f.j, ks.k, f.n);
  out << report.dump(2) << '\n';
  return kExitOk;
}

struct AmseFlags {
  std::string curve;
  double rho_min = -10.0;
  double rho_max = -0.01;
  double step = 0.01;
};

int cmd_amse(const AmseFlags& f, std::ostream& out) {
  double (*fn)(double) = nullptr;
  if (f.curve == "psiH") fn = psi_H;
  else if (f.curve == "psiMR") fn = psi_MR;
  else if (f.curve == "phi2") fn = phi2;
  else if (f.curve == "phi3") fn = phi3;
  else throw Error(ErrorKind::parse, "--curve must be psiH, psiMR, phi2 or phi3");
  if (!(f.rho_max < 0.0) || !(f.rho_min <= f.rho_max) || !std::isfinite(f.rho_min))
    throw_domain("rho range must satisfy rho_min <= rho_max < 0");
  if (!(f.step > 0.0)) throw_domain("--step must be positive");
  const auto count = static_cast<std::size_t>(std::floor((f.rho_max - f.rho_min) / f.step + 1e-9)) + 1;
  std::ostringstream os;
  os << "rho," << f.curve << '\n';
  for (std::size_t i = 0; i < count; ++i) {
    const double rho = f.rho_min + static_cast<double>(i) * f.step;
    os << num17(rho) << ',' << num17(fn(rho)) << '\n';
  }
  out << os.str();
  return kExitOk;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::parse, "cannot write " + path);
  f << content;
  if (!f) throw Error(ErrorKind::parse, "write failed for " + path);
}

struct SimulateFlags {
  std::string config;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out, std::ostream& err) {
  SimulationPlan plan = load_simulation_plan(std::filesystem::path(f.config));
  plan.experiment.seed = f.seed;
  plan.experiment.validate();
  const std::string prefix = f.out.empty() ? std::filesystem::path(f.config).stem().string() : f.out;

  std::vector<std::string> failing;
  if (plan.mode == SimulationMode::ratio) {
    const auto points = ratio_curve(plan.experiment, plan.ratio_gamma, plan.ratio_rhos,
                                    plan.ratio_num, plan.ratio_den, f.threads);
    write_file(prefix + ".ratio.csv", ratio_csv(points));
    for (const auto& p : points)
      if (p.degenerate) failing.push_back("gamma=" + num17(plan.ratio_gamma) + " rho=" + num17(p.rho));
    out << prefix << ".ratio.csv\n";
  } else {
    const SimReport report = run_experiment(plan.experiment, f.threads);
    write_file(prefix + ".csv", to_csv(report));
    out << prefix << ".csv\n";
    if (plan.mode == SimulationMode::dominance) {
      write_file(prefix + ".dominance.csv", dominance_csv(dominance_map(report)));
      out << prefix << ".dominance.csv\n";
    }
    for (const auto& c : report.cells)
      if (c.degenerate) failing.push_back("gamma=" + num17(c.cell.gamma) + " rho=" + num17(c.cell.rho));
  }
  json manifest = json::parse(manifest_json(plan.experiment));
  static const char* const modes[] = {"cells", "dominance", "ratio"};
  manifest["mode"] = modes[static_cast<int>(plan.mode)];
  if (plan.mode == SimulationMode::ratio)
    manifest["ratio"] = {{"gamma", plan.ratio_gamma},
                         {"rho", plan.ratio_rhos},
                         {"pair", {to_string(plan.ratio_num), to_string(plan.ratio_den)}}};
  write_file(prefix + ".manifest.json", manifest.dump(2) + "\n");
  out << prefix << ".manifest.json\n";

  if (!failing.empty()) {
    err << "tailidx: " << failing.size() << " degenerate cell(s) [step: cell]\n";
    for (const auto& c : failing) err << "  " << c << '\n';
    return kExitDegenerate;
  }
  return kExitOk;
}

struct RobustnessFlags {
  double gamma = 1.0;
  double r = 0.5;
  int j = 1;
  std::size_t n = 10000;
  std::size_t k = 1000;
  std::vector<double> x;
  std::uint64_t seed = 0;
};

int cmd_robustness(const RobustnessFlags& f, std::ostream& out) {
  if (f.j < 1 || f.j > 3) throw_domain("--j must be 1, 2 or 3");
  std::vector<double> xs = f.x;
  if (xs.empty())
    for (int e = 1; e <= 10; ++e) xs.push_back(std::pow(10.0, e));
  const auto rows = contamination_experiment(f.gamma, f.r, f.j, f.n, f.k, f.seed, xs);
  std::ostringstream os;
  os << "x,delta\n";
  for (const auto& [x, d] : rows) os << num17(x) << ',' << num17(d) << '\n';
  out << os.str();
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tail index estimation with the generalized statistic G_n(k,r,u)", "tailidx"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  EstimateFlags ef;
  auto* est = app.add_subcommand("estimate", "Estimate the tail index of a data file");
  est->add_option("data", ef.data, "One positive value per line")->required();
  est->add_option("--kind", ef.kind, "hill, moment, moment_ratio|mr, g1|gh, g2, g3|gmr, hme");
  est->add_option("--k", ef.k, "Number of top order statistics");
  est->add_flag("--adaptive", ef.adaptive, "Data-driven k (and r for g1/g3)");
  est->add_option("--r", ef.r, "Tuning value or 'optimal'");
  est->add_option("--beta", ef.beta, "HME parameter");
  est->add_option("--z", ef.z, "Normal quantile of the interval");

  OptimalFlags of;
  auto* opt = app.add_subcommand("optimal", "Optimal R*, r*, k* and AMSE under the Hall model");
  opt->add_option("--j", of.j, "Estimator 1, 2 or 3")->required();
  opt->add_option("--rho", of.rho, "Second-order parameter (< 0)")->required();
  opt->add_option("--gamma", of.gamma);
  opt->add_option("--beta", of.beta);
  opt->add_option("--n", of.n);

  AmseFlags af;
  auto* am = app.add_subcommand("amse", "Asymptotic AMSE ratio curves as CSV");
  am->add_option("--curve", af.curve, "psiH, psiMR, phi2 or phi3")->required();
  am->add_option("--rho-min", af.rho_min);
  am->add_option("--rho-max", af.rho_max);
  am->add_option("--step", af.step);

  SimulateFlags sf;
  auto* sim = app.add_subcommand("simulate", "Run a Monte-Carlo experiment from a config file");
  sim->add_option("config", sf.config)->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", sf.seed)->required();
  sim->add_option("--threads", sf.threads, "Worker cap (0: all cores)");
  sim->add_option("--out", sf.out, "Output prefix (default: config stem)");

  RobustnessFlags rf;
  auto* rob = app.add_subcommand("robustness", "Contamination experiment on a strict Pareto sample");
  rob->add_option("--gamma", rf.gamma);
  rob->add_option("--r", rf.r);
  rob->add_option("--j", rf.j);
  rob->add_option("--n", rf.n);
  rob->add_option("--k", rf.k);
  rob->add_option("--x", rf.x, "Contamination values")->delimiter(',');
  rob->add_option("--seed", rf.seed)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (est->parsed()) return cmd_estimate(ef, out);
    if (opt->parsed()) return cmd_optimal(of, out);
    if (am->parsed()) return cmd_amse(af, out);
    if (sim->parsed()) return cmd_simulate(sf, out, err);
    if (rob->parsed()) return cmd_robustness(rf, out);
  } catch (const Error& e) {
    err << "tailidx: " << to_string(e.kind()) << " error";
    if (!e.step().empty()) err << " [step: " << e.step() << "]";
    err << ": " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return kExitParse;
}

}  // namespace tailidx
