#include "tailidx/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tailidx/error.hpp"

namespace tailidx {

namespace {

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(ws) - b + 1));
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(ErrorKind::parse, "config line " + std::to_string(line) + ": " + what);
}

double to_double(const IniEntry& e) {
  const std::string s = trim(e.value);
  double v = 0.0;
  const char* b = s.data();
  if (!s.empty() && s.front() == '+') ++b;
  auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    fail(e.line, "expected a number, got '" + s + "'");
  return v;
}

std::size_t to_size(const IniEntry& e) {
  const std::string s = trim(e.value);
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    fail(e.line, "expected a non-negative integer, got '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

void check_keys(const IniSection& sec, const std::string& name,
                const std::set<std::string>& allowed) {
  for (const auto& [k, e] : sec)
    if (!allowed.count(k)) fail(e.line, "unknown key '" + k + "' in [" + name + "]");
}

}  // namespace

IniFile parse_ini(std::istream& in) {
  IniFile file;
  std::string current;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s.front() == '#' || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      current = trim(std::string_view(s).substr(1, s.size() - 2));
      if (current.empty()) fail(line, "empty section name");
      file[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    if (current.empty()) fail(line, "key outside of any [section]");
    std::string key = trim(std::string_view(s).substr(0, eq));
    std::string value = trim(std::string_view(s).substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
    if (key.empty()) fail(line, "empty key");
    auto& sec = file[current];
    if (sec.count(key)) fail(line, "duplicate key '" + key + "'");
    sec[key] = {value, line};
  }
  return file;
}

EstimatorSpec parse_estimator_spec(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw Error(ErrorKind::parse, "empty estimator spec");
  const auto kind = parse_estimator_kind(parts[0]);
  if (!kind) throw Error(ErrorKind::parse, "unknown estimator '" + parts[0] + "'");
  EstimatorSpec spec;
  spec.kind = *kind;
  bool have_k = false;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::parse, "expected name=value in '" + text + "'");
    const std::string key = trim(parts[i].substr(0, eq));
    const IniEntry val{parts[i].substr(eq + 1), 0};
    try {
      if (key == "k") {
        spec.k = to_size(val);
        have_k = true;
      } else if (key == "r") {
        spec.r = to_double(val);
      } else if (key == "beta") {
        spec.beta = to_double(val);
      } else {
        throw Error(ErrorKind::parse, "unknown estimator parameter '" + key + "'");
      }
    } catch (const Error&) {
      throw Error(ErrorKind::parse, "bad estimator spec '" + text + "'");
    }
  }
  if (!have_k) throw Error(ErrorKind::parse, "estimator spec '" + text + "' needs k=");
  return spec;
}

SimulationPlan load_simulation_plan(std::istream& in) {
  const IniFile ini = parse_ini(in);
  SimulationPlan plan;
  auto& cfg = plan.experiment;

  for (const auto& [name, sec] : ini) {
    if (name != "distribution" && name != "experiment" && name != "grid" && name != "ratio") {
      const int line = sec.empty() ? 0 : sec.begin()->second.line;
      fail(line, "unknown section [" + name + "]");
    }
    for (const auto& [k, e] : sec)
      if (k == "seed") fail(e.line, "seeds are given on the command line (--seed), not in the config");
  }

  const auto dist_it = ini.find("distribution");
  if (dist_it == ini.end()) throw Error(ErrorKind::parse, "config needs a [distribution] section");
  const auto& dist = dist_it->second;
  check_keys(dist, "distribution", {"family", "gamma", "rho", "C"});
  if (auto it = dist.find("family"); it != dist.end()) {
    const auto f = parse_family(it->second.value);
    if (!f) fail(it->second.line, "unknown family '" + it->second.value + "'");
    cfg.dist.family = *f;
  }
  if (auto it = dist.find("gamma"); it != dist.end()) cfg.dist.gamma = to_double(it->second);
  if (auto it = dist.find("rho"); it != dist.end()) cfg.dist.rho = to_double(it->second);
  if (auto it = dist.find("C"); it != dist.end()) cfg.dist.C = to_double(it->second);

  if (auto ex = ini.find("experiment"); ex != ini.end()) {
    const auto& sec = ex->second;
    check_keys(sec, "experiment", {"mode", "n", "replications", "pipelines", "estimators"});
    if (auto it = sec.find("mode"); it != sec.end()) {
      const auto& v = it->second.value;
      if (v == "cells") plan.mode = SimulationMode::cells;
      else if (v == "dominance") plan.mode = SimulationMode::dominance;
      else if (v == "ratio") plan.mode = SimulationMode::ratio;
      else fail(it->second.line, "mode must be cells, dominance or ratio");
    }
    if (auto it = sec.find("n"); it != sec.end()) cfg.n = to_size(it->second);
    if (auto it = sec.find("replications"); it != sec.end()) cfg.replications = to_size(it->second);
    if (auto it = sec.find("pipelines"); it != sec.end()) {
      cfg.pipelines.clear();
      for (const auto& p : split(it->second.value, ',')) {
        if (p == "none") continue;
        const auto pl = parse_pipeline(p);
        if (!pl) fail(it->second.line, "unknown pipeline '" + p + "'");
        cfg.pipelines.push_back(*pl);
      }
    }
    if (auto it = sec.find("estimators"); it != sec.end()) {
      for (const auto& s : split(it->second.value, ',')) {
        try {
          cfg.fixed.push_back(parse_estimator_spec(s));
        } catch (const Error& e) {
          fail(it->second.line, e.what());
        }
      }
    }
  }

  if (auto gr = ini.find("grid"); gr != ini.end()) {
    const auto& sec = gr->second;
    check_keys(sec, "grid",
               {"cells", "gamma_min", "gamma_max", "gamma_step", "rho_min", "rho_max", "rho_step"});
    if (auto it = sec.find("cells"); it != sec.end()) {
      if (sec.size() != 1) fail(it->second.line, "use either cells or the range keys, not both");
      for (const auto& c : split(it->second.value, ',')) {
        const auto parts = split(c, ':');
        if (parts.size() != 2) fail(it->second.line, "cell must be gamma:rho, got '" + c + "'");
        cfg.grid.push_back({to_double({parts[0], it->second.line}),
                            to_double({parts[1], it->second.line})});
      }
    } else {
      const char* keys[] = {"gamma_min", "gamma_max", "gamma_step", "rho_min", "rho_max", "rho_step"};
      double v[6];
      for (int i = 0; i < 6; ++i) {
        auto it = sec.find(keys[i]);
        if (it == sec.end())
          throw Error(ErrorKind::parse, std::string("[grid] needs ") + keys[i]);
        v[i] = to_double(it->second);
      }
      try {
        cfg.grid = rect_grid(v[0], v[1], v[2], v[3], v[4], v[5]);
      } catch (const Error& e) {
        throw Error(ErrorKind::parse, std::string("[grid]: ") + e.what());
      }
    }
  }

  if (auto ra = ini.find("ratio"); ra != ini.end()) {
    const auto& sec = ra->second;
    check_keys(sec, "ratio", {"gamma", "pair", "rho", "rho_min", "rho_max", "rho_step"});
    if (auto it = sec.find("gamma"); it != sec.end()) plan.ratio_gamma = to_double(it->second);
    if (auto it = sec.find("pair"); it != sec.end()) {
      const auto p = split(it->second.value, ',');
      if (p.size() != 2) fail(it->second.line, "pair must name two pipelines");
      const auto a = parse_pipeline(p[0]);
      const auto b = parse_pipeline(p[1]);
      if (!a || !b) fail(it->second.line, "unknown pipeline in pair");
      plan.ratio_num = *a;
      plan.ratio_den = *b;
    }
    if (auto it = sec.find("rho"); it != sec.end()) {
      for (const auto& r : split(it->second.value, ','))
        plan.ratio_rhos.push_back(to_double({r, it->second.line}));
    } else if (sec.count("rho_min") && sec.count("rho_max") && sec.count("rho_step")) {
      const double lo = to_double(sec.at("rho_min"));
      const double hi = to_double(sec.at("rho_max"));
      const double step = to_double(sec.at("rho_step"));
      if (!(step > 0.0) || !(hi >= lo)) fail(sec.at("rho_step").line, "bad rho range");
      const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
      for (std::size_t i = 0; i < count; ++i) plan.ratio_rhos.push_back(lo + static_cast<double>(i) * step);
    }
  }

  if (plan.mode == SimulationMode::dominance && cfg.grid.empty())
    throw Error(ErrorKind::parse, "dominance mode needs a [grid] section");
  if (plan.mode == SimulationMode::ratio && plan.ratio_rhos.empty())
    throw Error(ErrorKind::parse, "ratio mode needs rho values in [ratio]");
  return plan;
}

SimulationPlan load_simulation_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open config " + path.string());
  return load_simulation_plan(in);
}

}  // namespace tailidx
