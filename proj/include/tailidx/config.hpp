#ifndef TAILIDX_CONFIG_HPP
#define TAILIDX_CONFIG_HPP

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "tailidx/montecarlo.hpp"

namespace tailidx {

// Flat key-value file with [sections]; see configs/README.md for the grammar.
struct IniEntry {
  std::string value;
  int line = 0;
};
using IniSection = std::map<std::string, IniEntry>;
using IniFile = std::map<std::string, IniSection>;

IniFile parse_ini(std::istream& in);

enum class SimulationMode { cells, dominance, ratio };

struct SimulationPlan {
  SimulationMode mode = SimulationMode::cells;
  ExperimentConfig experiment;
  // ratio mode
  double ratio_gamma = 1.0;
  std::vector<double> ratio_rhos;
  Pipeline ratio_num = Pipeline::mr;
  Pipeline ratio_den = Pipeline::gmr;
};

// Throws Error(parse) with the offending line for unknown sections or keys,
// malformed values, or a seed key (seeds come from the command line).
SimulationPlan load_simulation_plan(std::istream& in);
SimulationPlan load_simulation_plan(const std::filesystem::path& path);

// "g3:k=100:r=-0.3" -> EstimatorSpec
EstimatorSpec parse_estimator_spec(const std::string& text);

}  // namespace tailidx

#endif  // TAILIDX_CONFIG_HPP
