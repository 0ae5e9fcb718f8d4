#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dissip/coefficients.hpp"

namespace dissip {

struct PhiConfig {
  std::string family = "power";  // power | exp_square | truncated_power
  double p = 4.0;
  double k = 3.0;
};

struct CoefficientConfig {
  std::string source = "constant";  // constant | preset | file
  double lambda = 1.0;
  double mu = 1.0;
  std::string preset = "ramp";
  double amplitude = 0.0;
  int block = 2;
  int n1 = 17;
  int n2 = 17;
  std::string file;
  Rect domain;
};

struct CriteriaConfig {
  double c0 = 1.0;
  std::optional<double> kappa;
  int dim = 2;
};

struct SweepConfig {
  double from = 2.0;
  double to = 20.0;
  int count = 0;
};

struct EnsembleConfig {
  std::uint64_t seed = 1;
  int bumps = 20;
  int rotations = 20;
  int oscillatory = 20;
  double rho = 4.0;
  double kappa = 0.0;
  bool counterexample = false;
  int max_octave = 10;
};

struct FemConfig {
  int dim = 2;
  int cells = 16;
  std::string forcing = "smooth";  // zero | smooth | manufactured
  double amplitude = 1.0;
  double p = 4.0;
  std::vector<double> levels{2.0, 4.0, 8.0};
  std::vector<int> refinements{8, 16, 32};
  std::vector<double> scales{0.5, 1.0, 2.0, 4.0};
};

struct OutputConfig {
  std::string report;    // empty: standard output
  std::string plot_dir;  // empty: no plot data
};

struct RunConfig {
  std::string command = "check";  // check | verify-forms | solve | regularity | report
  PhiConfig phi;
  CoefficientConfig coefficients;
  CriteriaConfig criteria;
  SweepConfig p_sweep;
  EnsembleConfig ensemble;
  FemConfig fem;
  OutputConfig output;
};

/// Parses and validates a YAML run description. Throws Error(ConfigError).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace dissip
