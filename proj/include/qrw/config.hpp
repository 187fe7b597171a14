#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrw/generators.hpp"
#include "qrw/walk.hpp"

namespace qrw {

// Parse or validation failure; `path` points at the offending field, e.g.
// "model.H_sys[1][0]".
struct ConfigError : std::runtime_error {
  std::string path;
  ConfigError(std::string path_, const std::string& message);
};

struct CondExpConfig {
  std::string kind;                      // diagonal | block | state | pinching
  std::vector<std::vector<int>> blocks;  // block kind only
  ComplexMatrix basis;                   // pinching kind only, columns = ONB
};

struct ModelConfig {
  Flavor flavor = Flavor::HP;
  ComplexMatrix h_sys;
  RealVector mu;
  ComplexMatrix coupling;
  int e0_index = 0;
};

struct ToleranceConfig {
  double abs = 1e-12;
  double rel = 1e-10;
  double gauge = 1e-13;
  double choi = 1e-10;
  double walk_cocycle = 5e-3;
  double order_lo = 0.4;
  double order_hi = 0.6;
};

struct ExperimentConfig {
  std::string id;
  Index dim_h = 0;
  Index dim_K = 0;
  RealVector rho_eigenvalues;
  CondExpConfig condexp;
  ModelConfig model;
  std::vector<double> tau_grid;
  double horizon = 0.0;
  std::vector<double> t_grid;
  StepFunction f, g;
  ComplexMatrix observable;  // defaults to the symmetric 0-1 flip
  ComplexVector u, v;        // default to the first basis vector
  std::uint64_t seeds = 0;
  ToleranceConfig tolerances;
};

bool operator==(const CondExpConfig& a, const CondExpConfig& b);
bool operator==(const ModelConfig& a, const ModelConfig& b);
bool operator==(const ToleranceConfig& a, const ToleranceConfig& b);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace qrw
