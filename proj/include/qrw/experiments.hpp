#pragma once

#include <string>
#include <vector>

#include "qrw/cocycle.hpp"
#include "qrw/condexp.hpp"
#include "qrw/config.hpp"
#include "qrw/generators.hpp"
#include "qrw/gns.hpp"
#include "qrw/walk.hpp"

namespace qrw {

// Everything the runners derive from a config, built once up front.
// Construction throws (std::invalid_argument) when the model hypotheses
// fail for the configured conditional expectation.
struct Context {
  ExperimentConfig cfg;
  DensityMatrix state;
  GnsSpace gns;
  CondExpectation cond;
  LiftedExpectation lift;  // on h (x) K
  VacuumSplit split;       // on h (x) hat-space
  InteractionModel model;
  SuperOperator Psi;       // closed-form drift into B(h (x) K)
  SuperOperator psi;       // limit generator into B(h (x) hat-space)
  SuperOperator pi_tilde;  // lifted representation
};

Context build_context(const ExperimentConfig& cfg);

CondExpectation build_condexp_from_config(const ExperimentConfig& cfg,
                                          const DensityMatrix& state);

struct CheckRow {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;  // shown when nonempty
};

struct CheckReport {
  std::vector<CheckRow> rows;
  bool pass = false;
};

// Identity suites over all modules: representation, conditional
// expectation, walk recursion vs dense oracle, generator structure, and
// the noise-count/gauge-block checks. A model whose hypotheses fail is
// reported as a failing row; the dependent suites are skipped.
CheckReport run_checks(const ExperimentConfig& cfg);
std::string format_checks(const CheckReport& rep);

// Per-(tau, t) sweep rows, already serialized; see README for the column
// list. `pass` summarises the sweep-level criteria (rows healthy, gauge
// block flat, error decreasing and under threshold, rate in window).
struct ConvergeResult {
  std::string convergence_csv;
  std::string rates_csv;
  std::string summary_csv;
  bool pass = false;
};

ConvergeResult run_converge(const ExperimentConfig& cfg);

struct ThermalReport {
  int count = 0;
  int bound = 0;
  double gauge_residual = 0.0;
  bool pass = false;
};

ThermalReport run_thermal(const ExperimentConfig& cfg);

// which: "Psi" (drift superoperator), "psi" (limit generator
// superoperator), "F" (vacuum reference matrix), "G" (structure matrix).
ComplexMatrix dump_generator(const ExperimentConfig& cfg,
                             const std::string& which);

// One row per matrix row; each complex entry contributes a re and an im
// column, 17 significant digits.
std::string format_matrix_csv(const ComplexMatrix& m);

}  // namespace qrw
