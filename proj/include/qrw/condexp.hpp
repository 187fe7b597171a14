#pragma once

#include "qrw/gns.hpp"
#include "qrw/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qrw {

enum class ExpectationKind { Diagonal, Block, State, Pinching };

// State-preserving conditional expectation d on B(K).
//  Diagonal: pinching onto the eigenbasis diagonal. Realized both through the
//            copying isometry S e_j = e_j (x) e_j (as S*(X (x) I)S) and by the
//            entrywise formula; the two are cross-asserted at construction.
//  Block:    pinching d(X) = sum_b P_b X P_b onto a partition of the
//            eigenvector indices.
//  State:    d(X) = tr(rho X) I.
//  Pinching: pinching onto a caller-supplied basis; may fail state
//            preservation, which validate_condexp is meant to catch.
struct CondExpectation {
  ExpectationKind kind = ExpectationKind::Diagonal;
  std::vector<std::vector<int>> blocks;  // Block kind only
  SuperOperator map;                     // d on B(K), standard coordinates
};

CondExpectation build_condexp(ExpectationKind kind, const DensityMatrix& state,
                              const std::vector<std::vector<int>>& blocks = {});

// Pinching onto an arbitrary orthonormal basis (columns of `basis`). Not
// necessarily state-preserving; used to exercise validate_condexp failures.
SuperOperator pinching_superop(const ComplexMatrix& basis);

struct ExpectationReport {
  double idempotency = 0.0;         // ||d o d - d||
  double unitality = 0.0;           // ||d(I) - I||_2
  double choi_defect = 0.0;         // max(0, -min eigenvalue of the Choi matrix)
  double module_left = 0.0;         // max ||d(d(X)Y) - d(X)d(Y)||_2
  double module_right = 0.0;        // max ||d(X d(Y)) - d(X)d(Y)||_2
  double state_preservation = 0.0;  // max |tr(rho (d(X) - X))| over units
  bool pass = false;
};

// Module identities are sampled on seeded random pairs; the linear
// identities are evaluated exactly on matrix units.
ExpectationReport validate_condexp(const SuperOperator& d,
                                   const DensityMatrix& state,
                                   std::uint64_t seed, int draws = 100,
                                   double tol_abs = 1e-12,
                                   double choi_tol = 1e-10);

// Ampliation delta = I (x) d to B(h (x) K), with its complement.
struct LiftedExpectation {
  Index dim_h = 0;
  Index dim_K = 0;
  SuperOperator delta;       // I (x) d
  SuperOperator delta_perp;  // id - delta
};

LiftedExpectation lift_delta(const CondExpectation& d, Index dim_h);
LiftedExpectation lift_delta(const SuperOperator& d, Index dim_h);

// Orthogonal split of h (x) rep space into the vacuum column and the rest:
// Delta projects onto h (x) k, Delta_perp = I_h (x) |[I]><[I]|.
struct VacuumSplit {
  ComplexMatrix Delta;
  ComplexMatrix Delta_perp;
};

VacuumSplit vacuum_split(const GnsSpace& g, Index dim_h);

}  // namespace qrw
