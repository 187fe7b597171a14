#pragma once

#include "qrw/condexp.hpp"
#include "qrw/gns.hpp"
#include "qrw/linalg.hpp"

namespace qrw {

enum class Flavor { HP, EH };

// System-particle interaction data. The diagonal part H_d commutes with the
// chosen conditional expectation, the off-diagonal part H_o is killed by it;
// both facts are checked at construction.
struct InteractionModel {
  Flavor flavor = Flavor::HP;
  Index dim_h = 0;
  Index dim_K = 0;
  int e0_index = 0;
  ComplexMatrix h_sys;      // on h
  RealVector mu;            // particle energies, eigenbasis order
  ComplexMatrix coupling;   // V: h -> h (x) (K minus the e0 line)
  ComplexMatrix h_par;      // sum of mu_j times eigenprojections
  ComplexMatrix h_diag;     // H_sys (x) I + I (x) H_par
  ComplexMatrix h_off;      // V E^{e0} + E_{e0} V*, dipole form
  ComplexMatrix embed_off;  // Q: h (x) K_x -> h (x) K
  ComplexMatrix embed_vac;  // E_{e0}: h -> h (x) K
};

InteractionModel make_model(Flavor flavor, const ComplexMatrix& h_sys,
                            const RealVector& mu,
                            const ComplexMatrix& coupling,
                            const DensityMatrix& state,
                            const LiftedExpectation& lift, int e0_index = 0);

ComplexMatrix total_hamiltonian(const InteractionModel& m, double tau);

// W(tau), the one-step interaction unitary.
ComplexMatrix build_W(const InteractionModel& m, double tau);

// One-step walk generator: a -> (a (x) I) W for HP, a -> W* (a (x) I) W
// for EH.
SuperOperator build_walk_generator(const InteractionModel& m, double tau);

// Vacuum-normalised difference quotient: conjugate Phi(a) - a (x) I by
// Delta + tau^{-1/2} Delta_perp on both sides.
SuperOperator modify_vacuum(const SuperOperator& phi_hat, double tau,
                            const VacuumSplit& split);

// Thermal difference quotient: (tau^{-1} delta + tau^{-1/2} delta_perp)
// applied to Phi(a) - a (x) I.
SuperOperator modify_thermal(const SuperOperator& phi, double tau,
                             const LiftedExpectation& lift);

// -i (H_d + H_o) - (1/2) delta(H_o^2), the constant matrix behind the HP
// drift.
ComplexMatrix drift_matrix(const InteractionModel& m,
                           const LiftedExpectation& lift);

// Closed-form drift Psi: B(h) -> B(h (x) K). HP: a -> (a (x) I) times
// drift_matrix. EH: -i [a (x) I, H_d + H_o] + delta(H_o (a (x) I) H_o)
// - (1/2) {a (x) I, delta(H_o^2)}.
SuperOperator thermal_Psi(const InteractionModel& m,
                          const LiftedExpectation& lift);

// Limit generator on B(h (x) hat-space): keep the vacuum-vacuum corner of
// the lifted drift and the delta_perp part of its off-corners; the
// noise-noise corner is dropped entirely.
SuperOperator limit_psi(const SuperOperator& Psi,
                        const LiftedExpectation& lift, const GnsSpace& g,
                        const VacuumSplit& split);

// The constant matrix G with limit_psi(HP Psi)(a) = (a (x) I) G.
ComplexMatrix structure_matrix(const InteractionModel& m,
                               const LiftedExpectation& lift,
                               const GnsSpace& g, const VacuumSplit& split);

// Number of independent noise directions: twice the dimension of the span
// of the embedded classes d_perp(X) over centred X.
int noise_count(const CondExpectation& d, const GnsSpace& g);

// Comparison targets for the particle-vacuum case, where the reference
// state is the rank-one projection onto e0.
struct VacuumReference {
  ComplexMatrix F;
  SuperOperator phi_eh;
};

VacuumReference vacuum_reference_generators(const InteractionModel& m);

// Corner decomposition of an operator on h (x) hat-space with respect to
// the vacuum line and the noise block, in the noise ONB coordinates.
struct GeneratorBlocks {
  ComplexMatrix ww, wk, kw, kk;
};

GeneratorBlocks split_blocks(const ComplexMatrix& t, const GnsSpace& g,
                             Index dim_h);
ComplexMatrix join_blocks(const GeneratorBlocks& blocks, const GnsSpace& g,
                          Index dim_h);

}  // namespace qrw
