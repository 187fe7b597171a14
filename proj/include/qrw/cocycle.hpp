#pragma once

#include <cstdint>

#include "qrw/generators.hpp"
#include "qrw/walk.hpp"

namespace qrw {

// One cocycle evaluation. psi maps B(h) into B(h (x) hat-space); f and g
// carry noise coordinates and must be supported in [0, T]. The ordered
// product runs over [0, t]; t < 0 means evaluate at the horizon T.
struct CocycleQuery {
  SuperOperator psi;
  ComplexMatrix a;
  ComplexVector u, v;
  StepFunction f, g;
  double T = 0.0;
  double t = -1.0;
};

// b -> slice(psi(b), omega + x, omega + y) for noise-coordinate vectors
// x, y; the one-parameter semigroups of these generators compose into the
// cocycle's matrix elements.
SuperOperator semigroup_generator(const SuperOperator& psi, const GnsSpace& g,
                                  const ComplexVector& x,
                                  const ComplexVector& y);

// exp(integral of <f, g>) * <u, E(a) v> where E is the ordered product of
// interval exponentials exp(len_i * G_i) over the common refinement of the
// breakpoints in [0, t], the latest interval acting first.
Complex cocycle_element(const CocycleQuery& q, const GnsSpace& g);

// Residuals of the algebraic relations the limit generator must satisfy.
// HP flavor reads G = psi(I) and reports both unitarity conditions; EH
// flavor reports unitality, flip-adjointness and the second-order
// homomorphism identity on seeded random pairs.
struct StructureReport {
  Flavor flavor = Flavor::HP;
  double isometry = 0.0;
  double coisometry = 0.0;
  double unitality = 0.0;
  double flip_adjoint = 0.0;
  double homomorphism = 0.0;
  bool pass = false;
};

StructureReport structure_checks(const SuperOperator& psi, Flavor flavor,
                                 const ComplexMatrix& Delta,
                                 std::uint64_t seed = 0x5eed5eedULL,
                                 int draws = 50);

}  // namespace qrw
