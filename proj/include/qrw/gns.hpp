#pragma once

#include "qrw/linalg.hpp"

namespace qrw {

// Faithful state on B(C^dim_K). Eigenvalues are kept in descending order;
// ties are broken by lexicographic comparison of the eigenvector entries so
// the ordering is reproducible.
struct DensityMatrix {
  ComplexMatrix rho;           // standard coordinates
  RealVector eigenvalues;      // descending, all >= faithfulness floor
  ComplexMatrix eigenvectors;  // columns match eigenvalues

  Index dim() const { return rho.rows(); }
};

// Smallest admissible eigenvalue of a faithful state.
inline constexpr double kFaithfulnessFloor = 1e-10;

DensityMatrix make_density(const ComplexMatrix& rho,
                           double floor = kFaithfulnessFloor);

// Explicit eigenpair constructor (used to pick a particular eigenbasis when
// eigenvalues are degenerate). Validates reconstruction.
DensityMatrix make_density(const RealVector& eigenvalues,
                           const ComplexMatrix& eigenvectors,
                           double floor = kFaithfulnessFloor);

// Representation space generated by the state: classes [X] of operators with
// inner product <[X],[Y]> = tr(rho X* Y), dimension dim_K^2. Coordinates are
// taken along the orthonormal basis b_(i,j) = lambda_j^{-1/2} [E_ij] built
// from the eigenbasis, flattened as (i, j) -> i*dim_K + j. The coordinate of
// [X] along b_(i,j) is lambda_j^{1/2} X_eig[i, j].
struct GnsSpace {
  DensityMatrix state;
  Index dim_K = 0;
  Index dim = 0;                  // dim_K^2
  ComplexVector cyclic;           // [I], unit norm
  ComplexMatrix noise_basis;      // dim x (dim-1), orthonormal, range = k
  ComplexMatrix noise_projector;  // I - cyclic cyclic*
  SuperOperator rep;              // left multiplication pi: B(K) -> B(rep space)
};

GnsSpace build_gns(const DensityMatrix& state);

// Coordinates of the class [X].
ComplexVector embed_class(const GnsSpace& g, const ComplexMatrix& x);

// Ampliation of the representation to B(h (x) K) -> B(h (x) rep space).
// Unital *-homomorphism, injective; the matrix-element identity
//   slice(lift(T), [X], [Y]) = weighted_partial_trace((I (x) X)* T (I (x) Y))
// is the load-bearing contract and is pinned by tests.
SuperOperator lift_pi(const GnsSpace& g, Index dim_h);

// Embed noise coordinates (dim_K^2 - 1) into the representation space.
ComplexVector embed_noise(const GnsSpace& g, const ComplexVector& noise_coords);

}  // namespace qrw
