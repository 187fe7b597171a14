#pragma once

#include "qrw/linalg.hpp"

#include <cstdint>

namespace qrw {

// Deterministic split-mix generator. Constants are the usual ones:
//   state += 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// Doubles are built from the top 53 bits, so every draw sequence is
// reproducible from the seed alone (see README for the draw order).
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [-1, 1).
  double symmetric() { return 2.0 * uniform() - 1.0; }

  // Real part drawn first, then imaginary part.
  Complex complex_symmetric() {
    const double re = symmetric();
    const double im = symmetric();
    return {re, im};
  }
};

// Entries drawn row by row, left to right.
inline ComplexMatrix random_matrix(SplitMix64& rng, Index rows, Index cols) {
  ComplexMatrix a(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) a(i, j) = rng.complex_symmetric();
  return a;
}

inline ComplexMatrix random_hermitian(SplitMix64& rng, Index n) {
  const ComplexMatrix a = random_matrix(rng, n, n);
  return 0.5 * (a + a.adjoint());
}

inline ComplexVector random_vector(SplitMix64& rng, Index n) {
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.complex_symmetric();
  return v;
}

}  // namespace qrw
