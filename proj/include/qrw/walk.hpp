#pragma once

#include <vector>

#include "qrw/gns.hpp"
#include "qrw/linalg.hpp"

namespace qrw {

// Right-continuous step function on [0, horizon) with values in C^dim,
// identically zero beyond its support. Column k of `values` is the value
// held for `durations[k]`.
struct StepFunction {
  std::vector<double> durations;
  ComplexMatrix values;

  Index dim() const { return values.rows(); }
  Index pieces() const { return static_cast<Index>(durations.size()); }
};

StepFunction make_step_function(std::vector<double> durations,
                                ComplexMatrix values);

double horizon(const StepFunction& f);
ComplexVector at(const StepFunction& f, double t);
std::vector<double> breakpoints(const StepFunction& f);

// integral of <f(s), g(s)> ds over the whole half line.
Complex inner_integral(const StepFunction& f, const StepFunction& g);

// Toy-Fock cell values: column k holds tau^{-1/2} * integral of f over
// [k tau, (k+1) tau), computed exactly from the piecewise structure.
ComplexMatrix discretize(const StepFunction& f, double tau, Index cells);

// One walk evaluation: observable a between vectors u, v, test functions
// f and g in noise coordinates, step size tau, evaluated after
// floor(t / tau) interactions.
struct WalkQuery {
  ComplexMatrix a;
  ComplexVector u, v;
  StepFunction f, g;
  double tau = 0.0;
  double t = 0.0;
};

// n-fold iterate of the lifted one-step map phi_hat: B(h) -> B(h (x) V),
// contracted against one slice vector pair per copy of V. Slice pair k is
// consumed by application n-1-k of phi_hat, i.e. xs.back() feeds the
// innermost application; the dense oracle below fixes the same pairing.
ComplexMatrix walk_matrix(const SuperOperator& phi_hat, const ComplexMatrix& a,
                          const std::vector<ComplexVector>& xs,
                          const std::vector<ComplexVector>& ys);

Complex walk_element(const SuperOperator& phi_hat, const ComplexMatrix& a,
                     const ComplexVector& u, const ComplexVector& v,
                     const std::vector<ComplexVector>& xs,
                     const std::vector<ComplexVector>& ys);

// Full matrix of the n-step walk on h (x) V^{(x) n}, for cross-checking the
// slice recursion. Guarded: n <= 3 and total dimension <= 512. Slicing the
// trailing factor undoes the innermost application of phi_hat.
ComplexMatrix walk_dense_oracle(const SuperOperator& phi_hat,
                                const ComplexMatrix& a, int steps);

inline constexpr long long kMaxWalkSteps = 1000000;

// Matrix element of the embedded walk between u (x) prod(omega + x_k) and
// v (x) prod(omega + y_k), the hat vectors coming from discretized cells of
// q.f and q.g. Cells past the floor(t / tau) walk horizon contribute the
// scalar overlap of the un-normalised hat vectors.
Complex embedded_walk_element(const WalkQuery& q, const SuperOperator& phi_hat,
                              const GnsSpace& g);

}  // namespace qrw
