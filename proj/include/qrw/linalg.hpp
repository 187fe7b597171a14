#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

namespace qrw {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Default tolerances: `abs` for algebraic identities, `rel` for anything that
// goes through an iterated product or an exponential.
struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-10;
};

// Largest singular value.
double spectral_norm(const ComplexMatrix& a);

double hermiticity_defect(const ComplexMatrix& a);  // ||A - A*||_2
double unitarity_defect(const ComplexMatrix& a);    // ||A*A - I||_2
bool is_hermitian(const ComplexMatrix& a, double tol = 1e-12);
bool is_unitary(const ComplexMatrix& a, double tol = 1e-12);

// Column stacking. vec(A)[c*rows + r] = A(r, c).
ComplexVector vec(const ComplexMatrix& a);
ComplexMatrix unvec(const ComplexVector& v, Index rows, Index cols);

// Kronecker product with the row-major index pairing:
// (A (x) B)[(i,k),(j,l)] = A(i,j) B(k,l), flat row index i*rows(B)+k.
// The first factor is the major (outer) one throughout this library.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Compression of T on base (x) env against env vectors:
// slice(T, x, y)[i,j] = sum_{p,q} conj(x[p]) T[(i,p),(j,q)] y[q].
// Equivalently E^x T E_y where E_y attaches y to the trailing factor.
// base dimension is inferred from rows(T) / dim(x).
ComplexMatrix slice(const ComplexMatrix& t, const ComplexVector& x,
                    const ComplexVector& y);

// Weighted trace over the trailing factor: tr_env((I (x) rho) T) for a
// positive unit-trace weight rho. Equals sum_j lambda_j slice(T, e_j, e_j)
// over any eigenbasis of rho; both routes are cross-checked in the tests.
ComplexMatrix weighted_partial_trace(const ComplexMatrix& t,
                                     const ComplexMatrix& rho);

// Matrix exponential: scaling and squaring with a fixed Pade-13 approximant
// and 2-norm based scaling. Deterministic; no balancing.
ComplexMatrix expm(const ComplexMatrix& a);

// Linear map B(C^dim_in) -> B(C^dim_out) stored as a dense matrix acting on
// column-stacked coordinates. The matrix of A |-> X A Y is kron(Y^T, X)
// in this convention (note: plain transpose, not adjoint).
struct SuperOperator {
  Index dim_in = 0;
  Index dim_out = 0;
  ComplexMatrix mat;  // (dim_out^2) x (dim_in^2)

  SuperOperator() = default;
  SuperOperator(Index din, Index dout, ComplexMatrix m);

  ComplexMatrix apply(const ComplexMatrix& a) const;
};

SuperOperator superop_identity(Index dim);
SuperOperator superop_zero(Index dim_in, Index dim_out);

// a |-> x a y.
SuperOperator sandwich_superop(const ComplexMatrix& x, const ComplexMatrix& y);
// a |-> x a  and  a |-> a y on B(C^dim).
SuperOperator left_mult_superop(const ComplexMatrix& x, Index dim_in);
SuperOperator right_mult_superop(const ComplexMatrix& y, Index dim_out);
// a |-> a (x) I_env on B(C^dim) -> B(C^(dim*env)).
SuperOperator tensor_pad_superop(Index dim, Index dim_env);

// Build a superoperator column by column from an arbitrary linear map.
template <typename F>
SuperOperator superop_from_map(Index dim_in, Index dim_out, F&& f) {
  SuperOperator s;
  s.dim_in = dim_in;
  s.dim_out = dim_out;
  s.mat.resize(dim_out * dim_out, dim_in * dim_in);
  ComplexMatrix unit = ComplexMatrix::Zero(dim_in, dim_in);
  for (Index c = 0; c < dim_in; ++c) {
    for (Index r = 0; r < dim_in; ++r) {
      unit(r, c) = 1.0;
      s.mat.col(c * dim_in + r) = vec(f(unit));
      unit(r, c) = 0.0;
    }
  }
  return s;
}

// f after g, i.e. (compose(f, g))(a) = f(g(a)).
SuperOperator compose(const SuperOperator& f, const SuperOperator& g);

// I_base (x) s, acting on the trailing tensor factor:
// (ampliate(s, b))(A (x) X) = A (x) s(X).
SuperOperator ampliate(const SuperOperator& s, Index dim_base);

// Proxy norm for maps: spectral norm of the superoperator matrix.
double superop_norm(const SuperOperator& s);

SuperOperator operator+(const SuperOperator& a, const SuperOperator& b);
SuperOperator operator-(const SuperOperator& a, const SuperOperator& b);
SuperOperator operator*(Complex c, const SuperOperator& a);
SuperOperator operator*(double c, const SuperOperator& a);

// Time-ordered product of semigroup exponentials. Intervals are listed in
// time order and the LAST interval's exponential is applied to `a` first:
// returns exp(s_1 G_1)(exp(s_2 G_2)(... exp(s_m G_m)(a) ...)).
ComplexMatrix ordered_exp(
    const std::vector<std::pair<double, SuperOperator>>& gens,
    const ComplexMatrix& a);

}  // namespace qrw
