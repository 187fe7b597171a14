#include "qrw/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace qrw {

double spectral_norm(const ComplexMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

double hermiticity_defect(const ComplexMatrix& a) {
  return spectral_norm(a - a.adjoint());
}

double unitarity_defect(const ComplexMatrix& a) {
  return spectral_norm(a.adjoint() * a -
                       ComplexMatrix::Identity(a.cols(), a.cols()));
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  return a.rows() == a.cols() && hermiticity_defect(a) <= tol;
}

bool is_unitary(const ComplexMatrix& a, double tol) {
  return a.rows() == a.cols() && unitarity_defect(a) <= tol;
}

ComplexVector vec(const ComplexMatrix& a) {
  // Eigen stores column-major, so this is a straight copy.
  return Eigen::Map<const ComplexVector>(a.data(), a.size());
}

ComplexMatrix unvec(const ComplexVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols)
    throw std::invalid_argument("unvec: size mismatch");
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix slice(const ComplexMatrix& t, const ComplexVector& x,
                    const ComplexVector& y) {
  const Index env = x.size();
  if (y.size() != env) throw std::invalid_argument("slice: env dim mismatch");
  if (t.rows() != t.cols()) throw std::invalid_argument("slice: T not square");
  if (env == 0 || t.rows() % env != 0)
    throw std::invalid_argument("slice: T rows not divisible by env dim");
  const Index base = t.rows() / env;
  ComplexMatrix out = ComplexMatrix::Zero(base, base);
  for (Index i = 0; i < base; ++i)
    for (Index j = 0; j < base; ++j) {
      Complex acc = 0.0;
      for (Index p = 0; p < env; ++p) {
        if (x(p) == Complex(0.0)) continue;
        Complex xc = std::conj(x(p));
        for (Index q = 0; q < env; ++q)
          acc += xc * t(i * env + p, j * env + q) * y(q);
      }
      out(i, j) = acc;
    }
  return out;
}

ComplexMatrix weighted_partial_trace(const ComplexMatrix& t,
                                     const ComplexMatrix& rho) {
  const Index env = rho.rows();
  if (rho.cols() != env)
    throw std::invalid_argument("weighted_partial_trace: rho not square");
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-12)
    throw std::invalid_argument("weighted_partial_trace: rho trace is not 1");
  if (t.rows() != t.cols() || env == 0 || t.rows() % env != 0)
    throw std::invalid_argument("weighted_partial_trace: dim mismatch");
  const Index base = t.rows() / env;
  // result[i,j] = sum_{p,q} rho(p,q) T[(i,q),(j,p)]
  ComplexMatrix out = ComplexMatrix::Zero(base, base);
  for (Index i = 0; i < base; ++i)
    for (Index j = 0; j < base; ++j) {
      Complex acc = 0.0;
      for (Index p = 0; p < env; ++p)
        for (Index q = 0; q < env; ++q)
          acc += rho(p, q) * t(i * env + q, j * env + p);
      out(i, j) = acc;
    }
  return out;
}

namespace {

// Pade-13 coefficients for exp.
constexpr double kPade13[] = {64764752532480000.0,
                              32382376266240000.0,
                              7771770303897600.0,
                              1187353796428800.0,
                              129060195264000.0,
                              10559470521600.0,
                              670442572800.0,
                              33522128640.0,
                              1323241920.0,
                              40840800.0,
                              960960.0,
                              16380.0,
                              182.0,
                              1.0};

// 2-norm threshold above which the argument is scaled down.
constexpr double kPade13Theta = 5.371920351148152;

}  // namespace

ComplexMatrix expm(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: not square");
  const Index n = a.rows();
  if (n == 0) return a;

  const double norm = spectral_norm(a);
  int squarings = 0;
  if (norm > kPade13Theta) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kPade13Theta)));
  }
  const ComplexMatrix as = a / std::pow(2.0, squarings);

  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix a2 = as * as;
  const ComplexMatrix a4 = a2 * a2;
  const ComplexMatrix a6 = a4 * a2;
  const double* b = kPade13;
  ComplexMatrix u =
      as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
            b[5] * a4 + b[3] * a2 + b[1] * id);
  ComplexMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                    b[4] * a4 + b[2] * a2 + b[0] * id;
  ComplexMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

SuperOperator::SuperOperator(Index din, Index dout, ComplexMatrix m)
    : dim_in(din), dim_out(dout), mat(std::move(m)) {
  if (mat.rows() != dim_out * dim_out || mat.cols() != dim_in * dim_in)
    throw std::invalid_argument("SuperOperator: matrix shape mismatch");
}

ComplexMatrix SuperOperator::apply(const ComplexMatrix& a) const {
  if (a.rows() != dim_in || a.cols() != dim_in)
    throw std::invalid_argument("SuperOperator::apply: operand dim mismatch");
  return unvec(mat * vec(a), dim_out, dim_out);
}

SuperOperator superop_identity(Index dim) {
  return SuperOperator(dim, dim, ComplexMatrix::Identity(dim * dim, dim * dim));
}

SuperOperator superop_zero(Index dim_in, Index dim_out) {
  return SuperOperator(dim_in, dim_out,
                       ComplexMatrix::Zero(dim_out * dim_out, dim_in * dim_in));
}

SuperOperator sandwich_superop(const ComplexMatrix& x, const ComplexMatrix& y) {
  if (x.cols() != y.rows() || x.rows() != y.cols())
    throw std::invalid_argument("sandwich_superop: shape mismatch");
  return SuperOperator(x.cols(), x.rows(), kron(y.transpose(), x));
}

SuperOperator left_mult_superop(const ComplexMatrix& x, Index dim_in) {
  return sandwich_superop(x, ComplexMatrix::Identity(dim_in, x.cols()));
}

SuperOperator right_mult_superop(const ComplexMatrix& y, Index dim_out) {
  return sandwich_superop(ComplexMatrix::Identity(dim_out, y.rows()), y);
}

SuperOperator tensor_pad_superop(Index dim, Index dim_env) {
  const ComplexMatrix id_env = ComplexMatrix::Identity(dim_env, dim_env);
  return superop_from_map(dim, dim * dim_env,
                          [&](const ComplexMatrix& a) { return kron(a, id_env); });
}

SuperOperator compose(const SuperOperator& f, const SuperOperator& g) {
  if (f.dim_in != g.dim_out)
    throw std::invalid_argument("compose: inner dims mismatch");
  return SuperOperator(g.dim_in, f.dim_out, f.mat * g.mat);
}

SuperOperator ampliate(const SuperOperator& s, Index dim_base) {
  const Index din = dim_base * s.dim_in;
  const Index dout = dim_base * s.dim_out;
  // Precompute s on matrix units of the trailing factor.
  std::vector<ComplexMatrix> on_units(s.dim_in * s.dim_in);
  ComplexMatrix unit = ComplexMatrix::Zero(s.dim_in, s.dim_in);
  for (Index q = 0; q < s.dim_in; ++q)
    for (Index p = 0; p < s.dim_in; ++p) {
      unit(p, q) = 1.0;
      on_units[q * s.dim_in + p] = s.apply(unit);
      unit(p, q) = 0.0;
    }
  SuperOperator out;
  out.dim_in = din;
  out.dim_out = dout;
  out.mat = ComplexMatrix::Zero(dout * dout, din * din);
  // Column for the unit E_(i,p),(j,q) of B(base (x) env_in) is the stacked
  // E_ij (x) s(E_pq).
  for (Index j = 0; j < dim_base; ++j)
    for (Index q = 0; q < s.dim_in; ++q)
      for (Index i = 0; i < dim_base; ++i)
        for (Index p = 0; p < s.dim_in; ++p) {
          const Index col = (j * s.dim_in + q) * din + (i * s.dim_in + p);
          const ComplexMatrix& blk = on_units[q * s.dim_in + p];
          for (Index jo = 0; jo < s.dim_out; ++jo)
            for (Index io = 0; io < s.dim_out; ++io) {
              const Index r = i * s.dim_out + io;
              const Index c = j * s.dim_out + jo;
              out.mat(c * dout + r, col) = blk(io, jo);
            }
        }
  return out;
}

double superop_norm(const SuperOperator& s) { return spectral_norm(s.mat); }

SuperOperator operator+(const SuperOperator& a, const SuperOperator& b) {
  if (a.dim_in != b.dim_in || a.dim_out != b.dim_out)
    throw std::invalid_argument("superop +: dim mismatch");
  return SuperOperator(a.dim_in, a.dim_out, a.mat + b.mat);
}

SuperOperator operator-(const SuperOperator& a, const SuperOperator& b) {
  if (a.dim_in != b.dim_in || a.dim_out != b.dim_out)
    throw std::invalid_argument("superop -: dim mismatch");
  return SuperOperator(a.dim_in, a.dim_out, a.mat - b.mat);
}

SuperOperator operator*(Complex c, const SuperOperator& a) {
  return SuperOperator(a.dim_in, a.dim_out, c * a.mat);
}

SuperOperator operator*(double c, const SuperOperator& a) {
  return SuperOperator(a.dim_in, a.dim_out, c * a.mat);
}

ComplexMatrix ordered_exp(
    const std::vector<std::pair<double, SuperOperator>>& gens,
    const ComplexMatrix& a) {
  ComplexMatrix c = a;
  for (auto it = gens.rbegin(); it != gens.rend(); ++it) {
    const double s = it->first;
    const SuperOperator& g = it->second;
    if (s < 0.0) throw std::invalid_argument("ordered_exp: negative duration");
    if (g.dim_in != g.dim_out || g.dim_in != c.rows())
      throw std::invalid_argument("ordered_exp: generator dim mismatch");
    c = unvec(expm(s * g.mat) * vec(c), g.dim_out, g.dim_out);
  }
  return c;
}

}  // namespace qrw
