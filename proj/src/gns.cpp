#include "qrw/gns.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qrw {

namespace {

void check_density(const RealVector& ev, double floor) {
  double sum = 0.0;
  for (Index j = 0; j < ev.size(); ++j) {
    if (ev(j) < floor) {
      std::ostringstream msg;
      msg << "density matrix is not faithful: eigenvalue " << j << " is "
          << ev(j) << ", below the floor " << floor;
      throw std::invalid_argument(msg.str());
    }
    sum += ev(j);
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("density matrix trace is not 1");
}

// Descending eigenvalues; ties broken lexicographically on eigenvector
// entries (real part, then imaginary part) for reproducibility.
void sort_eigenpairs(RealVector& ev, ComplexMatrix& evec) {
  const Index n = ev.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  auto lex_less = [&](Index a, Index b) {
    for (Index r = 0; r < n; ++r) {
      const Complex &x = evec(r, a), &y = evec(r, b);
      if (x.real() != y.real()) return x.real() < y.real();
      if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
    return false;
  };
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (ev(a) != ev(b)) return ev(a) > ev(b);
    return lex_less(a, b);
  });
  RealVector ev2(n);
  ComplexMatrix evec2(n, n);
  for (Index j = 0; j < n; ++j) {
    ev2(j) = ev(order[j]);
    evec2.col(j) = evec.col(order[j]);
  }
  ev = std::move(ev2);
  evec = std::move(evec2);
}

}  // namespace

DensityMatrix make_density(const ComplexMatrix& rho, double floor) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("density matrix must be square");
  if (hermiticity_defect(rho) > 1e-12)
    throw std::invalid_argument("density matrix must be Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
  RealVector ev = es.eigenvalues();
  ComplexMatrix evec = es.eigenvectors();
  sort_eigenpairs(ev, evec);
  check_density(ev, floor);
  return DensityMatrix{rho, std::move(ev), std::move(evec)};
}

DensityMatrix make_density(const RealVector& eigenvalues,
                           const ComplexMatrix& eigenvectors, double floor) {
  const Index n = eigenvalues.size();
  if (eigenvectors.rows() != n || eigenvectors.cols() != n)
    throw std::invalid_argument("eigenvector matrix shape mismatch");
  if (unitarity_defect(eigenvectors) > 1e-12)
    throw std::invalid_argument("eigenvectors must be orthonormal");
  RealVector ev = eigenvalues;
  ComplexMatrix evec = eigenvectors;
  sort_eigenpairs(ev, evec);
  check_density(ev, floor);
  ComplexMatrix rho =
      evec * ev.cast<Complex>().asDiagonal() * evec.adjoint();
  return DensityMatrix{std::move(rho), std::move(ev), std::move(evec)};
}

GnsSpace build_gns(const DensityMatrix& state) {
  const Index n = state.dim();
  const Index dim = n * n;
  GnsSpace g;
  g.state = state;
  g.dim_K = n;
  g.dim = dim;

  // [I] has coordinate lambda_j^{1/2} at (j, j).
  g.cyclic = ComplexVector::Zero(dim);
  for (Index j = 0; j < n; ++j)
    g.cyclic(j * n + j) = std::sqrt(state.eigenvalues(j));

  g.noise_projector = ComplexMatrix::Identity(dim, dim) -
                      g.cyclic * g.cyclic.adjoint();

  // Orthonormal basis of the noise space: the off-diagonal b_(i,j) (already
  // orthogonal to [I]) in flat order, then Gram-Schmidt of the diagonal
  // b_(m,m) against [I].
  g.noise_basis = ComplexMatrix::Zero(dim, dim - 1);
  Index col = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      g.noise_basis(i * n + j, col) = 1.0;
      ++col;
    }
  for (Index m = 0; m + 1 < n; ++m) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(m * n + m) = 1.0;
    v -= (g.cyclic.adjoint() * v).value() * g.cyclic;
    for (Index c = n * n - n; c < col; ++c)
      v -= (g.noise_basis.col(c).adjoint() * v).value() * g.noise_basis.col(c);
    const double nv = v.norm();
    if (nv < 1e-14)
      throw std::logic_error("noise basis construction degenerated");
    g.noise_basis.col(col) = v / nv;
    ++col;
  }

  // Left multiplication in coordinates: [XY] = (X_eig (x) I)[Y].
  const ComplexMatrix& u = state.eigenvectors;
  const ComplexMatrix id_n = ComplexMatrix::Identity(n, n);
  g.rep = superop_from_map(n, dim, [&](const ComplexMatrix& x) {
    return kron(ComplexMatrix(u.adjoint() * x * u), id_n);
  });
  return g;
}

ComplexVector embed_class(const GnsSpace& g, const ComplexMatrix& x) {
  const Index n = g.dim_K;
  if (x.rows() != n || x.cols() != n)
    throw std::invalid_argument("embed_class: operand dim mismatch");
  const ComplexMatrix x_eig =
      g.state.eigenvectors.adjoint() * x * g.state.eigenvectors;
  ComplexVector out(g.dim);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      out(i * n + j) = std::sqrt(g.state.eigenvalues(j)) * x_eig(i, j);
  return out;
}

SuperOperator lift_pi(const GnsSpace& g, Index dim_h) {
  if (dim_h < 1) throw std::invalid_argument("lift_pi: dim_h must be >= 1");
  return ampliate(g.rep, dim_h);
}

ComplexVector embed_noise(const GnsSpace& g, const ComplexVector& noise_coords) {
  if (noise_coords.size() != g.dim - 1)
    throw std::invalid_argument("embed_noise: coordinate dim mismatch");
  return g.noise_basis * noise_coords;
}

}  // namespace qrw
