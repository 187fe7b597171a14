#include "qrw/condexp.hpp"

#include "qrw/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qrw {

namespace {

void check_partition(const std::vector<std::vector<int>>& blocks, Index n) {
  std::vector<int> seen(static_cast<size_t>(n), 0);
  for (const auto& b : blocks) {
    if (b.empty()) throw std::invalid_argument("condexp: empty block");
    for (int j : b) {
      if (j < 0 || j >= n)
        throw std::invalid_argument("condexp: block index out of range");
      if (seen[static_cast<size_t>(j)]++)
        throw std::invalid_argument("condexp: duplicated block index");
    }
  }
  for (Index j = 0; j < n; ++j)
    if (!seen[static_cast<size_t>(j)]) {
      std::ostringstream msg;
      msg << "condexp: partition misses index " << j;
      throw std::invalid_argument(msg.str());
    }
}

}  // namespace

CondExpectation build_condexp(ExpectationKind kind, const DensityMatrix& state,
                              const std::vector<std::vector<int>>& blocks) {
  const Index n = state.dim();
  const ComplexMatrix& u = state.eigenvectors;
  CondExpectation d;
  d.kind = kind;

  switch (kind) {
    case ExpectationKind::Diagonal: {
      // Copying isometry S u_j = u_j (x) u_j over the eigenbasis; as a
      // matrix, column u_j of the domain must land on the pair, hence the
      // trailing change of basis.
      ComplexMatrix s = ComplexMatrix::Zero(n * n, n);
      for (Index j = 0; j < n; ++j)
        s.col(j) = kron(u.col(j), u.col(j));
      const ComplexMatrix copy = s * u.adjoint();
      const ComplexMatrix id_n = ComplexMatrix::Identity(n, n);
      SuperOperator via_isometry =
          superop_from_map(n, n, [&](const ComplexMatrix& x) {
            return ComplexMatrix(copy.adjoint() * kron(x, id_n) * copy);
          });
      SuperOperator entrywise =
          superop_from_map(n, n, [&](const ComplexMatrix& x) {
            const ComplexMatrix x_eig = u.adjoint() * x * u;
            ComplexMatrix diag = ComplexMatrix::Zero(n, n);
            for (Index j = 0; j < n; ++j) diag(j, j) = x_eig(j, j);
            return ComplexMatrix(u * diag * u.adjoint());
          });
      if (spectral_norm(via_isometry.mat - entrywise.mat) > 1e-12)
        throw std::logic_error(
            "diagonal condexp: isometry and entrywise forms disagree");
      d.map = std::move(via_isometry);
      break;
    }
    case ExpectationKind::Block: {
      check_partition(blocks, n);
      d.blocks = blocks;
      std::vector<ComplexMatrix> projectors;
      projectors.reserve(blocks.size());
      for (const auto& b : blocks) {
        ComplexMatrix p = ComplexMatrix::Zero(n, n);
        for (int j : b)
          p += u.col(j) * u.col(j).adjoint();
        projectors.push_back(std::move(p));
      }
      d.map = superop_from_map(n, n, [&](const ComplexMatrix& x) {
        ComplexMatrix out = ComplexMatrix::Zero(n, n);
        for (const auto& p : projectors) out += p * x * p;
        return out;
      });
      break;
    }
    case ExpectationKind::State: {
      const ComplexMatrix& rho = state.rho;
      d.map = superop_from_map(n, n, [&](const ComplexMatrix& x) {
        return ComplexMatrix((rho * x).trace() *
                             ComplexMatrix::Identity(n, n));
      });
      break;
    }
  }
  return d;
}

SuperOperator pinching_superop(const ComplexMatrix& basis) {
  const Index n = basis.rows();
  if (basis.cols() != n || unitarity_defect(basis) > 1e-12)
    throw std::invalid_argument("pinching_superop: basis must be orthonormal");
  return superop_from_map(n, n, [&](const ComplexMatrix& x) {
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
      const ComplexMatrix p = basis.col(j) * basis.col(j).adjoint();
      out += p * x * p;
    }
    return out;
  });
}

ExpectationReport validate_condexp(const SuperOperator& d,
                                   const DensityMatrix& state,
                                   std::uint64_t seed, int draws,
                                   double tol_abs, double choi_tol) {
  const Index n = state.dim();
  if (d.dim_in != n || d.dim_out != n)
    throw std::invalid_argument("validate_condexp: dim mismatch");
  ExpectationReport rep;

  rep.idempotency = spectral_norm(d.mat * d.mat - d.mat);
  rep.unitality =
      spectral_norm(d.apply(ComplexMatrix::Identity(n, n)) -
                    ComplexMatrix::Identity(n, n));

  // Choi matrix sum_pq E_pq (x) d(E_pq); complete positivity is a
  // nonnegative spectrum.
  ComplexMatrix choi = ComplexMatrix::Zero(n * n, n * n);
  ComplexMatrix unit = ComplexMatrix::Zero(n, n);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) {
      unit(p, q) = 1.0;
      const ComplexMatrix dpq = d.apply(unit);
      unit(p, q) = 0.0;
      for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c)
          choi(p * n + r, q * n + c) += dpq(r, c);
    }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 *
                                                  (choi + choi.adjoint()));
  rep.choi_defect = std::max(0.0, -es.eigenvalues().minCoeff());

  // State preservation is linear, so matrix units are exhaustive.
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) {
      unit(p, q) = 1.0;
      const Complex defect =
          (state.rho * (d.apply(unit) - unit)).trace();
      unit(p, q) = 0.0;
      rep.state_preservation =
          std::max(rep.state_preservation, std::abs(defect));
    }

  SplitMix64 rng(seed);
  for (int k = 0; k < draws; ++k) {
    const ComplexMatrix x = random_matrix(rng, n, n);
    const ComplexMatrix y = random_matrix(rng, n, n);
    const ComplexMatrix dx = d.apply(x);
    const ComplexMatrix dy = d.apply(y);
    rep.module_left = std::max(
        rep.module_left, spectral_norm(d.apply(dx * y) - dx * dy));
    rep.module_right = std::max(
        rep.module_right, spectral_norm(d.apply(x * dy) - dx * dy));
  }

  rep.pass = rep.idempotency <= tol_abs && rep.unitality <= tol_abs &&
             rep.choi_defect <= choi_tol && rep.module_left <= tol_abs &&
             rep.module_right <= tol_abs && rep.state_preservation <= tol_abs;
  return rep;
}

LiftedExpectation lift_delta(const SuperOperator& d, Index dim_h) {
  if (d.dim_in != d.dim_out)
    throw std::invalid_argument("lift_delta: map must be square");
  LiftedExpectation lifted;
  lifted.dim_h = dim_h;
  lifted.dim_K = d.dim_in;
  lifted.delta = ampliate(d, dim_h);
  lifted.delta_perp =
      superop_identity(dim_h * d.dim_in) - lifted.delta;
  return lifted;
}

LiftedExpectation lift_delta(const CondExpectation& d, Index dim_h) {
  return lift_delta(d.map, dim_h);
}

VacuumSplit vacuum_split(const GnsSpace& g, Index dim_h) {
  const ComplexMatrix id_h = ComplexMatrix::Identity(dim_h, dim_h);
  VacuumSplit split;
  split.Delta_perp = kron(id_h, ComplexMatrix(g.cyclic * g.cyclic.adjoint()));
  split.Delta = ComplexMatrix::Identity(dim_h * g.dim, dim_h * g.dim) -
                split.Delta_perp;
  return split;
}

}  // namespace qrw
