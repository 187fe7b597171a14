#include "qrw/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qrw/rng.hpp"

namespace qrw {

SuperOperator semigroup_generator(const SuperOperator& psi, const GnsSpace& g,
                                  const ComplexVector& x,
                                  const ComplexVector& y) {
  if (x.size() != g.dim - 1 || y.size() != g.dim - 1)
    throw std::invalid_argument(
        "semigroup_generator: expected noise coordinates");
  if (psi.dim_out != psi.dim_in * g.dim)
    throw std::invalid_argument("semigroup_generator: psi dim mismatch");
  const ComplexVector xh = g.cyclic + embed_noise(g, x);
  const ComplexVector yh = g.cyclic + embed_noise(g, y);
  return superop_from_map(psi.dim_in, psi.dim_in, [&](const ComplexMatrix& b) {
    return slice(psi.apply(b), xh, yh);
  });
}

Complex cocycle_element(const CocycleQuery& q, const GnsSpace& g) {
  const Index dim_h = q.psi.dim_in;
  if (q.a.rows() != dim_h || q.a.cols() != dim_h || q.u.size() != dim_h ||
      q.v.size() != dim_h)
    throw std::invalid_argument("cocycle_element: system dim mismatch");
  if (q.f.dim() != g.dim - 1 || q.g.dim() != g.dim - 1)
    throw std::invalid_argument(
        "cocycle_element: step functions must carry noise coordinates");
  if (horizon(q.f) > q.T + 1e-12 || horizon(q.g) > q.T + 1e-12)
    throw std::invalid_argument(
        "cocycle_element: test function support exceeds the horizon");
  const double t = q.t < 0.0 ? q.T : q.t;
  if (t > q.T + 1e-12)
    throw std::invalid_argument("cocycle_element: evaluation time beyond horizon");

  // Common refinement of the two breakpoint sets inside [0, t].
  std::vector<double> cuts{0.0, t};
  for (const StepFunction* fn : {&q.f, &q.g})
    for (double b : breakpoints(*fn))
      if (b > 0.0 && b < t) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  std::vector<std::pair<double, SuperOperator>> intervals;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 1e-15) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    intervals.emplace_back(
        len, semigroup_generator(q.psi, g, at(q.f, mid), at(q.g, mid)));
  }

  const Complex prefactor = std::exp(inner_integral(q.f, q.g));
  const ComplexMatrix evolved = ordered_exp(intervals, q.a);
  return prefactor * q.u.dot(evolved * q.v);
}

StructureReport structure_checks(const SuperOperator& psi, Flavor flavor,
                                 const ComplexMatrix& Delta,
                                 std::uint64_t seed, int draws) {
  const Index dim_h = psi.dim_in;
  const Index dim_total = psi.dim_out;
  if (Delta.rows() != dim_total || Delta.cols() != dim_total)
    throw std::invalid_argument("structure_checks: projector dim mismatch");
  const Index dim_v = dim_total / dim_h;
  const ComplexMatrix id_h = ComplexMatrix::Identity(dim_h, dim_h);
  const ComplexMatrix id_v = ComplexMatrix::Identity(dim_v, dim_v);

  StructureReport rep;
  rep.flavor = flavor;
  if (flavor == Flavor::HP) {
    const ComplexMatrix gmat = psi.apply(id_h);
    const ComplexMatrix sum = gmat + gmat.adjoint();
    rep.isometry = spectral_norm(sum + gmat.adjoint() * Delta * gmat);
    rep.coisometry = spectral_norm(sum + gmat * Delta * gmat.adjoint());
    rep.pass = rep.isometry <= 1e-11 && rep.coisometry <= 1e-11;
    return rep;
  }

  rep.unitality = spectral_norm(psi.apply(id_h));
  SplitMix64 rng{seed};
  for (int k = 0; k < draws; ++k) {
    const ComplexMatrix a = random_matrix(rng, dim_h, dim_h);
    const ComplexMatrix b = random_matrix(rng, dim_h, dim_h);
    const ComplexMatrix pa = psi.apply(a);
    const ComplexMatrix pb = psi.apply(b);
    rep.flip_adjoint = std::max(
        rep.flip_adjoint,
        spectral_norm(psi.apply(ComplexMatrix(a.adjoint())) - pa.adjoint()));
    const ComplexMatrix lhs = psi.apply(ComplexMatrix(a * b));
    const ComplexMatrix rhs =
        pa * kron(b, id_v) + kron(a, id_v) * pb + pa * Delta * pb;
    rep.homomorphism = std::max(rep.homomorphism, spectral_norm(lhs - rhs));
  }
  rep.pass = rep.unitality <= 1e-13 && rep.flip_adjoint <= 1e-12 &&
             rep.homomorphism <= 1e-11;
  return rep;
}

}  // namespace qrw
