#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qrw/cocycle.hpp"
#include "qrw/rng.hpp"

using namespace qrw;

namespace {

struct LimitSetup {
  DensityMatrix state;
  GnsSpace gns;
  VacuumSplit split;
  SuperOperator psi;
};

LimitSetup limit_setup(Flavor flavor, const RealVector& eigenvalues,
                       const ComplexMatrix& h_sys, const RealVector& mu,
                       const ComplexMatrix& coupling) {
  LimitSetup s;
  const Index n = eigenvalues.size();
  const Index dh = h_sys.rows();
  s.state = make_density(eigenvalues, ComplexMatrix::Identity(n, n));
  s.gns = build_gns(s.state);
  const CondExpectation cond =
      build_condexp(ExpectationKind::Diagonal, s.state);
  const LiftedExpectation lift = lift_delta(cond, dh);
  s.split = vacuum_split(s.gns, dh);
  const InteractionModel model =
      make_model(flavor, h_sys, mu, coupling, s.state, lift);
  s.psi = limit_psi(thermal_Psi(model, lift), lift, s.gns, s.split);
  return s;
}

LimitSetup reference_limit(Flavor flavor) {
  ComplexMatrix h_sys(2, 2);
  h_sys << 1.0, 0.0, 0.0, -1.0;
  RealVector mu(2);
  mu << 0.0, 1.0;
  return limit_setup(flavor, (RealVector(2) << 0.75, 0.25).finished(), h_sys,
                     mu, ComplexMatrix::Identity(2, 2));
}

LimitSetup random_limit(SplitMix64& rng, Flavor flavor, Index n) {
  RealVector vals(n);
  double sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    vals(j) = 0.2 + rng.uniform();
    sum += vals(j);
  }
  vals /= sum;
  RealVector mu(n);
  for (Index j = 0; j < n; ++j) mu(j) = rng.symmetric();
  return limit_setup(flavor, vals, random_hermitian(rng, 2), mu,
                     random_matrix(rng, 2 * (n - 1), 2));
}

StepFunction const_drive(Index dim, double duration, double first) {
  ComplexMatrix values = ComplexMatrix::Zero(dim, 1);
  values(0, 0) = first;
  return make_step_function({duration}, values);
}

}  // namespace

TEST_CASE("interval generator is the sliced limit map") {
  SplitMix64 rng{70};
  const LimitSetup s = random_limit(rng, Flavor::HP, 2);
  const Index nd = s.gns.dim - 1;
  const ComplexVector x = random_vector(rng, nd);
  const ComplexVector y = random_vector(rng, nd);
  const SuperOperator gen = semigroup_generator(s.psi, s.gns, x, y);
  const ComplexVector xh = s.gns.cyclic + embed_noise(s.gns, x);
  const ComplexVector yh = s.gns.cyclic + embed_noise(s.gns, y);
  for (int k = 0; k < 10; ++k) {
    const ComplexMatrix b = random_matrix(rng, 2, 2);
    CHECK(spectral_norm(gen.apply(b) - slice(s.psi.apply(b), xh, yh)) <
          1e-13);
  }
  CHECK_THROWS_AS(semigroup_generator(s.psi, s.gns, random_vector(rng, nd + 1),
                                      y),
                  std::invalid_argument);
}

TEST_CASE("zero generator freezes the element at the exponential overlap") {
  SplitMix64 rng{71};
  const LimitSetup s = reference_limit(Flavor::HP);
  CocycleQuery q;
  q.psi = superop_zero(2, 2 * s.gns.dim);
  q.a = random_matrix(rng, 2, 2);
  q.u = random_vector(rng, 2);
  q.v = random_vector(rng, 2);
  q.f = const_drive(s.gns.dim - 1, 0.5, 0.3);
  q.g = q.f;
  q.T = 1.0;

  const Complex expected =
      std::exp(Complex(0.045, 0.0)) * q.u.dot(ComplexVector(q.a * q.v));
  CHECK(std::abs(cocycle_element(q, s.gns) - expected) < 1e-13);

  // The live generator at t = 0 gives the same overlap: nothing evolves.
  CocycleQuery q0 = q;
  q0.psi = s.psi;
  q0.t = 0.0;
  CHECK(std::abs(cocycle_element(q0, s.gns) - expected) < 1e-13);
}

TEST_CASE("right-multiplication generator integrates to ordered "
          "exponentials") {
  SplitMix64 rng{72};
  const LimitSetup s = reference_limit(Flavor::HP);
  const Index d = s.gns.dim;
  const ComplexMatrix gmat = random_matrix(rng, 2 * d, 2 * d);
  const ComplexMatrix id_d = ComplexMatrix::Identity(d, d);
  CocycleQuery q;
  q.psi = superop_from_map(2, 2 * d, [&](const ComplexMatrix& b) {
    return ComplexMatrix(kron(b, id_d) * gmat);
  });
  q.a = random_matrix(rng, 2, 2);
  q.u = random_vector(rng, 2);
  q.v = random_vector(rng, 2);

  const ComplexVector x1 = random_vector(rng, d - 1);
  const ComplexVector x2 = random_vector(rng, d - 1);
  const ComplexVector y = random_vector(rng, d - 1);
  ComplexMatrix fv(d - 1, 2);
  fv.col(0) = x1;
  fv.col(1) = x2;
  q.f = make_step_function({0.4, 0.6}, fv);
  q.g = make_step_function({1.0}, y);
  q.T = 1.0;

  // slice((b (x) I) G, xh, yh) = b slice(G, xh, yh), so each interval
  // evolves by right multiplication; the later interval acts first.
  const ComplexVector yh = s.gns.cyclic + embed_noise(s.gns, y);
  const ComplexMatrix m1 =
      slice(gmat, ComplexVector(s.gns.cyclic + embed_noise(s.gns, x1)), yh);
  const ComplexMatrix m2 =
      slice(gmat, ComplexVector(s.gns.cyclic + embed_noise(s.gns, x2)), yh);
  const ComplexMatrix e1 = ComplexMatrix(0.4 * m1).exp();
  const ComplexMatrix e2 = ComplexMatrix(0.6 * m2).exp();
  const Complex overlap = 0.4 * x1.dot(y) + 0.6 * x2.dot(y);
  const Complex expected = std::exp(overlap) *
                           q.u.dot(ComplexVector(q.a * e2 * e1 * q.v));
  CHECK(std::abs(cocycle_element(q, s.gns) - expected) < 1e-12);

  // Evaluating only up to the first breakpoint drops the later factor.
  CocycleQuery q_half = q;
  q_half.t = 0.4;
  const Complex expected_half =
      std::exp(overlap) * q.u.dot(ComplexVector(q.a * e1 * q.v));
  CHECK(std::abs(cocycle_element(q_half, s.gns) - expected_half) < 1e-12);
}

TEST_CASE("element is invariant under refining the step pieces") {
  SplitMix64 rng{73};
  const LimitSetup s = random_limit(rng, Flavor::EH, 3);
  const Index nd = s.gns.dim - 1;
  const ComplexVector c = random_vector(rng, nd);

  CocycleQuery q;
  q.psi = s.psi;
  q.a = random_matrix(rng, 2, 2);
  q.u = random_vector(rng, 2);
  q.v = random_vector(rng, 2);
  q.f = make_step_function({0.6}, c);
  q.g = q.f;
  q.T = 1.0;

  CocycleQuery qr = q;
  ComplexMatrix rv(nd, 3);
  rv.col(0) = c;
  rv.col(1) = c;
  rv.col(2) = c;
  qr.f = make_step_function({0.2, 0.25, 0.15}, rv);

  const Complex whole = cocycle_element(q, s.gns);
  CHECK(std::abs(cocycle_element(qr, s.gns) - whole) < 1e-12);

  // t < 0 means evaluate at the horizon.
  CocycleQuery qt = q;
  qt.t = 1.0;
  CHECK(std::abs(cocycle_element(qt, s.gns) - whole) < 1e-14);
}

TEST_CASE("flip-adjoint generators give conjugate-symmetric elements") {
  SplitMix64 rng{74};
  const LimitSetup s = random_limit(rng, Flavor::EH, 2);
  const Index nd = s.gns.dim - 1;

  CocycleQuery q;
  q.psi = s.psi;
  q.a = random_matrix(rng, 2, 2);
  q.u = random_vector(rng, 2);
  q.v = random_vector(rng, 2);
  ComplexMatrix fv(nd, 2);
  fv.col(0) = random_vector(rng, nd);
  fv.col(1) = random_vector(rng, nd);
  q.f = make_step_function({0.3, 0.4}, fv);
  q.g = make_step_function({0.5}, random_vector(rng, nd));
  q.T = 0.8;

  CocycleQuery swapped;
  swapped.psi = s.psi;
  swapped.a = q.a.adjoint();
  swapped.u = q.v;
  swapped.v = q.u;
  swapped.f = q.g;
  swapped.g = q.f;
  swapped.T = q.T;

  CHECK(std::abs(cocycle_element(q, s.gns) -
                 std::conj(cocycle_element(swapped, s.gns))) < 1e-12);
}

TEST_CASE("unital generator keeps the identity element on the exponential "
          "shell") {
  SplitMix64 rng{75};
  const LimitSetup s = random_limit(rng, Flavor::EH, 2);
  const Index nd = s.gns.dim - 1;
  CocycleQuery q;
  q.psi = s.psi;
  q.a = ComplexMatrix::Identity(2, 2);
  q.u = random_vector(rng, 2);
  q.v = q.u;
  ComplexMatrix fv(nd, 2);
  fv.col(0) = random_vector(rng, nd);
  fv.col(1) = random_vector(rng, nd);
  q.f = make_step_function({0.5, 0.5}, fv);
  q.g = q.f;
  q.T = 1.0;

  const double shell =
      std::exp(inner_integral(q.f, q.f).real()) * q.u.squaredNorm();
  CHECK(std::abs(cocycle_element(q, s.gns) - Complex(shell, 0.0)) < 1e-10);
}

TEST_CASE("query validation") {
  SplitMix64 rng{76};
  const LimitSetup s = reference_limit(Flavor::HP);
  CocycleQuery q;
  q.psi = s.psi;
  q.a = ComplexMatrix::Identity(2, 2);
  q.u = ComplexVector::Ones(2);
  q.v = ComplexVector::Ones(2);
  q.f = const_drive(s.gns.dim - 1, 0.5, 0.3);
  q.g = q.f;
  q.T = 0.4;  // tighter than the drive support
  CHECK_THROWS_AS(cocycle_element(q, s.gns), std::invalid_argument);

  q.T = 1.0;
  q.t = 1.5;
  CHECK_THROWS_AS(cocycle_element(q, s.gns), std::invalid_argument);

  q.t = -1.0;
  q.a = ComplexMatrix::Identity(3, 3);
  CHECK_THROWS_AS(cocycle_element(q, s.gns), std::invalid_argument);

  q.a = ComplexMatrix::Identity(2, 2);
  q.f = const_drive(s.gns.dim, 0.5, 0.3);  // wrong coordinate count
  CHECK_THROWS_AS(cocycle_element(q, s.gns), std::invalid_argument);
}

TEST_CASE("structure report: thermal limits pass, perturbations trip it") {
  SplitMix64 rng{77};
  const LimitSetup hp = random_limit(rng, Flavor::HP, 3);
  const StructureReport rep_hp =
      structure_checks(hp.psi, Flavor::HP, hp.split.Delta);
  CHECK(rep_hp.pass);
  CHECK(rep_hp.isometry < 1e-11);
  CHECK(rep_hp.coisometry < 1e-11);

  const LimitSetup eh = random_limit(rng, Flavor::EH, 3);
  const StructureReport rep_eh =
      structure_checks(eh.psi, Flavor::EH, eh.split.Delta);
  CHECK(rep_eh.pass);
  CHECK(rep_eh.unitality < 1e-13);
  CHECK(rep_eh.flip_adjoint < 1e-12);
  CHECK(rep_eh.homomorphism < 1e-11);

  const SuperOperator bump = 0.1 * tensor_pad_superop(2, eh.gns.dim);
  const StructureReport broken_hp =
      structure_checks(hp.psi + bump, Flavor::HP, hp.split.Delta);
  CHECK_FALSE(broken_hp.pass);
  const StructureReport broken_eh =
      structure_checks(eh.psi + bump, Flavor::EH, eh.split.Delta);
  CHECK_FALSE(broken_eh.pass);
  CHECK(broken_eh.unitality > 0.05);
}

TEST_CASE("fine walk sits close to the limit element") {
  const LimitSetup s = reference_limit(Flavor::HP);

  ComplexMatrix h_sys(2, 2);
  h_sys << 1.0, 0.0, 0.0, -1.0;
  RealVector mu(2);
  mu << 0.0, 1.0;
  const CondExpectation cond =
      build_condexp(ExpectationKind::Diagonal, s.state);
  const LiftedExpectation lift = lift_delta(cond, 2);
  const InteractionModel model =
      make_model(Flavor::HP, h_sys, mu, ComplexMatrix::Identity(2, 2),
                 s.state, lift);

  const double tau = std::pow(2.0, -10);
  const SuperOperator phi_hat =
      compose(lift_pi(s.gns, 2), build_walk_generator(model, tau));

  ComplexMatrix a(2, 2);
  a << 0.0, 1.0, 1.0, 0.0;
  WalkQuery wq;
  wq.a = a;
  wq.u = ComplexVector::Zero(2);
  wq.u(0) = 1.0;
  wq.v = ComplexVector::Zero(2);
  wq.v(1) = 1.0;
  wq.f = const_drive(s.gns.dim - 1, 0.5, 0.3);
  wq.g = wq.f;
  wq.tau = tau;
  wq.t = 0.5;

  CocycleQuery cq;
  cq.psi = s.psi;
  cq.a = wq.a;
  cq.u = wq.u;
  cq.v = wq.v;
  cq.f = wq.f;
  cq.g = wq.g;
  cq.T = 1.0;
  cq.t = 0.5;

  CHECK(std::abs(embedded_walk_element(wq, phi_hat, s.gns) -
                 cocycle_element(cq, s.gns)) < 5e-3);
}
