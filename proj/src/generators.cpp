#include "qrw/generators.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qrw {

namespace {

Complex imag_unit() { return Complex(0.0, 1.0); }

void require_positive_tau(double tau, const char* who) {
  if (!(tau > 0.0)) {
    std::ostringstream msg;
    msg << who << ": tau must be positive, got " << tau;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

InteractionModel make_model(Flavor flavor, const ComplexMatrix& h_sys,
                            const RealVector& mu,
                            const ComplexMatrix& coupling,
                            const DensityMatrix& state,
                            const LiftedExpectation& lift, int e0_index) {
  InteractionModel m;
  m.flavor = flavor;
  m.dim_h = h_sys.rows();
  m.dim_K = state.dim();
  m.e0_index = e0_index;
  m.h_sys = h_sys;
  m.mu = mu;
  m.coupling = coupling;

  const Index n = m.dim_K;
  if (h_sys.cols() != m.dim_h || hermiticity_defect(h_sys) > 1e-12)
    throw std::invalid_argument("model: system Hamiltonian must be Hermitian");
  if (mu.size() != n)
    throw std::invalid_argument("model: particle energy count mismatch");
  if (e0_index < 0 || e0_index >= n)
    throw std::invalid_argument("model: e0 index out of range");
  if (coupling.rows() != m.dim_h * (n - 1) || coupling.cols() != m.dim_h)
    throw std::invalid_argument("model: coupling shape mismatch");
  if (lift.dim_h != m.dim_h || lift.dim_K != n)
    throw std::invalid_argument("model: lifted expectation dim mismatch");

  const ComplexMatrix& u = state.eigenvectors;
  const ComplexMatrix id_h = ComplexMatrix::Identity(m.dim_h, m.dim_h);

  m.h_par = ComplexMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    m.h_par += mu(j) * (u.col(j) * u.col(j).adjoint());

  m.h_diag =
      kron(m.h_sys, ComplexMatrix::Identity(n, n)) + kron(id_h, m.h_par);

  // Isometries onto the vacuum column and its complement, eigenbasis order.
  ComplexMatrix basis_off(n, n - 1);
  Index c = 0;
  for (Index j = 0; j < n; ++j)
    if (j != e0_index) basis_off.col(c++) = u.col(j);
  m.embed_off = kron(id_h, basis_off);
  m.embed_vac = kron(id_h, ComplexMatrix(u.col(e0_index)));

  const ComplexMatrix v_full = m.embed_off * coupling;  // h -> h (x) K
  m.h_off = v_full * m.embed_vac.adjoint() + m.embed_vac * v_full.adjoint();

  const double res_diag = spectral_norm(m.h_diag - lift.delta.apply(m.h_diag));
  const double res_off =
      spectral_norm(m.h_off - lift.delta_perp.apply(m.h_off));
  if (res_diag > 1e-12 || res_off > 1e-12) {
    std::ostringstream msg;
    msg << "model hypotheses violated for the chosen conditional expectation: "
        << "diagonal-part residual " << res_diag
        << ", off-part residual " << res_off;
    throw std::invalid_argument(msg.str());
  }
  return m;
}

ComplexMatrix total_hamiltonian(const InteractionModel& m, double tau) {
  require_positive_tau(tau, "total_hamiltonian");
  return m.h_diag + m.h_off / std::sqrt(tau);
}

ComplexMatrix build_W(const InteractionModel& m, double tau) {
  require_positive_tau(tau, "build_W");
  return expm(-imag_unit() * tau * total_hamiltonian(m, tau));
}

SuperOperator build_walk_generator(const InteractionModel& m, double tau) {
  const ComplexMatrix w = build_W(m, tau);
  const SuperOperator pad = tensor_pad_superop(m.dim_h, m.dim_K);
  if (m.flavor == Flavor::HP)
    return compose(right_mult_superop(w, m.dim_h * m.dim_K), pad);
  return compose(sandwich_superop(w.adjoint(), w), pad);
}

SuperOperator modify_vacuum(const SuperOperator& phi_hat, double tau,
                            const VacuumSplit& split) {
  require_positive_tau(tau, "modify_vacuum");
  const Index dim_total = split.Delta.rows();
  if (phi_hat.dim_out != dim_total || dim_total % phi_hat.dim_in != 0)
    throw std::invalid_argument("modify_vacuum: step map dim mismatch");
  const Index dim_hat = dim_total / phi_hat.dim_in;
  const ComplexMatrix s = split.Delta + split.Delta_perp / std::sqrt(tau);
  const SuperOperator diff =
      phi_hat - tensor_pad_superop(phi_hat.dim_in, dim_hat);
  return compose(sandwich_superop(s, s), diff);
}

SuperOperator modify_thermal(const SuperOperator& phi, double tau,
                             const LiftedExpectation& lift) {
  require_positive_tau(tau, "modify_thermal");
  const Index d = lift.dim_h * lift.dim_K;
  if (phi.dim_in != lift.dim_h || phi.dim_out != d)
    throw std::invalid_argument("modify_thermal: step map dim mismatch");
  const SuperOperator diff = phi - tensor_pad_superop(lift.dim_h, lift.dim_K);
  const SuperOperator scale =
      (1.0 / tau) * lift.delta + (1.0 / std::sqrt(tau)) * lift.delta_perp;
  return compose(scale, diff);
}

ComplexMatrix drift_matrix(const InteractionModel& m,
                           const LiftedExpectation& lift) {
  const ComplexMatrix ho2 = m.h_off * m.h_off;
  return -imag_unit() * (m.h_diag + m.h_off) - 0.5 * lift.delta.apply(ho2);
}

SuperOperator thermal_Psi(const InteractionModel& m,
                          const LiftedExpectation& lift) {
  const Index dhk = m.dim_h * m.dim_K;
  const SuperOperator pad = tensor_pad_superop(m.dim_h, m.dim_K);
  if (m.flavor == Flavor::HP) {
    return compose(right_mult_superop(drift_matrix(m, lift), dhk), pad);
  }
  const ComplexMatrix ht = m.h_diag + m.h_off;
  const ComplexMatrix dho2 =
      lift.delta.apply(ComplexMatrix(m.h_off * m.h_off));
  const ComplexMatrix& ho = m.h_off;
  const SuperOperator& delta = lift.delta;
  const Index dim_K = m.dim_K;
  return superop_from_map(m.dim_h, dhk, [&](const ComplexMatrix& a) {
    const ComplexMatrix amp = kron(a, ComplexMatrix::Identity(dim_K, dim_K));
    return ComplexMatrix(-imag_unit() * (amp * ht - ht * amp) +
                         delta.apply(ComplexMatrix(ho * amp * ho)) -
                         0.5 * (amp * dho2 + dho2 * amp));
  });
}

SuperOperator limit_psi(const SuperOperator& Psi,
                        const LiftedExpectation& lift, const GnsSpace& g,
                        const VacuumSplit& split) {
  const Index dim_h = Psi.dim_in;
  if (Psi.dim_out != dim_h * g.dim_K || lift.dim_h != dim_h ||
      lift.dim_K != g.dim_K)
    throw std::invalid_argument("limit_psi: dim mismatch");
  const SuperOperator pi_tilde = lift_pi(g, dim_h);
  const SuperOperator pi_psi = compose(pi_tilde, Psi);
  const SuperOperator pi_dp_psi =
      compose(pi_tilde, compose(lift.delta_perp, Psi));
  const ComplexMatrix& pv = split.Delta_perp;
  const ComplexMatrix& pn = split.Delta;
  return compose(sandwich_superop(pv, pv), pi_psi) +
         compose(sandwich_superop(pn, pv), pi_dp_psi) +
         compose(sandwich_superop(pv, pn), pi_dp_psi);
}

ComplexMatrix structure_matrix(const InteractionModel& m,
                               const LiftedExpectation& lift,
                               const GnsSpace& g, const VacuumSplit& split) {
  const SuperOperator pi_tilde = lift_pi(g, m.dim_h);
  const ComplexMatrix f = drift_matrix(m, lift);
  const ComplexMatrix pf = pi_tilde.apply(f);
  const ComplexMatrix pdf = pi_tilde.apply(lift.delta_perp.apply(f));
  const ComplexMatrix& pv = split.Delta_perp;
  const ComplexMatrix& pn = split.Delta;
  return pv * pf * pv + pn * pdf * pv + pv * pdf * pn;
}

int noise_count(const CondExpectation& d, const GnsSpace& g) {
  const Index n = g.dim_K;
  if (d.map.dim_in != n || d.map.dim_out != n)
    throw std::invalid_argument("noise_count: expectation dim mismatch");
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix cols(g.dim, n * n);
  ComplexMatrix unit = ComplexMatrix::Zero(n, n);
  Index c = 0;
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) {
      unit(p, q) = 1.0;
      // Centre against the state, then drop the expectation's range part.
      const Complex weight = (g.state.rho * unit).trace();
      const ComplexMatrix x = unit - weight * id;
      cols.col(c++) = embed_class(g, ComplexMatrix(x - d.map.apply(x)));
      unit(p, q) = 0.0;
    }
  Eigen::JacobiSVD<ComplexMatrix> svd(cols);
  int rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-8) ++rank;
  return 2 * rank;
}

VacuumReference vacuum_reference_generators(const InteractionModel& m) {
  const Index dim_h = m.dim_h;
  const ComplexMatrix& v = m.coupling;
  const ComplexMatrix& e0 = m.embed_vac;
  const ComplexMatrix& q = m.embed_off;
  const double mu0 = m.mu(m.e0_index);
  const ComplexMatrix id_h = ComplexMatrix::Identity(dim_h, dim_h);

  VacuumReference ref;
  const ComplexMatrix corner =
      -imag_unit() * (m.h_sys + mu0 * id_h) - 0.5 * v.adjoint() * v;
  ref.F = e0 * corner * e0.adjoint() +
          e0 * (-imag_unit() * v.adjoint()) * q.adjoint() +
          q * (-imag_unit() * v) * e0.adjoint();

  const ComplexMatrix vv = v.adjoint() * v;
  const ComplexMatrix h_sys = m.h_sys;
  const Index dim_K = m.dim_K;
  ref.phi_eh =
      superop_from_map(dim_h, dim_h * dim_K, [&](const ComplexMatrix& a) {
        const ComplexMatrix a_x =
            kron(a, ComplexMatrix::Identity(dim_K - 1, dim_K - 1));
        const ComplexMatrix ww = -imag_unit() * (a * h_sys - h_sys * a) +
                                 v.adjoint() * a_x * v -
                                 0.5 * (a * vv + vv * a);
        const ComplexMatrix wk =
            -imag_unit() * a * v.adjoint() + imag_unit() * v.adjoint() * a_x;
        const ComplexMatrix kw =
            -imag_unit() * a_x * v + imag_unit() * v * a;
        return ComplexMatrix(e0 * ww * e0.adjoint() + e0 * wk * q.adjoint() +
                             q * kw * e0.adjoint());
      });
  return ref;
}

GeneratorBlocks split_blocks(const ComplexMatrix& t, const GnsSpace& g,
                             Index dim_h) {
  const Index d = g.dim;
  if (t.rows() != dim_h * d || t.cols() != dim_h * d)
    throw std::invalid_argument("split_blocks: dim mismatch");
  // Basis change so index 0 of the hat factor is the cyclic vector.
  ComplexMatrix b(d, d);
  b.col(0) = g.cyclic;
  b.rightCols(d - 1) = g.noise_basis;
  const ComplexMatrix tb = kron(ComplexMatrix::Identity(dim_h, dim_h), b);
  const ComplexMatrix tt = tb.adjoint() * t * tb;

  GeneratorBlocks out;
  out.ww.resize(dim_h, dim_h);
  out.wk.resize(dim_h, dim_h * (d - 1));
  out.kw.resize(dim_h * (d - 1), dim_h);
  out.kk.resize(dim_h * (d - 1), dim_h * (d - 1));
  for (Index i = 0; i < dim_h; ++i)
    for (Index j = 0; j < dim_h; ++j) {
      out.ww(i, j) = tt(i * d, j * d);
      for (Index q = 1; q < d; ++q)
        out.wk(i, j * (d - 1) + (q - 1)) = tt(i * d, j * d + q);
      for (Index p = 1; p < d; ++p)
        out.kw(i * (d - 1) + (p - 1), j) = tt(i * d + p, j * d);
      for (Index p = 1; p < d; ++p)
        for (Index q = 1; q < d; ++q)
          out.kk(i * (d - 1) + (p - 1), j * (d - 1) + (q - 1)) =
              tt(i * d + p, j * d + q);
    }
  return out;
}

ComplexMatrix join_blocks(const GeneratorBlocks& blocks, const GnsSpace& g,
                          Index dim_h) {
  const Index d = g.dim;
  ComplexMatrix tt = ComplexMatrix::Zero(dim_h * d, dim_h * d);
  for (Index i = 0; i < dim_h; ++i)
    for (Index j = 0; j < dim_h; ++j) {
      tt(i * d, j * d) = blocks.ww(i, j);
      for (Index q = 1; q < d; ++q)
        tt(i * d, j * d + q) = blocks.wk(i, j * (d - 1) + (q - 1));
      for (Index p = 1; p < d; ++p)
        tt(i * d + p, j * d) = blocks.kw(i * (d - 1) + (p - 1), j);
      for (Index p = 1; p < d; ++p)
        for (Index q = 1; q < d; ++q)
          tt(i * d + p, j * d + q) =
              blocks.kk(i * (d - 1) + (p - 1), j * (d - 1) + (q - 1));
    }
  ComplexMatrix b(d, d);
  b.col(0) = g.cyclic;
  b.rightCols(d - 1) = g.noise_basis;
  const ComplexMatrix tb = kron(ComplexMatrix::Identity(dim_h, dim_h), b);
  return tb * tt * tb.adjoint();
}

}  // namespace qrw
