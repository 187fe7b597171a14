#include "qrw/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "qrw/rng.hpp"

namespace qrw {

namespace {

std::string fmt_sci(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

int thread_budget(size_t work) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("QRW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) hw = static_cast<unsigned>(v);
  }
  if (work < 1) work = 1;
  return static_cast<int>(std::min<size_t>(hw, work));
}

struct OrderFit {
  double order = 0.0;
  double constant = 0.0;
  int points = 0;
};

// Least-squares slope of log(err) against log(tau).
OrderFit fit_order(const std::vector<double>& taus,
                   const std::vector<double>& errs) {
  std::vector<double> xs, ys;
  for (size_t i = 0; i < taus.size(); ++i)
    if (std::isfinite(errs[i]) && errs[i] > 0.0) {
      xs.push_back(std::log(taus[i]));
      ys.push_back(std::log(errs[i]));
    }
  OrderFit fit;
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.order = sxy / sxx;
  fit.constant = std::exp(my - fit.order * mx);
  return fit;
}

// Largest normalised noise-noise matrix element of psi over seeded draws.
double gauge_residual(const Context& ctx, int draws) {
  SplitMix64 rng{ctx.cfg.seeds + 4};
  const Index n = ctx.gns.dim_K;
  const Index dh = ctx.cfg.dim_h;
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  double worst = 0.0;
  for (int k = 0; k < draws; ++k) {
    const ComplexMatrix a = random_matrix(rng, dh, dh);
    ComplexMatrix x = random_matrix(rng, n, n);
    ComplexMatrix y = random_matrix(rng, n, n);
    x -= (ctx.state.rho * x).trace() * id;
    y -= (ctx.state.rho * y).trace() * id;
    const ComplexVector xe = embed_class(ctx.gns, x);
    const ComplexVector ye = embed_class(ctx.gns, y);
    const double scale =
        std::max(1e-300, xe.norm() * ye.norm() * spectral_norm(a));
    worst = std::max(
        worst, spectral_norm(slice(ctx.psi.apply(a), xe, ye)) / scale);
  }
  return worst;
}

// tau^{1/2}-order remainder of the walk-to-limit decomposition.
SuperOperator remainder_term(const Context& ctx, double tau) {
  const SuperOperator phi = build_walk_generator(ctx.model, tau);
  const SuperOperator nphi = modify_thermal(phi, tau, ctx.lift);
  const SuperOperator pi_delta_n =
      compose(ctx.pi_tilde, compose(ctx.lift.delta, nphi));
  const SuperOperator mix =
      std::sqrt(tau) * ctx.lift.delta + ctx.lift.delta_perp;
  const SuperOperator pi_mix_n = compose(ctx.pi_tilde, compose(mix, nphi));
  const ComplexMatrix& pn = ctx.split.Delta;
  const ComplexMatrix& pv = ctx.split.Delta_perp;
  return compose(sandwich_superop(pn, pv), pi_delta_n) +
         compose(sandwich_superop(pv, pn), pi_delta_n) +
         compose(sandwich_superop(pn, pn), pi_mix_n);
}

}  // namespace

CondExpectation build_condexp_from_config(const ExperimentConfig& cfg,
                                          const DensityMatrix& state) {
  const CondExpConfig& ce = cfg.condexp;
  if (ce.kind == "diagonal")
    return build_condexp(ExpectationKind::Diagonal, state);
  if (ce.kind == "block")
    return build_condexp(ExpectationKind::Block, state, ce.blocks);
  if (ce.kind == "state") return build_condexp(ExpectationKind::State, state);
  if (ce.kind == "pinching") {
    CondExpectation d;
    d.kind = ExpectationKind::Pinching;
    d.map = pinching_superop(ce.basis);
    return d;
  }
  throw ConfigError("condexp.kind", "unknown kind " + ce.kind);
}

Context build_context(const ExperimentConfig& cfg) {
  Context ctx;
  ctx.cfg = cfg;
  ctx.state = make_density(
      cfg.rho_eigenvalues, ComplexMatrix::Identity(cfg.dim_K, cfg.dim_K));
  ctx.gns = build_gns(ctx.state);
  ctx.cond = build_condexp_from_config(cfg, ctx.state);
  ctx.lift = lift_delta(ctx.cond, cfg.dim_h);
  ctx.split = vacuum_split(ctx.gns, cfg.dim_h);
  ctx.model = make_model(cfg.model.flavor, cfg.model.h_sys, cfg.model.mu,
                         cfg.model.coupling, ctx.state, ctx.lift,
                         cfg.model.e0_index);
  ctx.Psi = thermal_Psi(ctx.model, ctx.lift);
  ctx.psi = limit_psi(ctx.Psi, ctx.lift, ctx.gns, ctx.split);
  ctx.pi_tilde = lift_pi(ctx.gns, cfg.dim_h);
  return ctx;
}

CheckReport run_checks(const ExperimentConfig& cfg) {
  CheckReport rep;
  const auto add = [&](std::string name, double residual, double tol,
                       std::string note = "") {
    rep.rows.push_back(CheckRow{std::move(name), residual, tol,
                                residual <= tol, std::move(note)});
  };
  const double tol_abs = cfg.tolerances.abs;
  const Index n = cfg.dim_K;
  const Index dh = cfg.dim_h;

  const DensityMatrix state = make_density(
      cfg.rho_eigenvalues, ComplexMatrix::Identity(n, n));
  const GnsSpace gns = build_gns(state);
  const SuperOperator pi_tilde = lift_pi(gns, dh);

  // Representation suite.
  {
    ComplexMatrix basis(gns.dim, gns.dim);
    basis.col(0) = gns.cyclic;
    basis.rightCols(gns.dim - 1) = gns.noise_basis;
    add("gns_basis_orthonormal",
        spectral_norm(ComplexMatrix(basis.adjoint() * basis) -
                      ComplexMatrix::Identity(gns.dim, gns.dim)),
        tol_abs);
    add("gns_rep_unital",
        spectral_norm(gns.rep.apply(ComplexMatrix::Identity(n, n)) -
                      ComplexMatrix::Identity(gns.dim, gns.dim)),
        tol_abs);
    {
      Eigen::JacobiSVD<ComplexMatrix> svd(gns.rep.mat);
      const double smin = svd.singularValues().minCoeff();
      std::ostringstream note;
      note << "smallest singular value " << smin;
      add("gns_rep_injective", std::max(0.0, 1e-8 - smin), 0.0, note.str());
    }
    SplitMix64 rng{cfg.seeds};
    double mult = 0.0, statev = 0.0, slice_id = 0.0;
    const ComplexMatrix id_h = ComplexMatrix::Identity(dh, dh);
    for (int k = 0; k < 100; ++k) {
      const ComplexMatrix x = random_matrix(rng, n, n);
      const ComplexMatrix y = random_matrix(rng, n, n);
      mult = std::max(
          mult, spectral_norm(gns.rep.apply(ComplexMatrix(x * y)) -
                              gns.rep.apply(x) * gns.rep.apply(y)));
      statev = std::max(
          statev, std::abs(Complex(gns.cyclic.dot(gns.rep.apply(x) *
                                                  gns.cyclic)) -
                           Complex((state.rho * x).trace())));
      const ComplexMatrix t = random_matrix(rng, dh * n, dh * n);
      const ComplexMatrix lhs =
          slice(pi_tilde.apply(t), embed_class(gns, x), embed_class(gns, y));
      const ComplexMatrix rhs = weighted_partial_trace(
          ComplexMatrix(kron(id_h, x).adjoint() * t * kron(id_h, y)),
          state.rho);
      slice_id = std::max(slice_id, spectral_norm(lhs - rhs));
    }
    add("gns_rep_multiplicative", mult, tol_abs);
    add("gns_cyclic_vector_state", statev, tol_abs);
    add("gns_lift_slice_identity", slice_id, tol_abs);
  }

  // Conditional-expectation suite.
  const CondExpectation cond = build_condexp_from_config(cfg, state);
  {
    const ExpectationReport er = validate_condexp(
        cond.map, state, cfg.seeds + 1, 100, tol_abs, cfg.tolerances.choi);
    add("condexp_idempotent", er.idempotency, tol_abs);
    add("condexp_unital", er.unitality, tol_abs);
    add("condexp_choi_positive", er.choi_defect, cfg.tolerances.choi);
    add("condexp_module_left", er.module_left, tol_abs);
    add("condexp_module_right", er.module_right, tol_abs);
    add("condexp_state_preserving", er.state_preservation, tol_abs);
  }

  // Walk suite, model-independent part: random one-step map.
  {
    SplitMix64 rng{cfg.seeds + 2};
    const Index dim_v = 4;
    int steps = 0;
    for (Index total = dh; steps < 3 && total * dim_v <= 512; ++steps)
      total *= dim_v;
    SuperOperator phi{dh, dh * dim_v,
                      random_matrix(rng, (dh * dim_v) * (dh * dim_v), dh * dh)};
    const ComplexMatrix a = random_matrix(rng, dh, dh);
    const ComplexMatrix dense = walk_dense_oracle(phi, a, steps);
    std::vector<ComplexVector> xs, ys;
    for (int k = 0; k < steps; ++k) {
      xs.push_back(random_vector(rng, dim_v));
      ys.push_back(random_vector(rng, dim_v));
    }
    ComplexMatrix cur = dense;
    for (int k = steps; k-- > 0;) cur = slice(cur, xs[static_cast<size_t>(k)],
                                              ys[static_cast<size_t>(k)]);
    const ComplexMatrix via_recursion = walk_matrix(phi, a, xs, ys);
    const double rel = spectral_norm(cur - via_recursion) /
                       std::max(1.0, spectral_norm(via_recursion));
    add("walk_recursion_vs_dense", rel, cfg.tolerances.rel);

    // Defining relation on all basis pairs: slicing the trailing copy of
    // the (s+1)-step matrix recovers the s-step matrix of the sliced map.
    const ComplexMatrix dense2 = walk_dense_oracle(phi, a, 2);
    const ComplexMatrix phi_a = phi.apply(a);
    double defrel = 0.0;
    ComplexVector ep = ComplexVector::Zero(dim_v);
    ComplexVector eq = ComplexVector::Zero(dim_v);
    for (Index p = 0; p < dim_v; ++p) {
      ep(p) = 1.0;
      for (Index q = 0; q < dim_v; ++q) {
        eq(q) = 1.0;
        defrel = std::max(
            defrel,
            spectral_norm(slice(dense2, ep, eq) -
                          walk_dense_oracle(phi, slice(phi_a, ep, eq), 1)));
        eq(q) = 0.0;
      }
      ep(p) = 0.0;
    }
    add("walk_dense_defining_relation", defrel, tol_abs);
  }

  // Model construction; everything after this needs it.
  Context ctx;
  bool model_ok = true;
  try {
    ctx = build_context(cfg);
    add("model_hypotheses", 0.0, tol_abs);
  } catch (const std::invalid_argument& e) {
    model_ok = false;
    add("model_hypotheses", 1.0, tol_abs, e.what());
  }

  if (model_ok) {
    // Walk suite, model part.
    {
      const double tau0 = 0.1;
      const SuperOperator phi_tau = build_walk_generator(ctx.model, tau0);
      int steps = 0;
      for (Index total = dh;
           steps < (cfg.model.flavor == Flavor::HP ? 3 : 2) &&
           total * n <= 512;
           ++steps)
        total *= n;
      if (cfg.model.flavor == Flavor::HP) {
        const ComplexMatrix walked = walk_dense_oracle(
            phi_tau, ComplexMatrix::Identity(dh, dh), steps);
        add("walk_dense_unitary", unitarity_defect(walked), 1e-11);
      } else {
        SplitMix64 rng{cfg.seeds + 3};
        const ComplexMatrix a = random_matrix(rng, dh, dh);
        const ComplexMatrix b = random_matrix(rng, dh, dh);
        const ComplexMatrix wa = walk_dense_oracle(phi_tau, a, steps);
        const ComplexMatrix wb = walk_dense_oracle(phi_tau, b, steps);
        const ComplexMatrix wab =
            walk_dense_oracle(phi_tau, ComplexMatrix(a * b), steps);
        add("walk_dense_multiplicative", spectral_norm(wab - wa * wb), 1e-11);
      }
    }

    // Generator suite.
    {
      double wres = 0.0;
      for (double tau : cfg.tau_grid)
        wres = std::max(wres, unitarity_defect(build_W(ctx.model, tau)));
      add("interaction_unitary", wres, tol_abs);
    }
    {
      const double tau = 0.25;
      const SuperOperator phi = build_walk_generator(ctx.model, tau);
      const SuperOperator phi_hat = compose(ctx.pi_tilde, phi);
      const SuperOperator m1 = modify_vacuum(phi_hat, tau, ctx.split);
      const SuperOperator pad = tensor_pad_superop(dh, ctx.gns.dim);
      SplitMix64 rng{cfg.seeds + 5};
      double block_res = 0.0;
      for (int k = 0; k < 10; ++k) {
        const ComplexMatrix a = random_matrix(rng, dh, dh);
        GeneratorBlocks blocks =
            split_blocks(ComplexMatrix(phi_hat.apply(a) - pad.apply(a)),
                         ctx.gns, dh);
        blocks.ww /= tau;
        blocks.wk /= std::sqrt(tau);
        blocks.kw /= std::sqrt(tau);
        block_res = std::max(
            block_res, spectral_norm(join_blocks(blocks, ctx.gns, dh) -
                                     m1.apply(a)));
      }
      add("vacuum_modification_block_form", block_res, tol_abs);

      const SuperOperator nphi = modify_thermal(phi, tau, ctx.lift);
      const SuperOperator phi_prime =
          phi - tensor_pad_superop(dh, n);
      const SuperOperator form1 =
          (1.0 / tau) * compose(ctx.lift.delta, phi_prime) +
          (1.0 / std::sqrt(tau)) * compose(ctx.lift.delta_perp, phi);
      add("thermal_modification_two_forms", superop_norm(nphi - form1),
          1e-13);
    }
    {
      const ComplexMatrix id_h = ComplexMatrix::Identity(dh, dh);
      if (cfg.model.flavor == Flavor::HP) {
        add("drift_unit_is_structure_matrix",
            spectral_norm(ctx.Psi.apply(id_h) -
                          drift_matrix(ctx.model, ctx.lift)),
            tol_abs);
      } else {
        add("drift_unital", spectral_norm(ctx.Psi.apply(id_h)), 1e-13);
      }
    }
    {
      SplitMix64 rng{cfg.seeds + 6};
      const SuperOperator dp_Psi = compose(ctx.lift.delta_perp, ctx.Psi);
      const ComplexMatrix id_n = ComplexMatrix::Identity(n, n);
      const ComplexMatrix id_h = ComplexMatrix::Identity(dh, dh);
      double vac = 0.0, noise_corner = 0.0;
      for (int k = 0; k < 100; ++k) {
        const ComplexMatrix a = random_matrix(rng, dh, dh);
        const ComplexMatrix pa = ctx.psi.apply(a);
        vac = std::max(
            vac, spectral_norm(
                     slice(pa, ctx.gns.cyclic, ctx.gns.cyclic) -
                     weighted_partial_trace(ctx.Psi.apply(a), state.rho)));
        ComplexMatrix x = random_matrix(rng, n, n);
        x -= (state.rho * x).trace() * id_n;
        const ComplexMatrix rhs = weighted_partial_trace(
            ComplexMatrix(kron(id_h, x).adjoint() * dp_Psi.apply(a)),
            state.rho);
        noise_corner = std::max(
            noise_corner,
            spectral_norm(slice(pa, embed_class(ctx.gns, x), ctx.gns.cyclic) -
                          rhs));
      }
      add("limit_vacuum_corner", vac, tol_abs);
      add("limit_noise_corner", noise_corner, tol_abs);
    }
    {
      const StructureReport sr = structure_checks(
          ctx.psi, cfg.model.flavor, ctx.split.Delta, cfg.seeds + 7, 50);
      if (cfg.model.flavor == Flavor::HP) {
        add("structure_isometry_condition", sr.isometry, 1e-11);
        add("structure_coisometry_condition", sr.coisometry, 1e-11);
      } else {
        add("structure_unital", sr.unitality, 1e-13);
        add("structure_flip_adjoint", sr.flip_adjoint, 1e-12);
        add("structure_homomorphism", sr.homomorphism, 1e-11);
      }
    }
    {
      const double tau = 0.25;
      const SuperOperator phi = build_walk_generator(ctx.model, tau);
      const SuperOperator phi_hat = compose(ctx.pi_tilde, phi);
      const SuperOperator lhs =
          modify_vacuum(phi_hat, tau, ctx.split) - ctx.psi;
      const SuperOperator theta =
          modify_thermal(phi, tau, ctx.lift) - ctx.Psi;
      const SuperOperator theta_blocks =
          limit_psi(theta, ctx.lift, ctx.gns, ctx.split);
      const SuperOperator rhs =
          theta_blocks + std::sqrt(tau) * remainder_term(ctx, tau);
      add("limit_decomposition_exact", superop_norm(lhs - rhs), tol_abs);
    }
    {
      double first = 0.0, worst = 0.0;
      for (int k = 4; k <= 12; k += 2) {
        const double tau = std::pow(2.0, -k);
        const double norm_r = superop_norm(remainder_term(ctx, tau));
        if (k == 4) first = norm_r;
        worst = std::max(worst, norm_r);
      }
      std::ostringstream note;
      note << "max " << worst << " vs coarsest " << first;
      add("remainder_bounded", worst / std::max(first, 1e-300), 2.0,
          note.str());
    }

    // Thermalisation suite.
    {
      const int count = noise_count(ctx.cond, ctx.gns);
      const int bound = static_cast<int>(2 * (n * n - 1));
      std::ostringstream note;
      note << "count " << count << ", bound " << bound;
      add("noise_count_bound", std::max(0.0, double(count - bound)), 0.0,
          note.str());
      if (cond.kind == ExpectationKind::Diagonal) {
        add("noise_count_diagonal_exact",
            std::abs(double(count) - double(2 * (n * n - n))), 0.0);
      } else if (cond.kind == ExpectationKind::State) {
        add("noise_count_state_exact",
            std::abs(double(count) - double(bound)), 0.0);
      }
      add("gauge_block_zero", gauge_residual(ctx, 100),
          cfg.tolerances.gauge);
    }
  }

  rep.pass = true;
  for (const CheckRow& row : rep.rows) rep.pass = rep.pass && row.pass;
  return rep;
}

std::string format_checks(const CheckReport& rep) {
  std::ostringstream out;
  for (const CheckRow& row : rep.rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-36s %12.4e  <= %8.1e  %s",
                  row.name.c_str(), row.residual, row.tolerance,
                  row.pass ? "pass" : "FAIL");
    out << buf;
    if (!row.note.empty()) out << "  (" << row.note << ")";
    out << "\n";
  }
  out << (rep.pass ? "all checks passed" : "CHECKS FAILED") << "\n";
  return out.str();
}

ConvergeResult run_converge(const ExperimentConfig& cfg) {
  if (cfg.tau_grid.empty())
    throw ConfigError("tau_grid", "must be nonempty for a convergence sweep");
  if (cfg.t_grid.empty())
    throw ConfigError("t_grid", "must be nonempty for a convergence sweep");

  const Context ctx = build_context(cfg);
  const Index n = cfg.dim_K;
  const int count = noise_count(ctx.cond, ctx.gns);
  const int bound = static_cast<int>(2 * (n * n - 1));
  const double gauge = gauge_residual(ctx, 100);

  std::vector<double> taus = cfg.tau_grid;
  std::sort(taus.begin(), taus.end());
  std::vector<double> ts = cfg.t_grid;
  std::sort(ts.begin(), ts.end());

  struct Cell {
    double t_snap = 0.0;
    double err = -1.0;
    std::string status = "ok";
  };
  std::vector<std::vector<Cell>> cells(taus.size());
  std::vector<double> gen_dist(taus.size(), 0.0);

  std::atomic<size_t> cursor{0};
  const auto worker = [&]() {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= taus.size()) return;
      const double tau = taus[i];
      std::vector<Cell> row(ts.size());
      try {
        const SuperOperator phi = build_walk_generator(ctx.model, tau);
        const SuperOperator phi_hat = compose(ctx.pi_tilde, phi);
        gen_dist[i] =
            superop_norm(modify_thermal(phi, tau, ctx.lift) - ctx.Psi);
        for (size_t j = 0; j < ts.size(); ++j) {
          const double t = ts[j];
          const double steps = std::floor(t / tau + 1e-9);
          row[j].t_snap = steps * tau;
          try {
            WalkQuery q{cfg.observable, cfg.u, cfg.v, cfg.f, cfg.g, tau, t};
            const Complex walk = embedded_walk_element(q, phi_hat, ctx.gns);
            CocycleQuery cq{ctx.psi, cfg.observable, cfg.u,      cfg.v,
                            cfg.f,   cfg.g,          cfg.horizon,
                            row[j].t_snap};
            const Complex coc = cocycle_element(cq, ctx.gns);
            row[j].err = std::abs(walk - coc);
          } catch (const std::runtime_error&) {
            row[j].status = "step_guard";
            row[j].err = -1.0;
          }
        }
      } catch (const std::exception&) {
        for (auto& cell : row) {
          cell.status = "error";
          cell.err = -1.0;
        }
      }
      cells[i] = std::move(row);
    }
  };
  {
    const int nthreads = thread_budget(taus.size());
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  bool rows_ok = true;
  std::vector<double> sups(taus.size(), -1.0);
  for (size_t i = 0; i < taus.size(); ++i) {
    double sup = -1.0;
    for (const Cell& cell : cells[i]) {
      if (cell.status != "ok") rows_ok = false;
      sup = std::max(sup, cell.err);
    }
    sups[i] = sup;
  }

  const OrderFit gen_fit = fit_order(taus, gen_dist);
  const OrderFit walk_fit = fit_order(taus, sups);

  bool decreasing = true;
  for (size_t i = 0; i + 1 < sups.size(); ++i)
    if (!(sups[i] >= 0.0 && sups[i + 1] >= 0.0 && sups[i] < sups[i + 1]))
      decreasing = false;
  const double final_err = sups.empty() ? -1.0 : sups.front();
  const bool order_ok = gen_fit.points >= 2 &&
                        gen_fit.order >= cfg.tolerances.order_lo &&
                        gen_fit.order <= cfg.tolerances.order_hi;
  const bool noise_ok = count <= bound && gauge <= cfg.tolerances.gauge;

  ConvergeResult out;
  out.pass = rows_ok && noise_ok && decreasing && final_err >= 0.0 &&
             final_err <= cfg.tolerances.walk_cocycle && order_ok;

  {
    std::ostringstream csv;
    csv << "id,tau,t,walk_cocycle_error,generator_distance,fitted_order,"
           "noise_count,gauge_residual,status,pass\n";
    for (size_t i = 0; i < taus.size(); ++i)
      for (size_t j = 0; j < ts.size(); ++j) {
        const Cell& cell = cells[i][j];
        const bool row_pass = cell.status == "ok" && noise_ok;
        csv << cfg.id << "," << fmt_sci(taus[i]) << ","
            << fmt_sci(cell.t_snap) << "," << fmt_sci(cell.err) << ","
            << fmt_sci(gen_dist[i]) << "," << fmt_sci(gen_fit.order) << ","
            << count << "," << fmt_sci(gauge) << "," << cell.status << ","
            << (row_pass ? 1 : 0) << "\n";
      }
    out.convergence_csv = csv.str();
  }
  {
    std::ostringstream csv;
    csv << "id,quantity,fitted_order,fit_constant,points\n";
    csv << cfg.id << ",generator_distance," << fmt_sci(gen_fit.order) << ","
        << fmt_sci(gen_fit.constant) << "," << gen_fit.points << "\n";
    csv << cfg.id << ",walk_sup_error," << fmt_sci(walk_fit.order) << ","
        << fmt_sci(walk_fit.constant) << "," << walk_fit.points << "\n";
    out.rates_csv = csv.str();
  }
  {
    std::ostringstream csv;
    csv << "id,noise_count,noise_bound,gauge_residual,generator_order,"
           "walk_order,final_walk_error,walk_threshold,strictly_decreasing,"
           "order_in_window,all_rows_ok,pass\n";
    csv << cfg.id << "," << count << "," << bound << "," << fmt_sci(gauge)
        << "," << fmt_sci(gen_fit.order) << "," << fmt_sci(walk_fit.order)
        << "," << fmt_sci(final_err) << ","
        << fmt_sci(cfg.tolerances.walk_cocycle) << "," << (decreasing ? 1 : 0)
        << "," << (order_ok ? 1 : 0) << "," << (rows_ok ? 1 : 0) << ","
        << (out.pass ? 1 : 0) << "\n";
    out.summary_csv = csv.str();
  }
  return out;
}

ThermalReport run_thermal(const ExperimentConfig& cfg) {
  const Context ctx = build_context(cfg);
  ThermalReport rep;
  rep.count = noise_count(ctx.cond, ctx.gns);
  rep.bound = static_cast<int>(2 * (cfg.dim_K * cfg.dim_K - 1));
  rep.gauge_residual = gauge_residual(ctx, 100);
  rep.pass =
      rep.count <= rep.bound && rep.gauge_residual <= cfg.tolerances.gauge;
  return rep;
}

ComplexMatrix dump_generator(const ExperimentConfig& cfg,
                             const std::string& which) {
  const Context ctx = build_context(cfg);
  if (which == "Psi") return ctx.Psi.mat;
  if (which == "psi") return ctx.psi.mat;
  if (which == "F") return vacuum_reference_generators(ctx.model).F;
  if (which == "G")
    return structure_matrix(ctx.model, ctx.lift, ctx.gns, ctx.split);
  throw std::invalid_argument(
      "dump_generator: --which must be one of Psi, psi, F, G");
}

std::string format_matrix_csv(const ComplexMatrix& m) {
  std::ostringstream out;
  for (Index c = 0; c < m.cols(); ++c) {
    if (c) out << ",";
    out << "c" << c << "_re,c" << c << "_im";
  }
  out << "\n";
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ",";
      out << fmt_sci(m(r, c).real()) << "," << fmt_sci(m(r, c).imag());
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace qrw
