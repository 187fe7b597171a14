#include "qrw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qrw {

StepFunction make_step_function(std::vector<double> durations,
                                ComplexMatrix values) {
  if (static_cast<Index>(durations.size()) != values.cols())
    throw std::invalid_argument("step function: one value column per piece");
  for (double d : durations)
    if (!(d > 0.0))
      throw std::invalid_argument("step function: durations must be positive");
  if (!values.allFinite())
    throw std::invalid_argument("step function: values must be finite");
  StepFunction f;
  f.durations = std::move(durations);
  f.values = std::move(values);
  return f;
}

double horizon(const StepFunction& f) {
  double t = 0.0;
  for (double d : f.durations) t += d;
  return t;
}

ComplexVector at(const StepFunction& f, double t) {
  if (t >= 0.0) {
    double left = 0.0;
    for (Index k = 0; k < f.pieces(); ++k) {
      const double right = left + f.durations[static_cast<size_t>(k)];
      if (t < right) return f.values.col(k);
      left = right;
    }
  }
  return ComplexVector::Zero(f.dim());
}

std::vector<double> breakpoints(const StepFunction& f) {
  std::vector<double> out;
  out.reserve(f.durations.size() + 1);
  double t = 0.0;
  out.push_back(t);
  for (double d : f.durations) out.push_back(t += d);
  return out;
}

Complex inner_integral(const StepFunction& f, const StepFunction& g) {
  if (f.dim() != g.dim())
    throw std::invalid_argument("inner_integral: value dimensions differ");
  // Sweep the merged breakpoints up to the shorter support; beyond it the
  // integrand vanishes.
  const double stop = std::min(horizon(f), horizon(g));
  std::vector<double> cuts = breakpoints(f);
  const std::vector<double> cg = breakpoints(g);
  cuts.insert(cuts.end(), cg.begin(), cg.end());
  std::sort(cuts.begin(), cuts.end());
  Complex total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = std::min(cuts[i + 1], stop);
    if (b <= a) continue;
    const double mid = 0.5 * (a + b);
    total += (b - a) * at(f, mid).dot(at(g, mid));
  }
  return total;
}

ComplexMatrix discretize(const StepFunction& f, double tau, Index cells) {
  if (!(tau > 0.0)) throw std::invalid_argument("discretize: tau must be positive");
  if (cells < 0) throw std::invalid_argument("discretize: negative cell count");
  ComplexMatrix out = ComplexMatrix::Zero(f.dim(), cells);
  const std::vector<double> cuts = breakpoints(f);
  for (Index k = 0; k < cells; ++k) {
    const double lo = static_cast<double>(k) * tau;
    const double hi = lo + tau;
    ComplexVector acc = ComplexVector::Zero(f.dim());
    for (Index j = 0; j < f.pieces(); ++j) {
      const double a = std::max(lo, cuts[static_cast<size_t>(j)]);
      const double b = std::min(hi, cuts[static_cast<size_t>(j) + 1]);
      if (b > a) acc += (b - a) * f.values.col(j);
    }
    out.col(k) = acc / std::sqrt(tau);
  }
  return out;
}

ComplexMatrix walk_matrix(const SuperOperator& phi_hat, const ComplexMatrix& a,
                          const std::vector<ComplexVector>& xs,
                          const std::vector<ComplexVector>& ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("walk: slice vector counts differ");
  if (a.rows() != phi_hat.dim_in || a.cols() != phi_hat.dim_in)
    throw std::invalid_argument("walk: observable dim mismatch");
  ComplexMatrix c = a;
  for (size_t k = xs.size(); k-- > 0;)
    c = slice(phi_hat.apply(c), xs[k], ys[k]);
  return c;
}

Complex walk_element(const SuperOperator& phi_hat, const ComplexMatrix& a,
                     const ComplexVector& u, const ComplexVector& v,
                     const std::vector<ComplexVector>& xs,
                     const std::vector<ComplexVector>& ys) {
  return u.dot(walk_matrix(phi_hat, a, xs, ys) * v);
}

namespace {

ComplexMatrix walk_dense_rec(const SuperOperator& phi_hat,
                             const ComplexMatrix& b, int steps) {
  if (steps == 0) return b;
  const Index dim_v = phi_hat.dim_out / phi_hat.dim_in;
  const ComplexMatrix big = phi_hat.apply(b);
  // The copy produced here ends up as the trailing tensor factor.
  Index out_dim = phi_hat.dim_in;
  for (int s = 1; s < steps; ++s) out_dim *= dim_v;
  ComplexMatrix out(out_dim * dim_v, out_dim * dim_v);
  ComplexVector ep = ComplexVector::Zero(dim_v);
  ComplexVector eq = ComplexVector::Zero(dim_v);
  for (Index p = 0; p < dim_v; ++p) {
    ep(p) = 1.0;
    for (Index q = 0; q < dim_v; ++q) {
      eq(q) = 1.0;
      const ComplexMatrix block =
          walk_dense_rec(phi_hat, slice(big, ep, eq), steps - 1);
      for (Index i = 0; i < out_dim; ++i)
        for (Index j = 0; j < out_dim; ++j)
          out(i * dim_v + p, j * dim_v + q) = block(i, j);
      eq(q) = 0.0;
    }
    ep(p) = 0.0;
  }
  return out;
}

}  // namespace

ComplexMatrix walk_dense_oracle(const SuperOperator& phi_hat,
                                const ComplexMatrix& a, int steps) {
  if (steps < 0)
    throw std::invalid_argument("walk_dense_oracle: negative step count");
  if (steps > 3)
    throw std::invalid_argument("walk_dense_oracle: capped at 3 steps");
  const Index dim_v = phi_hat.dim_out / phi_hat.dim_in;
  double total = static_cast<double>(phi_hat.dim_in);
  for (int s = 0; s < steps; ++s) total *= static_cast<double>(dim_v);
  if (total > 512.0)
    throw std::invalid_argument("walk_dense_oracle: total dimension exceeds 512");
  return walk_dense_rec(phi_hat, a, steps);
}

Complex embedded_walk_element(const WalkQuery& q, const SuperOperator& phi_hat,
                              const GnsSpace& g) {
  if (!(q.tau > 0.0))
    throw std::invalid_argument("embedded walk: tau must be positive");
  if (q.t < 0.0) throw std::invalid_argument("embedded walk: negative time");
  const Index dim_noise = g.dim - 1;
  if (q.f.dim() != dim_noise || q.g.dim() != dim_noise)
    throw std::invalid_argument(
        "embedded walk: step functions must carry noise coordinates");

  const double steps_real = std::floor(q.t / q.tau + 1e-9);
  if (steps_real > static_cast<double>(kMaxWalkSteps)) {
    std::ostringstream msg;
    msg << "embedded walk: " << steps_real << " steps exceeds cap "
        << kMaxWalkSteps;
    throw std::runtime_error(msg.str());
  }
  const Index n = static_cast<Index>(steps_real);
  const double support = std::max(horizon(q.f), horizon(q.g));
  const double cells_real = std::ceil(support / q.tau - 1e-9);
  if (cells_real > static_cast<double>(kMaxWalkSteps)) {
    std::ostringstream msg;
    msg << "embedded walk: " << cells_real << " drive cells exceeds cap "
        << kMaxWalkSteps;
    throw std::runtime_error(msg.str());
  }
  const Index m = std::max<Index>(n, static_cast<Index>(cells_real));

  const ComplexMatrix fx = discretize(q.f, q.tau, m);
  const ComplexMatrix gx = discretize(q.g, q.tau, m);

  std::vector<ComplexVector> xs(static_cast<size_t>(n));
  std::vector<ComplexVector> ys(static_cast<size_t>(n));
  for (Index k = 0; k < n; ++k) {
    xs[static_cast<size_t>(k)] = g.cyclic + embed_noise(g, fx.col(k));
    ys[static_cast<size_t>(k)] = g.cyclic + embed_noise(g, gx.col(k));
  }
  Complex value = walk_element(phi_hat, q.a, q.u, q.v, xs, ys);
  for (Index k = n; k < m; ++k)
    value *= 1.0 + Complex(fx.col(k).dot(gx.col(k)));
  return value;
}

}  // namespace qrw
