#include "monotone/splitting.hpp"

#include <cmath>

namespace monotone {

namespace {

constexpr double kOpenIntervalSlack = 1e-9;
constexpr double kClosedIntervalSlack = 1e-12;

bool within_inverse(double alpha, double diag_l, double slack) {
  return diag_l <= 0.0 || alpha * diag_l <= 1.0 + slack;
}

IterationTrace start_trace(Method m, double alpha) {
  IterationTrace trace;
  trace.method = m;
  trace.label = std::string(to_string(m));
  trace.alpha = alpha;
  return trace;
}

// Monotonicity parameter that drives the two-resolvent contraction bound.
double splitting_strength(const SplitProblem& p) {
  return p.f.cert.c > 0.0 ? p.f.cert.c : p.g.cert.c;
}

template <bool Averaged>
IterationTrace run_two_resolvent(const SplitProblem& p, const Vector& z0,
                                 const SolverConfig& cfg, Method method) {
  cfg.validate();
  p.validate();
  if (z0.size() != p.dim()) throw DimensionMismatch("start vector dimension differs");
  const Resolvent jf = p.f.resolvent(cfg);
  const Resolvent jg = p.g.resolvent(cfg);

  IterationTrace trace = start_trace(method, cfg.alpha);
  const double c = splitting_strength(p);
  if (c > 0.0) {
    const double pr = (1.0 - cfg.alpha * c) / (1.0 + cfg.alpha * c);
    trace.theoretical_factor = Averaged ? 0.5 * (1.0 + pr) : pr;
  }
  trace.step_admissible = splitting_step_admissible(p, cfg.alpha) && (Averaged || c > 0.0);

  Vector z = z0;
  Vector x = jg(z);
  auto push = [&](const Vector& xk, const Vector& zk) {
    const double r = p.trace_residual(xk);
    trace.residuals.push_back(r);
    if (cfg.record_iterates) {
      trace.iterates.push_back(xk);
      trace.aux_iterates.push_back(zk);
    }
    return r;
  };
  push(x, z);
  for (long k = 0; k < cfg.max_iters && trace.residuals.back() > cfg.tol; ++k) {
    const Vector z_half = 2.0 * x - z;
    const Vector x_next = jf(z_half);
    if constexpr (Averaged) {
      // z + x_{k+1} - x_{k+1/2}, written against z_{k+1/2} = 2 x_{k+1/2} - z.
      z = x + (x_next - z_half);
    } else {
      z = 2.0 * x_next - z_half;
    }
    x = jg(z);
    if (!std::isfinite(push(x, z))) break;
  }
  trace.converged = trace.residuals.back() <= cfg.tol;
  trace.final_x = std::move(x);
  return trace;
}

}  // namespace

Resolvent SplitOperator::resolvent(const SolverConfig& cfg) const {
  if (closed_resolvent) {
    const double alpha = cfg.alpha;
    return Resolvent::closed_form(op.dim(), alpha,
                                  [fn = closed_resolvent, alpha](const Vector& u) {
                                    return fn(u, alpha);
                                  });
  }
  return Resolvent(op, cert, cfg.resolve_config());
}

void SplitProblem::validate() const {
  if (f.op.dim() != g.op.dim()) throw DimensionMismatch("split operators differ in dimension");
  if (f.cert.norm.kind() != g.cert.norm.kind() || f.cert.norm.dim() != g.cert.norm.dim() ||
      f.cert.norm.eta() != g.cert.norm.eta()) {
    throw std::invalid_argument("split certificates must use the same norm");
  }
  if (f.cert.norm.dim() != f.op.dim()) throw DimensionMismatch("certificate norm dimension differs");
  if (!g.cert.monotone) throw NotMonotone("the G operator must be monotone");
  if (!f.cert.monotone) throw NotMonotone("the F operator must be monotone");
}

double SplitProblem::trace_residual(const Vector& x) const {
  if (residual) return residual(x);
  return vector_norm(f.op.evaluate(x) + g.op.evaluate(x), norm());
}

bool splitting_step_admissible(const SplitProblem& p, double alpha) {
  return alpha > 0.0 && within_inverse(alpha, p.f.diag_l(), kClosedIntervalSlack) &&
         within_inverse(alpha, p.g.diag_l(), kClosedIntervalSlack);
}

IterationTrace forward_backward(const SplitProblem& p, const Vector& x0, const SolverConfig& cfg,
                                bool averaged) {
  cfg.validate();
  p.validate();
  if (x0.size() != p.dim()) throw DimensionMismatch("start vector dimension differs");
  const bool strong = p.f.cert.strongly_monotone();
  if (!averaged && !strong) {
    throw NotMonotone("plain forward-backward needs a strongly monotone F; use averaged=true");
  }
  const Resolvent jg = p.g.resolvent(cfg);
  const double alpha = cfg.alpha;

  IterationTrace trace =
      start_trace(averaged ? Method::AveragedForwardBackward : Method::ForwardBackward, alpha);
  if (strong) {
    const double factor = 1.0 - alpha * p.f.cert.c;
    trace.theoretical_factor = averaged ? 0.5 * (1.0 + factor) : factor;
  }
  trace.step_admissible =
      alpha > 0.0 &&
      within_inverse(alpha, p.f.diag_l(), strong ? kClosedIntervalSlack : -kOpenIntervalSlack);

  Vector x = x0;
  auto push = [&](const Vector& xk) {
    const double r = p.trace_residual(xk);
    trace.residuals.push_back(r);
    if (cfg.record_iterates) trace.iterates.push_back(xk);
    return r;
  };
  push(x);
  for (long k = 0; k < cfg.max_iters && trace.residuals.back() > cfg.tol; ++k) {
    const Vector step = jg(x - alpha * p.f.op.evaluate(x));
    if (averaged) {
      x = 0.5 * x + 0.5 * step;
    } else {
      x = step;
    }
    if (!std::isfinite(push(x))) break;
  }
  trace.converged = trace.residuals.back() <= cfg.tol;
  trace.final_x = std::move(x);
  return trace;
}

IterationTrace peaceman_rachford(const SplitProblem& p, const Vector& z0, const SolverConfig& cfg) {
  return run_two_resolvent<false>(p, z0, cfg, Method::PeacemanRachford);
}

IterationTrace douglas_rachford(const SplitProblem& p, const Vector& z0, const SolverConfig& cfg) {
  return run_two_resolvent<true>(p, z0, cfg, Method::DouglasRachford);
}

}  // namespace monotone
