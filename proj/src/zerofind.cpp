#include "monotone/zerofind.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace monotone {

namespace {

// Strict open-interval endpoint used on the weak-monotone guarantee path.
constexpr double kOpenIntervalSlack = 1e-9;
// Rounding slack when alpha is built as 1 / diagL.
constexpr double kClosedIntervalSlack = 1e-12;

IterationTrace start_trace(Method m, double alpha) {
  IterationTrace trace;
  trace.method = m;
  trace.label = std::string(to_string(m));
  trace.alpha = alpha;
  return trace;
}

void check_start(const OperatorSpec& op, const Certificate& cert, const Vector& x0) {
  if (x0.size() != op.dim()) throw DimensionMismatch("start vector dimension differs from operator");
  if (cert.norm.dim() != op.dim()) throw DimensionMismatch("certificate norm dimension differs");
}

void record(IterationTrace& trace, const SolverConfig& cfg, const Vector& x, double residual) {
  trace.residuals.push_back(residual);
  if (cfg.record_iterates) trace.iterates.push_back(x);
}

void finish(IterationTrace& trace, const SolverConfig& cfg, Vector x) {
  trace.converged = trace.residuals.back() <= cfg.tol;
  trace.final_x = std::move(x);
}

// Shared loop for one-operator fixed-point iterations whose residual is
// ||F(x_k)||.
template <typename Step>
IterationTrace run_residual_loop(IterationTrace trace, const OperatorSpec& op,
                                 const Certificate& cert, const Vector& x0,
                                 const SolverConfig& cfg, Step&& step) {
  Vector x = x0;
  Vector fx = op.evaluate(x);
  record(trace, cfg, x, vector_norm(fx, cert.norm));
  for (long k = 0; k < cfg.max_iters && trace.residuals.back() > cfg.tol; ++k) {
    x = step(x, fx);
    fx = op.evaluate(x);
    const double r = vector_norm(fx, cert.norm);
    record(trace, cfg, x, r);
    if (!std::isfinite(r)) break;
  }
  finish(trace, cfg, std::move(x));
  return trace;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ForwardStep: return "forward_step";
    case Method::ProximalPoint: return "proximal_point";
    case Method::Cayley: return "cayley";
    case Method::AveragedCayley: return "averaged_cayley";
    case Method::KrasnoselskiiMann: return "krasnoselskii_mann";
    case Method::ForwardBackward: return "forward_backward";
    case Method::AveragedForwardBackward: return "averaged_forward_backward";
    case Method::PeacemanRachford: return "peaceman_rachford";
    case Method::DouglasRachford: return "douglas_rachford";
    case Method::RnnForwardStep: return "rnn_forward_step";
    case Method::RnnForwardBackward: return "rnn_forward_backward";
    case Method::RnnPeacemanRachford: return "rnn_peaceman_rachford";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("step size alpha must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iters <= 0) throw std::invalid_argument("max_iters must be positive");
  resolve_config().validate();
}

std::optional<long> IterationTrace::iterations_to(double level) const {
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    if (residuals[k] <= level) return static_cast<long>(k);
  }
  return std::nullopt;
}

double IterationTrace::measured_factor(long window) const {
  const long n = iterations();
  if (n <= 0) return 0.0;
  const long steps = std::min(window, n);
  const double first = residuals[static_cast<std::size_t>(n - steps)];
  const double last = residuals[static_cast<std::size_t>(n)];
  if (first <= 0.0) return 0.0;
  if (last <= 0.0) return 0.0;
  return std::pow(last / first, 1.0 / static_cast<double>(steps));
}

bool forward_step_admissible(const Certificate& cert, double alpha) {
  if (!cert.monotone || !(alpha > 0.0)) return false;
  if (!cert.norm.is_polyhedral()) {
    // Classical Euclidean range ]0, 2c / ell^2[.
    return cert.c > 0.0 && alpha < 2.0 * cert.c / (cert.ell * cert.ell);
  }
  if (cert.diag_l <= 0.0) return true;
  if (cert.c > 0.0) return alpha * cert.diag_l <= 1.0 + kClosedIntervalSlack;
  return alpha * cert.diag_l <= 1.0 - kOpenIntervalSlack;
}

bool cayley_step_admissible(const Certificate& cert, double alpha) {
  if (!cert.strongly_monotone() || !(alpha > 0.0)) return false;
  if (!cert.norm.is_polyhedral()) return true;
  if (cert.diag_l <= 0.0) return true;
  return alpha * cert.diag_l <= 1.0 + kClosedIntervalSlack;
}

IterationTrace forward_step_solve(const OperatorSpec& op, const Certificate& cert,
                                  const Vector& x0, const SolverConfig& cfg) {
  cfg.validate();
  check_start(op, cert, x0);
  if (!cert.monotone) throw NotMonotone("forward step requires a monotone certificate");
  IterationTrace trace = start_trace(Method::ForwardStep, cfg.alpha);
  trace.theoretical_factor = 1.0 - cfg.alpha * cert.c;
  trace.step_admissible = forward_step_admissible(cert, cfg.alpha);
  const double alpha = cfg.alpha;
  return run_residual_loop(std::move(trace), op, cert, x0, cfg,
                           [alpha](const Vector& x, const Vector& fx) -> Vector {
                             return x - alpha * fx;
                           });
}

IterationTrace proximal_point_solve(const OperatorSpec& op, const Certificate& cert,
                                    const Vector& x0, const SolverConfig& cfg) {
  cfg.validate();
  check_start(op, cert, x0);
  const Resolvent j(op, cert, cfg.resolve_config());
  IterationTrace trace = start_trace(Method::ProximalPoint, cfg.alpha);
  trace.theoretical_factor = 1.0 / (1.0 + cfg.alpha * cert.c);
  return run_residual_loop(std::move(trace), op, cert, x0, cfg,
                           [&j](const Vector& x, const Vector&) -> Vector { return j(x); });
}

IterationTrace cayley_solve(const OperatorSpec& op, const Certificate& cert, const Vector& x0,
                            const SolverConfig& cfg, bool averaged) {
  cfg.validate();
  check_start(op, cert, x0);
  if (!averaged && !cert.strongly_monotone()) {
    throw NotMonotone("the plain Cayley iteration needs a strongly monotone certificate (c > 0); "
                      "use the averaged form");
  }
  const Resolvent j(op, cert, cfg.resolve_config());
  const double ac = cfg.alpha * cert.c;
  if (averaged) {
    IterationTrace trace = start_trace(Method::AveragedCayley, cfg.alpha);
    trace.theoretical_factor = 1.0 / (1.0 + ac);
    // (x + R(x)) / 2 = (x + 2J(x) - x) / 2 = J(x); taking the collapsed form
    // keeps the sequence identical to the proximal point iterates.
    return run_residual_loop(std::move(trace), op, cert, x0, cfg,
                             [&j](const Vector& x, const Vector&) -> Vector { return j(x); });
  }
  IterationTrace trace = start_trace(Method::Cayley, cfg.alpha);
  trace.theoretical_factor = (1.0 - ac) / (1.0 + ac);
  trace.step_admissible = cayley_step_admissible(cert, cfg.alpha);
  return run_residual_loop(std::move(trace), op, cert, x0, cfg,
                           [&j](const Vector& x, const Vector&) -> Vector {
                             return j.reflected(x);
                           });
}

IterationTrace km_iterate(const OperatorSpec& t, const WeightedNorm& nrm, double theta,
                          const Vector& x0, const SolverConfig& cfg,
                          const std::optional<Vector>& reference_fixed_point) {
  cfg.validate();
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
  if (x0.size() != t.dim() || nrm.dim() != t.dim()) {
    throw DimensionMismatch("km_iterate: inconsistent dimensions");
  }
  IterationTrace trace = start_trace(Method::KrasnoselskiiMann, cfg.alpha);
  std::optional<double> bound_scale;
  if (reference_fixed_point) {
    if (reference_fixed_point->size() != t.dim()) {
      throw DimensionMismatch("reference fixed point dimension differs");
    }
    bound_scale = 2.0 * vector_norm(x0 - *reference_fixed_point, nrm) /
                  std::sqrt(std::numbers::pi * theta * (1.0 - theta));
  }
  auto push_bound = [&](long k) {
    if (!bound_scale) return;
    trace.residual_bounds.push_back(k == 0 ? std::numeric_limits<double>::infinity()
                                           : *bound_scale / std::sqrt(static_cast<double>(k)));
  };

  Vector x = x0;
  Vector tx = t.evaluate(x);
  record(trace, cfg, x, vector_norm(x - tx, nrm));
  push_bound(0);
  for (long k = 0; k < cfg.max_iters && trace.residuals.back() > cfg.tol; ++k) {
    x = (1.0 - theta) * x + theta * tx;
    tx = t.evaluate(x);
    const double r = vector_norm(x - tx, nrm);
    record(trace, cfg, x, r);
    push_bound(k + 1);
    if (!std::isfinite(r)) break;
  }
  finish(trace, cfg, std::move(x));
  return trace;
}

}  // namespace monotone
