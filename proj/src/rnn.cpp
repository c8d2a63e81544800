#include "monotone/rnn.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace monotone {

namespace {

constexpr double kClosedIntervalSlack = 1e-12;

IterationTrace start_trace(Method m, double alpha) {
  IterationTrace trace;
  trace.method = m;
  trace.label = std::string(to_string(m));
  trace.alpha = alpha;
  return trace;
}

void require_contracting(double gamma) {
  if (!(gamma < 1.0)) {
    throw NotContracting("mu_inf(A) = " + std::to_string(gamma) +
                         " >= 1: the network is not certified contracting");
  }
}

void check_start(const RnnParams& p, const Vector& x0, double alpha, const SolverConfig& cfg) {
  p.validate();
  cfg.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("step size alpha must be positive");
  if (x0.size() != p.n()) throw DimensionMismatch("start vector dimension differs from network");
}

double min_diagonal(const Matrix& a) { return a.rows() == 0 ? 0.0 : a.diagonal().minCoeff(); }

}  // namespace

void RnnParams::validate() const {
  const Index n = A.rows();
  if (A.cols() != n) throw DimensionMismatch("A must be square");
  if (B.rows() != n) throw DimensionMismatch("B must have as many rows as A");
  if (b.size() != n) throw DimensionMismatch("bias length must equal n");
  if (u.size() != B.cols()) throw DimensionMismatch("input length must equal the columns of B");
  if (eta.size() != n) throw DimensionMismatch("eta length must equal n");
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("LeakyReLU slope must lie in (0, 1)");
  for (Index i = 0; i < n; ++i) {
    if (!(eta(i) > 0.0)) throw std::invalid_argument("eta must be positive");
  }
}

Vector RnnParams::input_bias() const { return B * u + b; }

double RnnParams::gamma() const { return log_norm(A, norm()); }

double leaky_relu(double x, double a) { return std::max(x, a * x); }

Vector leaky_relu(const Vector& x, double a) {
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) out(i) = leaky_relu(x(i), a);
  return out;
}

Vector rnn_residual(const RnnParams& p, const Vector& x) {
  p.validate();
  if (x.size() != p.n()) throw DimensionMismatch("state dimension differs from network");
  return leaky_relu(p.A * x + p.input_bias(), p.a) - x;
}

double rnn_residual_norm(const RnnParams& p, const Vector& x) {
  return rnn_residual(p, x).lpNorm<Eigen::Infinity>();
}

OperatorSpec rnn_operator(const RnnParams& p) {
  p.validate();
  const Matrix a_mat = p.A;
  const Vector bias = p.input_bias();
  const double slope = p.a;
  const Index n = p.n();
  auto eval = [a_mat, bias, slope](const Vector& x) -> Vector {
    return x - leaky_relu(a_mat * x + bias, slope);
  };
  auto jac = [a_mat, bias, slope, n](const Vector& x) -> Matrix {
    const Vector s = a_mat * x + bias;
    Matrix j = -a_mat;
    for (Index i = 0; i < n; ++i) {
      if (s(i) < 0.0) j.row(i) *= slope;
    }
    j.diagonal().array() += 1.0;
    return j;
  };
  return OperatorSpec::with_jacobian(n, std::move(eval), std::move(jac));
}

RnnCertificate rnn_certificate(const RnnParams& p) {
  p.validate();
  const WeightedNorm nrm = p.norm();
  const double gamma = p.gamma();
  require_contracting(gamma);
  double min_slope_diag = 0.0;
  if (p.n() > 0) {
    min_slope_diag = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < p.n(); ++i) {
      min_slope_diag = std::min(min_slope_diag, std::min(p.a * p.A(i, i), p.A(i, i)));
    }
  }
  const double c = 1.0 - leaky_relu(gamma, p.a);
  const double diag_l = 1.0 - min_slope_diag;
  const double ell = 1.0 + induced_norm(p.A, nrm);
  return {Certificate::make(nrm, c, ell, diag_l, Provenance::UserSupplied), gamma};
}

double rnn_forward_step_max_alpha(const RnnParams& p) {
  return 1.0 / rnn_certificate(p).cert.diag_l;
}

double rnn_forward_backward_max_alpha(const RnnParams& p) { return 1.0 / (1.0 - min_diagonal(p.A)); }

double rnn_peaceman_rachford_max_alpha(const RnnParams& p) {
  return std::min(rnn_forward_backward_max_alpha(p), p.a / (1.0 - p.a));
}

IterationTrace rnn_forward_step(const RnnParams& p, const Vector& x0, double alpha,
                                const SolverConfig& cfg) {
  check_start(p, x0, alpha, cfg);
  const RnnCertificate rc = rnn_certificate(p);
  IterationTrace trace = start_trace(Method::RnnForwardStep, alpha);
  trace.theoretical_factor = 1.0 - alpha * rc.cert.c;
  trace.step_admissible = alpha * rc.cert.diag_l <= 1.0 + kClosedIntervalSlack;

  const Vector bias = p.input_bias();
  Vector x = x0;
  Vector phi = leaky_relu(p.A * x + bias, p.a);
  auto push = [&](const Vector& xk, const Vector& phik) {
    const double r = (xk - phik).lpNorm<Eigen::Infinity>();
    trace.residuals.push_back(r);
    if (cfg.record_iterates) trace.iterates.push_back(xk);
    return r;
  };
  push(x, phi);
  for (long k = 0; k < cfg.max_iters && trace.residuals.back() > cfg.tol; ++k) {
    x = (1.0 - alpha) * x + alpha * phi;
    phi = leaky_relu(p.A * x + bias, p.a);
    if (!std::isfinite(push(x, phi))) break;
  }
  trace.converged = trace.residuals.back() <= cfg.tol;
  trace.final_x = std::move(x);
  return trace;
}

SplitProblem rnn_split(const RnnParams& p) {
  p.validate();
  const double gamma = p.gamma();
  require_contracting(gamma);
  const WeightedNorm nrm = p.norm();
  const Index n = p.n();
  const Vector bias = p.input_bias();

  const Matrix f_mat = Matrix::Identity(n, n) - p.A;
  SplitOperator f{OperatorSpec::affine(f_mat, -bias), certify_affine(f_mat, -bias, nrm), {}};

  const double a = p.a;
  const double slope = (1.0 - a) / a;
  auto df = [slope](const Vector& z) -> Vector { return slope * z.cwiseMin(0.0); };
  // One-sided slopes at the kink: 0 at z_i = 0.
  auto ddf = [slope, n](const Vector& z) -> Matrix {
    Matrix j = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      if (z(i) < 0.0) j(i, i) = slope;
    }
    return j;
  };
  SplitOperator g{OperatorSpec::with_jacobian(n, df, ddf),
                  Certificate::make(nrm, 0.0, slope, slope, Provenance::UserSupplied),
                  [a](const Vector& u, double alpha) { return prox_leaky_penalty(u, alpha, a); }};

  SplitProblem sp{std::move(f), std::move(g), {}};
  sp.residual = [p](const Vector& x) { return rnn_residual_norm(p, x); };
  return sp;
}

IterationTrace rnn_forward_backward(const RnnParams& p, const Vector& x0, double alpha,
                                    const SolverConfig& cfg) {
  check_start(p, x0, alpha, cfg);
  const double gamma = p.gamma();
  require_contracting(gamma);
  IterationTrace trace = start_trace(Method::RnnForwardBackward, alpha);
  trace.theoretical_factor = 1.0 - alpha * (1.0 - gamma);
  trace.step_admissible = alpha * (1.0 - min_diagonal(p.A)) <= 1.0 + kClosedIntervalSlack;

  const Vector bias = p.input_bias();
  Vector x = x0;
  Vector ax = p.A * x;
  auto push = [&](const Vector& xk, const Vector& axk) {
    const double r = (xk - leaky_relu(axk + bias, p.a)).lpNorm<Eigen::Infinity>();
    trace.residuals.push_back(r);
    if (cfg.record_iterates) trace.iterates.push_back(xk);
    return r;
  };
  push(x, ax);
  for (long k = 0; k < cfg.max_iters && trace.residuals.back() > cfg.tol; ++k) {
    x = prox_leaky_penalty((1.0 - alpha) * x + alpha * (ax + bias), alpha, p.a);
    ax = p.A * x;
    if (!std::isfinite(push(x, ax))) break;
  }
  trace.converged = trace.residuals.back() <= cfg.tol;
  trace.final_x = std::move(x);
  return trace;
}

IterationTrace rnn_peaceman_rachford(const RnnParams& p, const Vector& z0, double alpha,
                                     const SolverConfig& cfg) {
  check_start(p, z0, alpha, cfg);
  const double gamma = p.gamma();
  require_contracting(gamma);
  IterationTrace trace = start_trace(Method::RnnPeacemanRachford, alpha);
  const double ac = alpha * (1.0 - gamma);
  trace.theoretical_factor = (1.0 - ac) / (1.0 + ac);
  trace.step_admissible = alpha <= rnn_peaceman_rachford_max_alpha(p) * (1.0 + kClosedIntervalSlack);

  const Index n = p.n();
  const Matrix system = Matrix::Identity(n, n) + alpha * (Matrix::Identity(n, n) - p.A);
  const Eigen::PartialPivLU<Matrix> lu(system);
  if (n > 0 && !(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon())) {
    throw SingularSystem("I + alpha (I - A) is singular; the contraction certificate is violated");
  }
  const Vector shift = alpha * p.input_bias();

  Vector z = z0;
  Vector x = z0;
  auto push = [&](const Vector& xk, const Vector& zk) {
    const double r = rnn_residual_norm(p, xk);
    trace.residuals.push_back(r);
    if (cfg.record_iterates) {
      trace.iterates.push_back(xk);
      trace.aux_iterates.push_back(zk);
    }
    return r;
  };
  push(x, z);
  for (long k = 0; k < cfg.max_iters && trace.residuals.back() > cfg.tol; ++k) {
    const Vector x_half = lu.solve(z + shift);
    const Vector z_half = 2.0 * x_half - z;
    x = prox_leaky_penalty(z_half, alpha, p.a);
    z = 2.0 * x - z_half;
    if (!std::isfinite(push(x, z))) break;
  }
  trace.converged = trace.residuals.back() <= cfg.tol;
  trace.final_x = std::move(x);
  return trace;
}

}  // namespace monotone
