#include "monotone/resolvent.hpp"

#include <cmath>
#include <string>

namespace monotone {

namespace {

thread_local long g_last_inner_iterations = 0;

void check_dim(const Vector& u, Index n) {
  if (u.size() != n) {
    throw DimensionMismatch("resolvent of dimension " + std::to_string(n) +
                            " applied to vector of length " + std::to_string(u.size()));
  }
}

std::shared_ptr<const Eigen::PartialPivLU<Matrix>> factorize_shifted(const Matrix& a,
                                                                     double alpha) {
  const Index n = a.rows();
  const Matrix shifted = Matrix::Identity(n, n) + alpha * a;
  auto lu = std::make_shared<Eigen::PartialPivLU<Matrix>>(shifted);
  // PartialPivLU does not report singularity; a zero pivot shows up as a zero
  // determinant or a non-finite reciprocal condition estimate.
  if (n > 0) {
    const double rcond = lu->rcond();
    if (!(rcond > 1e3 * std::numeric_limits<double>::epsilon())) {
      throw SingularSystem("I + alpha A is singular (rcond " + std::to_string(rcond) +
                           "); the supplied operator is not monotone");
    }
  }
  return lu;
}

}  // namespace

void ResolveConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("resolvent step alpha must be positive");
  if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be positive");
  if (inner_max_iters <= 0) throw std::invalid_argument("inner_max_iters must be positive");
  if (inner_step && !(*inner_step > 0.0)) {
    throw std::invalid_argument("inner_step must be positive");
  }
}

Resolvent::Resolvent(const OperatorSpec& op, const Certificate& cert, const ResolveConfig& cfg)
    : dim_(op.dim()), alpha_(cfg.alpha) {
  cfg.validate();
  if (!cert.monotone || cert.c < 0.0) {
    throw NotMonotone("resolvent requires a monotone certificate (c >= 0)");
  }
  if (cert.norm.dim() != op.dim()) throw DimensionMismatch("certificate norm dimension differs");
  if (op.is_affine()) {
    lu_ = factorize_shifted(op.affine_matrix(), alpha_);
    offset_ = alpha_ * op.affine_offset();
    return;
  }
  const double step = cfg.inner_step.value_or(1.0 / (1.0 + alpha_ * std::max(0.0, cert.diag_l)));
  iterative_ = std::make_shared<const Iterative>(
      Iterative{op, cert.norm, step, cfg.inner_tol, cfg.inner_max_iters});
}

Resolvent Resolvent::closed_form(Index dim, double alpha, VectorMap map) {
  if (!(alpha > 0.0)) throw std::invalid_argument("resolvent step alpha must be positive");
  if (!map) throw std::invalid_argument("closed-form resolvent must be callable");
  Resolvent r;
  r.dim_ = dim;
  r.alpha_ = alpha;
  r.closed_ = std::move(map);
  return r;
}

long Resolvent::last_inner_iterations() { return g_last_inner_iterations; }

Vector Resolvent::operator()(const Vector& u) const {
  check_dim(u, dim_);
  g_last_inner_iterations = 0;
  if (closed_) return closed_(u);
  if (lu_) {
    if (offset_.size() == 0 || offset_.isZero(0.0)) return lu_->solve(u);
    return lu_->solve(u - offset_);
  }
  const Iterative& it = *iterative_;
  Vector x = u;
  for (long k = 0; k < it.max_iters; ++k) {
    const Vector g = x + alpha_ * it.op.evaluate(x) - u;
    if (vector_norm(g, it.norm) <= it.tol) {
      g_last_inner_iterations = k;
      return x;
    }
    x -= it.step * g;
  }
  const Vector g = x + alpha_ * it.op.evaluate(x) - u;
  if (vector_norm(g, it.norm) <= it.tol) {
    g_last_inner_iterations = it.max_iters;
    return x;
  }
  throw ConvergenceFailure("inner resolvent solve did not reach tolerance " +
                           std::to_string(it.tol) + " in " + std::to_string(it.max_iters) +
                           " iterations (residual " +
                           std::to_string(vector_norm(g, it.norm)) + ")");
}

Vector Resolvent::reflected(const Vector& u) const { return 2.0 * (*this)(u) - u; }

Vector resolvent(const OperatorSpec& op, const Certificate& cert, const Vector& u,
                 const ResolveConfig& cfg) {
  return Resolvent(op, cert, cfg)(u);
}

Vector resolvent_affine(const Matrix& a, const Vector& b, double alpha, const Vector& u) {
  if (a.rows() != a.cols() || b.size() != a.rows() || u.size() != a.rows()) {
    throw DimensionMismatch("resolvent_affine: inconsistent shapes");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("resolvent step alpha must be positive");
  const auto lu = factorize_shifted(a, alpha);
  return lu->solve(u - alpha * b);
}

Vector reflected_resolvent(const OperatorSpec& op, const Certificate& cert, const Vector& u,
                           const ResolveConfig& cfg) {
  return Resolvent(op, cert, cfg).reflected(u);
}

Vector c_theta(const OperatorSpec& op, const Certificate& cert, double theta, const Vector& u,
               const ResolveConfig& cfg) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
  const Vector j = resolvent(op, cert, u, cfg);
  return (j - (1.0 - theta) * u) / theta;
}

Vector prox_leaky_penalty(const Vector& x, double alpha, double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("LeakyReLU slope must lie in (0, 1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("prox step alpha must be positive");
  const double shrink = a / (a + alpha * (1.0 - a));
  Vector out = x;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) < 0.0) out(i) = shrink * x(i);
  }
  return out;
}

}  // namespace monotone
