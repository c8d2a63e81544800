#include "monotone/operators.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace monotone {

struct OperatorSpec::State {
  Matrix a;
  Vector b;
  VectorMap evaluate;
  JacobianMap jacobian;
  double fd_step = 1e-6;
};

namespace {

void check_dim(const Vector& x, Index n) {
  if (x.size() != n) {
    throw DimensionMismatch("operator of dimension " + std::to_string(n) +
                            " applied to vector of length " + std::to_string(x.size()));
  }
}

}  // namespace

OperatorSpec::OperatorSpec(Index dim, JacobianKind kind, std::shared_ptr<const State> state)
    : dim_(dim), kind_(kind), state_(std::move(state)) {}

OperatorSpec OperatorSpec::affine(Matrix a, Vector b) {
  if (a.rows() != a.cols() || b.size() != a.rows()) {
    throw DimensionMismatch("affine operator needs square A and matching b");
  }
  auto state = std::make_shared<State>();
  const Index n = a.rows();
  state->a = std::move(a);
  state->b = std::move(b);
  return OperatorSpec(n, JacobianKind::AnalyticAffine, std::move(state));
}

OperatorSpec OperatorSpec::affine(Matrix a) {
  const Index n = a.rows();
  return affine(std::move(a), Vector::Zero(n));
}

OperatorSpec OperatorSpec::zero(Index n) { return affine(Matrix::Zero(n, n)); }

OperatorSpec OperatorSpec::identity(Index n) { return affine(Matrix::Identity(n, n)); }

OperatorSpec OperatorSpec::with_jacobian(Index n, VectorMap evaluate, JacobianMap jacobian) {
  if (!evaluate || !jacobian) throw std::invalid_argument("operator callables must be set");
  auto state = std::make_shared<State>();
  state->evaluate = std::move(evaluate);
  state->jacobian = std::move(jacobian);
  return OperatorSpec(n, JacobianKind::AnalyticCallable, std::move(state));
}

OperatorSpec OperatorSpec::finite_difference(Index n, VectorMap evaluate, double step) {
  if (!evaluate) throw std::invalid_argument("operator callable must be set");
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  auto state = std::make_shared<State>();
  state->evaluate = std::move(evaluate);
  state->fd_step = step;
  return OperatorSpec(n, JacobianKind::FiniteDifference, std::move(state));
}

const Matrix& OperatorSpec::affine_matrix() const {
  if (!is_affine()) throw std::logic_error("operator is not affine");
  return state_->a;
}

const Vector& OperatorSpec::affine_offset() const {
  if (!is_affine()) throw std::logic_error("operator is not affine");
  return state_->b;
}

Vector OperatorSpec::evaluate(const Vector& x) const {
  check_dim(x, dim_);
  if (is_affine()) return state_->a * x + state_->b;
  Vector y = state_->evaluate(x);
  if (y.size() != dim_) {
    throw DimensionMismatch("operator returned a vector of length " + std::to_string(y.size()));
  }
  return y;
}

Matrix OperatorSpec::jacobian(const Vector& x) const {
  check_dim(x, dim_);
  switch (kind_) {
    case JacobianKind::AnalyticAffine:
      return state_->a;
    case JacobianKind::AnalyticCallable: {
      Matrix j = state_->jacobian(x);
      if (j.rows() != dim_ || j.cols() != dim_) {
        throw DimensionMismatch("jacobian callable returned wrong shape");
      }
      return j;
    }
    case JacobianKind::FiniteDifference: {
      const double h = state_->fd_step;
      Matrix j(dim_, dim_);
      Vector probe = x;
      for (Index col = 0; col < dim_; ++col) {
        probe(col) = x(col) + h;
        const Vector up = evaluate(probe);
        probe(col) = x(col) - h;
        const Vector down = evaluate(probe);
        probe(col) = x(col);
        j.col(col) = (up - down) / (2.0 * h);
      }
      return j;
    }
  }
  return {};
}

Vector evaluate(const OperatorSpec& op, const Vector& x) { return op.evaluate(x); }

Matrix jacobian(const OperatorSpec& op, const Vector& x) { return op.jacobian(x); }

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::ExactAffine: return "exact_affine";
    case Provenance::UserSupplied: return "user_supplied";
    case Provenance::Sampled: return "sampled";
  }
  return "unknown";
}

Certificate Certificate::make(WeightedNorm norm, double c, double ell, double diag_l,
                              Provenance provenance, bool monotone) {
  if (ell < 0.0) throw std::invalid_argument("Lipschitz constant must be nonnegative");
  constexpr double inf = std::numeric_limits<double>::infinity();
  Certificate cert{std::move(norm)};
  cert.c = c;
  cert.ell = ell;
  cert.diag_l = diag_l;
  cert.kappa = c > 0.0 ? ell / c : inf;
  cert.kappa_inf = c > 0.0 ? diag_l / c : inf;
  cert.monotone = monotone && c >= 0.0;
  cert.provenance = provenance;
  return cert;
}

Certificate certify_affine(const Matrix& a, const Vector& b, const WeightedNorm& nrm) {
  if (a.rows() != a.cols() || b.size() != a.rows()) {
    throw DimensionMismatch("certify_affine needs square A and matching b");
  }
  const double margin = -log_norm(-a, nrm);
  const double ell = induced_norm(a, nrm);
  const double diag_l = a.rows() == 0 ? 0.0 : a.diagonal().maxCoeff();
  return Certificate::make(nrm, std::max(0.0, margin), ell, diag_l,
                           Provenance::ExactAffine, margin >= 0.0);
}

Certificate sample_certificate(const OperatorSpec& op, const WeightedNorm& nrm,
                               std::span<const Vector> sample_points) {
  if (sample_points.empty()) throw std::invalid_argument("sample_certificate needs samples");
  if (op.dim() != nrm.dim()) throw DimensionMismatch("operator and norm dimensions differ");
  if (op.is_affine()) {
    Certificate cert = certify_affine(op.affine_matrix(), op.affine_offset(), nrm);
    cert.provenance = Provenance::Sampled;
    return cert;
  }
  double margin = std::numeric_limits<double>::infinity();
  double ell = 0.0;
  double diag_l = -std::numeric_limits<double>::infinity();
  for (const Vector& x : sample_points) {
    const Matrix j = op.jacobian(x);
    margin = std::min(margin, -log_norm(-j, nrm));
    ell = std::max(ell, induced_norm(j, nrm));
    diag_l = std::max(diag_l, op.dim() == 0 ? 0.0 : j.diagonal().maxCoeff());
  }
  return Certificate::make(nrm, std::max(0.0, margin), ell, diag_l, Provenance::Sampled,
                           margin >= 0.0);
}

}  // namespace monotone
