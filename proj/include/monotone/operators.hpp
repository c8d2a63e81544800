#pragma once

#include "monotone/norms.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

namespace monotone {

using VectorMap = std::function<Vector(const Vector&)>;
using JacobianMap = std::function<Matrix(const Vector&)>;

enum class JacobianKind { AnalyticAffine, AnalyticCallable, FiniteDifference };

/// An evaluatable map F: R^n -> R^n with Jacobian access.
///
/// Instances are cheap to copy (shared immutable state) and reentrant as long
/// as the user-supplied callables are.
class OperatorSpec {
 public:
  /// F(x) = A x + b with exact Jacobian A.
  static OperatorSpec affine(Matrix a, Vector b);
  static OperatorSpec affine(Matrix a);
  static OperatorSpec zero(Index n);
  static OperatorSpec identity(Index n);
  static OperatorSpec with_jacobian(Index n, VectorMap evaluate, JacobianMap jacobian);
  /// Central differences with the given step.
  static OperatorSpec finite_difference(Index n, VectorMap evaluate, double step = 1e-6);

  Index dim() const { return dim_; }
  JacobianKind jacobian_kind() const { return kind_; }
  bool is_affine() const { return kind_ == JacobianKind::AnalyticAffine; }

  /// Affine data; only valid when is_affine().
  const Matrix& affine_matrix() const;
  const Vector& affine_offset() const;

  Vector evaluate(const Vector& x) const;
  Vector operator()(const Vector& x) const { return evaluate(x); }
  Matrix jacobian(const Vector& x) const;

 private:
  struct State;
  OperatorSpec(Index dim, JacobianKind kind, std::shared_ptr<const State> state);

  Index dim_;
  JacobianKind kind_;
  std::shared_ptr<const State> state_;
};

Vector evaluate(const OperatorSpec& op, const Vector& x);
Matrix jacobian(const OperatorSpec& op, const Vector& x);

enum class Provenance { ExactAffine, UserSupplied, Sampled };

std::string_view to_string(Provenance p);

/// Monotonicity and Lipschitz data of an operator relative to one norm.
///
/// `c` is clamped at zero; `monotone` records whether the unclamped
/// -mu(-DF) bound was nonnegative, so a non-monotone operator is never
/// mistaken for a weakly monotone one.
struct Certificate {
  WeightedNorm norm;
  double c = 0.0;
  double ell = 0.0;
  double diag_l = 0.0;
  double kappa = 0.0;
  double kappa_inf = 0.0;
  bool monotone = true;
  Provenance provenance = Provenance::UserSupplied;

  bool strongly_monotone() const { return monotone && c > 0.0; }

  /// Fills kappa = ell / c and kappa_inf = diag_l / c (infinite for c = 0).
  static Certificate make(WeightedNorm norm, double c, double ell, double diag_l,
                          Provenance provenance, bool monotone = true);
};

Certificate certify_affine(const Matrix& a, const Vector& b, const WeightedNorm& nrm);

/// Heuristic certificate from Jacobians at the given points: a lower estimate
/// of c and upper estimates of ell and diagL over the samples only. It is not
/// a proof for non-affine maps; check `provenance`.
Certificate sample_certificate(const OperatorSpec& op, const WeightedNorm& nrm,
                               std::span<const Vector> sample_points);

}  // namespace monotone
