#pragma once

#include "monotone/operators.hpp"

#include <Eigen/LU>

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>

namespace monotone {

class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotMonotone : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResolveConfig {
  double alpha = 1.0;
  double inner_tol = 1e-12;
  long inner_max_iters = 100000;
  /// Step of the inner forward-step solve; unset means 1 / (1 + alpha diagL).
  std::optional<double> inner_step;

  void validate() const;
};

/// J_{alpha F} = (Id + alpha F)^{-1} bound to one operator and step.
///
/// Affine operators are factorized once (dense LU of I + alpha A) and every
/// application is a triangular solve. Other operators are resolved by the
/// forward-step iteration on G(x) = x + alpha F(x) - u, which is strongly
/// monotone with parameter 1 + alpha c, until ||G(x)|| <= inner_tol in the
/// certificate's norm. A closed-form map can be supplied instead.
class Resolvent {
 public:
  Resolvent(const OperatorSpec& op, const Certificate& cert, const ResolveConfig& cfg);

  /// Wraps a known closed form u -> J(u).
  static Resolvent closed_form(Index dim, double alpha, VectorMap map);

  Vector operator()(const Vector& u) const;
  /// R = 2J - Id.
  Vector reflected(const Vector& u) const;

  double alpha() const { return alpha_; }
  Index dim() const { return dim_; }

  /// Iterations used by the most recent inner solve on this thread; 0 for the
  /// direct and closed-form paths.
  static long last_inner_iterations();

 private:
  Resolvent() = default;

  struct Iterative {
    OperatorSpec op;
    WeightedNorm norm;
    double step;
    double tol;
    long max_iters;
  };

  Index dim_ = 0;
  double alpha_ = 1.0;
  Vector offset_;  // alpha * b for the affine path
  std::shared_ptr<const Eigen::PartialPivLU<Matrix>> lu_;
  std::shared_ptr<const Iterative> iterative_;
  VectorMap closed_;
};

Vector resolvent(const OperatorSpec& op, const Certificate& cert, const Vector& u,
                 const ResolveConfig& cfg);

/// Solves (I + alpha A) x = u - alpha b by dense LU.
Vector resolvent_affine(const Matrix& a, const Vector& b, double alpha, const Vector& u);

Vector reflected_resolvent(const OperatorSpec& op, const Certificate& cert, const Vector& u,
                           const ResolveConfig& cfg);

/// C^theta = J / theta - ((1 - theta) / theta) Id, evaluated at u.
Vector c_theta(const OperatorSpec& op, const Certificate& cert, double theta, const Vector& u,
               const ResolveConfig& cfg);

/// prox of alpha f with f(z) = (1-a)/(2a) * sum_i min{z_i,0}^2, entrywise
/// x_i for x_i >= 0 and a x_i / (a + alpha (1-a)) otherwise.
Vector prox_leaky_penalty(const Vector& x, double alpha, double a);

}  // namespace monotone
