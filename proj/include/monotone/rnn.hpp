#pragma once

#include "monotone/splitting.hpp"

namespace monotone {

/// Parameters of the recurrent network  dx/dt = -x + Phi(A x + B u + b)
/// with entrywise LeakyReLU phi(s) = max{s, a s}.
struct RnnParams {
  Matrix A;
  Matrix B;
  Vector b;
  Vector u;
  double a = 0.1;
  Vector eta;

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }

  /// Shape and slope checks; throws on violation.
  void validate() const;
  /// B u + b.
  Vector input_bias() const;
  /// The norm ||.||_{inf,[eta]^-1} all certificates are stated in.
  WeightedNorm norm() const { return WeightedNorm::linf(eta); }
  /// mu_{inf,[eta]^-1}(A); the network is certified contracting iff < 1.
  double gamma() const;
};

double leaky_relu(double x, double a);
Vector leaky_relu(const Vector& x, double a);

/// F(x, u) = -x + Phi(A x + B u + b).
Vector rnn_residual(const RnnParams& p, const Vector& x);

/// Unweighted ||x - Phi(A x + B u + b)||_inf, the equilibrium residual every
/// RNN trace records.
double rnn_residual_norm(const RnnParams& p, const Vector& x);

/// The operator -F(., u) as an OperatorSpec with its exact (almost
/// everywhere) Jacobian I - diag(phi'(Ax + Bu + b)) A.
OperatorSpec rnn_operator(const RnnParams& p);

class NotContracting : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RnnCertificate {
  Certificate cert;
  double gamma;
};

/// Certificate of -F(., u): c = 1 - phi(gamma), diagL = 1 - min_i min{a A_ii, A_ii},
/// ell = 1 + ||A||. Throws NotContracting when gamma >= 1.
RnnCertificate rnn_certificate(const RnnParams& p);

/// Largest step with a convergence guarantee for each iteration.
double rnn_forward_step_max_alpha(const RnnParams& p);
double rnn_forward_backward_max_alpha(const RnnParams& p);
double rnn_peaceman_rachford_max_alpha(const RnnParams& p);

/// x_{k+1} = (1 - alpha) x_k + alpha Phi(A x_k + B u + b).
IterationTrace rnn_forward_step(const RnnParams& p, const Vector& x0, double alpha,
                                const SolverConfig& cfg);

/// F(z) = (I - A) z - (B u + b) and G = df with f(z) = (1-a)/(2a) sum min{z_i,0}^2.
/// G resolves through prox_leaky_penalty; F through a dense LU.
SplitProblem rnn_split(const RnnParams& p);

/// x_{k+1} = prox_{alpha f}((1 - alpha) x_k + alpha (A x_k + B u + b)).
IterationTrace rnn_forward_backward(const RnnParams& p, const Vector& x0, double alpha,
                                    const SolverConfig& cfg);

/// Peaceman-Rachford with the affine operator resolved first:
///   x_{k+1/2} = (I + alpha (I - A))^{-1} (z_k + alpha (B u + b))
///   z_{k+1/2} = 2 x_{k+1/2} - z_k
///   x_{k+1}   = prox_{alpha f}(z_{k+1/2})
///   z_{k+1}   = 2 x_{k+1} - z_{k+1/2}
/// The linear system is factorized once. x_0 is reported as z0.
IterationTrace rnn_peaceman_rachford(const RnnParams& p, const Vector& z0, double alpha,
                                     const SolverConfig& cfg);

}  // namespace monotone
