#pragma once

#include "monotone/zerofind.hpp"

#include <functional>

namespace monotone {

/// One summand of a splitting problem: the operator, its certificate, and
/// optionally a closed-form resolvent (alpha, u) -> J_{alpha op}(u). Without a
/// closed form the generic Resolvent (LU for affine, inner iteration
/// otherwise) is used.
struct SplitOperator {
  OperatorSpec op;
  Certificate cert;
  std::function<Vector(const Vector& u, double alpha)> closed_resolvent;

  Resolvent resolvent(const SolverConfig& cfg) const;
  double diag_l() const { return cert.diag_l; }
};

/// Find x with (F + G)(x) = 0.
///
/// Traces record `residual(x_k)` when set, else ||F(x_k) + G(x_k)|| in the
/// shared norm.
struct SplitProblem {
  SplitOperator f;
  SplitOperator g;
  std::function<double(const Vector&)> residual;

  const WeightedNorm& norm() const { return f.cert.norm; }
  Index dim() const { return f.op.dim(); }
  void validate() const;
  double trace_residual(const Vector& x) const;
};

/// x_{k+1} = J_{alpha G}(x_k - alpha F(x_k)), or the average of that with x_k.
/// The plain form needs a strongly monotone F.
IterationTrace forward_backward(const SplitProblem& p, const Vector& x0, const SolverConfig& cfg,
                                bool averaged);

/// x_{k+1/2} = J_G(z_k), z_{k+1/2} = 2x_{k+1/2} - z_k, x_{k+1} = J_F(z_{k+1/2}),
/// z_{k+1} = 2x_{k+1} - z_{k+1/2}. The reported x_k is J_{alpha G}(z_k).
IterationTrace peaceman_rachford(const SplitProblem& p, const Vector& z0, const SolverConfig& cfg);

/// As Peaceman-Rachford with z_{k+1} = z_k + x_{k+1} - x_{k+1/2}.
IterationTrace douglas_rachford(const SplitProblem& p, const Vector& z0, const SolverConfig& cfg);

/// alpha <= min{1/diagL(F), 1/diagL(G)}.
bool splitting_step_admissible(const SplitProblem& p, double alpha);

}  // namespace monotone
