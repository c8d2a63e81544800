#pragma once

#include "monotone/resolvent.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace monotone {

enum class Method {
  ForwardStep,
  ProximalPoint,
  Cayley,
  AveragedCayley,
  KrasnoselskiiMann,
  ForwardBackward,
  AveragedForwardBackward,
  PeacemanRachford,
  DouglasRachford,
  RnnForwardStep,
  RnnForwardBackward,
  RnnPeacemanRachford,
};

std::string_view to_string(Method m);

struct SolverConfig {
  double alpha = 1.0;
  /// Krasnosel'skii-Mann averaging weight.
  double theta = 0.5;
  double tol = 1e-10;
  long max_iters = 1000000;
  bool record_iterates = false;

  double inner_tol = 1e-12;
  long inner_max_iters = 100000;
  std::optional<double> inner_step;

  void validate() const;
  ResolveConfig resolve_config() const { return {alpha, inner_tol, inner_max_iters, inner_step}; }
};

/// residuals[k] is the method's residual at x_k, k = 0..iterations(); with
/// record_iterates, iterates[k] = x_k and aux_iterates[k] holds the auxiliary
/// splitting variable z_k where the method has one.
struct IterationTrace {
  Method method = Method::ForwardStep;
  std::string label;
  double alpha = 0.0;
  std::vector<double> residuals;
  std::vector<Vector> iterates;
  std::vector<Vector> aux_iterates;
  bool converged = false;
  Vector final_x;
  std::optional<double> theoretical_factor;
  /// False when alpha lies outside the range where convergence is proven.
  bool step_admissible = true;
  /// KM only: 2||x0 - x*|| / sqrt(k pi theta (1 - theta)) per k (inf at k=0).
  std::vector<double> residual_bounds;

  long iterations() const { return residuals.empty() ? 0 : static_cast<long>(residuals.size()) - 1; }

  /// First k with residuals[k] <= level, if any.
  std::optional<long> iterations_to(double level) const;

  /// Geometric mean of residuals[k+1]/residuals[k] over the last `window`
  /// steps (fewer if the trace is shorter).
  double measured_factor(long window = 100) const;
};

/// x_{k+1} = x_k - alpha F(x_k); residual ||F(x_k)|| in cert.norm.
IterationTrace forward_step_solve(const OperatorSpec& op, const Certificate& cert,
                                  const Vector& x0, const SolverConfig& cfg);

/// x_{k+1} = J_{alpha F}(x_k).
IterationTrace proximal_point_solve(const OperatorSpec& op, const Certificate& cert,
                                    const Vector& x0, const SolverConfig& cfg);

/// x_{k+1} = R_{alpha F}(x_k), or the averaged step (x_k + R(x_k)) / 2.
IterationTrace cayley_solve(const OperatorSpec& op, const Certificate& cert, const Vector& x0,
                            const SolverConfig& cfg, bool averaged);

/// Step-range checks shared by the solvers.
bool forward_step_admissible(const Certificate& cert, double alpha);
bool cayley_step_admissible(const Certificate& cert, double alpha);

/// x_{k+1} = (1 - theta) x_k + theta T(x_k) for a caller-asserted nonexpansive
/// T. Fix(T) being nonempty is assumed, not checked. Residual ||x_k - T(x_k)||.
/// When `reference_fixed_point` is given, residual_bounds is filled with the
/// O(1/sqrt(k)) asymptotic-regularity bound.
IterationTrace km_iterate(const OperatorSpec& t, const WeightedNorm& nrm, double theta,
                          const Vector& x0, const SolverConfig& cfg,
                          const std::optional<Vector>& reference_fixed_point = std::nullopt);

}  // namespace monotone
