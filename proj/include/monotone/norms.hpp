#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace monotone {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Raised whenever vector or matrix shapes disagree with the declared ambient
/// dimension.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class NormKind { L1Weighted, LinfWeighted, L2 };

std::string_view to_string(NormKind kind);

/// A norm on R^n together with its weights.
///
/// L1Weighted is  ||x||_{1,[eta]}      = sum_i eta_i |x_i|,
/// LinfWeighted is ||x||_{inf,[eta]^-1} = max_i |x_i| / eta_i,
/// L2 is the unweighted Euclidean norm (eta is stored as ones and ignored).
class WeightedNorm {
 public:
  static WeightedNorm l1(Vector eta);
  static WeightedNorm linf(Vector eta);
  static WeightedNorm l1(Index n) { return l1(Vector::Ones(n)); }
  static WeightedNorm linf(Index n) { return linf(Vector::Ones(n)); }
  static WeightedNorm l2(Index n);

  NormKind kind() const { return kind_; }
  const Vector& eta() const { return eta_; }
  Index dim() const { return eta_.size(); }

  /// True for the diagonally weighted l1/linf norms, where diagL-based step
  /// ranges apply.
  bool is_polyhedral() const { return kind_ != NormKind::L2; }

 private:
  WeightedNorm(NormKind kind, Vector eta);

  NormKind kind_;
  Vector eta_;
};

double vector_norm(const Vector& x, const WeightedNorm& nrm);

/// Induced matrix norm. Weighted max row/column sums for l1/linf; the largest
/// singular value (power iteration on A^T A) for l2.
double induced_norm(const Matrix& m, const WeightedNorm& nrm);

/// Closed-form logarithmic norm (matrix measure). May be negative.
double log_norm(const Matrix& m, const WeightedNorm& nrm);

/// One-sided difference (||I + hM|| - 1) / h. Approaches log_norm from above
/// as h -> 0+; used as an independent check of the closed forms.
double log_norm_limit(const Matrix& m, const WeightedNorm& nrm, double h);

/// max{-mu(-M), -mu(M)}: every x satisfies ||Mx|| >= lower_bound_gain(M) ||x||.
double lower_bound_gain(const Matrix& m, const WeightedNorm& nrm);

/// Parses a dense row-major matrix. Rows are separated by newlines or ';',
/// entries by commas and/or whitespace. Blank lines and lines starting with
/// '#' are skipped.
Matrix parse_matrix(std::string_view text);

}  // namespace monotone
