#include "monotone/norms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <vector>

namespace monotone {

namespace {

void require_square(const Matrix& m, const WeightedNorm& nrm) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected square");
  }
  if (m.rows() != nrm.dim()) {
    throw DimensionMismatch("matrix dimension " + std::to_string(m.rows()) +
                            " does not match norm dimension " +
                            std::to_string(nrm.dim()));
  }
}

// max_i sum_j (eta_j / eta_i) |m_ij|, with the diagonal entry taken signed
// when `signed_diagonal` is set (the log-norm variant).
double weighted_row_measure(const Matrix& m, const Vector& eta,
                            bool signed_diagonal) {
  const Index n = m.rows();
  double best = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (i == j) {
        row += signed_diagonal ? m(i, i) : std::abs(m(i, i));
      } else {
        row += std::abs(m(i, j)) * eta(j) / eta(i);
      }
    }
    best = std::max(best, row);
  }
  return n == 0 ? 0.0 : best;
}

double spectral_norm(const Matrix& m) {
  const Index n = m.cols();
  if (n == 0) return 0.0;
  const Matrix gram = m.transpose() * m;
  // Deterministic, generically non-orthogonal start.
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = 1.0 + 1.0 / static_cast<double>(i + 2);
  v.normalize();
  constexpr int kMaxIters = 10000;
  constexpr double kRelTol = 1e-12;
  auto exact = [&] {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  };
  for (int it = 0; it < kMaxIters; ++it) {
    const Vector w = gram * v;
    const double lambda = v.dot(w);
    // v in the null space says nothing about the top singular value.
    if (!(lambda > 0.0)) return exact();
    // Eigen-residual test: a slowly moving Rayleigh quotient is not taken as
    // convergence.
    if ((w - lambda * v).norm() <= kRelTol * lambda) return std::sqrt(lambda);
    v = w / w.norm();
  }
  // Clustered top singular values: power iteration stalls.
  return exact();
}

}  // namespace

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1Weighted: return "l1";
    case NormKind::LinfWeighted: return "linf";
    case NormKind::L2: return "l2";
  }
  return "unknown";
}

WeightedNorm::WeightedNorm(NormKind kind, Vector eta)
    : kind_(kind), eta_(std::move(eta)) {
  for (Index i = 0; i < eta_.size(); ++i) {
    if (!(eta_(i) > 0.0) || !std::isfinite(eta_(i))) {
      throw std::invalid_argument("norm weights must be positive and finite");
    }
  }
}

WeightedNorm WeightedNorm::l1(Vector eta) {
  return WeightedNorm(NormKind::L1Weighted, std::move(eta));
}

WeightedNorm WeightedNorm::linf(Vector eta) {
  return WeightedNorm(NormKind::LinfWeighted, std::move(eta));
}

WeightedNorm WeightedNorm::l2(Index n) {
  return WeightedNorm(NormKind::L2, Vector::Ones(n));
}

double vector_norm(const Vector& x, const WeightedNorm& nrm) {
  if (x.size() != nrm.dim()) {
    throw DimensionMismatch("vector of length " + std::to_string(x.size()) +
                            " does not match norm dimension " +
                            std::to_string(nrm.dim()));
  }
  switch (nrm.kind()) {
    case NormKind::L1Weighted:
      return (nrm.eta().array() * x.array().abs()).sum();
    case NormKind::LinfWeighted:
      return x.size() == 0 ? 0.0 : (x.array().abs() / nrm.eta().array()).maxCoeff();
    case NormKind::L2:
      return x.norm();
  }
  return 0.0;
}

double induced_norm(const Matrix& m, const WeightedNorm& nrm) {
  require_square(m, nrm);
  switch (nrm.kind()) {
    case NormKind::LinfWeighted:
      return weighted_row_measure(m, nrm.eta(), false);
    case NormKind::L1Weighted:
      // ||A||_{1,[eta]} = ||A^T||_{inf,[eta]^-1}
      return weighted_row_measure(m.transpose(), nrm.eta(), false);
    case NormKind::L2:
      return spectral_norm(m);
  }
  return 0.0;
}

double log_norm(const Matrix& m, const WeightedNorm& nrm) {
  require_square(m, nrm);
  switch (nrm.kind()) {
    case NormKind::LinfWeighted:
      return weighted_row_measure(m, nrm.eta(), true);
    case NormKind::L1Weighted:
      return weighted_row_measure(m.transpose(), nrm.eta(), true);
    case NormKind::L2: {
      if (m.rows() == 0) return 0.0;
      const Matrix sym = 0.5 * (m + m.transpose());
      Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
      return es.eigenvalues().maxCoeff();
    }
  }
  return 0.0;
}

double log_norm_limit(const Matrix& m, const WeightedNorm& nrm, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("log_norm_limit requires h > 0");
  require_square(m, nrm);
  const Matrix shifted = Matrix::Identity(m.rows(), m.cols()) + h * m;
  return (induced_norm(shifted, nrm) - 1.0) / h;
}

double lower_bound_gain(const Matrix& m, const WeightedNorm& nrm) {
  return std::max(-log_norm(-m, nrm), -log_norm(m, nrm));
}

Matrix parse_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find_first_of("\n;", pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;

    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;

    std::vector<double> row;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() &&
             (line[i] == ',' || line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
        ++i;
      }
      if (i >= line.size()) break;
      double value = 0.0;
      const char* begin = line.data() + i;
      // from_chars does not accept a leading '+'.
      if (*begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, line.data() + line.size(), value);
      if (ec != std::errc{}) {
        throw std::invalid_argument("malformed matrix entry near '" +
                                    std::string(line.substr(i, 16)) + "'");
      }
      row.push_back(value);
      i = static_cast<std::size_t>(ptr - line.data());
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DimensionMismatch("ragged matrix: row " + std::to_string(rows.size()) +
                              " has " + std::to_string(row.size()) + " entries");
    }
    rows.push_back(std::move(row));
  }
  const Index r = static_cast<Index>(rows.size());
  const Index c = r == 0 ? 0 : static_cast<Index>(rows.front().size());
  Matrix out(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) out(i, j) = rows[i][j];
  }
  return out;
}

}  // namespace monotone
