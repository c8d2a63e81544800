#include "monotone/rnn.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace monotone;

namespace {

SolverConfig config(long max_iters = 1000000, bool record = true) {
  SolverConfig cfg;
  cfg.max_iters = max_iters;
  cfg.record_iterates = record;
  return cfg;
}

double max_err(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

RnnParams scalar_params(double a_mat, double bias, double slope) {
  RnnParams p;
  p.A = Matrix::Constant(1, 1, a_mat);
  p.B = Matrix::Zero(1, 1);
  p.b = Vector::Constant(1, bias);
  p.u = Vector::Zero(1);
  p.a = slope;
  p.eta = Vector::Ones(1);
  return p;
}

RnnParams zero_recurrence(const Vector& bias, double slope) {
  const Index n = bias.size();
  RnnParams p;
  p.A = Matrix::Zero(n, n);
  p.B = Matrix::Zero(n, 2);
  p.b = bias;
  p.u = Vector::Zero(2);
  p.a = slope;
  p.eta = Vector::Ones(n);
  return p;
}

}  // namespace

TEST_CASE("LeakyReLU") {
  CHECK(leaky_relu(Vector{{2.0, 0.0}}, 0.1) == Vector{{2.0, 0.0}});
  CHECK(leaky_relu(Vector{{-2.0}}, 0.1)(0) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(leaky_relu(Vector{{-4.0}}, 0.5)(0) == -2.0);
  CHECK(leaky_relu(-3.0, 0.25) == -0.75);
}

TEST_CASE("parameter validation") {
  RnnParams p = zero_recurrence(Vector{{1.0, -1.0}}, 0.1);
  CHECK_NOTHROW(p.validate());
  p.a = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.a = 0.1;
  p.u = Vector::Zero(3);
  CHECK_THROWS_AS(p.validate(), DimensionMismatch);
  p = zero_recurrence(Vector{{1.0, -1.0}}, 0.1);
  p.eta = Vector{{1.0, -1.0}};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = zero_recurrence(Vector{{1.0, -1.0}}, 0.1);
  CHECK_THROWS_AS(rnn_residual(p, Vector::Zero(3)), DimensionMismatch);
}

TEST_CASE("residual") {
  CHECK(rnn_residual(zero_recurrence(Vector::Zero(2), 0.1), Vector::Zero(2)) == Vector::Zero(2));
  const Vector r = rnn_residual(zero_recurrence(Vector{{1.0, -1.0}}, 0.1), Vector::Zero(2));
  CHECK(max_err(r, Vector{{1.0, -0.1}}) <= 1e-16);
  CHECK(rnn_residual_norm(zero_recurrence(Vector{{1.0, -1.0}}, 0.1), Vector::Zero(2)) == 1.0);
}

TEST_CASE("certificates") {
  const RnnCertificate zero = rnn_certificate(zero_recurrence(Vector{{1.0}}, 0.1));
  CHECK(zero.gamma == 0.0);
  CHECK(zero.cert.c == 1.0);
  CHECK(zero.cert.provenance == Provenance::UserSupplied);

  RnnParams p = zero_recurrence(Vector{{1.0, 2.0}}, 0.1);
  p.A = -2.0 * Matrix::Identity(2, 2);
  const RnnCertificate neg = rnn_certificate(p);
  CHECK(neg.gamma == -2.0);
  CHECK(neg.cert.c == doctest::Approx(1.0 + 2.0 * 0.1).epsilon(1e-15));
  CHECK(neg.cert.diag_l == 3.0);
  CHECK(neg.cert.ell == 3.0);

  // Positive diagonal: the slope branch a A_ii is the smaller one.
  p.A = Matrix::Zero(2, 2);
  p.A.diagonal() << 0.5, 0.2;
  p.A(0, 1) = 0.49;
  const RnnCertificate pos = rnn_certificate(p);
  CHECK(pos.gamma == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(pos.cert.c == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(pos.cert.diag_l == doctest::Approx(1.0 - 0.1 * 0.2).epsilon(1e-15));
  CHECK(rnn_forward_step_max_alpha(p) == doctest::Approx(1.0 / 0.98).epsilon(1e-15));
  CHECK(rnn_forward_backward_max_alpha(p) == doctest::Approx(1.0 / 0.8).epsilon(1e-15));
  CHECK(rnn_peaceman_rachford_max_alpha(p) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

  p.A(0, 1) = 0.6;
  CHECK_THROWS_AS(rnn_certificate(p), NotContracting);
  CHECK_THROWS_AS(rnn_split(p), NotContracting);
  CHECK_THROWS_AS(rnn_forward_backward(p, Vector::Zero(2), 0.5, config()), NotContracting);
}

TEST_CASE("operator and its jacobian") {
  oracle::Rng rng(61);
  const RnnParams p = oracle::random_rnn(rng, 5, 3, 0.2, 0.5);
  const OperatorSpec op = rnn_operator(p);
  for (int t = 0; t < 20; ++t) {
    const Vector x = rng.vector(5);
    CHECK(max_err(op(x), -rnn_residual(p, x)) <= 1e-15);
    const OperatorSpec fd = OperatorSpec::finite_difference(5, [&](const Vector& y) { return op(y); });
    CHECK((op.jacobian(x) - fd.jacobian(x)).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("scalar equilibrium") {
  const RnnParams p = scalar_params(0.5, 1.0, 0.1);
  const IterationTrace fs = rnn_forward_step(p, Vector::Zero(1), 1.0, config());
  REQUIRE(fs.iterates.size() > 3);
  CHECK(fs.iterates[1](0) == 1.0);
  CHECK(fs.iterates[2](0) == 1.5);
  CHECK(fs.converged);
  CHECK(std::abs(fs.final_x(0) - 2.0) <= 1e-9);
  const IterationTrace fb = rnn_forward_backward(p, Vector::Zero(1), 1.0, config());
  CHECK(fb.converged);
  CHECK(std::abs(fb.final_x(0) - 2.0) <= 1e-9);
  const IterationTrace pr = rnn_peaceman_rachford(p, Vector::Zero(1), 1.0 / 9.0, config());
  CHECK(pr.converged);
  CHECK(std::abs(pr.final_x(0) - 2.0) <= 1e-9);
}

TEST_CASE("zero recurrence") {
  const Vector v{{1.5, -2.0, 0.0}};
  const RnnParams p = zero_recurrence(v, 0.1);
  const Vector phi = leaky_relu(v, 0.1);
  const IterationTrace fs = rnn_forward_step(p, Vector::Zero(3), 1.0, config());
  CHECK(fs.converged);
  CHECK(fs.iterations() == 1);
  CHECK(fs.final_x == phi);
  const IterationTrace fb = rnn_forward_backward(p, Vector::Zero(3), 1.0, config());
  CHECK(fb.iterations() == 1);
  CHECK(fb.final_x == phi);

  const SplitProblem sp = rnn_split(p);
  CHECK(sp.g.cert.diag_l == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(sp.g.cert.ell == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(sp.g.cert.c == 0.0);
  CHECK(sp.f.cert.c == 1.0);
  CHECK(sp.f.cert.diag_l == 1.0);
  CHECK(vector_norm(sp.f.op(phi) + sp.g.op(phi), sp.norm()) <= 1e-15);

  const RnnParams still = zero_recurrence(Vector::Zero(2), 0.1);
  const IterationTrace pr = rnn_peaceman_rachford(still, Vector::Zero(2), 1.0 / 9.0, config(10));
  CHECK(pr.converged);
  CHECK(pr.iterations() == 0);
  CHECK(pr.final_x == Vector::Zero(2));
}

TEST_CASE("equilibria agree across methods and with the reference solver") {
  oracle::Rng rng(62);
  for (int t = 0; t < 60; ++t) {
    const Index n = rng.integer(1, 12);
    RnnParams p = oracle::random_rnn(rng, n, 3, rng.uniform(0.05, 0.95), rng.uniform(-1.5, 0.99));
    if (t % 3 == 0) {
      // Nonuniform weights: keep the certificate only if it still contracts.
      p.eta = rng.positive_weights(n);
      if (!(p.gamma() < 1.0)) p.eta = Vector::Ones(n);
    }
    const Vector xstar = oracle::reference_equilibrium(p);
    REQUIRE(rnn_residual_norm(p, xstar) <= 1e-12);
    const RnnCertificate rc = rnn_certificate(p);
    const WeightedNorm nrm = p.norm();
    const SolverConfig cfg = config();

    const double a_fs = rnn_forward_step_max_alpha(p);
    const double a_fb = rnn_forward_backward_max_alpha(p);
    const double a_pr = rnn_peaceman_rachford_max_alpha(p);
    const IterationTrace fs = rnn_forward_step(p, Vector::Zero(n), a_fs, cfg);
    const IterationTrace fb = rnn_forward_backward(p, Vector::Zero(n), a_fb, cfg);
    const IterationTrace pr = rnn_peaceman_rachford(p, Vector::Zero(n), a_pr, cfg);
    SolverConfig dcfg = cfg;
    dcfg.alpha = a_pr;
    const IterationTrace dr = douglas_rachford(rnn_split(p), Vector::Zero(n), dcfg);
    for (const IterationTrace* tr : {&fs, &fb, &pr, &dr}) {
      CHECK(tr->step_admissible);
      CHECK(tr->converged);
      CHECK(rnn_residual_norm(p, tr->final_x) <= 10.0 * cfg.tol);
      CHECK(max_err(tr->final_x, xstar) <= 1e-8);
    }
    CHECK(*fs.theoretical_factor == doctest::Approx(1.0 - a_fs * rc.cert.c).epsilon(1e-15));

    // Error contraction in the certificate norm.
    const double gamma = rc.gamma;
    const double qfb = 1.0 - a_fb * (1.0 - gamma);
    for (std::size_t k = 1; k < fb.iterates.size(); ++k) {
      CHECK(vector_norm(fb.iterates[k] - xstar, nrm) <= qfb * vector_norm(fb.iterates[k - 1] - xstar, nrm) + 1e-9);
    }
    for (std::size_t k = 1; k < fs.iterates.size(); ++k) {
      CHECK(vector_norm(fs.iterates[k] - xstar, nrm) <=
            *fs.theoretical_factor * vector_norm(fs.iterates[k - 1] - xstar, nrm) + 1e-9);
    }
    // Peaceman-Rachford contracts its auxiliary variable.
    const Vector c = p.input_bias();
    const Vector zstar = xstar + a_pr * ((xstar - p.A * xstar) - c);
    for (std::size_t k = 1; k < pr.aux_iterates.size(); ++k) {
      CHECK(vector_norm(pr.aux_iterates[k] - zstar, nrm) <=
            *pr.theoretical_factor * vector_norm(pr.aux_iterates[k - 1] - zstar, nrm) + 1e-9);
    }
  }
}

TEST_CASE("recorded residuals are nonincreasing for admissible steps") {
  oracle::Rng rng(63);
  for (int t = 0; t < 60; ++t) {
    const Index n = rng.integer(1, 10);
    const RnnParams p = oracle::random_rnn(rng, n, 2, rng.uniform(0.05, 0.95), rng.uniform(-1.0, 0.99));
    const IterationTrace fs = rnn_forward_step(p, Vector::Zero(n), rnn_forward_step_max_alpha(p), config());
    const IterationTrace fb = rnn_forward_backward(p, Vector::Zero(n), rnn_forward_backward_max_alpha(p), config());
    for (const IterationTrace* tr : {&fs, &fb}) {
      for (std::size_t k = 1; k < tr->residuals.size(); ++k) {
        CHECK(tr->residuals[k] <= tr->residuals[k - 1] + 1e-12);
      }
    }
  }
}

TEST_CASE("penalty gradient is monotone with bounded diagonal slopes") {
  oracle::Rng rng(64);
  for (int t = 0; t < 100; ++t) {
    const Index n = rng.integer(1, 6);
    const double a = rng.uniform(0.05, 0.95);
    const RnnParams p = oracle::random_rnn(rng, n, 2, a, 0.5);
    const SplitProblem sp = rnn_split(p);
    const Vector z = rng.vector(n);
    const Matrix j = sp.g.op.jacobian(z);
    CHECK((j - Matrix(j.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    CHECK(j.diagonal().minCoeff() >= 0.0);
    CHECK(j.diagonal().maxCoeff() <= (1.0 - a) / a + 1e-15);
    CHECK(log_norm(-j, p.norm()) <= 0.0);
    CHECK(sp.f.cert.c == doctest::Approx(1.0 - p.gamma()).epsilon(1e-12));
    CHECK(sp.f.cert.diag_l == doctest::Approx(1.0 - p.A.diagonal().minCoeff()).epsilon(1e-15));
  }
}

TEST_CASE("prox of the penalty at unit step is the activation") {
  oracle::Rng rng(65);
  for (int t = 0; t < 1000; ++t) {
    const double a = rng.uniform(0.01, 0.99);
    const Vector x = rng.vector(5, 4.0);
    CHECK(prox_leaky_penalty(x, 1.0, a) == leaky_relu(x, a));
  }
}

TEST_CASE("inadmissible steps are flagged") {
  oracle::Rng rng(66);
  const RnnParams p = oracle::random_rnn(rng, 6, 2, 0.1, 0.9);
  CHECK_FALSE(rnn_forward_step(p, Vector::Zero(6), 1.5 * rnn_forward_step_max_alpha(p), config(5)).step_admissible);
  CHECK_FALSE(
      rnn_forward_backward(p, Vector::Zero(6), 1.5 * rnn_forward_backward_max_alpha(p), config(5)).step_admissible);
  CHECK_FALSE(
      rnn_peaceman_rachford(p, Vector::Zero(6), 1.5 * rnn_peaceman_rachford_max_alpha(p), config(5)).step_admissible);
  CHECK_THROWS_AS(rnn_forward_step(p, Vector::Zero(6), 0.0, config()), std::invalid_argument);
  CHECK_THROWS_AS(rnn_forward_step(p, Vector::Zero(5), 0.5, config()), DimensionMismatch);
}
