// Benchmark CLI: generates a seeded contracting RNN instance, runs the
// requested equilibrium iterations and exports residual traces.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 an admissible run did not
// converge.

#include "monotone/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using monotone::Matrix;
using monotone::Vector;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

void print_matrix(const char* name, const Matrix& m) {
  std::printf("  %s =\n", name);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::printf("    [");
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::printf("%s% .15f", j ? ", " : "", m(i, j));
    }
    std::printf("]\n");
  }
}

Matrix column_map(const std::function<Vector(const Vector&)>& f, Eigen::Index n) {
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) out.col(j) = f(Vector::Unit(n, j));
  return out;
}

// Example with a weakly monotone (in l-infinity) linear operator whose
// resolvent and Cayley matrices are known in closed form.
int run_example22() {
  using namespace monotone;
  Matrix a(2, 2);
  a << 2, -2, 1, 1;
  const WeightedNorm linf = WeightedNorm::linf(2);
  const Certificate cert = certify_affine(a, Vector::Zero(2), linf);
  std::printf("A = [[2, -2], [1, 1]]\n");
  std::printf("  -mu_inf(-A) = %.15f  (monotone, not strongly)\n", -log_norm(-a, linf));
  std::printf("  ||A||_inf = %.15f  diagL = %.15f\n", cert.ell, cert.diag_l);
  struct Expected {
    double alpha;
    double lip_j;
    double lip_r;
  };
  bool ok = true;
  for (const Expected e : {Expected{1.0, 0.5, 1.0}, Expected{2.0, 7.0 / 23.0, 25.0 / 23.0}}) {
    const OperatorSpec op = OperatorSpec::affine(a);
    ResolveConfig cfg;
    cfg.alpha = e.alpha;
    const Resolvent j(op, cert, cfg);
    const Matrix jm = column_map([&](const Vector& u) { return j(u); }, 2);
    const Matrix rm = column_map([&](const Vector& u) { return j.reflected(u); }, 2);
    std::printf("alpha = %g\n", e.alpha);
    print_matrix("J", jm);
    print_matrix("R", rm);
    const double lj = induced_norm(jm, linf);
    const double lr = induced_norm(rm, linf);
    std::printf("  Lip(J) = %.15f (expected %.15f)\n", lj, e.lip_j);
    std::printf("  Lip(R) = %.15f (expected %.15f)%s\n", lr, e.lip_r,
                lr > 1.0 + 1e-12 ? "  expansive" : "  nonexpansive");
    ok = ok && std::abs(lj - e.lip_j) <= 1e-12 && std::abs(lr - e.lip_r) <= 1e-12;
  }
  std::printf("%s\n", ok ? "resolvent example check: PASS" : "resolvent example check: FAIL");
  return ok ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace monotone;
  CLI::App app{"Equilibrium benchmark for contracting LeakyReLU recurrent networks"};

  BenchmarkConfig defaults;
  std::string config_path;
  std::uint64_t seed = defaults.seed;
  Index n = defaults.n;
  Index m = defaults.m;
  double a = defaults.a;
  double rho = defaults.rho;
  std::vector<std::string> methods;
  std::vector<std::string> alpha_specs;
  double tol = defaults.tol;
  long max_iters = defaults.max_iters;
  std::string out_path;
  std::string format = "csv";
  std::string save_instance;
  bool example22 = false;

  app.add_option("--config", config_path, "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);
  auto* o_seed = app.add_option("--seed", seed, "RNG seed");
  auto* o_n = app.add_option("--n", n, "state dimension")->check(CLI::PositiveNumber);
  auto* o_m = app.add_option("--m", m, "input dimension")->check(CLI::PositiveNumber);
  auto* o_a = app.add_option("--a", a, "LeakyReLU slope in (0,1)");
  auto* o_rho = app.add_option("--rho", rho, "cap on mu_inf(A)");
  auto* o_methods = app.add_option("--methods", methods, "forward,fb,pr,dr,prox,cayley")
                        ->delimiter(',');
  auto* o_alpha = app.add_option("--alpha", alpha_specs, "per-method step, e.g. pr=0.5 (repeatable)");
  auto* o_tol = app.add_option("--tol", tol, "stopping residual");
  auto* o_iters = app.add_option("--max-iters", max_iters, "iteration cap per run");
  auto* o_out = app.add_option("--out", out_path, "output path (stdout when empty)");
  auto* o_format = app.add_option("--format", format, "csv or json")
                       ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--save-instance", save_instance, "write the generated instance as JSON");
  app.add_flag("--example22", example22, "verify the 2x2 resolvent example and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (example22) return run_example22();

  BenchmarkConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot read config '" + config_path + "'");
      cfg = BenchmarkConfig::from_json(nlohmann::json::parse(in), cfg);
    }
    if (*o_seed) cfg.seed = seed;
    if (*o_n) cfg.n = n;
    if (*o_m) cfg.m = m;
    if (*o_a) cfg.a = a;
    if (*o_rho) cfg.rho = rho;
    if (*o_methods) cfg.methods = methods;
    if (*o_tol) cfg.tol = tol;
    if (*o_iters) cfg.max_iters = max_iters;
    if (*o_out) cfg.out_path = out_path;
    if (*o_format) cfg.format = format == "json" ? ExportFormat::Json : ExportFormat::Csv;
    if (*o_alpha) {
      std::map<std::string, std::vector<double>> overrides;
      for (const std::string& spec : alpha_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--alpha expects method=value");
        std::size_t used = 0;
        const std::string value = spec.substr(eq + 1);
        const double alpha = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("bad step value in '" + spec + "'");
        overrides[spec.substr(0, eq)].push_back(alpha);
      }
      for (auto& [name, values] : overrides) cfg.alpha_overrides[name] = std::move(values);
    }
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  BenchmarkResult result;
  try {
    if (!save_instance.empty()) {
      std::ofstream inst(save_instance);
      if (!inst) throw std::runtime_error("cannot open '" + save_instance + "'");
      inst << instance_to_json(generate_instance(cfg)).dump() << '\n';
      if (!inst) throw std::runtime_error("failed writing '" + save_instance + "'");
    }
    result = run_benchmark(cfg);
    if (cfg.out_path.empty()) {
      if (cfg.format == ExportFormat::Csv) {
        std::cout << traces_to_csv(result.traces);
      } else {
        std::cout << traces_to_json(result.traces, &result).dump(2) << '\n';
      }
    } else {
      export_trace(result.traces, cfg.out_path, cfg.format, &result);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::fprintf(stderr, "instance: n=%ld m=%ld gamma=%.6f mu2=%.6f min_i A_ii=%.6f\n",
               static_cast<long>(cfg.n), static_cast<long>(cfg.m), result.gamma, result.mu2,
               result.min_diagonal);
  for (std::size_t i = 0; i < result.traces.size(); ++i) {
    const IterationTrace& t = result.traces[i];
    std::fprintf(stderr,
                 "  %-7s alpha=%.6f iters=%-7ld residual=%.3e converged=%d admissible=%d "
                 "factor(theory)=%.6f factor(measured)=%.6f  %.3fs\n",
                 t.label.c_str(), t.alpha, t.iterations(), t.residuals.back(), t.converged,
                 t.step_admissible, t.theoretical_factor.value_or(0.0), t.measured_factor(),
                 result.wall_seconds[i]);
  }
  return result.admissible_runs_converged() ? kExitOk : kExitNotConverged;
}
