#pragma once

#include "monotone/rnn.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace monotone {

enum class ExportFormat { Csv, Json };

/// Configuration of the randomized RNN equilibrium benchmark.
///
/// Method keys: forward (averaged LeakyReLU forward step), fb (forward-backward
/// with the LeakyReLU prox), pr (Peaceman-Rachford with the cached linear
/// solve), dr (Douglas-Rachford on the same split), prox and cayley (proximal
/// point and Cayley iterations on -F with an inner resolvent solve).
struct BenchmarkConfig {
  std::uint64_t seed = 1;
  Index n = 200;
  Index m = 50;
  double a = 0.1;
  double rho = 0.99;
  std::vector<std::string> methods = {"forward", "fb", "pr"};
  /// Replaces the default step list of a method.
  std::map<std::string, std::vector<double>> alpha_overrides;
  double tol = 1e-10;
  long max_iters = 200000;
  std::string out_path;
  ExportFormat format = ExportFormat::Csv;

  void validate() const;
  nlohmann::json to_json() const;
  /// Reads the keys of to_json(); absent keys keep the values of `defaults`.
  static BenchmarkConfig from_json(const nlohmann::json& j, BenchmarkConfig defaults);
  static BenchmarkConfig from_json(const nlohmann::json& j);
};

const std::vector<std::string>& known_benchmark_methods();

/// Standard normal draws by the Box-Muller transform over std::mt19937_64.
/// Both the engine and the transform are fully specified, so a seed gives
/// identical streams on any conforming build of this library (libm
/// differences in log/cos/sin aside).
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}
  double next();
  double next(double stddev) { return stddev * next(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Draws A, B, b with standard deviation 1/sqrt(n) and u with 1/sqrt(m) (in
/// that order, row-major), sets eta = 1 and projects A onto mu_inf(A) <= rho.
RnnParams generate_instance(const BenchmarkConfig& cfg);

/// Frobenius-nearest matrix with mu_inf <= rho. Each row is solved
/// independently: the diagonal moves by -lambda_i and the off-diagonals are
/// soft-thresholded by lambda_i, where lambda_i >= 0 makes the row constraint
/// active (found exactly from the sorted breakpoints). Feasible rows are
/// returned unchanged.
Matrix project_log_norm_ball(const Matrix& a, double rho);

struct BenchmarkResult {
  BenchmarkConfig config;
  double gamma = 0.0;
  double mu2 = 0.0;
  double min_diagonal = 0.0;
  std::vector<IterationTrace> traces;
  std::vector<double> wall_seconds;

  /// True when every run inside its proven step range converged.
  bool admissible_runs_converged() const;
};

/// Default steps per method: forward and fb use 1/(1 - min_i A_ii) (for
/// forward, the certified 1/diagL), pr uses both a/(1-a) and that step, dr
/// uses a/(1-a) capped by the fb step, prox and cayley use 1/diagL of -F.
std::vector<double> default_alphas(const std::string& method, const RnnParams& p);

/// Generates the instance and runs each requested method from x0 = z0 = 0.
BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);
IterationTrace run_benchmark_method(const std::string& method, const RnnParams& p, double alpha,
                                    const SolverConfig& solver);

/// CSV: header `method,alpha,iter,residual`, one row per recorded residual.
std::string traces_to_csv(const std::vector<IterationTrace>& traces);
/// JSON array of trace objects; `context` adds the config echo, seed, instance
/// summary and wall-clock times.
nlohmann::json traces_to_json(const std::vector<IterationTrace>& traces,
                              const BenchmarkResult* context = nullptr);
std::vector<IterationTrace> traces_from_json(const nlohmann::json& j);

/// Writes the traces to `path`; throws std::runtime_error on I/O failure.
void export_trace(const std::vector<IterationTrace>& traces, const std::string& path,
                  ExportFormat format, const BenchmarkResult* context = nullptr);

nlohmann::json instance_to_json(const RnnParams& p);
RnnParams instance_from_json(const nlohmann::json& j);

}  // namespace monotone
