#include "monotone/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace monotone {

using nlohmann::json;

namespace {

const char* format_name(ExportFormat f) { return f == ExportFormat::Csv ? "csv" : "json"; }

ExportFormat parse_format(const std::string& s) {
  if (s == "csv") return ExportFormat::Csv;
  if (s == "json") return ExportFormat::Json;
  throw std::invalid_argument("unknown export format '" + s + "' (expected csv or json)");
}

json vector_to_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Index rows, Index cols) {
  if (static_cast<Index>(j.size()) != rows) throw DimensionMismatch("matrix row count mismatch");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != cols) throw DimensionMismatch("matrix column count mismatch");
    for (Index k = 0; k < cols; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Exact root of (d - lambda) + sum_j max(|o_j| - lambda, 0) = rho for a row
// whose constraint is violated at lambda = 0.
double row_threshold(double diag, std::vector<double> off_abs, double rho) {
  std::sort(off_abs.begin(), off_abs.end(), std::greater<>());
  const std::size_t count = off_abs.size();
  double prefix = 0.0;
  for (std::size_t k = 0; k <= count; ++k) {
    if (k > 0) prefix += off_abs[k - 1];
    const double lambda = (diag + prefix - rho) / static_cast<double>(k + 1);
    const bool above_next = k == count || off_abs[k] <= lambda;
    const bool below_last = k == 0 || off_abs[k - 1] > lambda;
    if (above_next && below_last) return std::max(lambda, 0.0);
  }
  // Unreachable for finite input: g is continuous and strictly decreasing.
  throw std::logic_error("row_threshold: no breakpoint segment found");
}

}  // namespace

const std::vector<std::string>& known_benchmark_methods() {
  static const std::vector<std::string> methods = {"forward", "fb", "pr", "dr", "prox", "cayley"};
  return methods;
}

void BenchmarkConfig::validate() const {
  if (n < 1 || m < 1) throw std::invalid_argument("n and m must be at least 1");
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("a must lie in (0, 1)");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iters <= 0) throw std::invalid_argument("max_iters must be positive");
  const auto& known = known_benchmark_methods();
  auto check = [&](const std::string& name) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw std::invalid_argument("unknown method '" + name + "'");
    }
  };
  for (const auto& name : methods) check(name);
  for (const auto& [name, alphas] : alpha_overrides) {
    check(name);
    for (double alpha : alphas) {
      if (!(alpha > 0.0)) throw std::invalid_argument("step sizes must be positive");
    }
  }
}

json BenchmarkConfig::to_json() const {
  json alphas = json::object();
  for (const auto& [name, values] : alpha_overrides) alphas[name] = values;
  return json{{"seed", seed},
              {"n", n},
              {"m", m},
              {"a", a},
              {"rho", rho},
              {"methods", methods},
              {"alpha", alphas},
              {"tol", tol},
              {"max_iters", max_iters},
              {"out", out_path},
              {"format", format_name(format)}};
}

BenchmarkConfig BenchmarkConfig::from_json(const json& j) { return from_json(j, BenchmarkConfig{}); }

BenchmarkConfig BenchmarkConfig::from_json(const json& j, BenchmarkConfig cfg) {
  if (!j.is_object()) throw std::invalid_argument("benchmark config must be a JSON object");
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("n")) cfg.n = j.at("n").get<Index>();
  if (j.contains("m")) cfg.m = j.at("m").get<Index>();
  if (j.contains("a")) cfg.a = j.at("a").get<double>();
  if (j.contains("rho")) cfg.rho = j.at("rho").get<double>();
  if (j.contains("methods")) cfg.methods = j.at("methods").get<std::vector<std::string>>();
  if (j.contains("alpha")) {
    cfg.alpha_overrides.clear();
    for (const auto& [name, value] : j.at("alpha").items()) {
      cfg.alpha_overrides[name] =
          value.is_array() ? value.get<std::vector<double>>() : std::vector<double>{value.get<double>()};
    }
  }
  if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
  if (j.contains("max_iters")) cfg.max_iters = j.at("max_iters").get<long>();
  if (j.contains("out")) cfg.out_path = j.at("out").get<std::string>();
  if (j.contains("format")) cfg.format = parse_format(j.at("format").get<std::string>());
  return cfg;
}

double GaussianSource::next() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  constexpr double kScale = 0x1.0p-53;
  // u1 in (0, 1] keeps the logarithm finite; u2 in [0, 1).
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * kScale;
  const double u2 = static_cast<double>(engine_() >> 11) * kScale;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Matrix project_log_norm_ball(const Matrix& a, double rho) {
  if (a.rows() != a.cols()) throw DimensionMismatch("projection needs a square matrix");
  const Index n = a.rows();
  Matrix out = a;
  std::vector<double> off_abs;
  off_abs.reserve(static_cast<std::size_t>(std::max<Index>(n - 1, 0)));
  for (Index i = 0; i < n; ++i) {
    off_abs.clear();
    double row = a(i, i);
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      off_abs.push_back(std::abs(a(i, j)));
      row += off_abs.back();
    }
    if (row <= rho) continue;
    const double lambda = row_threshold(a(i, i), off_abs, rho);
    out(i, i) = a(i, i) - lambda;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double v = a(i, j);
      out(i, j) = std::copysign(std::max(std::abs(v) - lambda, 0.0), v);
    }
  }
  return out;
}

RnnParams generate_instance(const BenchmarkConfig& cfg) {
  cfg.validate();
  GaussianSource rng(cfg.seed);
  const Index n = cfg.n;
  const Index m = cfg.m;
  const double sd_n = 1.0 / std::sqrt(static_cast<double>(n));
  const double sd_m = 1.0 / std::sqrt(static_cast<double>(m));

  RnnParams p;
  p.A.resize(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) p.A(i, j) = rng.next(sd_n);
  p.B.resize(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) p.B(i, j) = rng.next(sd_n);
  p.b.resize(n);
  for (Index i = 0; i < n; ++i) p.b(i) = rng.next(sd_n);
  p.u.resize(m);
  for (Index i = 0; i < m; ++i) p.u(i) = rng.next(sd_m);
  p.a = cfg.a;
  p.eta = Vector::Ones(n);
  p.A = project_log_norm_ball(p.A, cfg.rho);
  return p;
}

bool BenchmarkResult::admissible_runs_converged() const {
  return std::all_of(traces.begin(), traces.end(), [](const IterationTrace& t) {
    return !t.step_admissible || t.converged;
  });
}

std::vector<double> default_alphas(const std::string& method, const RnnParams& p) {
  if (method == "forward") return {rnn_forward_step_max_alpha(p)};
  if (method == "fb") return {rnn_forward_backward_max_alpha(p)};
  if (method == "pr") {
    return {rnn_peaceman_rachford_max_alpha(p), rnn_forward_backward_max_alpha(p)};
  }
  if (method == "dr") return {rnn_peaceman_rachford_max_alpha(p)};
  if (method == "prox" || method == "cayley") return {1.0 / rnn_certificate(p).cert.diag_l};
  throw std::invalid_argument("unknown method '" + method + "'");
}

IterationTrace run_benchmark_method(const std::string& method, const RnnParams& p, double alpha,
                                    const SolverConfig& solver) {
  SolverConfig cfg = solver;
  cfg.alpha = alpha;
  const Vector origin = Vector::Zero(p.n());
  IterationTrace trace;
  if (method == "forward") {
    trace = rnn_forward_step(p, origin, alpha, cfg);
  } else if (method == "fb") {
    trace = rnn_forward_backward(p, origin, alpha, cfg);
  } else if (method == "pr") {
    trace = rnn_peaceman_rachford(p, origin, alpha, cfg);
  } else if (method == "dr") {
    trace = douglas_rachford(rnn_split(p), origin, cfg);
  } else if (method == "prox" || method == "cayley") {
    const OperatorSpec op = rnn_operator(p);
    const Certificate cert = rnn_certificate(p).cert;
    trace = method == "prox" ? proximal_point_solve(op, cert, origin, cfg)
                             : cayley_solve(op, cert, origin, cfg, false);
  } else {
    throw std::invalid_argument("unknown method '" + method + "'");
  }
  trace.label = method;
  return trace;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  BenchmarkResult result;
  result.config = cfg;
  const RnnParams p = generate_instance(cfg);
  result.gamma = p.gamma();
  result.mu2 = log_norm(p.A, WeightedNorm::l2(p.n()));
  result.min_diagonal = p.A.diagonal().minCoeff();
  if (!(result.gamma < 1.0)) {
    throw NotContracting("generated instance has mu_inf(A) >= 1; choose rho < 1");
  }

  SolverConfig solver;
  solver.tol = cfg.tol;
  solver.max_iters = cfg.max_iters;
  for (const std::string& method : cfg.methods) {
    const auto it = cfg.alpha_overrides.find(method);
    const std::vector<double> alphas =
        it != cfg.alpha_overrides.end() ? it->second : default_alphas(method, p);
    for (double alpha : alphas) {
      const auto start = std::chrono::steady_clock::now();
      result.traces.push_back(run_benchmark_method(method, p, alpha, solver));
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      result.wall_seconds.push_back(elapsed.count());
    }
  }
  return result;
}

std::string traces_to_csv(const std::vector<IterationTrace>& traces) {
  std::string out = "method,alpha,iter,residual\n";
  for (const IterationTrace& t : traces) {
    const std::string prefix = t.label + "," + format_double(t.alpha, "%.17g") + ",";
    for (std::size_t k = 0; k < t.residuals.size(); ++k) {
      out += prefix;
      out += std::to_string(k);
      out += ',';
      out += format_double(t.residuals[k], "%.17e");
      out += '\n';
    }
  }
  return out;
}

json traces_to_json(const std::vector<IterationTrace>& traces, const BenchmarkResult* context) {
  json arr = json::array();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const IterationTrace& t = traces[i];
    json obj{{"method", t.label},
             {"kind", std::string(to_string(t.method))},
             {"alpha", t.alpha},
             {"iterations", t.iterations()},
             {"converged", t.converged},
             {"step_admissible", t.step_admissible},
             {"theoretical_factor", t.theoretical_factor ? json(*t.theoretical_factor) : json(nullptr)},
             {"measured_factor", t.measured_factor()},
             {"residuals", t.residuals},
             {"final_x", vector_to_json(t.final_x)}};
    if (context) {
      obj["seed"] = context->config.seed;
      obj["config"] = context->config.to_json();
      obj["instance"] = json{{"gamma", context->gamma},
                             {"mu2", context->mu2},
                             {"min_diagonal", context->min_diagonal},
                             {"sampling",
                              "A, B, b ~ N(0, sd = 1/sqrt(n)); u ~ N(0, sd = 1/sqrt(m)); "
                              "Box-Muller over mt19937_64; A projected onto mu_inf(A) <= rho"}};
      if (i < context->wall_seconds.size()) obj["wall_clock_seconds"] = context->wall_seconds[i];
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

std::vector<IterationTrace> traces_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("trace document must be a JSON array");
  std::vector<IterationTrace> traces;
  for (const json& obj : j) {
    IterationTrace t;
    t.label = obj.at("method").get<std::string>();
    const std::string kind = obj.value("kind", std::string());
    for (int m = 0; m <= static_cast<int>(Method::RnnPeacemanRachford); ++m) {
      if (to_string(static_cast<Method>(m)) == kind) t.method = static_cast<Method>(m);
    }
    t.alpha = obj.at("alpha").get<double>();
    t.converged = obj.at("converged").get<bool>();
    t.step_admissible = obj.value("step_admissible", true);
    if (obj.contains("theoretical_factor") && !obj.at("theoretical_factor").is_null()) {
      t.theoretical_factor = obj.at("theoretical_factor").get<double>();
    }
    t.residuals = obj.at("residuals").get<std::vector<double>>();
    if (obj.contains("final_x")) t.final_x = vector_from_json(obj.at("final_x"));
    traces.push_back(std::move(t));
  }
  return traces;
}

void export_trace(const std::vector<IterationTrace>& traces, const std::string& path,
                  ExportFormat format, const BenchmarkResult* context) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (format == ExportFormat::Csv) {
    out << traces_to_csv(traces);
  } else {
    out << traces_to_json(traces, context).dump(2) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

json instance_to_json(const RnnParams& p) {
  return json{{"n", p.n()},
              {"m", p.m()},
              {"a", p.a},
              {"A", matrix_to_json(p.A)},
              {"B", matrix_to_json(p.B)},
              {"b", vector_to_json(p.b)},
              {"u", vector_to_json(p.u)},
              {"eta", vector_to_json(p.eta)}};
}

RnnParams instance_from_json(const json& j) {
  RnnParams p;
  const Index n = j.at("n").get<Index>();
  const Index m = j.at("m").get<Index>();
  p.a = j.at("a").get<double>();
  p.A = matrix_from_json(j.at("A"), n, n);
  p.B = matrix_from_json(j.at("B"), n, m);
  p.b = vector_from_json(j.at("b"));
  p.u = vector_from_json(j.at("u"));
  p.eta = j.contains("eta") ? vector_from_json(j.at("eta")) : Vector::Ones(n);
  p.validate();
  return p;
}

}  // namespace monotone
