#include "sparse_bandit_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "sparse_bandit/cb2.hpp"
#include "sparse_bandit/csv.hpp"
#include "sparse_bandit/ellipsoid.hpp"
#include "sparse_bandit/errors.hpp"
#include "sparse_bandit/gradient.hpp"
#include "sparse_bandit/harness.hpp"
#include "sparse_bandit/rng.hpp"
#include "sparse_bandit/slucb.hpp"

namespace sparse_bandit::cli {

namespace fs = std::filesystem;

const Schema& bandit_schema() {
  static const Schema schema{
      {"run.name", "bandit", "experiment name (first output path component)"},
      {"run.base_seed", "1", "root seed of every replication"},
      {"bandit.K", "", "ambient dimensions, comma-separated", true},
      {"bandit.n", "", "horizons, comma-separated", true},
      {"bandit.S", "1", "sparsity levels, comma-separated"},
      {"bandit.seeds", "", "replications per cell", true},
      {"bandit.algorithms", "slucb", "slucb, cb2_full, cb2_oracle_support, random"},
      {"bandit.theta_norm", "1", "l2 norm of theta in every instance"},
      {"bandit.theta_pattern", "equal", "equal or decaying nonzero magnitudes"},
      {"bandit.sigma", "0.1", "per-coordinate noise scale"},
      {"bandit.noise", "uniform", "uniform or rademacher"},
      {"slucb.delta", "", "confidence parameter (also used by cb2)", true},
      {"slucb.sigma2_bar", "", "bound on ||sigma||_2, or auto for the true value", true},
      {"slucb.theta2_bar", "", "bound on ||theta||_2, or auto for the true value", true},
  };
  return schema;
}

const Schema& gradient_schema() {
  static const Schema schema{
      {"run.name", "gradient", "experiment name (first output path component)"},
      {"run.base_seed", "1", "root seed of every replication"},
      {"gradient.n", "100", "steps per ascent"},
      {"gradient.ratios", "2,10,100", "K/n ratios, comma-separated"},
      {"gradient.seeds", "50", "replications per ratio"},
      {"gradient.epsilon", "1", "step length"},
      {"gradient.u0", "0", "value of every start coordinate"},
      {"gradient.eval_noise", "0", "half-width of uniform noise on f evaluations"},
      {"gradient.theta2_rule", "gradient_norm", "gradient_norm, max_abs or fixed"},
      {"gradient.trace_seed", "0", "replication written by --trace"},
      {"slucb.delta", "0.01", "confidence parameter"},
      {"slucb.sigma2_bar", "0", "bound on the reward noise norm"},
      {"slucb.theta2_bar", "0", "used when gradient.theta2_rule=fixed"},
  };
  return schema;
}

Config load_resolved(const RunOptions& options, const Schema& schema) {
  Config config = options.config_path ? load_config(*options.config_path, schema) : Config{};
  for (const auto& o : options.overrides) apply_override(config, o, schema);
  return resolve(config, schema);
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

[[noreturn]] void config_fail(const Config& c, const std::string& key, const std::string& what) {
  throw ConfigError(c.origin(key) + ": key '" + key + "': " + what);
}

// Core validation failures reached from config values are config errors.
template <typename F>
auto as_config_error(F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::size_t> positive_sizes(const Config& c, const std::string& key, bool allow_zero) {
  std::vector<std::size_t> out;
  for (long v : c.get_long_list(key)) {
    if (v < (allow_zero ? 0 : 1)) config_fail(c, key, "values must be " +
                                                  std::string(allow_zero ? "nonnegative" : "positive"));
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

ExperimentSpec bandit_spec(const Config& c, int jobs) {
  ExperimentSpec s;
  s.name = c.get_string("run.name");
  s.base_seed = static_cast<std::uint64_t>(c.get_long("run.base_seed"));
  s.K = positive_sizes(c, "bandit.K", false);
  s.n = c.get_long_list("bandit.n");
  s.S = positive_sizes(c, "bandit.S", true);
  s.seeds = c.get_long("bandit.seeds");
  s.algorithms.clear();
  for (const auto& a : c.get_string_list("bandit.algorithms")) {
    try {
      s.algorithms.push_back(parse_algorithm(a));
    } catch (const InputError& e) {
      config_fail(c, "bandit.algorithms", e.what());
    }
  }
  s.theta_norm = c.get_double("bandit.theta_norm");
  try {
    s.pattern = parse_theta_pattern(c.get_string("bandit.theta_pattern"));
  } catch (const InputError& e) {
    config_fail(c, "bandit.theta_pattern", e.what());
  }
  s.sigma_scale = c.get_double("bandit.sigma");
  try {
    s.noise = parse_noise_kind(c.get_string("bandit.noise"));
  } catch (const InputError& e) {
    config_fail(c, "bandit.noise", e.what());
  }
  s.delta = c.get_double("slucb.delta");
  s.sigma2_bar = c.get_double_or_auto("slucb.sigma2_bar");
  s.theta2_bar = c.get_double_or_auto("slucb.theta2_bar");
  s.jobs = jobs;
  as_config_error([&] {
    s.validate();
    return 0;
  });
  return s;
}

}  // namespace

fs::path run_directory(const RunOptions& options, const Config& config) {
  return options.out_dir / config.get_string("run.name") /
         (options.tag ? *options.tag : utc_timestamp());
}

int cmd_bandit(const RunOptions& options, std::ostream& log, std::ostream& err) {
  Config config;
  ExperimentSpec spec;
  try {
    config = load_resolved(options, bandit_schema());
    spec = bandit_spec(config, resolve_jobs(options.jobs));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    const fs::path dir = run_directory(options, config);
    fs::create_directories(dir);
    write_file(dir / "config.resolved", serialize(config));

    const ExperimentResult result = run_experiment(spec);
    long failed_cells = 0;
    for (const auto& c : result.cells) {
      if (c.failures > 0) {
        ++failed_cells;
        log << "cell " << c.cell_id << " failed: " << c.failure << '\n';
      } else {
        log << "cell " << c.cell_id << " done: " << c.count
            << " replications, mean regret " << format_double(c.mean_regret) << '\n';
      }
    }

    std::ostringstream raw, agg;
    write_raw_csv(raw, result.raw);
    write_aggregate_csv(agg, result.cells);
    write_file(dir / "raw.csv", raw.str());
    write_file(dir / "aggregate.csv", agg.str());

    // Mean regret against n, one curve per (algorithm, K, S).
    std::map<std::string, std::vector<std::pair<double, double>>> curves;
    for (const auto& c : result.cells) {
      if (c.failures > 0) continue;
      const std::string name = std::string(to_string(c.cell.algorithm)) + "_K" +
                               std::to_string(c.cell.K) + "_S" + std::to_string(c.cell.S);
      curves[name].emplace_back(static_cast<double>(c.cell.n), c.mean_regret);
    }
    for (const auto& [name, pts] : curves) write_plot_data(dir, "plots", name, pts);

    log << "wrote " << dir.string() << '\n';
    if (failed_cells > 0) {
      err << failed_cells << " cell(s) failed\n";
      return kRuntimeFailure;
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

int cmd_gradient(const RunOptions& options, std::ostream& log, std::ostream& err) {
  Config config;
  Figure4Options f4;
  long trace_seed = 0;
  try {
    config = load_resolved(options, gradient_schema());
    const auto& c = config;
    f4.base_seed = static_cast<std::uint64_t>(c.get_long("run.base_seed"));
    f4.n = c.get_long("gradient.n");
    if (f4.n < 1) config_fail(c, "gradient.n", "must be positive");
    f4.ratios = c.get_double_list("gradient.ratios");
    for (double r : f4.ratios) {
      const double K = r * static_cast<double>(f4.n);
      if (!(r > 0.0) || std::abs(K - std::round(K)) > 1e-9 * K) {
        config_fail(c, "gradient.ratios", "ratio * n must be a positive integer");
      }
      if (std::llround(K) < 10) {
        config_fail(c, "gradient.ratios",
                    "K = ratio * n = " + std::to_string(std::llround(K)) +
                        " is below the 10 relevant dimensions of the objective");
      }
    }
    f4.seeds = c.get_long("gradient.seeds");
    if (f4.seeds < 1) config_fail(c, "gradient.seeds", "must be positive");
    f4.epsilon = c.get_double("gradient.epsilon");
    if (!(f4.epsilon > 0.0)) config_fail(c, "gradient.epsilon", "must be positive");
    f4.u0_value = c.get_double("gradient.u0");
    f4.eval_noise = c.get_double("gradient.eval_noise");
    if (f4.eval_noise < 0.0) config_fail(c, "gradient.eval_noise", "must be nonnegative");
    const std::string rule = c.get_string("gradient.theta2_rule");
    if (rule == "gradient_norm") {
      f4.theta2_rule = Theta2BarRule::GradientNorm;
    } else if (rule == "max_abs") {
      f4.theta2_rule = Theta2BarRule::GradientMaxAbs;
    } else if (rule == "fixed") {
      f4.theta2_rule = Theta2BarRule::Fixed;
    } else {
      config_fail(c, "gradient.theta2_rule", "expected gradient_norm, max_abs or fixed");
    }
    f4.delta = c.get_double("slucb.delta");
    if (!(f4.delta > 0.0 && f4.delta < 1.0)) config_fail(c, "slucb.delta", "must lie in (0,1)");
    f4.sigma2_bar = c.get_double("slucb.sigma2_bar");
    if (f4.sigma2_bar < 0.0) config_fail(c, "slucb.sigma2_bar", "must be nonnegative");
    f4.theta2_bar = c.get_double("slucb.theta2_bar");
    if (f4.theta2_bar < 0.0) config_fail(c, "slucb.theta2_bar", "must be nonnegative");
    trace_seed = c.get_long("gradient.trace_seed");
    if (trace_seed < 0 || trace_seed >= f4.seeds) {
      config_fail(c, "gradient.trace_seed", "must lie in [0, gradient.seeds)");
    }
    f4.jobs = resolve_jobs(options.jobs);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    const fs::path dir = run_directory(options, config);
    fs::create_directories(dir);
    write_file(dir / "config.resolved", serialize(config));

    const auto rows = figure4_experiment(f4);
    std::ostringstream csv;
    write_figure4_csv(csv, rows);
    write_file(dir / "figure4.csv", csv.str());
    for (const auto& r : rows) {
      log << "K/n=" << format_double(r.ratio) << ' ' << r.strategy << ": mean improvement "
          << format_double(r.mean) << " (stderr " << format_double(r.stderr_) << ")\n";
    }

    if (options.trace) {
      // Same seeds as the table, so the trace is one of its replications.
      const auto s = static_cast<std::uint64_t>(trace_seed);
      for (double ratio : f4.ratios) {
        const auto K = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(f4.n)));
        const ObjectiveFunction f = quadratic_sparse(K);
        AscentConfig cfg;
        cfg.epsilon = f4.epsilon;
        cfg.n = f4.n;
        cfg.eval_noise = f4.eval_noise;
        cfg.u0 = Vector::Constant(static_cast<Eigen::Index>(K), f4.u0_value);
        RngStream rng_slucb(replication_seed(f4.base_seed, 2 * K, s));
        RngStream rng_brd(replication_seed(f4.base_seed, 2 * K + 1, s));
        const Trajectory trajectories[] = {
            run_oracle_gradient(f, cfg),
            run_slucb_ascent(f, cfg, ascent_slucb_config(f, cfg, f4), rng_slucb),
            run_best_random_direction(f, cfg, rng_brd),
        };
        const char* names[] = {"ogs", "slucb", "brd"};
        for (int i = 0; i < 3; ++i) {
          std::ostringstream os;
          write_trajectory_csv(os, trajectories[i]);
          write_file(dir / ("trace_K" + std::to_string(K) + "_" + names[i] + ".csv"), os.str());
        }
      }
    }
    log << "wrote " << dir.string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

namespace {

struct SuiteResult {
  bool pass;
  std::string detail;
};

Matrix random_spd(Eigen::Index d, double cond, RngStream& rng) {
  Matrix G(d, d);
  for (auto& x : G.reshaped()) x = rng.normal();
  const Matrix Q = Eigen::HouseholderQR<Matrix>(G).householderQ();
  Vector lambda(d);
  for (auto& l : lambda) l = std::pow(cond, rng.uniform01());
  lambda[0] = 1.0;
  const Matrix A = Q * lambda.asDiagonal() * Q.transpose();
  return 0.5 * (A + A.transpose());
}

SuiteResult subproblem_suite(const SelftestOptions& o) {
  SubproblemOptions solver;
  solver.tolerance = o.subproblem_tolerance;
  RngStream rng(11);
  int bad = 0, total = 0;
  double worst = INFINITY;
  const double betas[] = {0.1, 1.0, 10.0};
  for (Eigen::Index d = 1; d <= 3; ++d) {
    for (int e = 0; e < 30; ++e) {
      const Matrix A = random_spd(d, 1e3, rng);
      Vector c(d);
      for (auto& x : c) x = rng.normal();
      const double beta = betas[e % 3];
      const auto sol = max_norm_in_ellipsoid(A, c, beta, solver);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
      const Matrix M = eig.eigenvectors() *
                       eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * std::sqrt(beta);
      double best = 0.0;
      for (int s = 0; s < o.samples; ++s) {
        best = std::max(best, (c + M * rng.unit_sphere(static_cast<std::size_t>(d))).norm());
      }
      const Vector r = sol.nu_star - c;
      const bool on_boundary = std::abs(r.dot(A * r) - beta) <= 1e-6 * beta;
      worst = std::min(worst, (sol.value - best) / best);
      ++total;
      if (sol.value < best * (1 - 1e-6) || !on_boundary) ++bad;
    }
  }
  Matrix A(2, 2);
  A << 4, 0, 0, 1;
  Vector c(2);
  c << 0.3, 0;
  const double hand = max_norm_in_ellipsoid(A, c, 1.0, solver).value;
  const bool hand_ok = std::abs(hand - 1.0583005244258362) < 1e-9;
  std::ostringstream os;
  os << bad << "/" << total << " ellipsoids below random search or off the boundary, worst margin "
     << worst << ", hand case " << format_double(hand);
  return {bad == 0 && hand_ok, os.str()};
}

SuiteResult estimator_suite() {
  RngStream rng(12);
  const std::size_t K = 16;
  double worst = 0.0;
  for (int run = 0; run < 20; ++run) {
    SupportExplorationState s(K);
    std::vector<Vector> arms;
    std::vector<double> rewards;
    for (int t = 0; t < 50; ++t) {
      arms.push_back(sample_exploring_arm(K, rng));
      rewards.push_back(rng.normal());
      s = update_estimate(s, arms.back(), rewards.back());
    }
    for (std::size_t k = 0; k < K; ++k) {
      long double sum = 0.0L;
      for (std::size_t t = 0; t < arms.size(); ++t) {
        sum += static_cast<long double>(arms[t][static_cast<Eigen::Index>(k)]) * rewards[t];
      }
      const long double direct = sum * K / static_cast<long double>(arms.size());
      const double err = std::abs(static_cast<double>(direct) - s.theta_hat()[static_cast<Eigen::Index>(k)]);
      worst = std::max(worst, err / std::max(1.0, std::abs(static_cast<double>(direct))));
    }
  }
  const double h = 1 / std::sqrt(2.0);
  Vector x1(2), x2(2);
  x1 << h, h;
  x2 << h, -h;
  SupportExplorationState s(2);
  s.add(x1, h);
  s.add(x2, h);
  const double orth = std::max(std::abs(s.theta_hat()[0] - 1.0), std::abs(s.theta_hat()[1]));
  std::ostringstream os;
  os << "max relative deviation from direct recomputation " << worst
     << ", orthogonal design error " << orth;
  return {worst <= 1e-12 && orth <= 1e-12, os.str()};
}

SuiteResult cb2_update_suite() {
  RngStream rng(13);
  const std::size_t d = 4;
  auto s = EllipsoidState::initial(d, 1.0);
  Matrix A = Matrix::Identity(d, d);
  Vector xr = Vector::Zero(d);
  for (int t = 0; t < 200; ++t) {
    const Vector x = rng.unit_sphere(d);
    const double r = rng.normal();
    s = update(s, x, r);
    A += x * x.transpose();
    xr += x * r;
  }
  const Vector direct = A.ldlt().solve(xr);
  const double err = (s.theta_hat - direct).norm() / std::max(1e-300, direct.norm());
  std::ostringstream os;
  os << "relative deviation from direct least squares " << err;
  return {err <= 1e-8 && (s.A - A).norm() <= 1e-8 * A.norm(), os.str()};
}

SuiteResult gradient_suite() {
  const auto f = quadratic_sparse(20);
  RngStream rng(14);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Vector u(20);
    for (auto& x : u) x = 30 * rng.normal();
    const Vector g = f.oracle_gradient(u);
    Vector fd(20);
    const double step = 1e-3;
    for (Eigen::Index k = 0; k < 20; ++k) {
      Vector up = u, dn = u;
      up[k] += step;
      dn[k] -= step;
      fd[k] = (f.eval(up) - f.eval(dn)) / (2 * step);
    }
    worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
  }
  std::ostringstream os;
  os << "max relative finite-difference mismatch " << worst;
  return {worst <= 1e-6, os.str()};
}

}  // namespace

int cmd_selftest(const SelftestOptions& options, std::ostream& log) {
  struct Named {
    const char* name;
    SuiteResult result;
  };
  std::vector<Named> suites;
  auto run = [&](const char* name, auto&& fn) {
    try {
      suites.push_back({name, fn()});
    } catch (const std::exception& e) {
      suites.push_back({name, {false, std::string("threw: ") + e.what()}});
    }
    const auto& s = suites.back();
    log << "suite " << s.name << ": " << (s.result.pass ? "PASS" : "FAIL") << "  "
        << s.result.detail << '\n';
  };
  run("subproblem", [&] { return subproblem_suite(options); });
  run("estimator", [] { return estimator_suite(); });
  run("cb2_update", [] { return cb2_update_suite(); });
  run("gradient", [] { return gradient_suite(); });

  std::string failing;
  for (const auto& s : suites) {
    if (!s.result.pass) failing += std::string(failing.empty() ? "" : ", ") + s.name;
  }
  if (!failing.empty()) {
    log << "selftest failed: " << failing << '\n';
    return kRuntimeFailure;
  }
  log << "selftest passed\n";
  return kOk;
}

}  // namespace sparse_bandit::cli
