#include "sparse_bandit/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "parallel.hpp"
#include "sparse_bandit/cb2.hpp"
#include "sparse_bandit/csv.hpp"
#include "sparse_bandit/errors.hpp"
#include "sparse_bandit/slucb.hpp"
#include "sparse_bandit/subspace.hpp"

namespace sparse_bandit {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Slucb:
      return "slucb";
    case Algorithm::Cb2Full:
      return "cb2_full";
    case Algorithm::Cb2OracleSupport:
      return "cb2_oracle_support";
    case Algorithm::Random:
      return "random";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "slucb") return Algorithm::Slucb;
  if (name == "cb2_full") return Algorithm::Cb2Full;
  if (name == "cb2_oracle_support") return Algorithm::Cb2OracleSupport;
  if (name == "random") return Algorithm::Random;
  throw InputError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(ThetaPattern pattern) {
  return pattern == ThetaPattern::Equal ? "equal" : "decaying";
}

ThetaPattern parse_theta_pattern(std::string_view name) {
  if (name == "equal") return ThetaPattern::Equal;
  if (name == "decaying") return ThetaPattern::Decaying;
  throw InputError("unknown theta pattern '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
  if (K.empty() || n.empty() || S.empty() || algorithms.empty()) {
    throw InputError("experiment grid needs at least one K, n, S, algorithm");
  }
  for (auto k : K) {
    if (k < 1) throw InputError("K must be positive");
    for (auto s : S) {
      if (s > k) throw InputError("S must not exceed K");
    }
  }
  for (auto v : n) {
    if (v < 1) throw InputError("n must be positive");
  }
  if (!(theta_norm >= 0.0)) throw InputError("theta_norm must be nonnegative");
  if (!(sigma_scale >= 0.0)) throw InputError("sigma must be nonnegative");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0,1)");
  if (seeds < 1) throw InputError("seeds must be positive");
  if (theta2_bar && !(*theta2_bar >= 0.0)) {
    throw InputError("theta2_bar must be nonnegative");
  }
  if (sigma2_bar && !(*sigma2_bar >= 0.0)) {
    throw InputError("sigma2_bar must be nonnegative");
  }
}

std::string Cell::id() const {
  std::ostringstream os;
  os << "alg=" << to_string(algorithm) << ";K=" << K << ";n=" << n
     << ";S=" << S;
  return os.str();
}

std::vector<Cell> expand_grid(const ExperimentSpec& spec) {
  auto sorted_unique = [](auto v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto Ks = sorted_unique(spec.K);
  const auto ns = sorted_unique(spec.n);
  const auto Ss = sorted_unique(spec.S);
  const auto algs = sorted_unique(spec.algorithms);
  std::vector<Cell> cells;
  for (auto a : algs) {
    for (auto k : Ks) {
      for (auto n : ns) {
        for (auto s : Ss) cells.push_back(Cell{k, n, s, a});
      }
    }
  }
  return cells;
}

namespace {

struct KeyHasher {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  KeyHasher& add(std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      h ^= (word >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
    return *this;
  }
  KeyHasher& add(double v) { return add(std::bit_cast<std::uint64_t>(v)); }
};

// Problem identity shared by every algorithm and budget.
std::uint64_t instance_key(const ExperimentSpec& spec, const Cell& cell) {
  KeyHasher k;
  k.add(std::uint64_t{cell.K})
      .add(std::uint64_t{cell.S})
      .add(spec.theta_norm)
      .add(static_cast<std::uint64_t>(spec.pattern))
      .add(spec.sigma_scale);
  return k.h;
}

SlucbConfig slucb_config(const ExperimentSpec& spec, const Cell& cell,
                         const ProblemInstance& instance) {
  SlucbConfig c;
  c.n = cell.n;
  c.delta = spec.delta;
  c.theta2_bar = spec.theta2_bar.value_or(instance.theta_norm());
  c.sigma2_bar = spec.sigma2_bar.value_or(instance.sigma_norm());
  return c;
}

RunRecord run_restricted_cb2(const ProblemInstance& instance, long n,
                             double delta, const NoiseModel& noise,
                             RngStream& rng) {
  const Support support = instance.support();
  const std::size_t K = instance.dim();
  RunMetadata meta;
  meta.seed = rng.seed();
  meta.n = n;
  meta.algorithm = "cb2_oracle_support";
  meta.instance_digest = instance.digest();
  RunRecord record(std::move(meta), K);
  if (support.empty()) {
    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(K));
    for (long t = 0; t < n; ++t) {
      record.append(Phase::Exploit, zero, pull(instance, ArmVector(zero), noise, rng),
                    0.0);
    }
    return record;
  }
  Cb2Policy policy(support.size(), n, delta);
  for (long t = 0; t < n; ++t) {
    const Vector xr = policy.propose();
    const Vector x = embed(xr, support, K);
    const double r = pull(instance, ArmVector(x), noise, rng);
    record.append(Phase::Exploit, x, r, instance.theta().dot(x));
    policy.observe(xr, r);
  }
  return record;
}

RunRecord run_random(const ProblemInstance& instance, long n,
                     const NoiseModel& noise, RngStream& rng) {
  RunMetadata meta;
  meta.seed = rng.seed();
  meta.n = n;
  meta.algorithm = "random";
  meta.instance_digest = instance.digest();
  RunRecord record(std::move(meta), instance.dim());
  for (long t = 0; t < n; ++t) {
    const Vector x = rng.unit_sphere(instance.dim());
    const double r = pull(instance, ArmVector(x), noise, rng);
    record.append(Phase::Baseline, x, r, instance.theta().dot(x));
  }
  return record;
}

}  // namespace

std::uint64_t cell_key(const ExperimentSpec& spec, const Cell& cell) {
  KeyHasher k;
  k.add(instance_key(spec, cell))
      .add(static_cast<std::uint64_t>(cell.algorithm))
      .add(static_cast<std::uint64_t>(cell.n))
      .add(static_cast<std::uint64_t>(spec.noise))
      .add(spec.delta)
      .add(spec.theta2_bar.value_or(-1.0))
      .add(spec.sigma2_bar.value_or(-1.0));
  return k.h;
}

ProblemInstance make_instance(const ExperimentSpec& spec, const Cell& cell,
                              long replication) {
  RngStream rng(replication_seed(spec.base_seed, instance_key(spec, cell),
                                 static_cast<std::uint64_t>(replication)));
  // Partial Fisher-Yates for S distinct positions.
  std::vector<std::size_t> idx(cell.K);
  for (std::size_t k = 0; k < cell.K; ++k) idx[k] = k;
  for (std::size_t j = 0; j < cell.S; ++j) {
    const std::size_t pick = j + rng.uniform_index(cell.K - j);
    std::swap(idx[j], idx[pick]);
  }
  Vector magnitudes(static_cast<Eigen::Index>(cell.S));
  for (std::size_t j = 0; j < cell.S; ++j) {
    magnitudes[static_cast<Eigen::Index>(j)] =
        spec.pattern == ThetaPattern::Equal ? 1.0
                                            : 1.0 / static_cast<double>(j + 1);
  }
  if (cell.S > 0) magnitudes *= spec.theta_norm / magnitudes.norm();
  Vector theta = Vector::Zero(static_cast<Eigen::Index>(cell.K));
  for (std::size_t j = 0; j < cell.S; ++j) {
    theta[static_cast<Eigen::Index>(idx[j])] =
        rng.rademacher() * magnitudes[static_cast<Eigen::Index>(j)];
  }
  return ProblemInstance::uniform_noise(std::move(theta), spec.sigma_scale);
}

ReplicationResult run_replication(const ExperimentSpec& spec, const Cell& cell,
                                  long replication) {
  const ProblemInstance instance = make_instance(spec, cell, replication);
  const NoiseModel noise = NoiseModel::for_instance(instance, spec.noise);

  ReplicationResult res;
  res.cell_id = cell.id();
  res.seed = replication_seed(spec.base_seed, cell_key(spec, cell),
                              static_cast<std::uint64_t>(replication));
  res.algorithm = cell.algorithm;
  res.K = cell.K;
  res.n = cell.n;
  res.S = cell.S;
  RngStream rng(res.seed);

  switch (cell.algorithm) {
    case Algorithm::Slucb: {
      const SlucbConfig config = slucb_config(spec, cell, instance);
      const double b = exploration_threshold(config, cell.K);
      ConcentrationMonitor monitor(instance, b);
      const SlucbRun run =
          run_slucb(instance, config, noise, rng,
                    [&](const SupportExplorationState& s) { monitor.observe(s); });
      res.regret = regret(run.record, instance);
      res.exploration_length = run.exploration_length;
      res.active_size = run.active.size();
      const SupportMetrics m = support_metrics(run.active, instance, b, cell.n);
      res.precision = m.precision;
      res.recall = m.recall;
      res.xi_holds = monitor.holds();
      res.active_in_support = m.precision == 1.0;
      if (instance.theta_norm() > 0.0) {
        const PhaseBounds pb =
            phase_bounds(b, instance.theta_norm(), instance.sparsity(), cell.n);
        const auto T = static_cast<double>(run.exploration_length);
        res.length_above_min = T >= pb.t_min;
        res.length_below_max = T <= pb.t_max;
        res.length_within_bounds =
            *res.length_above_min && *res.length_below_max;
      }
      res.theorem_bound =
          theorem2_bound(config.theta2_bar, config.sigma2_bar, cell.K,
                         config.delta, std::max<std::size_t>(1, cell.S), cell.n);
      break;
    }
    case Algorithm::Cb2Full: {
      const RunRecord rec = run_cb2(instance, cell.n, spec.delta, noise, rng);
      res.regret = regret(rec, instance);
      res.theorem_bound =
          theorem1_bound(cell.K, instance.theta_norm(), instance.sigma_norm(),
                         cell.n, spec.delta);
      break;
    }
    case Algorithm::Cb2OracleSupport: {
      const RunRecord rec =
          run_restricted_cb2(instance, cell.n, spec.delta, noise, rng);
      res.regret = regret(rec, instance);
      res.theorem_bound = theorem1_bound(
          std::max<std::size_t>(1, cell.S), instance.theta_norm(),
          restrict_to(instance.sigma(), instance.support()).norm(), cell.n,
          spec.delta);
      break;
    }
    case Algorithm::Random: {
      const RunRecord rec = run_random(instance, cell.n, noise, rng);
      res.regret = regret(rec, instance);
      break;
    }
  }
  return res;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

// Mean over values sorted ascending, so the result is independent of input
// order bit for bit.
double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

AggregateStats aggregate(const Cell& cell,
                         const std::vector<ReplicationResult>& results) {
  AggregateStats st;
  st.cell = cell;
  st.cell_id = cell.id();
  st.count = static_cast<long>(results.size());
  if (results.empty()) return st;

  std::vector<double> regrets;
  std::vector<double> lengths, precisions, recalls, xi;
  for (const auto& r : results) {
    regrets.push_back(r.regret);
    if (r.exploration_length) {
      lengths.push_back(static_cast<double>(*r.exploration_length));
    }
    if (r.precision) precisions.push_back(*r.precision);
    if (r.recall) recalls.push_back(*r.recall);
    if (r.xi_holds) xi.push_back(*r.xi_holds ? 1.0 : 0.0);
  }
  std::sort(regrets.begin(), regrets.end());
  st.mean_regret = sorted_mean(regrets);
  std::vector<double> sq;
  sq.reserve(regrets.size());
  for (double x : regrets) sq.push_back((x - st.mean_regret) * (x - st.mean_regret));
  std::sort(sq.begin(), sq.end());
  double ss = 0.0;
  for (double x : sq) ss += x;
  st.stddev_regret =
      regrets.size() > 1 ? std::sqrt(ss / static_cast<double>(regrets.size() - 1))
                         : 0.0;
  st.stderr_regret = st.stddev_regret / std::sqrt(static_cast<double>(regrets.size()));
  st.regret_quantiles = {quantile_sorted(regrets, 0.1),
                         quantile_sorted(regrets, 0.5),
                         quantile_sorted(regrets, 0.9)};
  if (!lengths.empty()) st.mean_exploration_length = sorted_mean(lengths);
  if (!precisions.empty()) st.mean_precision = sorted_mean(precisions);
  if (!recalls.empty()) st.mean_recall = sorted_mean(recalls);
  if (!xi.empty()) st.xi_frequency = sorted_mean(xi);
  return st;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<Cell> cells = expand_grid(spec);
  const auto seeds = static_cast<std::size_t>(spec.seeds);
  const std::size_t total = cells.size() * seeds;

  std::vector<ReplicationResult> slots(total);
  std::vector<std::string> errors(total);
  detail::parallel_for(total, spec.jobs, [&](std::size_t i) {
    const Cell& cell = cells[i / seeds];
    try {
      slots[i] = run_replication(spec, cell, static_cast<long>(i % seeds));
    } catch (const std::exception& e) {
      errors[i] = e.what();
      if (errors[i].empty()) errors[i] = "unknown error";
    }
  });

  ExperimentResult out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<ReplicationResult> ok;
    long failures = 0;
    std::string first_error;
    for (std::size_t r = 0; r < seeds; ++r) {
      const std::size_t i = c * seeds + r;
      if (!errors[i].empty()) {
        if (failures++ == 0) {
          first_error = "replication " + std::to_string(r) + ": " + errors[i];
        }
      } else {
        ok.push_back(std::move(slots[i]));
      }
    }
    if (failures > 0) {
      std::cerr << "cell " << cells[c].id() << " aborted: " << first_error
                << '\n';
      AggregateStats st;
      st.cell = cells[c];
      st.cell_id = cells[c].id();
      st.failures = failures;
      st.failure = first_error;
      out.cells.push_back(std::move(st));
      continue;
    }
    out.cells.push_back(aggregate(cells[c], ok));
    for (auto& r : ok) out.raw.push_back(std::move(r));
  }
  return out;
}

double fit_scaling_exponent(
    const std::vector<std::pair<double, double>>& points) {
  std::vector<std::pair<double, double>> logs;
  for (const auto& [n, r] : points) {
    if (!(n > 0.0) || !(r > 0.0)) {
      std::cerr << "warning: dropping nonpositive point (" << n << ", " << r
                << ") from scaling fit\n";
      continue;
    }
    logs.emplace_back(std::log(n), std::log(r));
  }
  if (logs.size() < 3) {
    throw InputError("scaling fit needs at least 3 positive points, got " +
                     std::to_string(logs.size()));
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : logs) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(logs.size());
  my /= static_cast<double>(logs.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : logs) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  if (sxx == 0.0) throw InputError("scaling fit needs distinct n values");
  return sxy / sxx;
}

SupportMetrics support_metrics(const Support& active,
                               const ProblemInstance& instance, double b,
                               long n) {
  const Vector& theta = instance.theta();
  SupportMetrics m;
  if (!active.empty()) {
    std::size_t hits = 0;
    for (std::size_t k : active) {
      if (theta[static_cast<Eigen::Index>(k)] != 0.0) ++hits;
    }
    m.precision = static_cast<double>(hits) / static_cast<double>(active.size());
  }
  const Support required = guaranteed_support(instance, b, n);
  if (!required.empty()) {
    std::size_t hits = 0;
    for (std::size_t k : required) {
      if (std::binary_search(active.begin(), active.end(), k)) ++hits;
    }
    m.recall = static_cast<double>(hits) / static_cast<double>(required.size());
  }
  return m;
}

namespace {

template <typename T>
void write_optional(std::ostream& out, const std::optional<T>& v) {
  out << ',';
  if (!v) {
    out << "NA";
  } else if constexpr (std::is_same_v<T, double>) {
    out << format_double(*v);
  } else if constexpr (std::is_same_v<T, bool>) {
    out << (*v ? 1 : 0);
  } else {
    out << *v;
  }
}

}  // namespace

void write_raw_csv(std::ostream& out,
                   const std::vector<ReplicationResult>& results) {
  out << "cell_id,seed,algorithm,K,n,S,regret,T,A_size,precision,recall,"
         "xi_holds\n";
  for (const auto& r : results) {
    out << r.cell_id << ',' << r.seed << ',' << to_string(r.algorithm) << ','
        << r.K << ',' << r.n << ',' << r.S << ',' << format_double(r.regret);
    write_optional(out, r.exploration_length);
    write_optional(out, r.active_size);
    write_optional(out, r.precision);
    write_optional(out, r.recall);
    write_optional(out, r.xi_holds);
    out << '\n';
  }
}

void write_aggregate_csv(std::ostream& out,
                         const std::vector<AggregateStats>& stats) {
  out << "cell_id,algorithm,K,n,S,count,failures,mean_regret,stddev_regret,"
         "stderr_regret,q10_regret,median_regret,q90_regret,mean_T,"
         "mean_precision,mean_recall,xi_frequency\n";
  for (const auto& s : stats) {
    out << s.cell_id << ',' << to_string(s.cell.algorithm) << ',' << s.cell.K
        << ',' << s.cell.n << ',' << s.cell.S << ',' << s.count << ','
        << s.failures << ',' << format_double(s.mean_regret) << ','
        << format_double(s.stddev_regret) << ','
        << format_double(s.stderr_regret) << ','
        << format_double(s.regret_quantiles.q10) << ','
        << format_double(s.regret_quantiles.q50) << ','
        << format_double(s.regret_quantiles.q90);
    write_optional(out, s.mean_exploration_length);
    write_optional(out, s.mean_precision);
    write_optional(out, s.mean_recall);
    write_optional(out, s.xi_frequency);
    out << '\n';
  }
}

void write_plot_data(const std::filesystem::path& dir,
                     const std::string& experiment, const std::string& curve,
                     const std::vector<std::pair<double, double>>& points) {
  const auto folder = dir / experiment;
  std::filesystem::create_directories(folder);
  std::ofstream out(folder / (curve + ".dat"));
  if (!out) {
    throw InputError("cannot write plot data under " + folder.string());
  }
  for (const auto& [x, y] : points) {
    out << format_double(x) << ' ' << format_double(y) << '\n';
  }
}

}  // namespace sparse_bandit
