#include "sparse_bandit/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "parallel.hpp"
#include "sparse_bandit/csv.hpp"
#include "sparse_bandit/errors.hpp"

namespace sparse_bandit {

namespace {

constexpr std::size_t kQuadraticRelevant = 10;

double checked_eval(const ObjectiveFunction& f, const Vector& u) {
  const double v = f.eval(u);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "objective is not finite at iterate with norm " << u.norm()
       << " (first coordinates:";
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(u.size(), 5); ++k) {
      os << ' ' << u[k];
    }
    os << ')';
    throw NumericError(os.str());
  }
  return v;
}

double eval_noise_draw(double half_width, RngStream& rng) {
  if (half_width <= 0.0) return 0.0;
  return (2.0 * rng.uniform01() - 1.0) * half_width;
}

Trajectory start_trajectory(std::string strategy, const ObjectiveFunction& f,
                            const AscentConfig& cfg) {
  Trajectory tr;
  tr.strategy = std::move(strategy);
  tr.u0 = cfg.u0;
  tr.f_values.reserve(static_cast<std::size_t>(cfg.n) + 1);
  tr.step_norms.reserve(static_cast<std::size_t>(cfg.n));
  tr.phases.reserve(static_cast<std::size_t>(cfg.n));
  tr.f_values.push_back(checked_eval(f, cfg.u0));
  return tr;
}

}  // namespace

ObjectiveFunction quadratic_sparse(std::size_t K) {
  if (K < kQuadraticRelevant) {
    throw InputError("quadratic_sparse needs K >= 10, got " +
                     std::to_string(K));
  }
  const SeparableQuadratic q;
  ObjectiveFunction f;
  f.dim = K;
  f.quadratic = q;
  for (std::size_t k = 0; k < kQuadraticRelevant; ++k) {
    f.relevant_dims.push_back(k);
  }
  f.eval = [q](const Vector& x) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(kQuadraticRelevant);
         ++k) {
      const double d = x[k] - q.target;
      s += d * d;
    }
    return -q.weight * s;
  };
  f.oracle_gradient = [q](const Vector& x) {
    Vector g = Vector::Zero(x.size());
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(kQuadraticRelevant);
         ++k) {
      g[k] = -2.0 * q.weight * (x[k] - q.target);
    }
    return g;
  };
  return f;
}

ObjectiveFunction linear_objective(Vector g) {
  ObjectiveFunction f;
  f.dim = static_cast<std::size_t>(g.size());
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (g[k] != 0.0) f.relevant_dims.push_back(static_cast<std::size_t>(k));
  }
  f.eval = [g](const Vector& x) { return g.dot(x); };
  f.oracle_gradient = [g](const Vector&) { return g; };
  f.linear_coefficients = std::move(g);
  return f;
}

void AscentConfig::validate(std::size_t dim) const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InputError("ascent: epsilon must be positive");
  }
  if (static_cast<std::size_t>(u0.size()) != dim) {
    throw InputError("ascent: u0 has length " + std::to_string(u0.size()) +
                     ", objective dimension is " + std::to_string(dim));
  }
  if (n < 1) throw InputError("ascent: n must be at least 1");
  if (!(eval_noise >= 0.0)) {
    throw InputError("ascent: eval_noise must be nonnegative");
  }
  if (ambient_noise &&
      static_cast<std::size_t>(ambient_noise->scale.size()) != dim) {
    throw InputError("ascent: ambient noise dimension mismatch");
  }
}

Trajectory run_slucb_ascent(const ObjectiveFunction& f, const AscentConfig& cfg,
                            const SlucbConfig& slucb_cfg, RngStream& rng) {
  cfg.validate(f.dim);
  if (slucb_cfg.n != cfg.n) {
    throw InputError("ascent: SL-UCB budget must equal the step budget");
  }
  SlucbPolicy policy(f.dim, slucb_cfg);
  Trajectory tr = start_trajectory("SL-UCB", f, cfg);

  RunMetadata meta;
  meta.seed = rng.seed();
  meta.n = cfg.n;
  meta.algorithm = "slucb_ascent";
  RunRecord record(std::move(meta), f.dim);

  Vector u = cfg.u0;
  double f_prev = tr.f_values.front();
  double observed_prev = f_prev + eval_noise_draw(cfg.eval_noise, rng);
  for (long t = 0; t < cfg.n; ++t) {
    const Phase phase = policy.phase();
    const Vector x = policy.propose(rng);
    Vector next = u + cfg.epsilon * x;
    const double f_next = checked_eval(f, next);
    const double observed_next = f_next + eval_noise_draw(cfg.eval_noise, rng);
    double reward = (observed_next - observed_prev) / cfg.epsilon;
    if (cfg.ambient_noise) reward += x.dot(cfg.ambient_noise->draw(rng));

    record.append(phase, x, reward, (f_next - f_prev) / cfg.epsilon);
    policy.observe(x, reward);

    tr.step_norms.push_back((next - u).norm());
    tr.phases.push_back(phase);
    tr.f_values.push_back(f_next);
    u = std::move(next);
    f_prev = f_next;
    observed_prev = observed_next;
  }
  tr.final_point = std::move(u);
  tr.exploration_length = policy.exploration_length();
  tr.active = policy.active();
  record.meta().exploration_length = tr.exploration_length;
  record.meta().active_set = tr.active;
  tr.bandit_record = std::move(record);
  return tr;
}

Trajectory run_oracle_gradient(const ObjectiveFunction& f,
                               const AscentConfig& cfg) {
  cfg.validate(f.dim);
  if (!f.oracle_gradient) {
    throw InputError("oracle gradient strategy needs an oracle gradient");
  }
  Trajectory tr = start_trajectory("OGS", f, cfg);
  Vector u = cfg.u0;
  for (long t = 0; t < cfg.n; ++t) {
    const Vector g = f.oracle_gradient(u);
    const double norm = g.norm();
    double step = 0.0;
    if (norm >= 1e-12) {
      u += (cfg.epsilon / norm) * g;
      step = cfg.epsilon;
    }
    tr.step_norms.push_back(step);
    tr.phases.push_back(Phase::Baseline);
    tr.f_values.push_back(checked_eval(f, u));
  }
  tr.final_point = std::move(u);
  return tr;
}

Trajectory run_best_random_direction(const ObjectiveFunction& f,
                                     const AscentConfig& cfg, RngStream& rng) {
  cfg.validate(f.dim);
  Trajectory tr = start_trajectory("BRD", f, cfg);
  Vector u = cfg.u0;
  double f_cur = tr.f_values.front();
  double observed_cur = f_cur + eval_noise_draw(cfg.eval_noise, rng);
  for (long t = 0; t < cfg.n; ++t) {
    const Vector v = rng.unit_sphere(f.dim);
    Vector candidate = u + cfg.epsilon * v;
    const double f_cand = checked_eval(f, candidate);
    const double observed = f_cand + eval_noise_draw(cfg.eval_noise, rng);
    double step = 0.0;
    if (observed > observed_cur) {
      step = (candidate - u).norm();
      u = std::move(candidate);
      f_cur = f_cand;
      observed_cur = observed;
    }
    tr.step_norms.push_back(step);
    tr.phases.push_back(Phase::Baseline);
    tr.f_values.push_back(f_cur);
  }
  tr.final_point = std::move(u);
  return tr;
}

namespace {

Vector project_to_ball(const Vector& x, const Vector& center, double radius) {
  const Vector d = x - center;
  const double norm = d.norm();
  if (norm <= radius) return x;
  return center + (radius / norm) * d;
}

// Projected gradient ascent with backtracking; used when no closed form is
// known, so the result is a lower bound on the true maximum.
double approximate_ball_max(const ObjectiveFunction& f, const Vector& center,
                            double radius) {
  std::vector<Vector> starts{center};
  if (f.oracle_gradient) {
    const Vector g = f.oracle_gradient(center);
    if (g.norm() > 0.0) starts.push_back(center + (radius / g.norm()) * g);
  }
  RngStream rng(0x5eedULL);
  for (int i = 0; i < 8; ++i) {
    starts.push_back(center +
                     radius * rng.uniform01() * rng.unit_sphere(f.dim));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (Vector x : starts) {
    double fx = f.eval(x);
    double step = radius;
    for (int it = 0; it < 500 && f.oracle_gradient && step > 1e-10 * radius;
         ++it) {
      const Vector g = f.oracle_gradient(x);
      const double gn = g.norm();
      if (gn == 0.0) break;
      const Vector cand = project_to_ball(x + (step / gn) * g, center, radius);
      const double fc = f.eval(cand);
      if (fc > fx) {
        x = cand;
        fx = fc;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    best = std::max(best, fx);
  }
  return best;
}

}  // namespace

double gradient_regret(const ObjectiveFunction& f, const Vector& u0,
                       const Vector& un, long n, double epsilon) {
  const double radius = static_cast<double>(n) * epsilon;
  if (!(radius > 0.0)) {
    throw InputError("gradient_regret: reachable radius must be positive");
  }
  double best;
  if (f.quadratic) {
    // The maximizers form the affine set {x : x_rel = target}; its closest
    // point to u0 lies at distance D, so the best in-ball value is
    // −w·max(0, D − radius)².
    double dist_sq = 0.0;
    for (std::size_t k : f.relevant_dims) {
      const double d = u0[static_cast<Eigen::Index>(k)] - f.quadratic->target;
      dist_sq += d * d;
    }
    const double gap = std::max(0.0, std::sqrt(dist_sq) - radius);
    best = -f.quadratic->weight * gap * gap;
  } else if (f.linear_coefficients) {
    best = f.eval(u0) + radius * f.linear_coefficients->norm();
  } else {
    best = approximate_ball_max(f, u0, radius);
  }
  return best - f.eval(un);
}

SlucbConfig ascent_slucb_config(const ObjectiveFunction& f,
                                const AscentConfig& cfg,
                                const Figure4Options& options) {
  SlucbConfig sc;
  sc.n = cfg.n;
  sc.delta = options.delta;
  sc.sigma2_bar = options.sigma2_bar;
  switch (options.theta2_rule) {
    case Theta2BarRule::GradientNorm:
      sc.theta2_bar = f.oracle_gradient(cfg.u0).norm();
      break;
    case Theta2BarRule::GradientMaxAbs:
      sc.theta2_bar = f.oracle_gradient(cfg.u0).cwiseAbs().maxCoeff();
      break;
    case Theta2BarRule::Fixed:
      sc.theta2_bar = options.theta2_bar;
      break;
  }
  return sc;
}

std::vector<Figure4Row> figure4_experiment(const Figure4Options& options) {
  if (options.seeds < 1) throw InputError("figure4: seeds must be positive");
  std::vector<Figure4Row> rows;
  for (std::size_t ri = 0; ri < options.ratios.size(); ++ri) {
    const double ratio = options.ratios[ri];
    const auto K = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(options.n)));
    const ObjectiveFunction f = quadratic_sparse(K);
    AscentConfig cfg;
    cfg.epsilon = options.epsilon;
    cfg.n = options.n;
    cfg.eval_noise = options.eval_noise;
    cfg.u0 = Vector::Constant(static_cast<Eigen::Index>(K), options.u0_value);
    const SlucbConfig sc = ascent_slucb_config(f, cfg, options);

    const auto seeds = static_cast<std::size_t>(options.seeds);
    std::vector<double> ogs(seeds), slucb(seeds), brd(seeds);
    const double ogs_value = run_oracle_gradient(f, cfg).improvement();
    detail::parallel_for(seeds, options.jobs, [&](std::size_t s) {
      ogs[s] = ogs_value;
      RngStream rng_slucb(replication_seed(options.base_seed, 2 * K, s));
      slucb[s] = run_slucb_ascent(f, cfg, sc, rng_slucb).improvement();
      RngStream rng_brd(replication_seed(options.base_seed, 2 * K + 1, s));
      brd[s] = run_best_random_direction(f, cfg, rng_brd).improvement();
    });

    auto summarize = [&](const char* name, const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double sd =
          v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
      Figure4Row row;
      row.ratio = ratio;
      row.strategy = name;
      row.mean = mean;
      row.stderr_ = sd / std::sqrt(static_cast<double>(v.size()));
      row.seeds = options.seeds;
      rows.push_back(row);
    };
    summarize("OGS", ogs);
    summarize("SL-UCB", slucb);
    summarize("BRD", brd);
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,f_value,delta_f,step_norm,phase\n";
  const auto& fv = trajectory.f_values;
  out << 0 << ',' << format_double(fv.front()) << ",0,0,start\n";
  for (std::size_t t = 1; t < fv.size(); ++t) {
    out << t << ',' << format_double(fv[t]) << ','
        << format_double(fv[t] - fv[t - 1]) << ','
        << format_double(trajectory.step_norms[t - 1]) << ','
        << to_string(trajectory.phases[t - 1]) << '\n';
  }
}

void write_figure4_csv(std::ostream& out, const std::vector<Figure4Row>& rows) {
  out << "ratio,strategy,mean,stderr,seeds\n";
  for (const auto& r : rows) {
    out << format_double(r.ratio) << ',' << r.strategy << ','
        << format_double(r.mean) << ',' << format_double(r.stderr_) << ','
        << r.seeds << '\n';
  }
}

}  // namespace sparse_bandit
