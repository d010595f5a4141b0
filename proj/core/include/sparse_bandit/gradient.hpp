#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sparse_bandit/environment.hpp"
#include "sparse_bandit/rng.hpp"
#include "sparse_bandit/run_record.hpp"
#include "sparse_bandit/slucb.hpp"
#include "sparse_bandit/types.hpp"

namespace sparse_bandit {

/// f(x) = −weight Σ_{k∈relevant} (x_k − target)².
struct SeparableQuadratic {
  double weight = 20.0;
  double target = 25.0;
};

struct ObjectiveFunction {
  std::size_t dim = 0;
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> oracle_gradient;
  Support relevant_dims;
  /// Closed-form structure, when known, for exact ball maximization.
  std::optional<SeparableQuadratic> quadratic;
  std::optional<Vector> linear_coefficients;
};

/// Σ_{k<10} −20(x_k − 25)² on R^K. Throws InputError if K < 10.
ObjectiveFunction quadratic_sparse(std::size_t K);

/// f(x) = ⟨g, x⟩.
ObjectiveFunction linear_objective(Vector g);

struct AscentConfig {
  double epsilon = 1.0;
  Vector u0;
  long n = 100;
  /// Half-width of additive U[−h, h] noise on every function evaluation.
  double eval_noise = 0.0;
  /// Optional bandit-style noise: SL-UCB's reward gets ⟨x̃_t, η_t⟩ added,
  /// with η_t drawn from this model after each arm.
  std::optional<NoiseModel> ambient_noise;

  void validate(std::size_t dim) const;
};

struct Trajectory {
  std::string strategy;
  Vector u0;
  Vector final_point;
  std::vector<double> f_values;    // f(u_0), ..., f(u_n), noise-free
  std::vector<double> step_norms;  // ‖u_t − u_{t−1}‖₂, t = 1..n
  std::vector<Phase> phases;       // per step
  std::optional<RunRecord> bandit_record;  // SL-UCB only
  long exploration_length = 0;              // SL-UCB only
  Support active;                           // SL-UCB only

  double improvement() const { return f_values.back() - f_values.front(); }
};

/// Gradient ascent driven by SL-UCB: arm x̃_t ∈ 𝓑_K, u_t = u_{t−1} + εx̃_t,
/// reward (f(u_t) − f(u_{t−1}))/ε. Throws NumericError on a non-finite f.
Trajectory run_slucb_ascent(const ObjectiveFunction& f, const AscentConfig& cfg,
                            const SlucbConfig& slucb_cfg, RngStream& rng);

/// Normalized full-gradient ascent (OGS).
Trajectory run_oracle_gradient(const ObjectiveFunction& f,
                               const AscentConfig& cfg);

/// Random probe of length ε, accepted only on strict improvement (BRD).
/// Uses `rng` for directions and evaluation noise.
Trajectory run_best_random_direction(const ObjectiveFunction& f,
                                     const AscentConfig& cfg, RngStream& rng);

/// max_{x ∈ B(u0, nε)} f(x) − f(u_n). Exact for quadratic_sparse and linear
/// objectives; otherwise approximated by multi-start projected ascent.
double gradient_regret(const ObjectiveFunction& f, const Vector& u0,
                       const Vector& un, long n, double epsilon);

/// How SL-UCB's θ̄₂ is chosen for an ascent run.
enum class Theta2BarRule {
  GradientNorm,      // ‖∇f(u₀)‖₂
  GradientMaxAbs,    // ‖∇f(u₀)‖_∞
  Fixed,             // user-supplied value
};

struct Figure4Options {
  std::vector<double> ratios{2.0, 10.0, 100.0};
  long n = 100;
  long seeds = 50;
  std::uint64_t base_seed = 1;
  double epsilon = 1.0;
  double u0_value = 0.0;
  double eval_noise = 0.0;
  double delta = 0.01;
  double sigma2_bar = 0.0;
  Theta2BarRule theta2_rule = Theta2BarRule::GradientNorm;
  double theta2_bar = 0.0;  // used by Theta2BarRule::Fixed
  int jobs = 1;
};

struct Figure4Row {
  double ratio = 0.0;
  std::string strategy;  // "OGS", "SL-UCB", "BRD"
  double mean = 0.0;     // mean f(u_n) − f(u_0)
  double stderr_ = 0.0;
  long seeds = 0;
};

/// SL-UCB parameters for an ascent of `f` from cfg.u0.
SlucbConfig ascent_slucb_config(const ObjectiveFunction& f,
                                const AscentConfig& cfg,
                                const Figure4Options& options);

/// One (ratio, strategy) row per combination, ratios in the given order and
/// strategies in OGS, SL-UCB, BRD order.
std::vector<Figure4Row> figure4_experiment(const Figure4Options& options);

/// Columns: t,f_value,delta_f,step_norm,phase (t = 0 is the start point).
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
/// Columns: ratio,strategy,mean,stderr,seeds.
void write_figure4_csv(std::ostream& out, const std::vector<Figure4Row>& rows);

}  // namespace sparse_bandit
