#include "sparse_bandit/run_record.hpp"

#include <ostream>
#include <utility>

#include "sparse_bandit/csv.hpp"
#include "sparse_bandit/errors.hpp"

namespace sparse_bandit {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Explore:
      return "explore";
    case Phase::Exploit:
      return "exploit";
    case Phase::Baseline:
      return "baseline";
  }
  return "unknown";
}

RunRecord::RunRecord(RunMetadata meta, std::size_t dim)
    : meta_(std::move(meta)), dim_(dim), store_arms_(dim <= kMaxStoredArmDim) {
  if (meta_.n > 0) {
    rounds_.reserve(static_cast<std::size_t>(meta_.n));
    if (store_arms_) arms_.reserve(static_cast<std::size_t>(meta_.n));
  }
}

void RunRecord::append(Phase phase, const Vector& arm, double reward,
                       double inst_perf) {
  if (static_cast<long>(rounds_.size()) >= meta_.n) {
    throw StateError("run record already holds n rounds");
  }
  Round r;
  r.t = static_cast<long>(rounds_.size()) + 1;
  r.phase = phase;
  r.reward = reward;
  r.inst_perf = inst_perf;
  r.arm_norm = arm.norm();
  rounds_.push_back(r);
  if (store_arms_) arms_.push_back(arm);
}

const Vector& RunRecord::arm(std::size_t i) const {
  if (!store_arms_) throw StateError("arms are not stored for this record");
  return arms_.at(i);
}

double RunRecord::performance() const {
  double s = 0.0;
  for (const auto& r : rounds_) s += r.inst_perf;
  return s;
}

double RunRecord::reward_sum() const {
  double s = 0.0;
  for (const auto& r : rounds_) s += r.reward;
  return s;
}

void write_run_csv(std::ostream& out, const RunRecord& record,
                   double theta_norm) {
  out << "t,phase,reward,inst_perf,cum_perf,cum_regret,arm_norm\n";
  double cum = 0.0;
  for (const auto& r : record.rounds()) {
    cum += r.inst_perf;
    const double cum_regret = static_cast<double>(r.t) * theta_norm - cum;
    out << r.t << ',' << to_string(r.phase) << ',' << format_double(r.reward)
        << ',' << format_double(r.inst_perf) << ',' << format_double(cum)
        << ',' << format_double(cum_regret) << ','
        << format_double(r.arm_norm) << '\n';
  }
}

void write_arm_sidecar(std::ostream& out, const RunRecord& record) {
  if (!record.has_arms()) {
    throw StateError("arm sidecar requires K <= 64");
  }
  for (std::size_t i = 0; i < record.size(); ++i) {
    out << record.rounds()[i].t;
    for (double x : record.arm(i)) out << ',' << format_double(x);
    out << '\n';
  }
}

void write_run_metadata(std::ostream& out, const RunRecord& record) {
  const auto& m = record.meta();
  out << "seed=" << m.seed << '\n'
      << "n=" << m.n << '\n'
      << "algorithm=" << m.algorithm << '\n'
      << "instance_digest=" << m.instance_digest << '\n';
  if (m.exploration_length) out << "T=" << *m.exploration_length << '\n';
  if (m.active_set) {
    out << "active_set=";
    for (std::size_t j = 0; j < m.active_set->size(); ++j) {
      if (j > 0) out << ' ';
      out << (*m.active_set)[j];
    }
    out << '\n';
  }
}

}  // namespace sparse_bandit
