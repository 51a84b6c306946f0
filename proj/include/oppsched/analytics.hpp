#pragma once

#include <iosfwd>
#include <vector>

#include "oppsched/model.hpp"

namespace oppsched {

/// c_1..c_n are the first-success-at-trial-i probabilities for a given
/// trying order; c_{n+1} (the last entry) is the all-fail probability.
/// Entries sum to 1.
struct SuccessCoefficients {
  std::vector<double> c;

  int32_t trials() const { return static_cast<int32_t>(c.size()) - 1; }
  double all_fail() const { return c.back(); }
};

/// A schedule together with its R-bar, T-bar and J = R-bar - eta * T-bar.
struct EvaluatedSchedule {
  Schedule schedule;
  double expected_reward = 0.0;
  double expected_finish_time = 0.0;
  double eta = 0.0;
  double objective = 0.0;
};

/// One point of the reward/finish-time curves: absorb_probs[i] is the
/// probability of having been accepted at schedule position i by time t;
/// zero_reward_prob is 1 - sum(absorb_probs) (still waiting or all failed).
struct TimePoint {
  double t = 0.0;
  double expected_reward = 0.0;
  double finish_cdf = 0.0;
  double zero_reward_prob = 0.0;
  std::vector<double> absorb_probs;
};

SuccessCoefficients success_coefficients(const Instance& inst, const Schedule& sched);

/// Eventual expected reward: sum_i r_{o(i)} c_i. Distribution-free.
double expected_reward(const Instance& inst, const Schedule& sched);

/// Expected finish time: c_{n+1} * sum_k theta_{o(k)} +
/// sum_i c_i * (sum_{k<=i} theta_{o(k)}). Depends only on the means.
double expected_finish_time(const Instance& inst, const Schedule& sched);

/// Bundles both with the tradeoff objective J = R-bar - eta * T-bar.
EvaluatedSchedule evaluate(const Instance& inst, const Schedule& sched, double eta);

/// Closed-form curves; requires every opportunity Deterministic (the
/// simulator covers other laws empirically). ts must be nonnegative.
std::vector<TimePoint> time_curves(const Instance& inst, const Schedule& sched,
                                   const std::vector<double>& ts);

/// CSV columns: t,expected_reward,finish_cdf,zero_reward_prob.
void write_curves_csv(std::ostream& out, const std::vector<TimePoint>& points,
                      int precision = 6);

}  // namespace oppsched
