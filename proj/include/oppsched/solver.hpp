#pragma once

#include <iosfwd>
#include <vector>

#include "oppsched/analytics.hpp"
#include "oppsched/model.hpp"

namespace oppsched {

/// Ordering key for one opportunity at tradeoff weight eta: optimal
/// schedules list these non-increasingly. tiebreak is theta/p (expected
/// waiting per unit success probability), preferred ascending.
struct SortKey {
  double key = 0.0;
  double tiebreak = 0.0;
  int32_t index = 0;
};

/// A tradeoff-optimal record from the eta sweep.
struct FrontierPoint {
  double eta = 0.0;
  Schedule schedule;
  double expected_reward = 0.0;
  double expected_finish_time = 0.0;
  double objective = 0.0;
};

/// One enumerated permutation with its (R-bar, T-bar) pair.
struct CloudPoint {
  Schedule schedule;
  double expected_reward = 0.0;
  double expected_finish_time = 0.0;
};

/// A (T-bar, R-bar) pair for Pareto filtering.
struct TradeoffPoint {
  double expected_finish_time = 0.0;
  double expected_reward = 0.0;

  bool operator==(const TradeoffPoint&) const = default;
};

inline constexpr int32_t kBruteForceCap = 10;

SortKey sort_key(const Opportunity& opp, double eta, int32_t index = 0);

/// Optimal schedule for J = R-bar - eta * T-bar: sorts keys descending,
/// ties by tiebreak ascending, then original index ascending (stable).
EvaluatedSchedule solve(const Instance& inst, double eta);

/// Exhaustive oracle over all n! permutations; ties resolved to the
/// lexicographically smallest schedule. Deterministic for any thread count.
EvaluatedSchedule brute_force(const Instance& inst, double eta, int32_t max_n = kBruteForceCap,
                              int32_t threads = 1);

/// All n! (schedule, R-bar, T-bar) points in lexicographic schedule order.
std::vector<CloudPoint> enumerate_cloud(const Instance& inst, int32_t max_n = kBruteForceCap,
                                        int32_t threads = 1);

/// Solves on a uniform inclusive eta grid (`steps` points) and collapses
/// consecutive duplicate schedules, keeping the smallest eta of each run.
std::vector<FrontierPoint> frontier_sweep(const Instance& inst, double eta_min, double eta_max,
                                          int32_t steps);

/// Maximal points of the cloud: q is dropped iff some p has
/// T-bar_p <= T-bar_q and R-bar_p >= R-bar_q with one strict inequality.
/// Exact duplicates are kept once. Output sorted by T-bar ascending.
std::vector<TradeoffPoint> pareto_filter(const std::vector<TradeoffPoint>& points);

/// Re-solves after the given opportunities already failed. With
/// failed_prefix equal to the first k entries of solve()'s schedule this
/// returns exactly that schedule's remaining suffix.
Schedule sequential_replan(const Instance& inst, double eta,
                           const std::vector<int32_t>& failed_prefix);

/// CSV columns: eta,schedule,expected_reward,expected_finish_time,objective
/// (schedule as 1-based dashed indices).
void write_frontier_csv(std::ostream& out, const std::vector<FrontierPoint>& points,
                        int precision = 6);

}  // namespace oppsched
