#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "oppsched/analytics.hpp"
#include "oppsched/model.hpp"

namespace oppsched {

/// Counter-based random stream: draw j of replication k is a pure function
/// of (seed, k, j), so replications can run in any order on any number of
/// threads and still reproduce bit for bit.
class ReplicationRng {
 public:
  ReplicationRng(uint64_t seed, uint64_t replication);

  uint64_t next_u64();
  /// Uniform double strictly inside (0,1).
  double next_unit();

 private:
  uint64_t base_;
  uint64_t counter_ = 0;
};

/// One play of the game: accepted_position is the 0-based schedule position
/// whose opportunity accepted (empty when all declined); finish_time is the
/// sum of every sampled response time up to and including the last trial.
struct GameOutcome {
  std::optional<int32_t> accepted_position;
  double reward = 0.0;
  double finish_time = 0.0;
};

GameOutcome play_once(const Instance& inst, const Schedule& sched, ReplicationRng& rng);

struct SimulationSummary {
  int64_t replications = 0;
  double mean_reward = 0.0;
  double mean_finish_time = 0.0;
  /// (reward value, frequency), ascending by value; frequencies sum to
  /// `replications`. Value 0 covers both declines-by-all and zero-reward
  /// acceptances.
  std::vector<std::pair<double, int64_t>> reward_histogram;
  /// Per-replication finish times, in replication order.
  std::vector<double> finish_time_samples;

  /// Plug-in (1/N) standard deviations and standard errors of the means.
  double reward_stddev() const;
  double finish_time_stddev() const;
  double reward_se() const;
  double finish_time_se() const;
};

/// Runs `replications` independent plays on substreams derived from `seed`.
/// Identical arguments give bit-identical summaries for any thread count.
SimulationSummary simulate(const Instance& inst, const Schedule& sched, int64_t replications,
                           uint64_t seed, int32_t threads = 1);

/// Empirical counterparts of the closed-form curves, valid for any
/// response-time law. Points come back in the caller's t order.
std::vector<TimePoint> empirical_curves(const Instance& inst, const Schedule& sched,
                                        const std::vector<double>& ts, int64_t replications,
                                        uint64_t seed, int32_t threads = 1);

/// JSON object with the run context, moments, histogram, and finish-time
/// quantiles (samples are summarized, not dumped).
void write_summary_json(std::ostream& out, const SimulationSummary& summary,
                        const Schedule& sched, uint64_t seed);

}  // namespace oppsched
