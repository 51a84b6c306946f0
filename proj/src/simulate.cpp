#include "oppsched/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <ostream>
#include <thread>

#include <json.hpp>

namespace oppsched {

namespace {

// splitmix64 finalizer (SplittableRandom-style stream derivation).
constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace

ReplicationRng::ReplicationRng(uint64_t seed, uint64_t replication)
    : base_(mix64(seed + kGolden * replication)) {}

uint64_t ReplicationRng::next_u64() { return mix64(base_ + kGolden * ++counter_); }

double ReplicationRng::next_unit() {
  // 53-bit mantissa, offset half a step: never exactly 0 or 1.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

namespace {

struct GameTable {
  std::vector<double> reward;
  std::vector<double> prob;
  std::vector<ResponseTimeDistribution> dist;
  std::vector<int32_t> order;

  static GameTable from(const Instance& inst, const Schedule& sched) {
    require_schedule_for(inst, sched);
    GameTable g;
    const int32_t n = inst.size();
    for (int32_t i = 0; i < n; ++i) {
      const Opportunity& o = inst.at(sched.order[static_cast<size_t>(i)]);
      g.reward.push_back(o.reward);
      g.prob.push_back(o.success_prob);
      g.dist.push_back(o.response_dist());
    }
    g.order = sched.order;
    return g;
  }

  int32_t trials() const { return static_cast<int32_t>(prob.size()); }
};

// Two draws per trial: response time first, then the accept/decline draw.
GameOutcome run_game(const GameTable& g, ReplicationRng& rng) {
  GameOutcome out;
  const int32_t n = g.trials();
  for (int32_t i = 0; i < n; ++i) {
    out.finish_time += g.dist[static_cast<size_t>(i)].sample(rng.next_unit());
    if (rng.next_unit() < g.prob[static_cast<size_t>(i)]) {
      out.accepted_position = i;
      out.reward = g.reward[static_cast<size_t>(i)];
      return out;
    }
  }
  return out;
}

void check_replications(int64_t replications) {
  if (replications < 1) fail(Errc::invalid_replications, "replications must be >= 1");
}

constexpr int64_t kBlock = 4096;

// Runs body(block_index, first_rep, last_rep) over fixed-size replication
// blocks. Blocks are keyed by replication index alone, so any thread count
// produces the same per-block results; callers combine them in block order.
template <typename Body>
void for_blocks(int64_t replications, int32_t threads, Body body) {
  const int64_t blocks = (replications + kBlock - 1) / kBlock;
  const int32_t workers =
      static_cast<int32_t>(std::min<int64_t>(std::max<int32_t>(1, threads), blocks));
  if (workers <= 1) {
    for (int64_t b = 0; b < blocks; ++b)
      body(b, b * kBlock, std::min(replications, (b + 1) * kBlock));
    return;
  }
  std::atomic<int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int32_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int64_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1))
        body(b, b * kBlock, std::min(replications, (b + 1) * kBlock));
    });
  }
  for (auto& t : pool) t.join();
}

double stddev_from(const std::vector<std::pair<double, int64_t>>& hist, double mean,
                   int64_t count) {
  double acc = 0.0;
  for (const auto& [value, freq] : hist) {
    const double d = value - mean;
    acc += static_cast<double>(freq) * d * d;
  }
  return std::sqrt(acc / static_cast<double>(count));
}

}  // namespace

double SimulationSummary::reward_stddev() const {
  return stddev_from(reward_histogram, mean_reward, replications);
}

double SimulationSummary::finish_time_stddev() const {
  double acc = 0.0;
  for (double x : finish_time_samples) {
    const double d = x - mean_finish_time;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(replications));
}

double SimulationSummary::reward_se() const {
  return reward_stddev() / std::sqrt(static_cast<double>(replications));
}

double SimulationSummary::finish_time_se() const {
  return finish_time_stddev() / std::sqrt(static_cast<double>(replications));
}

GameOutcome play_once(const Instance& inst, const Schedule& sched, ReplicationRng& rng) {
  return run_game(GameTable::from(inst, sched), rng);
}

SimulationSummary simulate(const Instance& inst, const Schedule& sched, int64_t replications,
                           uint64_t seed, int32_t threads) {
  check_replications(replications);
  const GameTable game = GameTable::from(inst, sched);
  const int32_t n = game.trials();

  // Reward support is known up front: {0} plus every distinct r value.
  std::vector<double> values = game.reward;
  values.push_back(0.0);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<size_t> slot_of(static_cast<size_t>(n));
  for (int32_t i = 0; i < n; ++i) {
    slot_of[static_cast<size_t>(i)] = static_cast<size_t>(
        std::lower_bound(values.begin(), values.end(), game.reward[static_cast<size_t>(i)]) -
        values.begin());
  }
  const size_t zero_slot =
      static_cast<size_t>(std::lower_bound(values.begin(), values.end(), 0.0) - values.begin());

  struct BlockStats {
    double reward_sum = 0.0;
    double time_sum = 0.0;
    std::vector<int64_t> counts;
  };
  const int64_t blocks = (replications + kBlock - 1) / kBlock;
  std::vector<BlockStats> stats(static_cast<size_t>(blocks));

  SimulationSummary out;
  out.replications = replications;
  out.finish_time_samples.resize(static_cast<size_t>(replications));

  for_blocks(replications, threads, [&](int64_t b, int64_t lo, int64_t hi) {
    BlockStats& s = stats[static_cast<size_t>(b)];
    s.counts.assign(values.size(), 0);
    for (int64_t rep = lo; rep < hi; ++rep) {
      ReplicationRng rng(seed, static_cast<uint64_t>(rep));
      const GameOutcome g = run_game(game, rng);
      s.reward_sum += g.reward;
      s.time_sum += g.finish_time;
      const size_t slot =
          g.accepted_position ? slot_of[static_cast<size_t>(*g.accepted_position)] : zero_slot;
      ++s.counts[slot];
      out.finish_time_samples[static_cast<size_t>(rep)] = g.finish_time;
    }
  });

  // Combine in block order: the reduction is part of the reproducibility
  // contract.
  double reward_sum = 0.0, time_sum = 0.0;
  std::vector<int64_t> counts(values.size(), 0);
  for (const auto& s : stats) {
    reward_sum += s.reward_sum;
    time_sum += s.time_sum;
    for (size_t v = 0; v < values.size(); ++v) counts[v] += s.counts[v];
  }
  out.mean_reward = reward_sum / static_cast<double>(replications);
  out.mean_finish_time = time_sum / static_cast<double>(replications);
  for (size_t v = 0; v < values.size(); ++v)
    if (counts[v] > 0) out.reward_histogram.emplace_back(values[v], counts[v]);
  return out;
}

std::vector<TimePoint> empirical_curves(const Instance& inst, const Schedule& sched,
                                        const std::vector<double>& ts, int64_t replications,
                                        uint64_t seed, int32_t threads) {
  check_replications(replications);
  for (double t : ts)
    if (!(t >= 0.0)) fail(Errc::negative_time, "time grid values must be >= 0");
  const GameTable game = GameTable::from(inst, sched);
  const int32_t n = game.trials();

  std::vector<double> grid = ts;
  std::sort(grid.begin(), grid.end());

  // diff[j][pos]: outcomes absorbed at `pos` whose finish time first enters
  // the grid at index j; prefix over j gives counts with T <= grid[j].
  // Position n is the all-declined state. Integer counts keep the result
  // independent of the block execution order.
  const size_t width = static_cast<size_t>(n) + 1;
  const int64_t blocks = (replications + kBlock - 1) / kBlock;
  std::vector<std::vector<int64_t>> diffs(static_cast<size_t>(blocks));

  for_blocks(replications, threads, [&](int64_t b, int64_t lo, int64_t hi) {
    auto& diff = diffs[static_cast<size_t>(b)];
    diff.assign((grid.size() + 1) * width, 0);
    for (int64_t rep = lo; rep < hi; ++rep) {
      ReplicationRng rng(seed, static_cast<uint64_t>(rep));
      const GameOutcome g = run_game(game, rng);
      const size_t j = static_cast<size_t>(
          std::lower_bound(grid.begin(), grid.end(), g.finish_time) - grid.begin());
      const size_t pos =
          g.accepted_position ? static_cast<size_t>(*g.accepted_position) : static_cast<size_t>(n);
      ++diff[j * width + pos];
    }
  });

  std::vector<int64_t> total((grid.size() + 1) * width, 0);
  for (const auto& diff : diffs)
    for (size_t k = 0; k < total.size(); ++k) total[k] += diff[k];

  // counts per grid index = prefix sums of the diff rows.
  std::vector<int64_t> running(width, 0);
  std::vector<std::vector<int64_t>> at_grid(grid.size());
  for (size_t j = 0; j < grid.size(); ++j) {
    for (size_t pos = 0; pos < width; ++pos) running[pos] += total[j * width + pos];
    at_grid[j] = running;
  }

  const double denom = static_cast<double>(replications);
  std::vector<TimePoint> out;
  out.reserve(ts.size());
  for (double t : ts) {
    const size_t j = static_cast<size_t>(
        std::upper_bound(grid.begin(), grid.end(), t) - grid.begin());  // grid[j-1] <= t
    TimePoint pt;
    pt.t = t;
    pt.absorb_probs.assign(static_cast<size_t>(n), 0.0);
    int64_t finished = 0;
    double reward_sum = 0.0, absorb_sum = 0.0;
    if (j > 0) {
      const auto& counts = at_grid[j - 1];
      for (int32_t i = 0; i < n; ++i) {
        const int64_t cnt = counts[static_cast<size_t>(i)];
        const double prob = static_cast<double>(cnt) / denom;
        pt.absorb_probs[static_cast<size_t>(i)] = prob;
        absorb_sum += prob;
        reward_sum += game.reward[static_cast<size_t>(i)] * static_cast<double>(cnt);
        finished += cnt;
      }
      finished += counts[static_cast<size_t>(n)];
    }
    pt.expected_reward = reward_sum / denom;
    pt.finish_cdf = static_cast<double>(finished) / denom;
    pt.zero_reward_prob = std::clamp(1.0 - absorb_sum, 0.0, 1.0);
    out.push_back(std::move(pt));
  }
  return out;
}

void write_summary_json(std::ostream& out, const SimulationSummary& summary,
                        const Schedule& sched, uint64_t seed) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [value, freq] : summary.reward_histogram)
    hist.push_back({{"reward", value}, {"count", freq}});

  std::vector<double> sorted = summary.finish_time_samples;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&sorted](double q) {
    const size_t idx = static_cast<size_t>(q * static_cast<double>(sorted.size() - 1));
    return sorted[idx];
  };
  nlohmann::json doc{
      {"schedule", sched.to_string()},
      {"seed", seed},
      {"replications", summary.replications},
      {"mean_reward", summary.mean_reward},
      {"mean_finish_time", summary.mean_finish_time},
      {"reward_se", summary.reward_se()},
      {"finish_time_se", summary.finish_time_se()},
      {"reward_histogram", hist},
      {"finish_time_quantiles",
       {{"min", sorted.front()},
        {"q25", quantile(0.25)},
        {"q50", quantile(0.50)},
        {"q75", quantile(0.75)},
        {"q90", quantile(0.90)},
        {"q99", quantile(0.99)},
        {"max", sorted.back()}}},
  };
  out << doc.dump(2) << '\n';
}

}  // namespace oppsched
