#include "oppsched/solver.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "oppsched/kernels.hpp"

namespace oppsched {

namespace {

void check_eta(double eta) {
  if (!(eta >= 0.0)) fail(Errc::negative_eta, "eta must be >= 0");
}

// n <= 20 keeps n! inside uint64.
constexpr int32_t kFactorialLimit = 20;

uint64_t factorial(int32_t n) {
  uint64_t f = 1;
  for (int32_t i = 2; i <= n; ++i) f *= static_cast<uint64_t>(i);
  return f;
}

void check_enumerable(const Instance& inst, int32_t max_n) {
  const int32_t n = inst.size();
  const int32_t cap = std::min(max_n, kFactorialLimit);
  if (n > cap)
    fail(Errc::instance_too_large,
         "n=" + std::to_string(n) + " exceeds the enumeration cap " + std::to_string(cap) +
             "; permutation counts grow factorially (already 10! = 3,628,800)");
}

// Lexicographic unranking via the factorial number system.
std::vector<int32_t> nth_permutation(int32_t n, uint64_t rank) {
  std::vector<int32_t> avail(static_cast<size_t>(n));
  std::iota(avail.begin(), avail.end(), 0);
  std::vector<int32_t> out;
  out.reserve(static_cast<size_t>(n));
  for (int32_t i = n - 1; i >= 0; --i) {
    const uint64_t f = factorial(i);
    const size_t q = static_cast<size_t>(rank / f);
    rank %= f;
    out.push_back(avail[q]);
    avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(q));
  }
  return out;
}

std::vector<SortKey> keys_for(const Instance& inst, double eta) {
  std::vector<SortKey> keys;
  keys.reserve(inst.opportunities.size());
  for (int32_t i = 0; i < inst.size(); ++i) keys.push_back(sort_key(inst.at(i), eta, i));
  return keys;
}

// Shared ordering rule: key descending, tiebreak ascending; stable sort
// keeps equal entries in input (index-ascending) order.
void sort_by_key(std::vector<int32_t>& idx, const std::vector<SortKey>& keys) {
  std::stable_sort(idx.begin(), idx.end(), [&keys](int32_t a, int32_t b) {
    const SortKey& ka = keys[static_cast<size_t>(a)];
    const SortKey& kb = keys[static_cast<size_t>(b)];
    if (ka.key != kb.key) return ka.key > kb.key;
    return ka.tiebreak < kb.tiebreak;
  });
}

struct RangeBest {
  double objective = -std::numeric_limits<double>::infinity();
  uint64_t rank = 0;
  std::vector<int32_t> order;
};

constexpr int32_t kEvalBatch = 64;

// Scans permutation ranks [lo, hi), keeping the best objective; ties keep
// the first (lex-smallest) rank.
RangeBest scan_range(const kernels::SoaView& soa, double eta, uint64_t lo, uint64_t hi) {
  const int32_t n = soa.size();
  std::vector<int32_t> perm = nth_permutation(n, lo);
  std::vector<int32_t> rows(static_cast<size_t>(kEvalBatch) * static_cast<size_t>(n));
  double rbar[kEvalBatch], tbar[kEvalBatch];
  RangeBest best;
  uint64_t rank = lo;
  while (rank < hi) {
    int32_t filled = 0;
    const uint64_t first = rank;
    while (filled < kEvalBatch && rank < hi) {
      std::copy(perm.begin(), perm.end(),
                rows.begin() + static_cast<size_t>(filled) * static_cast<size_t>(n));
      std::next_permutation(perm.begin(), perm.end());
      ++filled;
      ++rank;
    }
    kernels::eval_batch(soa, rows.data(), filled, rbar, tbar);
    for (int32_t j = 0; j < filled; ++j) {
      const double objective = rbar[j] - eta * tbar[j];
      if (objective > best.objective) {
        best.objective = objective;
        best.rank = first + static_cast<uint64_t>(j);
        const auto row = rows.begin() + static_cast<size_t>(j) * static_cast<size_t>(n);
        best.order.assign(row, row + n);
      }
    }
  }
  return best;
}

// Splits [0, total) into contiguous chunks and runs body(chunk, lo, hi) on
// worker threads. Chunk boundaries depend only on `workers`, and callers
// reduce per-chunk results in chunk order, so output is deterministic.
template <typename Body>
void for_ranges(uint64_t total, int32_t workers, Body body) {
  workers = std::max<int32_t>(1, workers);
  const uint64_t chunks = std::min<uint64_t>(static_cast<uint64_t>(workers), total);
  if (chunks <= 1) {
    body(0, 0, total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(chunks));
  for (uint64_t c = 0; c < chunks; ++c) {
    const uint64_t lo = total / chunks * c + std::min(c, total % chunks);
    const uint64_t hi = total / chunks * (c + 1) + std::min(c + 1, total % chunks);
    pool.emplace_back([&body, c, lo, hi] { body(c, lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

SortKey sort_key(const Opportunity& opp, double eta, int32_t index) {
  check_eta(eta);
  SortKey k;
  k.tiebreak = opp.mean_response_time / opp.success_prob;
  k.key = opp.reward - eta * k.tiebreak;
  k.index = index;
  return k;
}

EvaluatedSchedule solve(const Instance& inst, double eta) {
  check_eta(eta);
  const auto keys = keys_for(inst, eta);
  Schedule sched = Schedule::identity(inst.size());
  sort_by_key(sched.order, keys);
  return evaluate(inst, sched, eta);
}

EvaluatedSchedule brute_force(const Instance& inst, double eta, int32_t max_n, int32_t threads) {
  check_eta(eta);
  check_enumerable(inst, max_n);
  const auto soa = kernels::SoaView::from(inst);
  const uint64_t total = factorial(inst.size());

  std::vector<RangeBest> bests(static_cast<size_t>(std::max<int32_t>(1, threads)));
  for_ranges(total, threads, [&](uint64_t chunk, uint64_t lo, uint64_t hi) {
    bests[chunk] = scan_range(soa, eta, lo, hi);
  });

  const RangeBest* winner = &bests[0];
  for (const auto& b : bests) {
    if (b.order.empty()) continue;
    if (winner->order.empty() || b.objective > winner->objective ||
        (b.objective == winner->objective && b.rank < winner->rank))
      winner = &b;
  }
  return evaluate(inst, Schedule{winner->order}, eta);
}

std::vector<CloudPoint> enumerate_cloud(const Instance& inst, int32_t max_n, int32_t threads) {
  check_enumerable(inst, max_n);
  const auto soa = kernels::SoaView::from(inst);
  const int32_t n = inst.size();
  const uint64_t total = factorial(n);

  std::vector<CloudPoint> cloud(total);
  for_ranges(total, threads, [&](uint64_t, uint64_t lo, uint64_t hi) {
    std::vector<int32_t> perm = nth_permutation(n, lo);
    std::vector<int32_t> rows(static_cast<size_t>(kEvalBatch) * static_cast<size_t>(n));
    double rbar[kEvalBatch], tbar[kEvalBatch];
    uint64_t rank = lo;
    while (rank < hi) {
      int32_t filled = 0;
      const uint64_t first = rank;
      while (filled < kEvalBatch && rank < hi) {
        std::copy(perm.begin(), perm.end(),
                  rows.begin() + static_cast<size_t>(filled) * static_cast<size_t>(n));
        std::next_permutation(perm.begin(), perm.end());
        ++filled;
        ++rank;
      }
      kernels::eval_batch(soa, rows.data(), filled, rbar, tbar);
      for (int32_t j = 0; j < filled; ++j) {
        CloudPoint& pt = cloud[first + static_cast<uint64_t>(j)];
        const auto row = rows.begin() + static_cast<size_t>(j) * static_cast<size_t>(n);
        pt.schedule.order.assign(row, row + n);
        pt.expected_reward = rbar[j];
        pt.expected_finish_time = tbar[j];
      }
    }
  });
  return cloud;
}

std::vector<FrontierPoint> frontier_sweep(const Instance& inst, double eta_min, double eta_max,
                                          int32_t steps) {
  if (!(eta_min >= 0.0)) fail(Errc::negative_eta, "eta_min must be >= 0");
  if (!(eta_min <= eta_max)) fail(Errc::invalid_range, "eta_min must be <= eta_max");
  if (steps < 1) fail(Errc::invalid_steps, "steps must be >= 1");

  std::vector<FrontierPoint> out;
  for (int32_t i = 0; i < steps; ++i) {
    double eta = eta_min;
    if (steps > 1)
      eta = (i == steps - 1)
                ? eta_max
                : eta_min + static_cast<double>(i) * (eta_max - eta_min) /
                                static_cast<double>(steps - 1);
    const auto ev = solve(inst, eta);
    if (!out.empty() && out.back().schedule == ev.schedule) continue;
    out.push_back({eta, ev.schedule, ev.expected_reward, ev.expected_finish_time, ev.objective});
  }
  return out;
}

std::vector<TradeoffPoint> pareto_filter(const std::vector<TradeoffPoint>& points) {
  if (points.empty()) fail(Errc::empty_input, "no points to filter");
  std::vector<TradeoffPoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](const TradeoffPoint& a, const TradeoffPoint& b) {
    if (a.expected_finish_time != b.expected_finish_time)
      return a.expected_finish_time < b.expected_finish_time;
    return a.expected_reward > b.expected_reward;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  // Skyline sweep: after the sort, a point survives iff its reward beats
  // every earlier (faster-or-equal) point's reward.
  std::vector<TradeoffPoint> out;
  double best_reward = -std::numeric_limits<double>::infinity();
  for (const auto& pt : sorted) {
    if (pt.expected_reward > best_reward) {
      out.push_back(pt);
      best_reward = pt.expected_reward;
    }
  }
  return out;
}

Schedule sequential_replan(const Instance& inst, double eta,
                           const std::vector<int32_t>& failed_prefix) {
  check_eta(eta);
  const int32_t n = inst.size();
  std::vector<bool> failed(static_cast<size_t>(n), false);
  for (int32_t idx : failed_prefix) {
    if (idx < 0 || idx >= n)
      fail(Errc::unknown_index,
           "index " + std::to_string(idx + 1) + " not in 1.." + std::to_string(n));
    if (failed[static_cast<size_t>(idx)])
      fail(Errc::unknown_index, "index " + std::to_string(idx + 1) + " listed twice");
    failed[static_cast<size_t>(idx)] = true;
  }

  const auto keys = keys_for(inst, eta);
  Schedule remaining;
  for (int32_t i = 0; i < n; ++i)
    if (!failed[static_cast<size_t>(i)]) remaining.order.push_back(i);
  sort_by_key(remaining.order, keys);
  return remaining;
}

void write_frontier_csv(std::ostream& out, const std::vector<FrontierPoint>& points,
                        int precision) {
  out << "eta,schedule,expected_reward,expected_finish_time,objective\n";
  char buf[160];
  for (const auto& pt : points) {
    std::snprintf(buf, sizeof(buf), "%.*g,", precision, pt.eta);
    out << buf << pt.schedule.to_string();
    std::snprintf(buf, sizeof(buf), ",%.*g,%.*g,%.*g\n", precision, pt.expected_reward, precision,
                  pt.expected_finish_time, precision, pt.objective);
    out << buf;
  }
}

}  // namespace oppsched
