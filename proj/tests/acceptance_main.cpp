// Acceptance suite: eight regression/property gates, one pass/fail line
// each. Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oppsched/analytics.hpp"
#include "oppsched/model.hpp"
#include "oppsched/simulate.hpp"
#include "oppsched/solver.hpp"
#include "testutil.hpp"

using namespace oppsched;

namespace {

struct Checker {
  int checks = 0;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  }
};

std::string data_path(const std::string& name) {
  return std::string(OPPSCHED_DATA_DIR) + "/" + name;
}

std::string run_cli(const std::string& args, int& status) {
  const std::string cmd = OPPSCHED_CLI_PATH " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  if (!pipe) {
    status = -1;
    return out;
  }
  char buf[4096];
  size_t got = 0;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  const int rc = pclose(pipe);
  status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return out;
}

std::vector<int32_t> one_based(const Schedule& s) {
  std::vector<int32_t> out;
  for (int32_t i : s.order) out.push_back(i + 1);
  return out;
}

std::string join(const std::vector<int32_t>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string grep_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  return "";
}

// ---- criterion 1 -----------------------------------------------------------

void criterion1(Checker& c) {
  const Instance inst = parse_instance_file(data_path("example5.csv"));
  const std::vector<int32_t> want_low{1, 2, 4, 3, 5};
  const std::vector<int32_t> want_high{4, 1, 5, 2, 3};

  c.expect(one_based(solve(inst, 0.02).schedule) == want_low,
           "solve(eta=0.02) != 1-2-4-3-5, got " + join(one_based(solve(inst, 0.02).schedule)));
  c.expect(one_based(solve(inst, 0.15).schedule) == want_high,
           "solve(eta=0.15) != 4-1-5-2-3, got " + join(one_based(solve(inst, 0.15).schedule)));

  int status = 0;
  const std::string low = run_cli("solve " + data_path("example5.csv") + " --eta 0.02", status);
  c.expect(status == 0 && grep_value(low, "schedule") == "1-2-4-3-5",
           "CLI solve --eta 0.02 did not print schedule 1-2-4-3-5");
  const std::string high = run_cli("solve " + data_path("example5.csv") + " --eta 0.15", status);
  c.expect(status == 0 && grep_value(high, "schedule") == "4-1-5-2-3",
           "CLI solve --eta 0.15 did not print schedule 4-1-5-2-3");
}

// ---- criterion 2 -----------------------------------------------------------

void criterion2(Checker& c) {
  const Instance inst = parse_instance_file(data_path("example20.json"));
  const std::vector<int32_t> seq0{9, 4, 12, 1, 16, 17, 20, 7, 10, 6,
                                  18, 11, 13, 15, 2, 5, 8, 3, 14, 19};
  const std::vector<int32_t> seq5{12, 16, 7, 11, 2, 17, 1, 6, 3, 4,
                                  14, 9, 15, 10, 19, 20, 8, 18, 5, 13};

  const auto at0 = solve(inst, 0.0);
  c.expect(at0.objective == at0.expected_reward, "J(0) must equal R-bar exactly");
  c.expect(std::abs(at0.objective - 27.928) <= 5e-3,
           "J(0) = " + std::to_string(at0.objective) + " not within 27.928 +- 5e-3");
  c.expect(one_based(at0.schedule) == seq0,
           "solve(0) sequence mismatch: got " + join(one_based(at0.schedule)));
  c.expect(std::abs(at0.expected_finish_time - 63.91) <= 5e-2,
           "T-bar(0) = " + std::to_string(at0.expected_finish_time) +
               " not within 63.91 +- 0.05 (the fixture's printed 3-digit inputs give 62.9291; "
               "every other reference value reproduces from the same fixture)");

  const auto at5 = solve(inst, 0.5);
  c.expect(std::abs(at5.expected_reward - 24.08) <= 5e-2,
           "R-bar(0.5) = " + std::to_string(at5.expected_reward) + " not within 24.08 +- 0.05");
  c.expect(std::abs(at5.expected_finish_time - 11.84) <= 5e-2,
           "T-bar(0.5) = " + std::to_string(at5.expected_finish_time) +
               " not within 11.84 +- 0.05");
  c.expect(one_based(at5.schedule) == seq5,
           "solve(0.5) sequence mismatch: got " + join(one_based(at5.schedule)));

  const double time_drop =
      100.0 * (1.0 - at5.expected_finish_time / at0.expected_finish_time);
  const double reward_drop = 100.0 * (1.0 - at5.expected_reward / at0.expected_reward);
  c.expect(std::abs(time_drop - 81.0) <= 0.5,
           "finish-time drop " + std::to_string(time_drop) + "% not within 81 +- 0.5pp");
  c.expect(std::abs(reward_drop - 13.8) <= 0.5,
           "reward drop " + std::to_string(reward_drop) + "% not within 13.8 +- 0.5pp");

  int status = 0;
  const std::string out = run_cli("solve " + data_path("example20.json") + " --eta 0", status);
  const std::string objective = grep_value(out, "objective");
  c.expect(status == 0 && !objective.empty() &&
               std::abs(std::stod(objective) - 27.928) <= 5e-3,
           "CLI objective line '" + objective + "' not within 27.928 +- 5e-3");
}

// ---- criterion 3 -----------------------------------------------------------

void criterion3(Checker& c) {
  std::mt19937_64 rng(30001);
  std::uniform_int_distribution<int32_t> size(2, 8);
  std::uniform_real_distribution<double> eta_dist(0.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = testutil::random_instance(rng, size(rng));
    const double eta = eta_dist(rng);
    const double gap = std::abs(brute_force(inst, eta).objective - solve(inst, eta).objective);
    worst = std::max(worst, gap);
  }
  c.expect(worst <= 1e-9,
           "max |brute_force J - solve J| = " + std::to_string(worst) + " > 1e-9");
}

// ---- criterion 4 -----------------------------------------------------------

void criterion4(Checker& c) {
  std::mt19937_64 rng(40001);
  bool all_ok = true;
  std::string first_failure;
  for (int trial = 0; trial < 10000 && all_ok; ++trial) {
    const int32_t n = 1 + static_cast<int32_t>(rng() % 10);
    const auto inst = testutil::random_instance(rng, n);
    const auto sched = testutil::random_schedule(rng, n);

    const auto coeff = success_coefficients(inst, sched);
    double sum = 0.0;
    for (double ci : coeff.c) sum += ci;
    const double rbar = expected_reward(inst, sched);
    const double tbar = expected_finish_time(inst, sched);
    const double max_r = inst.max_reward();
    const double total = inst.total_mean_time();
    const double first = inst.at(sched.order[0]).mean_response_time;

    if (std::abs(sum - 1.0) > 1e-12) {
      all_ok = false;
      first_failure = "coefficient sum off by " + std::to_string(sum - 1.0);
    } else if (!(rbar >= 0.0 && rbar <= max_r * (1.0 + 1e-12) + 1e-12)) {
      all_ok = false;
      first_failure = "R-bar out of [0, max r]";
    } else if (!(tbar >= first * (1.0 - 1e-12) && tbar <= total * (1.0 + 1e-12))) {
      all_ok = false;
      first_failure = "T-bar out of [min prefix, total time]";
    }
  }
  c.expect(all_ok, first_failure);
}

// ---- criterion 5 -----------------------------------------------------------

Instance equal_key_instance(std::mt19937_64& rng, double key_value, double eta, int32_t n) {
  const double probs[] = {0.25, 0.5, 1.0};
  std::vector<Opportunity> records;
  for (int32_t i = 0; i < n; ++i) {
    Opportunity o;
    o.id = "e" + std::to_string(i + 1);
    o.reward = key_value + static_cast<double>(1 + rng() % 64) / 4.0;
    o.success_prob = probs[rng() % 3];
    o.mean_response_time = (o.reward - key_value) * o.success_prob / eta;
    o.dist_family = DistFamily::exponential;
    records.push_back(std::move(o));
  }
  return validate_instance(std::move(records));
}

void criterion5(Checker& c) {
  std::mt19937_64 rng(50001);
  std::uniform_real_distribution<double> eta_dist(0.0, 2.0);
  bool keys_ok = true, swaps_ok = true, ties_ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const int32_t n = 2 + static_cast<int32_t>(rng() % 9);
    const auto inst = testutil::random_instance(rng, n);
    const double eta = eta_dist(rng);
    const auto best = solve(inst, eta);

    for (size_t i = 1; i < best.schedule.order.size(); ++i)
      keys_ok = keys_ok && sort_key(inst.at(best.schedule.order[i - 1]), eta).key >=
                               sort_key(inst.at(best.schedule.order[i]), eta).key;

    for (size_t k = 0; k + 1 < best.schedule.order.size(); ++k) {
      Schedule swapped = best.schedule;
      std::swap(swapped.order[k], swapped.order[k + 1]);
      swaps_ok =
          swaps_ok && evaluate(inst, swapped, eta).objective <= best.objective + 1e-12;
    }

    const auto tie_inst = equal_key_instance(rng, 4.0, 0.5, 3 + static_cast<int32_t>(rng() % 4));
    const double tie_best = solve(tie_inst, 0.5).objective;
    for (int perm = 0; perm < 5; ++perm) {
      const auto sched = testutil::random_schedule(rng, tie_inst.size());
      ties_ok =
          ties_ok && std::abs(evaluate(tie_inst, sched, 0.5).objective - tie_best) <= 1e-12;
    }
  }
  c.expect(keys_ok, "a solved schedule had an increasing key pair");
  c.expect(swaps_ok, "an adjacent swap raised the objective by more than 1e-12");
  c.expect(ties_ok, "permuting an equal-key block moved J by more than 1e-12");
}

// ---- criterion 6 -----------------------------------------------------------

void criterion6(Checker& c) {
  std::mt19937_64 rng(60001);
  std::uniform_real_distribution<double> eta_dist(0.0, 2.0);
  bool ok = true;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    const int32_t n = 2 + static_cast<int32_t>(rng() % 9);
    const auto inst = testutil::random_instance(rng, n);
    const double eta = eta_dist(rng);
    const auto batch = solve(inst, eta).schedule;
    for (int32_t k = 0; k <= n && ok; ++k) {
      const std::vector<int32_t> failed(batch.order.begin(), batch.order.begin() + k);
      const std::vector<int32_t> suffix(batch.order.begin() + k, batch.order.end());
      ok = sequential_replan(inst, eta, failed).order == suffix;
    }
  }
  c.expect(ok, "a replanned suffix diverged from the batch schedule");
}

// ---- criterion 7 -----------------------------------------------------------

bool summaries_identical(const SimulationSummary& a, const SimulationSummary& b) {
  if (a.replications != b.replications) return false;
  if (!testutil::bits_equal(a.mean_reward, b.mean_reward)) return false;
  if (!testutil::bits_equal(a.mean_finish_time, b.mean_finish_time)) return false;
  if (a.reward_histogram != b.reward_histogram) return false;
  for (size_t i = 0; i < a.finish_time_samples.size(); ++i)
    if (!testutil::bits_equal(a.finish_time_samples[i], b.finish_time_samples[i])) return false;
  return true;
}

void criterion7(Checker& c) {
  std::mt19937_64 rng(70001);
  const int64_t reps = 100000;
  bool moments_ok = true, curves_ok = true, rerun_ok = true;
  std::string detail;

  for (int trial = 0; trial < 20; ++trial) {
    const int32_t n = 2 + static_cast<int32_t>(rng() % 5);
    const auto inst = testutil::random_instance(rng, n);
    const auto sched = testutil::random_schedule(rng, n);
    const uint64_t seed = 9000 + static_cast<uint64_t>(trial);

    const auto s = simulate(inst, sched, reps, seed);
    const double rbar = expected_reward(inst, sched);
    const double tbar = expected_finish_time(inst, sched);
    if (std::abs(s.mean_reward - rbar) > 4.0 * s.reward_se() + 1e-12) {
      moments_ok = false;
      detail = "trial " + std::to_string(trial) + ": mean reward " +
               std::to_string(s.mean_reward) + " vs " + std::to_string(rbar) + " (se " +
               std::to_string(s.reward_se()) + ")";
    }
    if (std::abs(s.mean_finish_time - tbar) > 4.0 * s.finish_time_se() + 1e-12) {
      moments_ok = false;
      detail = "trial " + std::to_string(trial) + ": mean finish time " +
               std::to_string(s.mean_finish_time) + " vs " + std::to_string(tbar) + " (se " +
               std::to_string(s.finish_time_se()) + ")";
    }

    // deterministic variant: empirical finish CDF against the closed form
    auto det_inst = inst;
    for (auto& o : det_inst.opportunities) o.dist_family = DistFamily::deterministic;
    std::vector<double> ts;
    const double horizon = det_inst.total_mean_time() * 1.05;
    for (int k = 0; k < 10; ++k)
      ts.push_back(horizon * (static_cast<double>(k) + 0.37) / 10.0);
    const auto emp = empirical_curves(det_inst, sched, ts, reps, seed);
    const auto exact = time_curves(det_inst, sched, ts);
    for (size_t i = 0; i < ts.size(); ++i) {
      const double phat = emp[i].finish_cdf;
      const double se = std::sqrt(phat * (1.0 - phat) / static_cast<double>(reps));
      if (std::abs(phat - exact[i].finish_cdf) > 4.0 * se + 1e-12) {
        curves_ok = false;
        detail = "trial " + std::to_string(trial) + ": Phi_T(" + std::to_string(ts[i]) +
                 ") = " + std::to_string(phat) + " vs " + std::to_string(exact[i].finish_cdf);
      }
    }

    if (trial < 3) {
      rerun_ok = rerun_ok && summaries_identical(s, simulate(inst, sched, reps, seed));
      rerun_ok = rerun_ok && summaries_identical(s, simulate(inst, sched, reps, seed, 2));
      const auto emp2 = empirical_curves(det_inst, sched, ts, reps, seed, 2);
      for (size_t i = 0; i < ts.size(); ++i)
        rerun_ok = rerun_ok && testutil::bits_equal(emp[i].finish_cdf, emp2[i].finish_cdf) &&
                   testutil::bits_equal(emp[i].expected_reward, emp2[i].expected_reward);
    }
  }
  c.expect(moments_ok, "empirical moment outside 4 standard errors: " + detail);
  c.expect(curves_ok, "empirical finish CDF outside 4 standard errors: " + detail);
  c.expect(rerun_ok, "a same-seed rerun was not byte-identical");
}

// ---- criterion 8 -----------------------------------------------------------

void criterion8(Checker& c) {
  const Instance inst = parse_instance_file(data_path("example5.csv"));
  const auto cloud = enumerate_cloud(inst);
  std::vector<TradeoffPoint> pts;
  pts.reserve(cloud.size());
  for (const auto& pt : cloud) pts.push_back({pt.expected_finish_time, pt.expected_reward});
  const auto front = pareto_filter(pts);

  const auto sweep = frontier_sweep(inst, 0.0, 0.5, 201);
  c.expect(sweep.size() >= 2, "sweep produced fewer than two distinct schedules");
  for (const auto& fp : sweep) {
    const auto it = std::find_if(cloud.begin(), cloud.end(), [&fp](const CloudPoint& cp) {
      return cp.schedule == fp.schedule;
    });
    if (it == cloud.end()) {
      c.expect(false, "sweep schedule " + fp.schedule.to_string() + " missing from the cloud");
      continue;
    }
    const TradeoffPoint target{it->expected_finish_time, it->expected_reward};
    const bool member = std::any_of(front.begin(), front.end(),
                                    [&target](const TradeoffPoint& p) { return p == target; });
    c.expect(member, "sweep schedule " + fp.schedule.to_string() +
                         " is not on the Pareto frontier of the cloud");
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<void(Checker&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "five-opportunity fixture regression", 1.0, criterion1},
      {2, "n=20 regression", 1.0, criterion2},
      {3, "brute-force oracle equivalence (500 random instances)", 60.0, criterion3},
      {4, "normalization and bounds (10^4 random pairs)", 10.0, criterion4},
      {5, "exchange and tie properties (200 random instances)", 60.0, criterion5},
      {6, "sequential replanning equals the batch suffix", 60.0, criterion6},
      {7, "simulator consistency (20 instances x 10^5 replications)", 120.0, criterion7},
      {8, "sweep schedules are Pareto-optimal in the full cloud", 60.0, criterion8},
  };

  int failed = 0;
  for (const auto& criterion : criteria) {
    Checker checker;
    const auto start = std::chrono::steady_clock::now();
    criterion.fn(checker);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    checker.expect(elapsed < criterion.budget_seconds,
                   "runtime " + std::to_string(elapsed) + "s exceeded " +
                       std::to_string(criterion.budget_seconds) + "s");

    const bool ok = checker.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("[%s] criterion %d: %s (%.2fs, %d/%d checks)\n", ok ? "PASS" : "FAIL",
                criterion.id, criterion.name, elapsed,
                checker.checks - static_cast<int>(checker.failures.size()), checker.checks);
    for (const auto& failure : checker.failures) std::printf("       - %s\n", failure.c_str());
  }
  return failed;
}
