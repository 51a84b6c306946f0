#include "oppsched/analytics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "oppsched/kernels.hpp"

namespace oppsched {

namespace {

void check_eta(double eta) {
  if (!(eta >= 0.0)) fail(Errc::negative_eta, "eta must be >= 0");
}

void eval_pair(const Instance& inst, const Schedule& sched, double& rbar, double& tbar) {
  require_schedule_for(inst, sched);
  const auto soa = kernels::SoaView::from(inst);
  kernels::eval_one(soa.reward.data(), soa.prob.data(), soa.mean_time.data(), sched.order.data(),
                    inst.size(), rbar, tbar);
}

}  // namespace

SuccessCoefficients success_coefficients(const Instance& inst, const Schedule& sched) {
  require_schedule_for(inst, sched);
  const int32_t n = inst.size();
  SuccessCoefficients out;
  out.c.resize(static_cast<size_t>(n) + 1);
  double surv = 1.0;
  for (int32_t i = 0; i < n; ++i) {
    const double p = inst.at(sched.order[static_cast<size_t>(i)]).success_prob;
    out.c[static_cast<size_t>(i)] = surv * p;
    surv *= 1.0 - p;
  }
  out.c.back() = surv;
  return out;
}

double expected_reward(const Instance& inst, const Schedule& sched) {
  double rbar = 0.0, tbar = 0.0;
  eval_pair(inst, sched, rbar, tbar);
  return rbar;
}

double expected_finish_time(const Instance& inst, const Schedule& sched) {
  double rbar = 0.0, tbar = 0.0;
  eval_pair(inst, sched, rbar, tbar);
  return tbar;
}

EvaluatedSchedule evaluate(const Instance& inst, const Schedule& sched, double eta) {
  check_eta(eta);
  EvaluatedSchedule out;
  eval_pair(inst, sched, out.expected_reward, out.expected_finish_time);
  out.schedule = sched;
  out.eta = eta;
  out.objective = out.expected_reward - eta * out.expected_finish_time;
  return out;
}

std::vector<TimePoint> time_curves(const Instance& inst, const Schedule& sched,
                                   const std::vector<double>& ts) {
  require_schedule_for(inst, sched);
  for (const auto& o : inst.opportunities) {
    if (o.dist_family != DistFamily::deterministic)
      fail(Errc::unsupported_distribution,
           "closed-form curves need Deterministic times (id '" + o.id +
               "' is not); use the simulator's empirical curves");
  }
  for (double t : ts)
    if (!(t >= 0.0)) fail(Errc::negative_time, "time grid values must be >= 0");

  const int32_t n = inst.size();
  const auto coeff = success_coefficients(inst, sched);

  // Deterministic times make each prefix-sum CDF a unit step at s_i.
  std::vector<double> step_at(static_cast<size_t>(n));
  double prefix = 0.0;
  for (int32_t i = 0; i < n; ++i) {
    prefix += inst.at(sched.order[static_cast<size_t>(i)]).mean_response_time;
    step_at[static_cast<size_t>(i)] = prefix;
  }

  std::vector<TimePoint> out;
  out.reserve(ts.size());
  for (double t : ts) {
    TimePoint pt;
    pt.t = t;
    pt.absorb_probs.resize(static_cast<size_t>(n), 0.0);
    double reward_sum = 0.0, absorb_sum = 0.0;
    for (int32_t i = 0; i < n; ++i) {
      if (t >= step_at[static_cast<size_t>(i)]) {
        const double ci = coeff.c[static_cast<size_t>(i)];
        pt.absorb_probs[static_cast<size_t>(i)] = ci;
        absorb_sum += ci;
        reward_sum += inst.at(sched.order[static_cast<size_t>(i)]).reward * ci;
      }
    }
    pt.expected_reward = reward_sum;
    // rounding in the coefficient sums can overshoot the probability range
    // by an ulp; the fields are probabilities, so pin them
    pt.finish_cdf =
        std::clamp(absorb_sum + (t >= step_at.back() ? coeff.all_fail() : 0.0), 0.0, 1.0);
    pt.zero_reward_prob = std::clamp(1.0 - absorb_sum, 0.0, 1.0);
    out.push_back(std::move(pt));
  }
  return out;
}

void write_curves_csv(std::ostream& out, const std::vector<TimePoint>& points, int precision) {
  out << "t,expected_reward,finish_cdf,zero_reward_prob\n";
  char buf[128];
  for (const auto& pt : points) {
    std::snprintf(buf, sizeof(buf), "%.*g,%.*g,%.*g,%.*g\n", precision, pt.t, precision,
                  pt.expected_reward, precision, pt.finish_cdf, precision, pt.zero_reward_prob);
    out << buf;
  }
}

}  // namespace oppsched
