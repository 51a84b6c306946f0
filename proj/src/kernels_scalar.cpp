#include "oppsched/kernels.hpp"

namespace oppsched::kernels {

SoaView SoaView::from(const Instance& inst) {
  SoaView soa;
  const size_t n = inst.opportunities.size();
  soa.reward.reserve(n);
  soa.prob.reserve(n);
  soa.mean_time.reserve(n);
  for (const auto& o : inst.opportunities) {
    soa.reward.push_back(o.reward);
    soa.prob.push_back(o.success_prob);
    soa.mean_time.push_back(o.mean_response_time);
  }
  return soa;
}

// Reference kernel. One pass over the trying order:
//   c_i     = p_{o(i)} * prod_{j<i} (1 - p_{o(j)})   (first-success prob)
//   reward  = sum_i c_i * r_{o(i)}
//   time    = sum_i c_i * prefix_i + c_{n+1} * prefix_n
// The op sequence here is the contract: the SIMD variants perform the same
// IEEE operations lane-wise and must match bit for bit (ffp-contract=off).
void eval_one(const double* reward, const double* prob, const double* mean_time,
              const int32_t* order, int32_t n, double& reward_out, double& time_out) {
  double surv = 1.0;
  double rwd = 0.0;
  double prefix = 0.0;
  double wait = 0.0;
  for (int32_t i = 0; i < n; ++i) {
    const int32_t k = order[i];
    const double c = surv * prob[k];
    rwd = rwd + c * reward[k];
    prefix = prefix + mean_time[k];
    wait = wait + c * prefix;
    surv = surv * (1.0 - prob[k]);
  }
  reward_out = rwd;
  time_out = wait + surv * prefix;
}

namespace detail {

void eval_batch_scalar(const double* reward, const double* prob, const double* mean_time,
                       const int32_t* orders, int32_t n, int64_t count, double* reward_out,
                       double* time_out) {
  for (int64_t b = 0; b < count; ++b) {
    eval_one(reward, prob, mean_time, orders + b * n, n, reward_out[b], time_out[b]);
  }
}

}  // namespace detail
}  // namespace oppsched::kernels
