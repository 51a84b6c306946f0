#pragma once

#include <cstdint>
#include <vector>

#include "oppsched/model.hpp"

namespace oppsched::kernels {

/// Structure-of-arrays view of an Instance, the layout the evaluation
/// kernels consume.
struct SoaView {
  std::vector<double> reward;
  std::vector<double> prob;
  std::vector<double> mean_time;

  static SoaView from(const Instance& inst);
  int32_t size() const { return static_cast<int32_t>(reward.size()); }
};

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);
bool isa_supported(Isa isa);
/// Currently selected implementation (auto-detected on first use).
Isa active_isa();
/// Forces an implementation; returns false (and leaves the selection
/// unchanged) if the host cannot run it. Call before spawning workers.
bool select_isa(Isa isa);

/// Evaluates `count` schedules against one instance. `orders` holds count
/// rows of n 0-based indices, row-major; each must be a permutation of
/// 0..n-1 (not checked here). Writes the eventual expected reward and the
/// expected finish time per row. Dispatches to the selected ISA; every
/// variant produces bit-identical results.
void eval_batch(const double* reward, const double* prob, const double* mean_time,
                const int32_t* orders, int32_t n, int64_t count, double* reward_out,
                double* time_out);

/// Same as eval_batch but runs the named variant explicitly (for the
/// equivalence tests). The variant must be isa_supported().
void eval_batch_with(Isa isa, const double* reward, const double* prob, const double* mean_time,
                     const int32_t* orders, int32_t n, int64_t count, double* reward_out,
                     double* time_out);

/// Scalar single-schedule evaluation; the reference everything else is
/// equivalence-tested against.
void eval_one(const double* reward, const double* prob, const double* mean_time,
              const int32_t* order, int32_t n, double& reward_out, double& time_out);

inline void eval_batch(const SoaView& soa, const int32_t* orders, int64_t count,
                       double* reward_out, double* time_out) {
  eval_batch(soa.reward.data(), soa.prob.data(), soa.mean_time.data(), orders, soa.size(), count,
             reward_out, time_out);
}

namespace detail {
void eval_batch_scalar(const double* reward, const double* prob, const double* mean_time,
                       const int32_t* orders, int32_t n, int64_t count, double* reward_out,
                       double* time_out);
#if defined(OPPSCHED_HAVE_AVX2)
void eval_batch_avx2(const double* reward, const double* prob, const double* mean_time,
                     const int32_t* orders, int32_t n, int64_t count, double* reward_out,
                     double* time_out);
#endif
}  // namespace detail

}  // namespace oppsched::kernels
