#include "oppsched/kernels.hpp"

#include <stdexcept>

namespace oppsched::kernels {

namespace {

Isa detect() {
#if defined(OPPSCHED_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
  return Isa::scalar;
}

// Selected once at startup (or overridden via select_isa before workers
// start); concurrent eval_batch calls only read it.
Isa g_isa = detect();

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2:   return "avx2";
  }
  return "?";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(OPPSCHED_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return g_isa; }

bool select_isa(Isa isa) {
  if (!isa_supported(isa)) return false;
  g_isa = isa;
  return true;
}

void eval_batch_with(Isa isa, const double* reward, const double* prob, const double* mean_time,
                     const int32_t* orders, int32_t n, int64_t count, double* reward_out,
                     double* time_out) {
  switch (isa) {
    case Isa::scalar:
      detail::eval_batch_scalar(reward, prob, mean_time, orders, n, count, reward_out, time_out);
      return;
    case Isa::avx2:
#if defined(OPPSCHED_HAVE_AVX2)
      detail::eval_batch_avx2(reward, prob, mean_time, orders, n, count, reward_out, time_out);
      return;
#else
      break;
#endif
  }
  throw std::logic_error("kernel variant not built for this target");
}

void eval_batch(const double* reward, const double* prob, const double* mean_time,
                const int32_t* orders, int32_t n, int64_t count, double* reward_out,
                double* time_out) {
  eval_batch_with(g_isa, reward, prob, mean_time, orders, n, count, reward_out, time_out);
}

}  // namespace oppsched::kernels
