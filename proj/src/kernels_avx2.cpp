#include "oppsched/kernels.hpp"

#if defined(OPPSCHED_HAVE_AVX2)

#include <immintrin.h>

namespace oppsched::kernels::detail {

// Four schedules per pass, one lane each. The per-position loads are
// index gathers because each lane walks the instance arrays in its own
// order. Lane arithmetic mirrors eval_one exactly: mul/add/sub only, no
// FMA, so results are bit-identical to the scalar kernel.
void eval_batch_avx2(const double* reward, const double* prob, const double* mean_time,
                     const int32_t* orders, int32_t n, int64_t count, double* reward_out,
                     double* time_out) {
  const __m256d one = _mm256_set1_pd(1.0);
  int64_t b = 0;
  for (; b + 4 <= count; b += 4) {
    const int32_t* o0 = orders + (b + 0) * n;
    const int32_t* o1 = orders + (b + 1) * n;
    const int32_t* o2 = orders + (b + 2) * n;
    const int32_t* o3 = orders + (b + 3) * n;
    __m256d surv = one;
    __m256d rwd = _mm256_setzero_pd();
    __m256d prefix = _mm256_setzero_pd();
    __m256d wait = _mm256_setzero_pd();
    for (int32_t i = 0; i < n; ++i) {
      const __m128i idx = _mm_setr_epi32(o0[i], o1[i], o2[i], o3[i]);
      const __m256d p = _mm256_i32gather_pd(prob, idx, 8);
      const __m256d r = _mm256_i32gather_pd(reward, idx, 8);
      const __m256d t = _mm256_i32gather_pd(mean_time, idx, 8);
      const __m256d c = _mm256_mul_pd(surv, p);
      rwd = _mm256_add_pd(rwd, _mm256_mul_pd(c, r));
      prefix = _mm256_add_pd(prefix, t);
      wait = _mm256_add_pd(wait, _mm256_mul_pd(c, prefix));
      surv = _mm256_mul_pd(surv, _mm256_sub_pd(one, p));
    }
    wait = _mm256_add_pd(wait, _mm256_mul_pd(surv, prefix));
    _mm256_storeu_pd(reward_out + b, rwd);
    _mm256_storeu_pd(time_out + b, wait);
  }
  if (b < count) {
    eval_batch_scalar(reward, prob, mean_time, orders + b * n, n, count - b, reward_out + b,
                      time_out + b);
  }
}

}  // namespace oppsched::kernels::detail

#endif  // OPPSCHED_HAVE_AVX2
