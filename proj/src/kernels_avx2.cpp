#include "ocsim/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace ocsim::kern {
namespace {

__attribute__((target("avx2"))) void affine_map_avx2(const double* const* cols,
                                                     const double* w, int k,
                                                     double acc0, double* out,
                                                     int n) {
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_set1_pd(acc0);
    for (int j = 0; j < k; ++j) {
      __m256d c = _mm256_loadu_pd(cols[j] + i);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(w[j]), c));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = acc0;
    for (int j = 0; j < k; ++j) acc = acc + w[j] * cols[j][i];
    out[i] = acc;
  }
}

__attribute__((target("avx2"))) void axpy_avx2(double a, const double* x,
                                               double* y, int n) {
  __m256d va = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

__attribute__((target("avx2"))) void mul_add_avx2(const double* x,
                                                  const double* y, double* out,
                                                  int n) {
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vo = _mm256_loadu_pd(out + i);
    vo = _mm256_add_pd(
        vo, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(out + i, vo);
  }
  for (; i < n; ++i) out[i] = out[i] + x[i] * y[i];
}

__attribute__((target("avx2"))) double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

__attribute__((target("avx2"))) double dot_avx2(const double* x,
                                                const double* y, int n) {
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

__attribute__((target("avx2"))) double sum_avx2(const double* x, int n) {
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

__attribute__((target("avx2"))) double max_value_avx2(const double* x, int n) {
  if (n < 4) {
    double best = x[0];
    for (int i = 1; i < n; ++i)
      if (x[i] > best) best = x[i];
    return best;
  }
  __m256d acc = _mm256_loadu_pd(x);
  int i = 4;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d pair = _mm_max_pd(lo, hi);
  double best = _mm_cvtsd_f64(_mm_max_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i)
    if (x[i] > best) best = x[i];
  return best;
}

__attribute__((target("avx2"))) void argmax_update_avx2(const double* vals,
                                                        int idx,
                                                        double* best_val,
                                                        int* best_idx, int n) {
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(vals + i);
    __m256d b = _mm256_loadu_pd(best_val + i);
    __m256d gt = _mm256_cmp_pd(v, b, _CMP_GT_OQ);
    _mm256_storeu_pd(best_val + i, _mm256_blendv_pd(b, v, gt));
    int bits = _mm256_movemask_pd(gt);
    if (bits) {
      for (int lane = 0; lane < 4; ++lane)
        if (bits & (1 << lane)) best_idx[i + lane] = idx;
    }
  }
  for (; i < n; ++i) {
    if (vals[i] > best_val[i]) {
      best_val[i] = vals[i];
      best_idx[i] = idx;
    }
  }
}

}  // namespace

const Ops* avx2_ops_if_supported() {
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  static const Ops ops = {
      "avx2",         affine_map_avx2, axpy_avx2,
      mul_add_avx2,   dot_avx2,        sum_avx2,
      max_value_avx2, argmax_update_avx2,
  };
  return &ops;
}

}  // namespace ocsim::kern

#else

namespace ocsim::kern {
const Ops* avx2_ops_if_supported() { return nullptr; }
}  // namespace ocsim::kern

#endif
