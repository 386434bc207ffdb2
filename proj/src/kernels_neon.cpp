#include "ocsim/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace ocsim::kern {
namespace {

void affine_map_neon(const double* const* cols, const double* w, int k,
                     double acc0, double* out, int n) {
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vdupq_n_f64(acc0);
    for (int j = 0; j < k; ++j)
      acc = vaddq_f64(acc, vmulq_n_f64(vld1q_f64(cols[j] + i), w[j]));
    vst1q_f64(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = acc0;
    for (int j = 0; j < k; ++j) acc = acc + w[j] * cols[j][i];
    out[i] = acc;
  }
}

void axpy_neon(double a, const double* x, double* y, int n) {
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vaddq_f64(vy, vmulq_n_f64(vld1q_f64(x + i), a));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void mul_add_neon(const double* x, const double* y, double* out, int n) {
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vo = vld1q_f64(out + i);
    vo = vaddq_f64(vo, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    vst1q_f64(out + i, vo);
  }
  for (; i < n; ++i) out[i] = out[i] + x[i] * y[i];
}

double dot_neon(const double* x, const double* y, int n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  int i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

double sum_neon(const double* x, int n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  int i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += x[i];
  return r;
}

double max_value_neon(const double* x, int n) {
  if (n < 2) return x[0];
  float64x2_t acc = vld1q_f64(x);
  int i = 2;
  for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vld1q_f64(x + i));
  double best = vgetq_lane_f64(acc, 0);
  double hi = vgetq_lane_f64(acc, 1);
  if (hi > best) best = hi;
  for (; i < n; ++i)
    if (x[i] > best) best = x[i];
  return best;
}

void argmax_update_neon(const double* vals, int idx, double* best_val,
                        int* best_idx, int n) {
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vld1q_f64(vals + i);
    float64x2_t b = vld1q_f64(best_val + i);
    uint64x2_t gt = vcgtq_f64(v, b);
    vst1q_f64(best_val + i, vbslq_f64(gt, v, b));
    if (vgetq_lane_u64(gt, 0)) best_idx[i] = idx;
    if (vgetq_lane_u64(gt, 1)) best_idx[i + 1] = idx;
  }
  for (; i < n; ++i) {
    if (vals[i] > best_val[i]) {
      best_val[i] = vals[i];
      best_idx[i] = idx;
    }
  }
}

}  // namespace

const Ops* neon_ops_if_supported() {
  static const Ops ops = {
      "neon",         affine_map_neon, axpy_neon,
      mul_add_neon,   dot_neon,        sum_neon,
      max_value_neon, argmax_update_neon,
  };
  return &ops;
}

}  // namespace ocsim::kern

#else

namespace ocsim::kern {
const Ops* neon_ops_if_supported() { return nullptr; }
}  // namespace ocsim::kern

#endif
