#include "ocsim/kernels.hpp"

namespace ocsim::kern {
namespace {

void affine_map_scalar(const double* const* cols, const double* w, int k,
                       double acc0, double* out, int n) {
  for (int i = 0; i < n; ++i) {
    double acc = acc0;
    for (int j = 0; j < k; ++j) acc = acc + w[j] * cols[j][i];
    out[i] = acc;
  }
}

void axpy_scalar(double a, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void mul_add_scalar(const double* x, const double* y, double* out, int n) {
  for (int i = 0; i < n; ++i) out[i] = out[i] + x[i] * y[i];
}

double dot_scalar(const double* x, const double* y, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_scalar(const double* x, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double max_value_scalar(const double* x, int n) {
  double best = x[0];
  for (int i = 1; i < n; ++i)
    if (x[i] > best) best = x[i];
  return best;
}

void argmax_update_scalar(const double* vals, int idx, double* best_val,
                          int* best_idx, int n) {
  for (int i = 0; i < n; ++i) {
    if (vals[i] > best_val[i]) {
      best_val[i] = vals[i];
      best_idx[i] = idx;
    }
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",         affine_map_scalar, axpy_scalar,
      mul_add_scalar,   dot_scalar,        sum_scalar,
      max_value_scalar, argmax_update_scalar,
  };
  return ops;
}

}  // namespace ocsim::kern
