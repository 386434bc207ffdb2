#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ocsim::kern {

// Vectorized inner loops with a scalar reference implementation.
//
// Contract: affine_map, axpy, mul_add, max_value and argmax_update evaluate
// each element in the same order as the scalar reference and must produce
// bit-identical results on every implementation (lanes are independent and
// fp contraction is disabled project-wide). dot and sum may reassociate, so
// they only agree with the reference to rounding (tested at 1e-12 relative).
struct Ops {
  const char* name;

  // out[i] = ((acc0 + w[0]*cols[0][i]) + w[1]*cols[1][i]) + ...
  void (*affine_map)(const double* const* cols, const double* w, int k,
                     double acc0, double* out, int n);

  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, int n);

  // out[i] += x[i] * y[i]
  void (*mul_add)(const double* x, const double* y, double* out, int n);

  double (*dot)(const double* x, const double* y, int n);

  double (*sum)(const double* x, int n);

  // n >= 1
  double (*max_value)(const double* x, int n);

  // Where vals[i] > best_val[i] (strictly): best_val[i] = vals[i],
  // best_idx[i] = idx. Feeding rows in ascending index order therefore keeps
  // the lowest index on ties.
  void (*argmax_update)(const double* vals, int idx, double* best_val,
                        int* best_idx, int n);
};

const Ops& scalar_ops();

// Best implementation for the host CPU, chosen once at startup. The
// OCSIM_KERNEL environment variable ("scalar", "avx2", "neon") overrides the
// choice; an unavailable request falls back to scalar.
const Ops& active_ops();

// Every implementation compiled in and runnable on this host.
std::vector<const Ops*> available_ops();

}  // namespace ocsim::kern
