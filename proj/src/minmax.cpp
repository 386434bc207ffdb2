#include "ocsim/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocsim/errors.hpp"
#include "ocsim/kernels.hpp"

namespace ocsim {

namespace {

void check_instance(const MinmaxInstance& inst) {
  if (inst.dim < 1 || inst.points < 1)
    throw ConfigError("minmax instance needs dim >= 1 and points >= 1");
  if (static_cast<int>(inst.alpha.size()) != inst.points ||
      static_cast<int>(inst.beta.size()) != inst.dim)
    throw ConfigError("minmax instance has mismatched sizes");
  for (const auto& row : inst.beta)
    if (static_cast<int>(row.size()) != inst.points)
      throw ConfigError("minmax instance has mismatched beta row");
}

// Columns of the LP
//   min sum_g alpha[g] psi_g + sum_i s_i
//   s.t. sum_g psi_g = 1
//        sum_g beta[i][g] psi_g + s_i - r_i = 0
// in id order: grid 0..G-1, then s_0..s_{d-1}, then r_0..r_{d-1}.
struct Lp {
  const MinmaxInstance& inst;
  int rows;  // dim + 1
  int cols;  // points + 2*dim

  explicit Lp(const MinmaxInstance& in)
      : inst(in), rows(in.dim + 1), cols(in.points + 2 * in.dim) {}

  double cost(int j) const {
    if (j < inst.points) return inst.alpha[j];
    return j < inst.points + inst.dim ? 1.0 : 0.0;
  }

  void column(int j, double* a) const {
    std::fill(a, a + rows, 0.0);
    if (j < inst.points) {
      a[0] = 1.0;
      for (int i = 0; i < inst.dim; ++i) a[1 + i] = inst.beta[i][j];
    } else if (j < inst.points + inst.dim) {
      a[1 + (j - inst.points)] = 1.0;
    } else {
      a[1 + (j - inst.points - inst.dim)] = -1.0;
    }
  }
};

struct LpResult {
  bool solved = false;
  std::vector<int> support;
  std::vector<double> probs;
  std::vector<double> duals;  // size rows
  int pivots = 0;
};

LpResult solve_lp(const MinmaxInstance& inst) {
  constexpr double kTol = 1e-11;
  Lp lp(inst);
  const int R = lp.rows;
  LpResult out;

  // Start from a point mass on the cheapest grid column; rows i are covered
  // by s_i or r_i picked so the basic solution is nonnegative.
  int g0 = 0;
  for (int g = 1; g < inst.points; ++g)
    if (inst.alpha[g] < inst.alpha[g0]) g0 = g;

  std::vector<int> basis(R);
  std::vector<double> binv(static_cast<size_t>(R) * R, 0.0);
  std::vector<double> xb(R, 0.0);
  basis[0] = g0;
  binv[0] = 1.0;
  xb[0] = 1.0;
  for (int i = 0; i < inst.dim; ++i) {
    double b = inst.beta[i][g0];
    double sign = b <= 0.0 ? 1.0 : -1.0;
    basis[1 + i] = inst.points + (b <= 0.0 ? i : inst.dim + i);
    binv[static_cast<size_t>(1 + i) * R] = -sign * b;
    binv[static_cast<size_t>(1 + i) * R + (1 + i)] = sign;
    xb[1 + i] = std::fabs(b);
  }

  std::vector<double> y(R), a(R), u(R);
  const int pivot_cap = 10 * lp.cols + 200;
  while (true) {
    if (out.pivots > pivot_cap) return out;
    for (int r = 0; r < R; ++r) {
      double acc = 0.0;
      for (int k = 0; k < R; ++k)
        acc += lp.cost(basis[k]) * binv[static_cast<size_t>(k) * R + r];
      y[r] = acc;
    }
    int enter = -1;
    for (int j = 0; j < lp.cols; ++j) {
      lp.column(j, a.data());
      double rc = lp.cost(j);
      for (int r = 0; r < R; ++r) rc -= y[r] * a[r];
      if (rc < -kTol) {
        enter = j;
        break;  // Bland: lowest id
      }
    }
    if (enter < 0) break;
    lp.column(enter, a.data());
    for (int r = 0; r < R; ++r) {
      double acc = 0.0;
      for (int k = 0; k < R; ++k)
        acc += binv[static_cast<size_t>(r) * R + k] * a[k];
      u[r] = acc;
    }
    int leave = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < R; ++r) {
      if (u[r] <= kTol) continue;
      double ratio = xb[r] / u[r];
      if (leave < 0 || ratio < best_ratio - kTol ||
          (ratio < best_ratio + kTol && basis[r] < basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return out;  // no finite ratio: bail to the fallback
    double piv = u[leave];
    for (int k = 0; k < R; ++k) binv[static_cast<size_t>(leave) * R + k] /= piv;
    xb[leave] /= piv;
    for (int r = 0; r < R; ++r) {
      if (r == leave) continue;
      double m = u[r];
      if (m == 0.0) continue;
      for (int k = 0; k < R; ++k)
        binv[static_cast<size_t>(r) * R + k] -=
            m * binv[static_cast<size_t>(leave) * R + k];
      xb[r] -= m * xb[leave];
    }
    basis[leave] = enter;
    ++out.pivots;
  }

  double mass = 0.0;
  for (int r = 0; r < R; ++r) {
    if (basis[r] < inst.points && xb[r] > kTol) {
      out.support.push_back(basis[r]);
      out.probs.push_back(xb[r]);
      mass += xb[r];
    }
  }
  if (out.support.empty() || mass <= 0.0) return out;
  for (double& p : out.probs) p /= mass;
  // Keep support in grid order; sort pairs by index.
  std::vector<int> order(out.support.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int l, int r) { return out.support[l] < out.support[r]; });
  std::vector<int> sup(out.support.size());
  std::vector<double> pr(out.probs.size());
  for (size_t i = 0; i < order.size(); ++i) {
    sup[i] = out.support[order[i]];
    pr[i] = out.probs[order[i]];
  }
  out.support = std::move(sup);
  out.probs = std::move(pr);
  out.duals = y;
  out.solved = true;
  return out;
}

}  // namespace

double game_objective(const MinmaxInstance& inst,
                      const std::vector<double>& psi_dense) {
  const kern::Ops& ops = kern::active_ops();
  double f = ops.dot(psi_dense.data(), inst.alpha.data(), inst.points);
  for (int i = 0; i < inst.dim; ++i) {
    double b = ops.dot(psi_dense.data(), inst.beta[i].data(), inst.points);
    if (b < 0.0) f -= b;
  }
  return f;
}

double game_objective_sparse(const MinmaxInstance& inst,
                             const std::vector<int>& support,
                             const std::vector<double>& probs) {
  double f = 0.0;
  for (size_t k = 0; k < support.size(); ++k)
    f += probs[k] * inst.alpha[support[k]];
  for (int i = 0; i < inst.dim; ++i) {
    double b = 0.0;
    for (size_t k = 0; k < support.size(); ++k)
      b += probs[k] * inst.beta[i][support[k]];
    if (b < 0.0) f -= b;
  }
  return f;
}

double certificate_lower(const MinmaxInstance& inst,
                         const std::vector<double>& mu) {
  const kern::Ops& ops = kern::active_ops();
  std::vector<double> cost(inst.alpha);
  for (int i = 0; i < inst.dim; ++i)
    ops.axpy(-mu[i], inst.beta[i].data(), cost.data(), inst.points);
  double lo = cost[0];
  for (int g = 1; g < inst.points; ++g) lo = std::min(lo, cost[g]);
  return lo;
}

MinmaxSolution solve_minmax(const MinmaxInstance& inst, double eps) {
  check_instance(inst);
  if (!(eps > 0.0)) throw ConfigError("solve_minmax: eps must be positive");
  MinmaxSolution sol;
  sol.mu.assign(inst.dim, 0.0);

  LpResult lp = solve_lp(inst);
  if (lp.solved) {
    sol.support = lp.support;
    sol.probs = lp.probs;
    sol.pivots = lp.pivots;
    for (int i = 0; i < inst.dim; ++i)
      sol.mu[i] = std::clamp(lp.duals[1 + i], 0.0, 1.0);
    sol.upper = game_objective_sparse(inst, sol.support, sol.probs);
    sol.lower = certificate_lower(inst, sol.mu);
    sol.gap = sol.upper - sol.lower;
    sol.method = "lp";
    if (sol.gap <= eps) return sol;
  }

  // Multiplicative-weights fallback with a certified stopping rule.
  const kern::Ops& ops = kern::active_ops();
  const int G = inst.points;
  const long long budget =
      10 * static_cast<long long>(std::ceil(1.0 / (eps * eps)));
  const double eta = std::sqrt(8.0 * std::log(std::max(G, 2)) /
                               static_cast<double>(budget)) /
                     2.0;
  std::vector<double> w(G, 1.0 / G), psi(G), cost(G);
  double best_upper = std::numeric_limits<double>::infinity();
  double best_lower = -std::numeric_limits<double>::infinity();
  std::vector<double> best_psi;
  std::vector<double> best_mu(inst.dim, 0.0);
  long long it = 0;
  for (; it < budget; ++it) {
    double wsum = ops.sum(w.data(), G);
    for (int g = 0; g < G; ++g) psi[g] = w[g] / wsum;
    std::vector<double> mu(inst.dim, 0.0);
    std::copy(inst.alpha.begin(), inst.alpha.end(), cost.begin());
    for (int i = 0; i < inst.dim; ++i) {
      double b = ops.dot(psi.data(), inst.beta[i].data(), G);
      if (b < 0.0) {
        mu[i] = 1.0;
        ops.axpy(-1.0, inst.beta[i].data(), cost.data(), G);
      }
    }
    double f = ops.dot(psi.data(), cost.data(), G);
    double lo = cost[0];
    for (int g = 1; g < G; ++g) lo = std::min(lo, cost[g]);
    if (f < best_upper) {
      best_upper = f;
      best_psi = psi;
    }
    if (lo > best_lower) {
      best_lower = lo;
      best_mu = mu;
    }
    if (best_upper - best_lower <= eps) break;
    for (int g = 0; g < G; ++g) w[g] *= std::exp(-eta * (cost[g] - lo));
  }
  double gap = best_upper - best_lower;
  if (!(gap <= eps))
    throw SolverError("prediction game not certified within budget", gap);

  sol.support.clear();
  sol.probs.clear();
  double mass = 0.0;
  for (int g = 0; g < G; ++g)
    if (best_psi[g] > 1e-12) mass += best_psi[g];
  for (int g = 0; g < G; ++g) {
    if (best_psi[g] > 1e-12) {
      sol.support.push_back(g);
      sol.probs.push_back(best_psi[g] / mass);
    }
  }
  sol.mu = best_mu;
  sol.upper = best_upper;
  sol.lower = best_lower;
  sol.gap = gap;
  sol.mwu_iterations = it;
  sol.method = "mwu";
  return sol;
}

double mesh_min(const MinmaxInstance& inst, int steps) {
  check_instance(inst);
  if (steps < 1) throw ConfigError("mesh_min: steps must be >= 1");
  const int G = inst.points;
  const int d = inst.dim;
  const double unit = 1.0 / steps;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> B(d, 0.0);

  // Depth-first over mass assignments, carrying partial sums.
  struct Walker {
    const MinmaxInstance& inst;
    int G, d;
    double unit;
    double best;
    std::vector<double>& B;
    Walker(const MinmaxInstance& in, int g, int dd, double u,
           std::vector<double>& b)
        : inst(in), G(g), d(dd), unit(u),
          best(std::numeric_limits<double>::infinity()), B(b) {}
    void go(int g, int remaining, double A) {
      if (g == G - 1) {
        double f = A + remaining * unit * inst.alpha[g];
        for (int i = 0; i < d; ++i) {
          double b = B[i] + remaining * unit * inst.beta[i][g];
          if (b < 0.0) f -= b;
        }
        best = std::min(best, f);
        return;
      }
      double A_loc = A;
      for (int k = 0;; ++k) {
        go(g + 1, remaining - k, A_loc);
        if (k == remaining) break;
        A_loc += unit * inst.alpha[g];
        for (int i = 0; i < d; ++i) B[i] += unit * inst.beta[i][g];
      }
      for (int i = 0; i < d; ++i)
        B[i] -= remaining * unit * inst.beta[i][g];
    }
  } walker(inst, G, d, unit, B);
  walker.go(0, steps, 0.0);
  best = walker.best;
  return best;
}

}  // namespace ocsim
