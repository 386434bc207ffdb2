#pragma once

#include <vector>

namespace ocsim {

// One round's zero-sum game between a randomized prediction psi over grid
// points and an outcome mean mu in [0,1]^dim. Payoff to the maximizer:
//   f(psi) = <psi, alpha> + sum_i max(0, -<psi, beta[i]>)
// and for any fixed mu the minimizer's best point response yields the
// certified lower bound
//   g(mu) = min_g (alpha[g] - sum_i mu[i] * beta[i][g]).
struct MinmaxInstance {
  int dim = 0;
  int points = 0;
  std::vector<double> alpha;               // size points
  std::vector<std::vector<double>> beta;   // dim rows, each size points
};

struct MinmaxSolution {
  std::vector<int> support;     // grid indices with positive mass
  std::vector<double> probs;    // aligned with support, sums to 1
  std::vector<double> mu;       // certificate argument, in [0,1]^dim
  double upper = 0.0;           // f(psi)
  double lower = 0.0;           // g(mu)
  double gap = 0.0;             // upper - lower
  int pivots = 0;
  long long mwu_iterations = 0;
  const char* method = "";
};

// Exact LP solve with a dual-feasibility certificate; falls back to
// multiplicative weights with an iteration budget of 10*ceil(1/eps^2) when
// the LP stalls. Throws SolverError if neither route certifies gap <= eps.
MinmaxSolution solve_minmax(const MinmaxInstance& inst, double eps);

double game_objective(const MinmaxInstance& inst,
                      const std::vector<double>& psi_dense);
double game_objective_sparse(const MinmaxInstance& inst,
                             const std::vector<int>& support,
                             const std::vector<double>& probs);
double certificate_lower(const MinmaxInstance& inst,
                         const std::vector<double>& mu);

// Brute-force audit: minimum of f over all distributions with masses that
// are multiples of 1/steps. Cost grows as C(steps+points-1, points-1).
double mesh_min(const MinmaxInstance& inst, int steps);

}  // namespace ocsim
