#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ocsim/errors.hpp"

namespace ocsim {

using Vec = std::vector<double>;

// Neumaier-compensated running sum for long ±1-scale accumulations.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  double value() const { return sum + comp; }
};

// A point of the outcome space [0,1]^d. Sampled predictions share the shape.
struct Outcome {
  Vec coords;

  Outcome() = default;
  explicit Outcome(Vec c);

  int dim() const { return static_cast<int>(coords.size()); }
};

// u(a, y) = <w_a, y> + b_a, with u(a, .) mapping [0,1]^d into [0,1].
struct LinearUtility {
  int actions = 0;
  int dim = 0;
  std::vector<double> weights;  // [actions][dim], row-major
  std::vector<double> offsets;  // [actions]

  const double* w(int a) const { return weights.data() + static_cast<size_t>(a) * dim; }
};

double eval_utility(const LinearUtility& u, int a, const Vec& y);

// max_a ||w_a||_1: the tight ell_inf -> utility Lipschitz constant.
double lipschitz_constant(const LinearUtility& u);

struct RangeDiagnostic {
  int action;
  std::vector<int> vertex;  // 0/1 coordinates
  double value;
};

// Empty iff <w_a, v> + b_a lies in [0,1] on every hypercube vertex v.
// Refuses d > 20 (vertex enumeration).
std::vector<RangeDiagnostic> validate_utility_range(const LinearUtility& u);

// One constraint c_j: (action, outcome) -> [-1,1]. Outputs outside [-1,1]
// or NaN abort the run; the codomain is assumed, never clamped.
struct ConstraintDef {
  enum class Kind { linear, threshold, tabular };
  Kind kind = Kind::linear;

  // linear: c(a,y) = <g_a, y> + h_a
  std::vector<double> g;  // [actions][dim]
  std::vector<double> h;  // [actions]

  // threshold: c(a,y) = scale * sgn(y[coord] - theta_a)
  int coord = 0;
  std::vector<double> theta;  // [actions]
  double scale = 1.0;

  // tabular: uniform cells^dim boxes over [0,1]^d, explicit per-(a, cell)
  // values, row-major over cells with the last coordinate fastest
  int cells = 1;
  std::vector<double> values;  // [actions][cells^dim]
};

struct ConstraintFamily {
  int actions = 0;
  int dim = 0;
  std::vector<ConstraintDef> defs;

  int count() const { return static_cast<int>(defs.size()); }
  double eval(int j, int a, const Vec& y) const;
};

enum class AgentMode { realization, expectation };

struct AgentSpec {
  std::string id;
  AgentMode mode = AgentMode::realization;
  LinearUtility utility;
  ConstraintFamily constraints;
  // Elimination threshold: unset means the closed-form default for the run.
  std::optional<double> tau_override;
  std::optional<std::vector<double>> tau_per_subsequence_override;
};

struct RoundRecord {
  int t = 0;  // 1-based
  Vec x;
  std::vector<int> psi_support;  // grid indices, ascending
  std::vector<double> psi_probs;
  int p_index = -1;  // grid index of the sampled prediction
  Vec p;
  Vec y;
  std::vector<int> actions;      // per agent; -1 once truncated
  std::vector<int> responsible;  // per agent; 0-based subsequence index or -1
};

struct Transcript {
  uint64_t seed = 0;
  std::string config_digest;
  int dim = 0;
  int horizon = 0;
  std::vector<RoundRecord> rounds;

  void append(RoundRecord r);
};

}  // namespace ocsim
