#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ocsim/core.hpp"
#include "ocsim/rng.hpp"

namespace ocsim {

// A subsequence is an indicator over (round, context), deterministic given
// both. The configured family must cover every round.
struct SubsequenceDef {
  enum class Kind { interval, periodic, feature_threshold, scripted };
  Kind kind = Kind::interval;

  // interval: start <= t <= stop (1-based, inclusive)
  int start = 1;
  int stop = 1 << 30;

  // periodic: t % period == phase
  int period = 1;
  int phase = 0;

  // feature_threshold: x[feature] >= threshold
  int feature = 0;
  double threshold = 0.5;

  // scripted: explicit sorted round list
  std::vector<int> rounds;

  bool active(int t, const Vec& x) const;

  // Exact |S ∩ [1,T]| for kinds that do not depend on the context;
  // nullopt for feature_threshold (closed-form bounds unavailable).
  std::optional<long long> cardinality(int horizon) const;
};

// Indices (0-based) of subsequences active in round t; never empty.
std::vector<int> active_subsequences(const std::vector<SubsequenceDef>& defs,
                                     int t, const Vec& x);

// Sealed finite-support distribution over outcomes, immutable once emitted.
struct OutcomeDist {
  std::vector<Outcome> support;
  std::vector<double> probs;

  Outcome sample(Rng& rng) const;
  Vec mean() const;
};

// Exact per-constraint expectation by finite-support summation.
Vec expected_constraint(const OutcomeDist& dist, const ConstraintFamily& c,
                        int a);

struct AdversaryDef {
  enum class Kind { iid, scripted, adaptive_flipper };
  Kind kind = Kind::iid;
  std::string preset;  // name this def was built from, if any

  OutcomeDist dist;  // iid

  // scripted: row (t-1) of the table, or (t-1) % size with cycle on
  std::vector<OutcomeDist> table;
  std::vector<Vec> contexts;  // optional per-round contexts for scripted
  bool cycle = false;

  // adaptive_flipper: alt1 when the previous outcome's first coordinate
  // exceeded 1/2, else alt0; reads only the prefix, never p_t
  OutcomeDist alt0, alt1;
};

// Per-round emission. The context defaults to (t/T, seeded noise). Y_t is
// fixed before the prediction is sampled; adaptive kinds see only the prefix.
struct RoundEmission {
  Vec x;
  OutcomeDist dist;
};

class Adversary {
 public:
  Adversary(AdversaryDef def, int horizon, uint64_t seed);

  RoundEmission next_round(const Transcript& prefix, int t);

  // Y_t for a given round independent of any run, for expectation benchmarks;
  // nullopt for adaptive kinds (the distribution depends on the realized
  // prefix and is not a config-level object).
  std::optional<OutcomeDist> dist_for_round(int t) const;

  const AdversaryDef& def() const { return def_; }

 private:
  AdversaryDef def_;
  int horizon_;
  Rng rng_;
};

// Built-in presets: "benign-iid", "masking", "constraint-flipper".
// masking pairs a quiet odd-round distribution with a hot even-round one so
// that violations on the even subsequence hide inside a full-horizon view.
AdversaryDef make_adversary_preset(const std::string& name, int dim);

}  // namespace ocsim
