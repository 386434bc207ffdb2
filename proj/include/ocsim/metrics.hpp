#pragma once

#include <optional>
#include <vector>

#include "ocsim/agents.hpp"
#include "ocsim/core.hpp"
#include "ocsim/env.hpp"

namespace ocsim {

// Post-hoc benchmark sets for one agent's constraint family. "realized"
// holds the actions whose constraints never go positive on the transcript's
// outcomes; the per-subsequence variant restricts to each subsequence's
// rounds. "expected" uses the per-round outcome distributions and is absent
// when any round's distribution is unavailable.
struct BenchmarkSets {
  ActionSet realized = 0;
  std::vector<ActionSet> realized_subseq;
  std::optional<ActionSet> expected;
};

BenchmarkSets compute_benchmarks(
    const Transcript& tr, const ConstraintFamily& c,
    const std::vector<SubsequenceDef>& subseqs,
    const std::vector<std::optional<OutcomeDist>>& dists_per_round);

// Cumulative constraint violation of the played actions, per constraint:
// the signed running sum and the sum of positive parts. Truncated rounds
// contribute nothing.
struct CcvResult {
  std::vector<double> signed_sum;
  std::vector<double> positive_sum;
};

CcvResult ccv(const Transcript& tr, int agent, const ConstraintFamily& c);
CcvResult ccv_subseq(const Transcript& tr, int agent,
                     const ConstraintFamily& c, const SubsequenceDef& s);

// max_{a in benchmark} sum_t u(a, y_t) - sum_t u(a_t, y_t); empty benchmark
// sets have no defined value.
std::optional<double> external_regret(const Transcript& tr, int agent,
                                      const LinearUtility& u,
                                      ActionSet benchmark);

// Swap regret via the per-played-action decomposition. slice[a][b] is the
// chronological sum of u(b, y_t) - u(a, y_t) over rounds where a was played.
struct SwapSlices {
  int actions = 0;
  std::vector<double> slice;  // [a][b] row-major

  double at(int a, int b) const {
    return slice[static_cast<size_t>(a) * actions + b];
  }
};

SwapSlices swap_slices(const Transcript& tr, int agent,
                       const LinearUtility& u);

// sum_a max_{b in targets} slice[a][b]: the best gain over per-action
// remappings into the target set. Empty target sets have no defined value.
std::optional<double> swap_total(const SwapSlices& slices, ActionSet targets);

// Closed-form guarantees checked by the acceptance suite and echoed in
// reports.
double bound_ccv_elimination(int A);
double bound_ccv_threshold(long long T, int A, int N, int J, double delta);
double bound_ccv_subseq_elimination(int A, int S);
double bound_ccv_subseq_threshold(const std::vector<long long>& cardinalities,
                                  int A, int N, int J, double delta);
double bound_event_bias(long long T, int dim, int events);
double bound_swap_regret(long long T, double lipschitz, int A, int N, int dim,
                         double delta);

}  // namespace ocsim
