#pragma once

#include <cstdint>
#include <vector>

#include "ocsim/core.hpp"
#include "ocsim/env.hpp"
#include "ocsim/minmax.hpp"
#include "ocsim/rng.hpp"

namespace ocsim {

// Finite prediction menu. Uniform grids enumerate lexicographically with the
// last coordinate varying fastest; coords stores one contiguous array per
// coordinate for kernel-friendly sweeps.
struct PredictionGrid {
  int dim = 0;
  int per_axis = 0;  // 0 for explicit point lists
  std::vector<Vec> points;
  std::vector<std::vector<double>> coords;

  static PredictionGrid uniform(int per_axis, int dim);
  static PredictionGrid explicit_points(std::vector<Vec> pts, int dim);

  int size() const { return static_cast<int>(points.size()); }
  // Nearest menu entry; ties resolve to the lowest index.
  int nearest(const Vec& y) const;
};

// An event fires when the given agent plays the given action, gated on the
// subsequence being active (subseq is -1 for single-sequence agents).
struct EventKey {
  int agent = 0;
  int action = 0;
  int subseq = -1;
};

// Event ids in agent-major order, then action, then subsequence.
std::vector<EventKey> enumerate_events(
    const std::vector<int>& actions_per_agent,
    const std::vector<int>& subseqs_per_agent);

// Exponential-weights state over signed per-coordinate experts, one pair per
// (event, coordinate). Gains use realized event values at the sampled
// prediction, so they are transcript functions.
struct ExpertTracker {
  struct AgentSlice {
    int offset = 0;
    int actions = 0;
    int subseqs = 0;  // 0 => single event per action
    int stride() const { return subseqs > 0 ? subseqs : 1; }
  };

  PredictionGrid grid;
  std::vector<EventKey> events;
  std::vector<AgentSlice> slices;
  int dim = 0;
  long long horizon = 0;
  double eta = 0.0;
  std::vector<double> gain_plus;   // [coord * E + event]
  std::vector<double> gain_minus;  // [coord * E + event]

  ExpertTracker(PredictionGrid g, const std::vector<int>& actions_per_agent,
                const std::vector<int>& subseqs_per_agent, long long T);

  int event_count() const { return static_cast<int>(events.size()); }

  // Aggregated weight difference D[coord * E + event] = q(+) - q(-) under
  // the exponential-weights distribution over all 2 * dim * E experts.
  std::vector<double> weights() const;

  // cbr[n][g] is agent n's response at grid point g under its current
  // candidate snapshot; active[e] says whether event e can fire this round.
  MinmaxInstance build_instance(const std::vector<std::vector<int>>& cbr,
                                const std::vector<uint8_t>& active) const;

  void record_outcome(const Vec& p, const Vec& y,
                      const std::vector<int>& fired);
};

// Draws a grid index from the solved distribution.
int sample_prediction(const MinmaxSolution& sol, Rng& rng);

struct BiasReport {
  int dim = 0;
  std::vector<long long> counts;  // per event
  std::vector<double> bias;       // [event * dim + coord], absolute values
};

// Replays the transcript: counts event firings and the absolute accumulated
// per-coordinate prediction error on each event's rounds.
BiasReport conditional_bias(
    const Transcript& tr, const std::vector<EventKey>& events,
    const std::vector<std::vector<SubsequenceDef>>& subseqs_per_agent);

}  // namespace ocsim
