#pragma once

#include <cstdint>
#include <vector>

#include "ocsim/core.hpp"

namespace ocsim {

// Candidate sets are uint64_t bitmasks over action indices (|A| <= 64).
using ActionSet = uint64_t;

inline bool set_contains(ActionSet s, int a) { return (s >> a) & 1u; }
inline int set_size(ActionSet s) { return __builtin_popcountll(s); }
inline ActionSet full_set(int actions) {
  return actions == 64 ? ~0ULL : ((1ULL << actions) - 1);
}

// Per-agent elimination state. Single-sequence ledgers (subsequences == 0)
// carry one candidate set; subsequence ledgers carry one per subsequence.
// Candidate sets only shrink; accumulators change only at entries touched by
// the played action and the active subsequences of the round.
struct CandidateLedger {
  AgentMode mode = AgentMode::realization;
  int actions = 0;
  int constraints = 0;   // J
  int subsequences = 0;  // 0 => single-sequence

  std::vector<ActionSet> candidates;  // size 1, or subsequences

  // expectation mode, single-sequence: v[a][j]
  std::vector<CompensatedSum> v;
  double tau = 0.0;

  // expectation mode, subsequences: w[a][j][responsible][view]
  std::vector<CompensatedSum> w;
  std::vector<double> tau_per_subsequence;

  static CandidateLedger make_realization(int actions, int J);
  static CandidateLedger make_expectation(int actions, int J, double tau);
  static CandidateLedger make_subseq_realization(int actions, int J, int S);
  static CandidateLedger make_subseq_expectation(int actions, int J,
                                                 std::vector<double> tau_s);

  CompensatedSum& v_at(int a, int j) { return v[static_cast<size_t>(a) * constraints + j]; }
  const CompensatedSum& v_at(int a, int j) const {
    return v[static_cast<size_t>(a) * constraints + j];
  }
  CompensatedSum& w_at(int a, int j, int resp, int view) {
    return w[((static_cast<size_t>(a) * constraints + j) * subsequences + resp) *
                 subsequences +
             view];
  }
  const CompensatedSum& w_at(int a, int j, int resp, int view) const {
    return w[((static_cast<size_t>(a) * constraints + j) * subsequences + resp) *
                 subsequences +
             view];
  }
};

// argmax over the candidate set of predicted utility, lowest index on ties.
// Throws FeasibilityExhausted when the set is empty.
int constrained_best_response(const LinearUtility& u, ActionSet candidates,
                              const Vec& p);

// Realization rule: drop every candidate with some realized violation > 0 at
// y_t (exact comparison, no epsilon). Returns the eliminated set.
ActionSet step_alg1(CandidateLedger& ledger, const Vec& y,
                    const ConstraintFamily& c);

// Expectation rule: v[a_t][j] += c_j(a_t, y_t); eliminate a_t iff some
// updated v[a_t][j] strictly exceeds tau (equality keeps the action).
bool step_alg2(CandidateLedger& ledger, int a_t, const Vec& y,
               const ConstraintFamily& c);

double threshold_tau(long long T, int A, int N, int J, double delta);

// Union of candidate sets over the active subsequences (0-based indices).
ActionSet union_candidates(const CandidateLedger& ledger,
                           const std::vector<int>& active);

// One realization-elimination step on every active subsequence's set.
// Returns the per-active eliminated sets, aligned with `active`.
std::vector<ActionSet> step_alg3(CandidateLedger& ledger, const Vec& y,
                                 const ConstraintFamily& c,
                                 const std::vector<int>& active);

// Smallest active index whose candidate set still holds a_t.
int responsible_index(const CandidateLedger& ledger,
                      const std::vector<int>& active, int a_t);

// Attributed expectation rule: w[a_t][j][r][view] += c_j for every active
// view; eliminate a_t from subsequence r only, iff some w[a_t][j][r][S]
// strictly exceeds tau_S (threshold indexed by the viewed subsequence S).
bool step_alg4(CandidateLedger& ledger, int a_t, const Vec& y,
               const ConstraintFamily& c, const std::vector<int>& active,
               int r);

double tau_subsequence(long long S_len, int A, int N, int Scount, int J,
                       double delta);

}  // namespace ocsim
