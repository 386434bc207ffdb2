#include "ocsim/metrics.hpp"

#include <cmath>

#include "ocsim/errors.hpp"

namespace ocsim {

BenchmarkSets compute_benchmarks(
    const Transcript& tr, const ConstraintFamily& c,
    const std::vector<SubsequenceDef>& subseqs,
    const std::vector<std::optional<OutcomeDist>>& dists_per_round) {
  BenchmarkSets out;
  int A = c.actions;
  out.realized = full_set(A);
  out.realized_subseq.assign(subseqs.size(), full_set(A));
  for (const RoundRecord& rec : tr.rounds) {
    ActionSet bad = 0;
    for (int a = 0; a < A; ++a) {
      for (int j = 0; j < c.count(); ++j) {
        if (c.eval(j, a, rec.y) > 0.0) {
          bad |= 1ULL << a;
          break;
        }
      }
    }
    out.realized &= ~bad;
    for (size_t s = 0; s < subseqs.size(); ++s)
      if (subseqs[s].active(rec.t, rec.x)) out.realized_subseq[s] &= ~bad;
  }

  bool have_all = static_cast<int>(dists_per_round.size()) ==
                  static_cast<int>(tr.rounds.size());
  for (const auto& d : dists_per_round)
    if (!d) have_all = false;
  if (have_all && !dists_per_round.empty()) {
    ActionSet safe = full_set(A);
    for (const auto& d : dists_per_round) {
      for (int a = 0; a < A; ++a) {
        if (!set_contains(safe, a)) continue;
        Vec e = expected_constraint(*d, c, a);
        for (double v : e) {
          if (v > 0.0) {
            safe &= ~(1ULL << a);
            break;
          }
        }
      }
    }
    out.expected = safe;
  }
  return out;
}

CcvResult ccv(const Transcript& tr, int agent, const ConstraintFamily& c) {
  int J = c.count();
  std::vector<CompensatedSum> sig(J), pos(J);
  for (const RoundRecord& rec : tr.rounds) {
    int a = rec.actions[agent];
    if (a < 0) continue;
    for (int j = 0; j < J; ++j) {
      double v = c.eval(j, a, rec.y);
      sig[j].add(v);
      if (v > 0.0) pos[j].add(v);
    }
  }
  CcvResult out;
  for (int j = 0; j < J; ++j) {
    out.signed_sum.push_back(sig[j].value());
    out.positive_sum.push_back(pos[j].value());
  }
  return out;
}

CcvResult ccv_subseq(const Transcript& tr, int agent,
                     const ConstraintFamily& c, const SubsequenceDef& s) {
  int J = c.count();
  std::vector<CompensatedSum> sig(J), pos(J);
  for (const RoundRecord& rec : tr.rounds) {
    if (!s.active(rec.t, rec.x)) continue;
    int a = rec.actions[agent];
    if (a < 0) continue;
    for (int j = 0; j < J; ++j) {
      double v = c.eval(j, a, rec.y);
      sig[j].add(v);
      if (v > 0.0) pos[j].add(v);
    }
  }
  CcvResult out;
  for (int j = 0; j < J; ++j) {
    out.signed_sum.push_back(sig[j].value());
    out.positive_sum.push_back(pos[j].value());
  }
  return out;
}

std::optional<double> external_regret(const Transcript& tr, int agent,
                                      const LinearUtility& u,
                                      ActionSet benchmark) {
  if (benchmark == 0) return std::nullopt;
  std::vector<CompensatedSum> totals(u.actions);
  CompensatedSum played;
  for (const RoundRecord& rec : tr.rounds) {
    for (int a = 0; a < u.actions; ++a) {
      if (set_contains(benchmark, a)) totals[a].add(eval_utility(u, a, rec.y));
    }
    int a_t = rec.actions[agent];
    if (a_t >= 0) played.add(eval_utility(u, a_t, rec.y));
  }
  double best = 0.0;
  bool first = true;
  for (int a = 0; a < u.actions; ++a) {
    if (!set_contains(benchmark, a)) continue;
    double v = totals[a].value();
    if (first || v > best) {
      best = v;
      first = false;
    }
  }
  return best - played.value();
}

SwapSlices swap_slices(const Transcript& tr, int agent,
                       const LinearUtility& u) {
  SwapSlices out;
  int A = u.actions;
  out.actions = A;
  std::vector<CompensatedSum> acc(static_cast<size_t>(A) * A);
  for (const RoundRecord& rec : tr.rounds) {
    int a_t = rec.actions[agent];
    if (a_t < 0) continue;
    double u_played = eval_utility(u, a_t, rec.y);
    for (int b = 0; b < A; ++b)
      acc[static_cast<size_t>(a_t) * A + b].add(eval_utility(u, b, rec.y) -
                                                u_played);
  }
  out.slice.resize(static_cast<size_t>(A) * A);
  for (size_t k = 0; k < out.slice.size(); ++k) out.slice[k] = acc[k].value();
  return out;
}

std::optional<double> swap_total(const SwapSlices& slices, ActionSet targets) {
  if (targets == 0) return std::nullopt;
  int A = slices.actions;
  double total = 0.0;
  for (int a = 0; a < A; ++a) {
    bool first = true;
    double best = 0.0;
    for (int b = 0; b < A; ++b) {
      if (!set_contains(targets, b)) continue;
      double v = slices.at(a, b);
      if (first || v > best) {
        best = v;
        first = false;
      }
    }
    total += best;
  }
  return total;
}

double bound_ccv_elimination(int A) { return static_cast<double>(A); }

double bound_ccv_threshold(long long T, int A, int N, int J, double delta) {
  return A * threshold_tau(T, A, N, J, delta) + A;
}

double bound_ccv_subseq_elimination(int A, int S) {
  return static_cast<double>(A) * S;
}

double bound_ccv_subseq_threshold(const std::vector<long long>& cardinalities,
                                  int A, int N, int J, double delta) {
  int S = static_cast<int>(cardinalities.size());
  double total = 0.0;
  for (long long len : cardinalities)
    total += A * tau_subsequence(len, A, N, S, J, delta);
  return total + static_cast<double>(A) * S;
}

double bound_event_bias(long long T, int dim, int events) {
  double arg = static_cast<double>(dim) * events * static_cast<double>(T);
  return 20.0 * std::sqrt(static_cast<double>(T) * std::log(arg));
}

double bound_swap_regret(long long T, double lipschitz, int A, int N, int dim,
                         double delta) {
  double arg = static_cast<double>(dim) * A * N * static_cast<double>(T) / delta;
  return 20.0 * lipschitz * A *
         std::sqrt(static_cast<double>(T) * std::log(arg));
}

}  // namespace ocsim
