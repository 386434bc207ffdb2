#include "ocsim/agents.hpp"

#include <cmath>

#include "ocsim/errors.hpp"

namespace ocsim {

CandidateLedger CandidateLedger::make_realization(int actions, int J) {
  CandidateLedger l;
  l.mode = AgentMode::realization;
  l.actions = actions;
  l.constraints = J;
  l.candidates = {full_set(actions)};
  return l;
}

CandidateLedger CandidateLedger::make_expectation(int actions, int J,
                                                  double tau) {
  CandidateLedger l;
  l.mode = AgentMode::expectation;
  l.actions = actions;
  l.constraints = J;
  l.candidates = {full_set(actions)};
  l.v.assign(static_cast<size_t>(actions) * J, CompensatedSum{});
  l.tau = tau;
  return l;
}

CandidateLedger CandidateLedger::make_subseq_realization(int actions, int J,
                                                         int S) {
  CandidateLedger l;
  l.mode = AgentMode::realization;
  l.actions = actions;
  l.constraints = J;
  l.subsequences = S;
  l.candidates.assign(S, full_set(actions));
  return l;
}

CandidateLedger CandidateLedger::make_subseq_expectation(
    int actions, int J, std::vector<double> tau_s) {
  CandidateLedger l;
  l.mode = AgentMode::expectation;
  l.actions = actions;
  l.constraints = J;
  l.subsequences = static_cast<int>(tau_s.size());
  l.candidates.assign(l.subsequences, full_set(actions));
  l.w.assign(static_cast<size_t>(actions) * J * l.subsequences * l.subsequences,
             CompensatedSum{});
  l.tau_per_subsequence = std::move(tau_s);
  return l;
}

int constrained_best_response(const LinearUtility& u, ActionSet candidates,
                              const Vec& p) {
  if (candidates == 0) throw FeasibilityExhausted("empty candidate set");
  int best = -1;
  double best_val = 0.0;
  for (int a = 0; a < u.actions; ++a) {
    if (!set_contains(candidates, a)) continue;
    double val = eval_utility(u, a, p);
    if (best < 0 || val > best_val) {
      best = a;
      best_val = val;
    }
  }
  return best;
}

ActionSet step_alg1(CandidateLedger& ledger, const Vec& y,
                    const ConstraintFamily& c) {
  ActionSet out = 0;
  ActionSet& cand = ledger.candidates[0];
  for (int a = 0; a < ledger.actions; ++a) {
    if (!set_contains(cand, a)) continue;
    for (int j = 0; j < ledger.constraints; ++j) {
      if (c.eval(j, a, y) > 0.0) {
        out |= 1ULL << a;
        break;
      }
    }
  }
  cand &= ~out;
  return out;
}

bool step_alg2(CandidateLedger& ledger, int a_t, const Vec& y,
               const ConstraintFamily& c) {
  ActionSet& cand = ledger.candidates[0];
  if (!set_contains(cand, a_t))
    throw InvariantViolation("played action is not a candidate");
  bool eliminate = false;
  for (int j = 0; j < ledger.constraints; ++j) {
    CompensatedSum& acc = ledger.v_at(a_t, j);
    acc.add(c.eval(j, a_t, y));
    if (acc.value() > ledger.tau) eliminate = true;
  }
  if (eliminate) cand &= ~(1ULL << a_t);
  return eliminate;
}

static double checked_log(double arg, const char* what) {
  if (!(arg > 1.0)) throw ConfigError(std::string(what) + ": log argument must exceed 1");
  return std::log(arg);
}

double threshold_tau(long long T, int A, int N, int J, double delta) {
  if (T < 1 || A < 1 || N < 1 || J < 1)
    throw ConfigError("threshold_tau: counts must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("threshold_tau: delta must lie in (0, 1)");
  double arg = static_cast<double>(A) * N * J * static_cast<double>(T) / delta;
  return 4.0 * std::sqrt(static_cast<double>(T) * checked_log(arg, "threshold_tau"));
}

ActionSet union_candidates(const CandidateLedger& ledger,
                           const std::vector<int>& active) {
  if (active.empty())
    throw ProtocolError("no active subsequence in this round");
  ActionSet u = 0;
  for (int i : active) u |= ledger.candidates[i];
  return u;
}

std::vector<ActionSet> step_alg3(CandidateLedger& ledger, const Vec& y,
                                 const ConstraintFamily& c,
                                 const std::vector<int>& active) {
  std::vector<ActionSet> out(active.size(), 0);
  for (size_t k = 0; k < active.size(); ++k) {
    ActionSet& cand = ledger.candidates[active[k]];
    ActionSet gone = 0;
    for (int a = 0; a < ledger.actions; ++a) {
      if (!set_contains(cand, a)) continue;
      for (int j = 0; j < ledger.constraints; ++j) {
        if (c.eval(j, a, y) > 0.0) {
          gone |= 1ULL << a;
          break;
        }
      }
    }
    cand &= ~gone;
    out[k] = gone;
  }
  return out;
}

int responsible_index(const CandidateLedger& ledger,
                      const std::vector<int>& active, int a_t) {
  int r = -1;
  for (int i : active) {
    if (set_contains(ledger.candidates[i], a_t) && (r < 0 || i < r)) r = i;
  }
  if (r < 0)
    throw InvariantViolation("played action is not a candidate of any active subsequence");
  return r;
}

bool step_alg4(CandidateLedger& ledger, int a_t, const Vec& y,
               const ConstraintFamily& c, const std::vector<int>& active,
               int r) {
  bool eliminate = false;
  for (int j = 0; j < ledger.constraints; ++j) {
    double cj = c.eval(j, a_t, y);
    for (int view : active) {
      CompensatedSum& acc = ledger.w_at(a_t, j, r, view);
      acc.add(cj);
      if (acc.value() > ledger.tau_per_subsequence[view]) eliminate = true;
    }
  }
  if (eliminate) ledger.candidates[r] &= ~(1ULL << a_t);
  return eliminate;
}

double tau_subsequence(long long S_len, int A, int N, int Scount, int J,
                       double delta) {
  if (S_len < 1 || A < 1 || N < 1 || Scount < 1 || J < 1)
    throw ConfigError("tau_subsequence: counts must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("tau_subsequence: delta must lie in (0, 1)");
  double arg = static_cast<double>(A) * N * static_cast<double>(Scount) *
               Scount * J * static_cast<double>(S_len) / delta;
  return 4.0 * std::sqrt(static_cast<double>(S_len) *
                         checked_log(arg, "tau_subsequence"));
}

}  // namespace ocsim
