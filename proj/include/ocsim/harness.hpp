#pragma once

#include <string>
#include <vector>

#include "ocsim/agents.hpp"
#include "ocsim/config.hpp"
#include "ocsim/forecast.hpp"
#include "ocsim/report.hpp"

namespace ocsim {

// Test-only mutation hooks. Production paths pass nullptr; tests flip one
// switch and watch the corresponding guarantee break.
struct FaultInjection {
  bool skip_realization_elimination = false;
  bool flip_expert_sign = false;
};

struct RunResult {
  Transcript transcript;
  RunReport report;
  std::vector<CandidateLedger> ledgers;  // final per-agent state
  std::vector<int> truncated_at;         // -1 when never truncated
  std::vector<EventKey> events;
  std::vector<double> gaps;  // per round; empty unless source=forecaster
};

RunResult run_simulation(const RunConfig& cfg,
                         const FaultInjection* fault = nullptr);

// report.json (+ rounds when diagnostics) and metrics.csv under out_dir.
void write_run_outputs(const RunResult& res, const std::string& out_dir,
                       bool diagnostics);

struct SweepOutcome {
  int completed = 0;
  int failed = 0;
  std::vector<std::string> notes;
};

// One run per seed, fanned out over threads, each seed writing into
// out_dir/seed-<s>/, plus a concatenated sweep.csv keyed by seed.
SweepOutcome run_sweep(const RunConfig& cfg,
                       const std::vector<uint64_t>& seeds, int threads,
                       const std::string& out_dir, bool diagnostics);

// Deterministic reconstruction of one agent's candidate trajectory from the
// transcript alone. snapshots[t-1] is the candidate set (union over active
// subsequences) the agent chose from in round t; recorded actions and
// responsibility assignments are cross-checked along the way.
struct ReplayResult {
  bool ok = true;
  std::string note;
  std::vector<ActionSet> snapshots;
};

ReplayResult replay_agent(const Transcript& tr, const AgentConfig& ac,
                          int agent_index, int num_agents, double delta);

struct VerifyOutcome {
  bool ok = true;
  std::vector<std::string> notes;
};

// Self-check: runs the config twice with the same seed, compares report
// bodies byte for byte, replays the transcript through the elimination
// rules, and re-asserts the deterministic guarantees. Fast mode clamps the
// horizon to 512 rounds.
VerifyOutcome verify_run(const RunConfig& cfg, bool full);

}  // namespace ocsim
