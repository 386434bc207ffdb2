#include "ocsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <thread>

#include "ocsim/kernels.hpp"
#include "ocsim/metrics.hpp"

namespace ocsim {

namespace {

CandidateLedger make_ledger(const AgentConfig& ac, int num_agents, int horizon,
                            double delta) {
  int A = ac.spec.utility.actions;
  int J = ac.spec.constraints.count();
  int S = static_cast<int>(ac.subseqs.size());
  if (ac.spec.mode == AgentMode::realization) {
    return S > 0 ? CandidateLedger::make_subseq_realization(A, J, S)
                 : CandidateLedger::make_realization(A, J);
  }
  if (S == 0) {
    double tau = ac.spec.tau_override
                     ? *ac.spec.tau_override
                     : threshold_tau(horizon, A, num_agents, J, delta);
    return CandidateLedger::make_expectation(A, J, tau);
  }
  std::vector<double> taus;
  if (ac.spec.tau_per_subsequence_override) {
    taus = *ac.spec.tau_per_subsequence_override;
  } else {
    for (const SubsequenceDef& s : ac.subseqs) {
      auto len = s.cardinality(horizon);
      if (!len)
        throw ConfigError("agent " + ac.spec.id +
                          ": context-gated subsequence needs tau_subseq");
      taus.push_back(
          tau_subsequence(std::max<long long>(*len, 1), A, num_agents, S, J, delta));
    }
  }
  return CandidateLedger::make_subseq_expectation(A, J, std::move(taus));
}

std::string event_variant(const RunConfig& cfg, const EventKey& k) {
  std::string v = cfg.agents[k.agent].spec.id + ":a" + std::to_string(k.action);
  if (k.subseq >= 0) v += ":s" + std::to_string(k.subseq);
  return v;
}

}  // namespace

RunResult run_simulation(const RunConfig& cfg, const FaultInjection* fault) {
  const int T = cfg.horizon;
  const int d = cfg.dim;
  const int N = static_cast<int>(cfg.agents.size());
  const bool forecaster = cfg.source == PredictionSource::forecaster;
  const bool skip_realization =
      fault && fault->skip_realization_elimination;

  PredictionGrid grid = PredictionGrid::uniform(cfg.grid_per_axis, d);
  const int G = grid.size();
  Adversary adversary(cfg.adversary, T, cfg.seed);
  Rng outcome_rng = Rng::stream(cfg.seed, "outcome");
  Rng pred_rng = Rng::stream(cfg.seed, "prediction");

  std::vector<CandidateLedger> ledgers;
  std::vector<int> actions_per_agent, subseqs_per_agent;
  for (const AgentConfig& ac : cfg.agents) {
    ledgers.push_back(make_ledger(ac, N, T, cfg.delta));
    actions_per_agent.push_back(ac.spec.utility.actions);
    subseqs_per_agent.push_back(static_cast<int>(ac.subseqs.size()));
  }
  std::vector<EventKey> events =
      enumerate_events(actions_per_agent, subseqs_per_agent);
  std::optional<ExpertTracker> tracker;
  if (forecaster)
    tracker.emplace(grid, actions_per_agent, subseqs_per_agent, T);

  Transcript tr;
  tr.seed = cfg.seed;
  tr.config_digest = cfg.digest;
  tr.dim = d;
  tr.horizon = T;

  std::vector<int> truncated_at(N, -1);
  std::vector<double> gaps;
  if (forecaster) gaps.reserve(T);
  std::vector<std::vector<int>> cbr(N, std::vector<int>(G, -1));
  std::vector<uint8_t> event_active(events.size(), 0);

  for (int t = 1; t <= T; ++t) {
    RoundEmission em = adversary.next_round(tr, t);

    std::vector<std::vector<int>> active(N);
    std::vector<ActionSet> snap(N, 0);
    for (int n = 0; n < N; ++n) {
      const AgentConfig& ac = cfg.agents[n];
      if (!ac.subseqs.empty())
        active[n] = active_subsequences(ac.subseqs, t, em.x);
      if (truncated_at[n] >= 0) continue;
      snap[n] = ac.subseqs.empty() ? ledgers[n].candidates[0]
                                   : union_candidates(ledgers[n], active[n]);
      if (snap[n] == 0) truncated_at[n] = t;
    }

    Outcome outcome = em.dist.sample(outcome_rng);
    const Vec& y = outcome.coords;

    std::vector<int> psi_support;
    std::vector<double> psi_probs;
    int p_idx = -1;
    if (forecaster) {
      for (int n = 0; n < N; ++n) {
        if (truncated_at[n] >= 0) {
          std::fill(cbr[n].begin(), cbr[n].end(), -1);
          continue;
        }
        const LinearUtility& u = cfg.agents[n].spec.utility;
        for (int g = 0; g < G; ++g)
          cbr[n][g] = constrained_best_response(u, snap[n], grid.points[g]);
      }
      for (size_t e = 0; e < events.size(); ++e) {
        const EventKey& k = events[e];
        bool on = truncated_at[k.agent] < 0;
        if (on && k.subseq >= 0)
          on = cfg.agents[k.agent].subseqs[k.subseq].active(t, em.x);
        event_active[e] = on ? 1 : 0;
      }
      MinmaxInstance inst = tracker->build_instance(cbr, event_active);
      MinmaxSolution sol = solve_minmax(inst, cfg.eps);
      gaps.push_back(sol.gap);
      p_idx = sample_prediction(sol, pred_rng);
      psi_support = std::move(sol.support);
      psi_probs = std::move(sol.probs);
    } else if (cfg.source == PredictionSource::uniform) {
      p_idx = static_cast<int>(pred_rng.bounded(static_cast<uint32_t>(G)));
      psi_support = {p_idx};
      psi_probs = {1.0};
    } else {
      Vec mean = em.dist.mean();
      Vec target(d);
      for (int i = 0; i < d; ++i) target[i] = 1.0 - mean[i];
      p_idx = grid.nearest(target);
      psi_support = {p_idx};
      psi_probs = {1.0};
    }
    const Vec& p = grid.points[p_idx];

    std::vector<int> acts(N, -1), resp(N, -1);
    for (int n = 0; n < N; ++n) {
      if (truncated_at[n] >= 0) continue;
      const AgentConfig& ac = cfg.agents[n];
      acts[n] = constrained_best_response(ac.spec.utility, snap[n], p);
      if (!ac.subseqs.empty() && ac.spec.mode == AgentMode::expectation)
        resp[n] = responsible_index(ledgers[n], active[n], acts[n]);
    }

    for (int n = 0; n < N; ++n) {
      if (truncated_at[n] >= 0) continue;
      const AgentConfig& ac = cfg.agents[n];
      const ConstraintFamily& c = ac.spec.constraints;
      if (ac.spec.mode == AgentMode::realization) {
        if (skip_realization) continue;
        if (ac.subseqs.empty())
          step_alg1(ledgers[n], y, c);
        else
          step_alg3(ledgers[n], y, c, active[n]);
      } else {
        if (ac.subseqs.empty())
          step_alg2(ledgers[n], acts[n], y, c);
        else
          step_alg4(ledgers[n], acts[n], y, c, active[n], resp[n]);
      }
    }

    if (tracker) {
      std::vector<int> fired;
      for (int n = 0; n < N; ++n) {
        if (truncated_at[n] >= 0) continue;
        const ExpertTracker::AgentSlice& sl = tracker->slices[n];
        if (sl.subseqs == 0) {
          fired.push_back(sl.offset + acts[n]);
        } else {
          for (int s : active[n])
            fired.push_back(sl.offset + acts[n] * sl.subseqs + s);
        }
      }
      if (fault && fault->flip_expert_sign)
        tracker->record_outcome(y, p, fired);
      else
        tracker->record_outcome(p, y, fired);
    }

    RoundRecord rec;
    rec.t = t;
    rec.x = em.x;
    rec.psi_support = std::move(psi_support);
    rec.psi_probs = std::move(psi_probs);
    rec.p_index = p_idx;
    rec.p = p;
    rec.y = y;
    rec.actions = std::move(acts);
    rec.responsible = std::move(resp);
    tr.append(std::move(rec));
  }

  std::vector<std::optional<OutcomeDist>> dists;
  dists.reserve(T);
  for (int t = 1; t <= T; ++t) dists.push_back(adversary.dist_for_round(t));

  RunReport rep;
  rep.config_digest = cfg.digest;
  rep.seed = cfg.seed;
  rep.horizon = T;
  rep.dim = d;
  rep.source = source_name(cfg.source);
  rep.kernel = kern::active_ops().name;
  rep.gaps = gaps;

  std::vector<MetricRow>& rows = rep.rows;
  for (int n = 0; n < N; ++n) {
    const AgentConfig& ac = cfg.agents[n];
    const std::string& id = ac.spec.id;
    const LinearUtility& u = ac.spec.utility;
    const ConstraintFamily& c = ac.spec.constraints;
    int A = u.actions;
    int S = static_cast<int>(ac.subseqs.size());
    int J = c.count();

    BenchmarkSets bench = compute_benchmarks(tr, c, ac.subseqs, dists);
    CcvResult cc = ccv(tr, n, c);
    for (int j = 0; j < J; ++j) {
      rows.push_back({id, "", "ccv", "signed:j" + std::to_string(j),
                      cc.signed_sum[j]});
      rows.push_back({id, "", "ccv", "positive:j" + std::to_string(j),
                      cc.positive_sum[j]});
    }
    for (int s = 0; s < S; ++s) {
      CcvResult cs = ccv_subseq(tr, n, c, ac.subseqs[s]);
      for (int j = 0; j < J; ++j) {
        rows.push_back({id, "s" + std::to_string(s), "ccv",
                        "signed:j" + std::to_string(j), cs.signed_sum[j]});
        rows.push_back({id, "s" + std::to_string(s), "ccv",
                        "positive:j" + std::to_string(j), cs.positive_sum[j]});
      }
    }
    rows.push_back({id, "", "benchmark", "realized-size",
                    static_cast<double>(set_size(bench.realized))});
    if (bench.expected)
      rows.push_back({id, "", "benchmark", "expected-size",
                      static_cast<double>(set_size(*bench.expected))});

    auto er = external_regret(tr, n, u, bench.realized);
    if (er)
      rows.push_back({id, "", "external-regret", "realized", *er});
    else
      rows.push_back({id, "", "external-regret", "realized:undefined", 0.0});
    if (bench.expected) {
      auto ee = external_regret(tr, n, u, *bench.expected);
      if (ee)
        rows.push_back({id, "", "external-regret", "expected", *ee});
      else
        rows.push_back({id, "", "external-regret", "expected:undefined", 0.0});
    }
    auto slices = swap_slices(tr, n, u);
    rows.push_back({id, "", "swap-regret", "total",
                    *swap_total(slices, full_set(A))});
    if (auto sw = swap_total(slices, bench.realized))
      rows.push_back({id, "", "swap-regret", "vs-realized", *sw});

    if (S == 0) {
      rows.push_back({id, "", "eliminated", "count",
                      static_cast<double>(A - set_size(ledgers[n].candidates[0]))});
    } else {
      for (int s = 0; s < S; ++s)
        rows.push_back({id, "s" + std::to_string(s), "eliminated", "count",
                        static_cast<double>(A - set_size(ledgers[n].candidates[s]))});
    }
    rows.push_back({id, "", "truncated", "round",
                    static_cast<double>(truncated_at[n])});

    if (ac.spec.mode == AgentMode::realization) {
      if (S == 0)
        rows.push_back({id, "", "bound", "ccv-elimination",
                        bound_ccv_elimination(A)});
      else
        rows.push_back({id, "", "bound", "ccv-subseq-elimination",
                        bound_ccv_subseq_elimination(A, S)});
    } else {
      if (S == 0) {
        rows.push_back({id, "", "bound", "ccv-threshold",
                        A * ledgers[n].tau + A});
      } else {
        double total = static_cast<double>(A) * S;
        for (double tau_s : ledgers[n].tau_per_subsequence)
          total += A * tau_s;
        rows.push_back({id, "", "bound", "ccv-subseq-threshold", total});
      }
    }
    rows.push_back({id, "", "bound", "swap-regret",
                    bound_swap_regret(T, lipschitz_constant(u), A, N, d,
                                      cfg.delta)});
  }

  std::vector<std::vector<SubsequenceDef>> subseq_lists;
  for (const AgentConfig& ac : cfg.agents) subseq_lists.push_back(ac.subseqs);
  BiasReport bias = conditional_bias(tr, events, subseq_lists);
  double bias_max = 0.0;
  for (double b : bias.bias) bias_max = std::max(bias_max, b);
  rows.push_back({"", "", "bias", "max", bias_max});
  for (size_t e = 0; e < events.size(); ++e) {
    double ev_max = 0.0;
    for (int i = 0; i < d; ++i)
      ev_max = std::max(ev_max, bias.bias[e * d + i]);
    rows.push_back({"", "", "bias", event_variant(cfg, events[e]), ev_max});
    rows.push_back({"", "", "bias-count", event_variant(cfg, events[e]),
                    static_cast<double>(bias.counts[e])});
  }
  rows.push_back({"", "", "bound", "event-bias",
                  bound_event_bias(T, d, static_cast<int>(events.size()))});
  if (forecaster) {
    double gap_max = 0.0;
    for (double g : gaps) gap_max = std::max(gap_max, g);
    rows.push_back({"", "", "gap", "max", gap_max});
    rows.push_back({"", "", "gap", "count", static_cast<double>(gaps.size())});
  }

  for (int n = 0; n < N; ++n) {
    const AgentConfig& ac = cfg.agents[n];
    AgentSummary s;
    s.id = ac.spec.id;
    s.mode = ac.spec.mode == AgentMode::realization ? "realization"
                                                    : "expectation";
    if (!ac.subseqs.empty()) s.mode += "+subseq";
    s.actions = ac.spec.utility.actions;
    s.final_candidates.assign(ledgers[n].candidates.begin(),
                              ledgers[n].candidates.end());
    s.truncated_at = truncated_at[n];
    rep.agents.push_back(std::move(s));
  }

  RunResult result;
  result.transcript = std::move(tr);
  result.report = std::move(rep);
  result.ledgers = std::move(ledgers);
  result.truncated_at = std::move(truncated_at);
  result.events = std::move(events);
  result.gaps = std::move(gaps);
  return result;
}

void write_run_outputs(const RunResult& res, const std::string& out_dir,
                       bool diagnostics) {
  std::filesystem::create_directories(out_dir);
  RunReport rep = res.report;
  if (diagnostics) {
    rep.with_rounds = true;
    rep.transcript = &res.transcript;
  }
  write_text_file(out_dir + "/report.json", report_full_json(rep));
  write_text_file(out_dir + "/metrics.csv", metrics_csv(rep.rows));
}

SweepOutcome run_sweep(const RunConfig& cfg,
                       const std::vector<uint64_t>& seeds, int threads,
                       const std::string& out_dir, bool diagnostics) {
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  std::filesystem::create_directories(out_dir);
  kern::active_ops();  // settle the kernel choice before fanning out

  std::vector<std::vector<MetricRow>> rows(seeds.size());
  std::vector<std::string> errors(seeds.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= seeds.size()) break;
      try {
        RunConfig local = cfg;
        local.seed = seeds[i];
        RunResult res = run_simulation(local);
        write_run_outputs(res, out_dir + "/seed-" + std::to_string(seeds[i]),
                          diagnostics);
        rows[i] = std::move(res.report.rows);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  int workers = std::min<int>(threads, static_cast<int>(seeds.size()));
  std::vector<std::thread> pool;
  for (int k = 0; k < workers; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  SweepOutcome out;
  std::string csv = "seed,agent,subsequence,metric,variant,value\n";
  char buf[64];
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (!errors[i].empty()) {
      out.failed += 1;
      out.notes.push_back("seed " + std::to_string(seeds[i]) + ": " + errors[i]);
      continue;
    }
    out.completed += 1;
    for (const MetricRow& r : rows[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.value);
      csv += std::to_string(seeds[i]) + "," + r.agent + "," + r.subsequence +
             "," + r.metric + "," + r.variant + "," + buf + "\n";
    }
  }
  write_text_file(out_dir + "/sweep.csv", csv);
  return out;
}

ReplayResult replay_agent(const Transcript& tr, const AgentConfig& ac,
                          int agent_index, int num_agents, double delta) {
  ReplayResult out;
  CandidateLedger ledger = make_ledger(ac, num_agents, tr.horizon, delta);
  const ConstraintFamily& c = ac.spec.constraints;
  int S = static_cast<int>(ac.subseqs.size());
  bool truncated = false;
  auto fail = [&](const std::string& msg, int t) {
    out.ok = false;
    if (out.note.empty()) out.note = msg + " at round " + std::to_string(t);
  };
  for (const RoundRecord& rec : tr.rounds) {
    std::vector<int> active;
    if (S > 0) active = active_subsequences(ac.subseqs, rec.t, rec.x);
    ActionSet snap = 0;
    if (!truncated)
      snap = S > 0 ? union_candidates(ledger, active) : ledger.candidates[0];
    out.snapshots.push_back(snap);
    if (snap == 0) {
      truncated = true;
      if (rec.actions[agent_index] != -1)
        fail("expected a truncated action", rec.t);
      continue;
    }
    int a = constrained_best_response(ac.spec.utility, snap, rec.p);
    if (a != rec.actions[agent_index]) fail("action mismatch", rec.t);
    int r = -1;
    if (S > 0 && ac.spec.mode == AgentMode::expectation) {
      r = responsible_index(ledger, active, a);
      if (r != rec.responsible[agent_index]) fail("responsible mismatch", rec.t);
    }
    if (ac.spec.mode == AgentMode::realization) {
      if (S == 0)
        step_alg1(ledger, rec.y, c);
      else
        step_alg3(ledger, rec.y, c, active);
    } else {
      if (S == 0)
        step_alg2(ledger, a, rec.y, c);
      else
        step_alg4(ledger, a, rec.y, c, active, r);
    }
  }
  return out;
}

VerifyOutcome verify_run(const RunConfig& cfg, bool full) {
  VerifyOutcome out;
  auto note = [&](const std::string& msg) {
    out.ok = false;
    out.notes.push_back(msg);
  };

  RunConfig local = cfg;
  if (!full) local.horizon = std::min(cfg.horizon, 512);
  RunResult r1 = run_simulation(local);
  RunResult r2 = run_simulation(local);

  if (report_body_json(r1.report) != report_body_json(r2.report))
    note("same-seed reruns produced different report bodies");

  int N = static_cast<int>(local.agents.size());
  for (int n = 0; n < N; ++n) {
    ReplayResult rr =
        replay_agent(r1.transcript, local.agents[n], n, N, local.delta);
    if (!rr.ok)
      note("replay of agent " + local.agents[n].spec.id + ": " + rr.note);
  }

  for (const RoundRecord& rec : r1.transcript.rounds) {
    double mass = 0.0;
    for (double p : rec.psi_probs) mass += p;
    if (std::fabs(mass - 1.0) > 1e-9) {
      note("round " + std::to_string(rec.t) + ": psi mass " + std::to_string(mass));
      break;
    }
  }

  if (local.source == PredictionSource::forecaster) {
    if (static_cast<int>(r1.gaps.size()) != local.horizon)
      note("expected one certified gap per round");
    for (size_t t = 0; t < r1.gaps.size(); ++t) {
      if (!(r1.gaps[t] <= local.eps)) {
        note("round " + std::to_string(t + 1) + ": gap " +
             std::to_string(r1.gaps[t]) + " exceeds eps");
        break;
      }
    }
  } else if (!r1.gaps.empty()) {
    note("non-forecaster run recorded gaps");
  }

  for (int n = 0; n < N; ++n) {
    const AgentConfig& ac = local.agents[n];
    const ConstraintFamily& c = ac.spec.constraints;
    int A = ac.spec.utility.actions;
    int S = static_cast<int>(ac.subseqs.size());
    const double slack = 1e-9;
    CcvResult cc = ccv(r1.transcript, n, c);
    if (ac.spec.mode == AgentMode::realization && S == 0) {
      for (double v : cc.signed_sum)
        if (v > bound_ccv_elimination(A) + slack)
          note(ac.spec.id + ": ccv exceeds the elimination bound");
    }
    if (ac.spec.mode == AgentMode::expectation && S == 0) {
      double cap = A * (r1.ledgers[n].tau + 1.0);
      for (double v : cc.signed_sum)
        if (v > cap + slack)
          note(ac.spec.id + ": ccv exceeds the accumulator cap");
    }
    if (ac.spec.mode == AgentMode::realization && S > 0) {
      for (int s = 0; s < S; ++s) {
        CcvResult cs = ccv_subseq(r1.transcript, n, c, ac.subseqs[s]);
        for (double v : cs.signed_sum)
          if (v > bound_ccv_subseq_elimination(A, S) + slack)
            note(ac.spec.id + ": per-subsequence ccv exceeds the bound");
      }
    }
    if (ac.spec.mode == AgentMode::expectation && S > 0) {
      for (int s = 0; s < S; ++s) {
        CcvResult cs = ccv_subseq(r1.transcript, n, c, ac.subseqs[s]);
        double cap = static_cast<double>(A) * S *
                     (r1.ledgers[n].tau_per_subsequence[s] + 1.0);
        for (double v : cs.signed_sum)
          if (v > cap + slack)
            note(ac.spec.id + ": per-subsequence ccv exceeds the cap");
      }
    }
  }
  return out;
}

}  // namespace ocsim
