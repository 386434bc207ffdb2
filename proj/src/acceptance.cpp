#include "ocsim/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ostream>

#include "ocsim/agents.hpp"
#include "ocsim/config.hpp"
#include "ocsim/env.hpp"
#include "ocsim/forecast.hpp"
#include "ocsim/harness.hpp"
#include "ocsim/metrics.hpp"
#include "ocsim/minmax.hpp"
#include "ocsim/rng.hpp"

namespace ocsim::acceptance {

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

RunConfig base_cfg(const std::string& label, int horizon, int dim,
                   uint64_t seed, PredictionSource src) {
  RunConfig cfg;
  cfg.horizon = horizon;
  cfg.dim = dim;
  cfg.seed = seed;
  cfg.delta = 0.05;
  cfg.eps = 1e-3;
  cfg.source = src;
  cfg.grid_per_axis = 9;
  cfg.canonical = label;
  cfg.digest = label;
  return cfg;
}

LinearUtility make_util(int dim, const std::vector<Vec>& rows,
                        const Vec& offs) {
  LinearUtility u;
  u.actions = static_cast<int>(rows.size());
  u.dim = dim;
  for (const Vec& r : rows)
    u.weights.insert(u.weights.end(), r.begin(), r.end());
  u.offsets = offs;
  return u;
}

void add_linear(ConstraintFamily& fam, const std::vector<Vec>& g,
                const Vec& h) {
  ConstraintDef def;
  def.kind = ConstraintDef::Kind::linear;
  for (const Vec& r : g) def.g.insert(def.g.end(), r.begin(), r.end());
  def.h = h;
  fam.defs.push_back(std::move(def));
}

SubsequenceDef interval(int start, int stop) {
  SubsequenceDef s;
  s.kind = SubsequenceDef::Kind::interval;
  s.start = start;
  s.stop = stop;
  return s;
}

SubsequenceDef periodic(int period, int phase) {
  SubsequenceDef s;
  s.kind = SubsequenceDef::Kind::periodic;
  s.period = period;
  s.phase = phase;
  return s;
}

std::vector<std::optional<OutcomeDist>> round_dists(const RunConfig& cfg) {
  Adversary adv(cfg.adversary, cfg.horizon, cfg.seed);
  std::vector<std::optional<OutcomeDist>> out;
  out.reserve(static_cast<size_t>(cfg.horizon));
  for (int t = 1; t <= cfg.horizon; ++t) out.push_back(adv.dist_for_round(t));
  return out;
}

std::vector<std::optional<OutcomeDist>> no_dists(int horizon) {
  return std::vector<std::optional<OutcomeDist>>(
      static_cast<size_t>(horizon));
}

// Least-squares slope of ln(value) against ln(T), with values floored at 1
// so noise around zero cannot fake a trend.
double loglog_slope(const std::vector<double>& Ts,
                    const std::vector<double>& vals) {
  size_t n = Ts.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < n; ++k) {
    double x = std::log(Ts[k]);
    double y = std::log(std::max(vals[k], 1.0));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

// --- battery A: one realization agent, 8 actions, 3 constraints ----------
//
// Under the benign lattice adversary, odd actions break constraint 0 on
// high first coordinates and actions 4..7 break constraint 1 on high second
// coordinates; actions 0 and 2 never violate anything.

AgentConfig battery_a_agent() {
  AgentConfig ac;
  ac.spec.id = "agent-0";
  ac.spec.mode = AgentMode::realization;
  ac.spec.utility = make_util(
      2,
      {{0.5, 0}, {0, 0.5}, {0.25, 0.25}, {0.375, 0.125},
       {0.125, 0.375}, {0.5, 0.5}, {0, 0}, {0.25, 0}},
      {0.25, 0.125, 0.25, 0, 0.375, 0, 0.5, 0.625});
  ConstraintFamily& c = ac.spec.constraints;
  c.actions = 8;
  c.dim = 2;
  std::vector<Vec> g0(8, Vec{0.5, 0});
  add_linear(c, g0, {-0.5, -0.25, -0.5, -0.25, -0.5, -0.25, -0.5, -0.25});
  std::vector<Vec> g1(8, Vec{0, 0.5});
  add_linear(c, g1,
             {-0.5, -0.5, -0.5, -0.5, -0.3125, -0.3125, -0.3125, -0.3125});
  std::vector<Vec> g2(8, Vec{0.25, 0.25});
  add_linear(c, g2, Vec(8, -0.5));
  return ac;
}

struct BatteryA {
  int runs = 0;
  double seconds = 0;
  bool p1_ok = true;
  double p1_worst = -1e9;  // max signed ccv seen
  bool p2_ok = true;
  double p2_worst = -1e9;  // max of positive ccv minus headroom
  bool p3_ok = true;
  std::string p3_note;
};

BatteryA run_battery_a(bool fast, std::ostream& log) {
  Timer timer;
  BatteryA out;
  const int T = 10000;
  const int A = 8;
  int seeds = fast ? 5 : 50;
  PredictionSource sources[] = {PredictionSource::forecaster,
                                PredictionSource::uniform,
                                PredictionSource::flip};
  for (PredictionSource src : sources) {
    log << "[battery-a] source=" << source_name(src) << " seeds=" << seeds
        << "\n";
    for (int s = 1; s <= seeds; ++s) {
      RunConfig cfg = base_cfg("acc-a", T, 2, static_cast<uint64_t>(s), src);
      cfg.adversary = make_adversary_preset("benign-iid", 2);
      cfg.agents.push_back(battery_a_agent());
      RunResult res = run_simulation(cfg);
      ++out.runs;
      const ConstraintFamily& c = cfg.agents[0].spec.constraints;
      CcvResult cv = ccv(res.transcript, 0, c);
      BenchmarkSets bench = compute_benchmarks(res.transcript, c, {},
                                               no_dists(T));
      int safe = set_size(bench.realized);
      for (int j = 0; j < c.count(); ++j) {
        out.p1_worst = std::max(out.p1_worst, cv.signed_sum[j]);
        if (!(cv.signed_sum[j] <= static_cast<double>(A))) out.p1_ok = false;
        double margin = cv.positive_sum[j] - static_cast<double>(A - safe);
        out.p2_worst = std::max(out.p2_worst, margin);
        if (!(cv.positive_sum[j] <= static_cast<double>(A - safe)))
          out.p2_ok = false;
      }
      ReplayResult rr = replay_agent(res.transcript, cfg.agents[0], 0, 1,
                                     cfg.delta);
      if (!rr.ok) {
        out.p3_ok = false;
        out.p3_note = rr.note;
      } else {
        for (int t = 1; t <= T; ++t) {
          ActionSet snap = rr.snapshots[static_cast<size_t>(t) - 1];
          if ((bench.realized & ~snap) != 0) {
            out.p3_ok = false;
            out.p3_note = fmt("safe action missing from round %d", t);
            break;
          }
        }
      }
    }
  }
  out.seconds = timer.elapsed();
  return out;
}

// --- battery B/F: accumulator-threshold agent on an iid stream ------------
//
// Actions 0..2 have expected slack -1/16 on constraint 0, actions 3..5 sit
// at +1/16 and dominate the utility, so the agent keeps playing them while
// the safe trio must survive.

AgentConfig battery_b_agent() {
  AgentConfig ac;
  ac.spec.id = "agent-0";
  ac.spec.mode = AgentMode::expectation;
  ac.spec.utility = make_util(
      2,
      {{0.25, 0}, {0, 0.25}, {0.125, 0.125}, {0.5, 0}, {0, 0.5},
       {0.25, 0.25}},
      {0.125, 0.125, 0.25, 0.5, 0.375, 0.5});
  ConstraintFamily& c = ac.spec.constraints;
  c.actions = 6;
  c.dim = 2;
  std::vector<Vec> g0(6, Vec{0.5, 0});
  add_linear(c, g0,
             {-0.3125, -0.3125, -0.3125, -0.1875, -0.1875, -0.1875});
  std::vector<Vec> g1(6, Vec{0, 0.25});
  add_linear(c, g1, Vec(6, -0.5));
  return ac;
}

struct BatteryB {
  int runs = 0;
  int safe_eliminations = 0;
  bool design_ok = true;
  bool ccv_ok = true;
  double worst_ccv = 0;
  double bound = 0;
  double seconds = 0;
};

BatteryB run_battery_b(bool fast, PredictionSource src, const char* tag,
                       std::ostream& log) {
  Timer timer;
  BatteryB out;
  const int T = 4096;
  int seeds = fast ? 20 : 200;
  out.bound = bound_ccv_threshold(T, 6, 1, 2, 0.05);
  const ActionSet safe_mask = 0b000111;
  log << "[" << tag << "] source=" << source_name(src) << " seeds=" << seeds
      << "\n";
  for (int s = 1; s <= seeds; ++s) {
    RunConfig cfg = base_cfg(tag, T, 2, static_cast<uint64_t>(s), src);
    cfg.adversary = make_adversary_preset("benign-iid", 2);
    cfg.agents.push_back(battery_b_agent());
    RunResult res = run_simulation(cfg);
    ++out.runs;
    const ConstraintFamily& c = cfg.agents[0].spec.constraints;
    BenchmarkSets bench =
        compute_benchmarks(res.transcript, c, {}, round_dists(cfg));
    if (!bench.expected || *bench.expected != safe_mask)
      out.design_ok = false;
    if ((safe_mask & ~res.ledgers[0].candidates[0]) != 0)
      ++out.safe_eliminations;
    CcvResult cv = ccv(res.transcript, 0, c);
    for (int j = 0; j < c.count(); ++j) {
      out.worst_ccv = std::max(out.worst_ccv, cv.signed_sum[j]);
      if (!(cv.signed_sum[j] <= out.bound)) out.ccv_ok = false;
    }
  }
  out.seconds = timer.elapsed();
  return out;
}

CriterionResult check_battery_b(const BatteryB& b, const char* id,
                                const char* name) {
  double frac = static_cast<double>(b.safe_eliminations) / b.runs;
  double thresh = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / b.runs);
  bool pass = b.design_ok && b.ccv_ok && frac <= thresh;
  CriterionResult r{id, name, pass, "", b.seconds};
  r.detail = fmt("%d runs, safe-elim frac %.4f <= %.4f, max ccv %.1f <= %.1f%s",
                 b.runs, frac, thresh, b.worst_ccv, b.bound,
                 b.design_ok ? "" : ", expected-safe set mismatch");
  return r;
}

// --- battery C: per-subsequence realization agent -------------------------

AgentConfig battery_c_agent(int T) {
  AgentConfig ac;
  ac.spec.id = "agent-0";
  ac.spec.mode = AgentMode::realization;
  ac.spec.utility = make_util(
      2,
      {{0.5, 0}, {0, 0.5}, {0.25, 0.25}, {0.375, 0.125}, {0.125, 0.375},
       {0, 0}},
      {0.25, 0.125, 0.25, 0, 0.375, 0.5});
  ConstraintFamily& c = ac.spec.constraints;
  c.actions = 6;
  c.dim = 2;
  std::vector<Vec> g0(6, Vec{0.5, 0});
  add_linear(c, g0, {-0.5, -0.25, -0.5, -0.25, -0.5, -0.25});
  std::vector<Vec> g1(6, Vec{0, 0.5});
  add_linear(c, g1, {-0.5, -0.5, -0.5, -0.3125, -0.3125, -0.3125});
  ac.subseqs.push_back(interval(1, (T * 2) / 3 + 1));
  ac.subseqs.push_back(interval(T / 3 + 1, T));
  ac.subseqs.push_back(periodic(2, 0));
  return ac;
}

struct BatteryC {
  int runs = 0;
  bool ok = true;
  double worst = -1e9;
  double seconds = 0;
};

BatteryC run_battery_c(bool fast, std::ostream& log) {
  Timer timer;
  BatteryC out;
  const int T = 8192;
  const double cap = 18.0;  // actions times subsequences
  int seeds = fast ? 5 : 50;
  log << "[battery-c] seeds=" << seeds << "\n";
  for (int s = 1; s <= seeds; ++s) {
    RunConfig cfg = base_cfg("acc-c", T, 2, static_cast<uint64_t>(s),
                             PredictionSource::forecaster);
    cfg.adversary = make_adversary_preset("benign-iid", 2);
    cfg.agents.push_back(battery_c_agent(T));
    RunResult res = run_simulation(cfg);
    ++out.runs;
    const ConstraintFamily& c = cfg.agents[0].spec.constraints;
    for (const SubsequenceDef& sub : cfg.agents[0].subseqs) {
      CcvResult cv = ccv_subseq(res.transcript, 0, c, sub);
      for (int j = 0; j < c.count(); ++j) {
        out.worst = std::max(out.worst, cv.signed_sum[j]);
        if (!(cv.signed_sum[j] <= cap)) out.ok = false;
      }
    }
  }
  out.seconds = timer.elapsed();
  return out;
}

// --- battery D: attributed accumulators against the masking adversary -----

AgentConfig battery_d_agent(int T) {
  AgentConfig ac;
  ac.spec.id = "agent-0";
  ac.spec.mode = AgentMode::expectation;
  ac.spec.utility =
      make_util(2, {{0, 0}, {0, 0}, {0, 0}}, {0.75, 0.5, 0.25});
  ConstraintFamily& c = ac.spec.constraints;
  c.actions = 3;
  c.dim = 2;
  add_linear(c, {{2, 0}, {0, 0}, {0, 0}}, {-1, -0.25, -0.25});
  ac.subseqs.push_back(interval(1, T));
  ac.subseqs.push_back(periodic(2, 0));
  return ac;
}

struct BatteryD {
  int runs = 0;
  bool ccv_ok = true;
  bool masked_ok = true;  // masked action leaves the full-horizon set
  double worst = -1e9;
  double bound = 0;
  bool script_ok = true;
  std::string script_note;
  double seconds = 0;
};

// Twelve rounds driven by hand with explicit thresholds 5 and 2: the bad
// action alternates -1 on odd rounds with +3/4 on even rounds, so its own
// full-horizon view stays negative while the even-round view crosses 2 at
// round 6. A diagonal-only variant that compares each responsible row
// against its own view never fires.
void run_masking_script(BatteryD& out) {
  ConstraintFamily fam;
  fam.actions = 2;
  fam.dim = 1;
  ConstraintDef def;
  def.kind = ConstraintDef::Kind::linear;
  def.g = {2, 0};
  def.h = {-1, -0.25};
  fam.defs.push_back(def);

  const std::vector<int> odd_active = {0};
  const std::vector<int> even_active = {0, 1};
  const double taus[2] = {5.0, 2.0};

  CandidateLedger led =
      CandidateLedger::make_subseq_expectation(2, 1, {taus[0], taus[1]});
  int first_elim = -1;
  for (int t = 1; t <= 12; ++t) {
    const std::vector<int>& active = t % 2 == 0 ? even_active : odd_active;
    ActionSet un = union_candidates(led, active);
    int a = set_contains(un, 0) ? 0 : 1;
    int r = responsible_index(led, active, a);
    Vec y{t % 2 == 0 ? 0.875 : 0.0};
    bool elim = step_alg4(led, a, y, fam, active, r);
    if (elim && first_elim < 0) first_elim = t;
  }
  if (first_elim != 6) {
    out.script_ok = false;
    out.script_note = fmt("cross-view elimination at round %d, wanted 6",
                          first_elim);
    return;
  }
  if (set_contains(led.candidates[0], 0) ||
      set_contains(led.candidates[1], 0)) {
    out.script_ok = false;
    out.script_note = "bad action still live after 12 rounds";
    return;
  }

  // Diagonal-only double of the same feed.
  double w[2][2][2] = {};  // [action][responsible][view]
  ActionSet cand[2] = {full_set(2), full_set(2)};
  for (int t = 1; t <= 12; ++t) {
    const std::vector<int>& active = t % 2 == 0 ? even_active : odd_active;
    ActionSet un = 0;
    for (int i : active) un |= cand[i];
    int a = set_contains(un, 0) ? 0 : 1;
    int r = -1;
    for (int i : active)
      if (set_contains(cand[i], a)) {
        r = i;
        break;
      }
    Vec y{t % 2 == 0 ? 0.875 : 0.0};
    double cj = fam.eval(0, a, y);
    for (int i : active) w[a][r][i] += cj;
    if (w[a][r][r] > taus[r]) cand[r] &= ~(1ULL << a);
  }
  if (!set_contains(cand[0], 0) || !set_contains(cand[1], 0)) {
    out.script_ok = false;
    out.script_note = "diagonal-only variant eliminated the bad action";
  }
}

BatteryD run_battery_d(bool fast, std::ostream& log) {
  Timer timer;
  BatteryD out;
  const int T = 4096;
  int seeds = fast ? 8 : 50;
  out.bound = bound_ccv_subseq_threshold({T, T / 2}, 3, 1, 1, 0.05);
  log << "[battery-d] seeds=" << seeds << "\n";
  for (int s = 1; s <= seeds; ++s) {
    RunConfig cfg = base_cfg("acc-d", T, 2, static_cast<uint64_t>(s),
                             PredictionSource::uniform);
    cfg.adversary = make_adversary_preset("masking", 2);
    cfg.agents.push_back(battery_d_agent(T));
    RunResult res = run_simulation(cfg);
    ++out.runs;
    const ConstraintFamily& c = cfg.agents[0].spec.constraints;
    for (const SubsequenceDef& sub : cfg.agents[0].subseqs) {
      CcvResult cv = ccv_subseq(res.transcript, 0, c, sub);
      for (int j = 0; j < c.count(); ++j) {
        out.worst = std::max(out.worst, cv.signed_sum[j]);
        if (!(cv.signed_sum[j] <= out.bound)) out.ccv_ok = false;
      }
    }
    if (set_contains(res.ledgers[0].candidates[0], 0)) out.masked_ok = false;
  }
  run_masking_script(out);
  out.seconds = timer.elapsed();
  return out;
}

// --- battery E: two forecast-driven agents across growing horizons --------

void battery_e_agents(RunConfig& cfg) {
  AgentConfig a0;
  a0.spec.id = "agent-0";
  a0.spec.mode = AgentMode::realization;
  a0.spec.utility = make_util(
      2, {{0.5, 0}, {0, 0.5}, {0.25, 0.25}}, {0.25, 0.25, 0.375});
  a0.spec.constraints.actions = 3;
  a0.spec.constraints.dim = 2;
  add_linear(a0.spec.constraints, {{0, 0}, {0.5, 0}, {0, 0}},
             {-0.5, -0.3125, -0.5});
  cfg.agents.push_back(a0);

  AgentConfig a1;
  a1.spec.id = "agent-1";
  a1.spec.mode = AgentMode::realization;
  a1.spec.utility = make_util(
      2, {{0.375, 0.125}, {0.125, 0.125}, {0, 0.25}}, {0.125, 0.5, 0.375});
  a1.spec.constraints.actions = 3;
  a1.spec.constraints.dim = 2;
  add_linear(a1.spec.constraints, {{0, 0}, {0, 0}, {0, 0}}, Vec(3, -0.5));
  cfg.agents.push_back(a1);
}

AdversaryDef battery_e_adversary() {
  AdversaryDef def;
  def.kind = AdversaryDef::Kind::iid;
  OutcomeDist d;
  d.support.emplace_back(Vec{0.25, 0.25});
  d.support.emplace_back(Vec{0.75, 0.5});
  d.probs = {0.5, 0.5};
  def.dist = d;
  return def;
}

struct BatteryE {
  std::vector<double> Ts;
  std::vector<double> bias_mean;  // per T, mean over seeds of max bias
  std::vector<double> swap_mean;  // per T, mean over seeds of max swap
  bool bias_bound_ok = true;
  bool swap_bound_ok = true;
  bool swap_defined_ok = true;
  bool gaps_ok = true;
  double worst_bias = 0, worst_bias_bound = 0;
  double worst_swap = 0, worst_swap_bound = 0;
  double seconds = 0;
};

BatteryE run_battery_e(bool fast, std::ostream& log) {
  Timer timer;
  BatteryE out;
  std::vector<int> horizons =
      fast ? std::vector<int>{512, 1024, 2048}
           : std::vector<int>{512, 1024, 2048, 4096, 8192};
  int seeds = fast ? 3 : 10;
  for (int T : horizons) {
    log << "[battery-e] T=" << T << " seeds=" << seeds << "\n";
    double bias_sum = 0, swap_sum = 0;
    for (int s = 1; s <= seeds; ++s) {
      RunConfig cfg = base_cfg("acc-e", T, 2, static_cast<uint64_t>(s),
                               PredictionSource::forecaster);
      cfg.adversary = battery_e_adversary();
      battery_e_agents(cfg);
      RunResult res = run_simulation(cfg);

      if (static_cast<int>(res.gaps.size()) != T) out.gaps_ok = false;
      for (double g : res.gaps)
        if (!(g <= cfg.eps)) out.gaps_ok = false;

      BiasReport br = conditional_bias(
          res.transcript, res.events,
          {cfg.agents[0].subseqs, cfg.agents[1].subseqs});
      double bias_max = 0;
      for (double b : br.bias) bias_max = std::max(bias_max, b);
      double bias_bound =
          bound_event_bias(T, 2, static_cast<int>(res.events.size()));
      if (!(bias_max <= bias_bound)) out.bias_bound_ok = false;
      if (bias_max > out.worst_bias) {
        out.worst_bias = bias_max;
        out.worst_bias_bound = bias_bound;
      }
      bias_sum += bias_max;

      double swap_max = -1e18;
      for (int n = 0; n < 2; ++n) {
        const LinearUtility& u = cfg.agents[n].spec.utility;
        const ConstraintFamily& c = cfg.agents[n].spec.constraints;
        BenchmarkSets bench =
            compute_benchmarks(res.transcript, c, {}, no_dists(T));
        SwapSlices slices = swap_slices(res.transcript, n, u);
        auto sw = swap_total(slices, bench.realized);
        if (!sw) {
          out.swap_defined_ok = false;
          continue;
        }
        double bound = bound_swap_regret(T, lipschitz_constant(u), 3, 2, 2,
                                         cfg.delta);
        if (!(*sw <= bound)) out.swap_bound_ok = false;
        if (*sw > swap_max) swap_max = *sw;
        if (*sw > out.worst_swap) {
          out.worst_swap = *sw;
          out.worst_swap_bound = bound;
        }
      }
      swap_sum += swap_max;
    }
    out.Ts.push_back(static_cast<double>(T));
    out.bias_mean.push_back(bias_sum / seeds);
    out.swap_mean.push_back(swap_sum / seeds);
  }
  out.seconds = timer.elapsed();
  return out;
}

// --- battery P9: hand-built game instances audited against a mesh ---------

struct GameCheck {
  bool ok = true;
  double worst_gap = 0;
  double worst_mesh_diff = 0;
  std::string note;
};

void check_instance(const MinmaxInstance& inst, int steps, GameCheck& out,
                    const char* label) {
  MinmaxSolution sol = solve_minmax(inst, 1e-3);
  out.worst_gap = std::max(out.worst_gap, sol.gap);
  if (!(sol.gap <= 1e-3 + 1e-12)) {
    out.ok = false;
    out.note = fmt("%s: gap %.3g", label, sol.gap);
    return;
  }
  double mesh = mesh_min(inst, steps);
  if (!(sol.upper <= mesh + 1e-9)) {
    out.ok = false;
    out.note = fmt("%s: value %.6f above mesh %.6f", label, sol.upper, mesh);
    return;
  }
  double diff = mesh - sol.upper;
  out.worst_mesh_diff = std::max(out.worst_mesh_diff, diff);
  if (!(diff <= 2e-3)) {
    out.ok = false;
    out.note = fmt("%s: mesh %.6f vs value %.6f", label, mesh, sol.upper);
  }
}

GameCheck run_game_checks(bool fast) {
  GameCheck out;
  int steps = fast ? 100 : 200;

  MinmaxInstance zero;
  zero.dim = 1;
  zero.points = 5;
  zero.alpha = Vec(5, 0.0);
  zero.beta = {Vec(5, 0.0)};
  check_instance(zero, steps, out, "zero");
  if (!out.ok) return out;

  // Pure-point optimum: the cheapest nonnegative-margin column wins.
  MinmaxInstance vertex;
  vertex.dim = 1;
  vertex.points = 5;
  vertex.alpha = {0.2, 0.05, -0.1, 0.15, 0.3};
  vertex.beta = {{-0.8, -0.2, 0.4, 0.6, 1.0}};
  check_instance(vertex, steps, out, "vertex");
  if (!out.ok) return out;

  // Optimum mixes two points half and half to zero out the margin.
  MinmaxInstance kink;
  kink.dim = 1;
  kink.points = 5;
  kink.alpha = {0.3, -0.2, 0.25, 0.1, 0.4};
  kink.beta = {{1.0, -0.5, 0.75, 0.5, -0.25}};
  check_instance(kink, steps, out, "kink");
  if (!out.ok) return out;

  // Optimum mixes at one third, so the mesh is off by a small but nonzero
  // amount and the 2e-3 band is actually exercised.
  MinmaxInstance third;
  third.dim = 1;
  third.points = 5;
  third.alpha = {0.0, -0.1, 0.1, 0.15, 0.2};
  third.beta = {{-0.4, -0.4, 0.2, 0.2, 0.2}};
  check_instance(third, steps, out, "third");
  return out;
}

// --- battery P10: swap decomposition against brute force ------------------

struct SwapCheck {
  int instances = 0;
  bool ok = true;
  std::string note;
};

SwapCheck run_swap_checks(bool fast) {
  SwapCheck out;
  Rng rng(777);
  int count = fast ? 50 : 200;
  for (int k = 0; k < count; ++k) {
    int A = 2 + static_cast<int>(rng.bounded(3));
    int d = 1 + static_cast<int>(rng.bounded(2));
    int T = 1 + static_cast<int>(rng.bounded(20));
    int B = 1 + static_cast<int>(rng.bounded(3));
    if (B > A) B = A;

    LinearUtility u;
    u.actions = A;
    u.dim = d;
    for (int a = 0; a < A; ++a) {
      double lo = 0;
      for (int i = 0; i < d; ++i) {
        double w = (static_cast<double>(rng.bounded(7)) - 3.0) / 8.0;
        u.weights.push_back(w);
        lo += std::min(0.0, w);
      }
      u.offsets.push_back(-lo);
    }

    std::vector<int> targets;
    ActionSet target_mask = 0;
    while (static_cast<int>(targets.size()) < B) {
      int b = static_cast<int>(rng.bounded(static_cast<uint64_t>(A)));
      if (!set_contains(target_mask, b)) {
        target_mask |= 1ULL << b;
        targets.push_back(b);
      }
    }

    Transcript tr;
    tr.dim = d;
    tr.horizon = T;
    std::vector<int> played(static_cast<size_t>(T));
    for (int t = 1; t <= T; ++t) {
      RoundRecord rec;
      rec.t = t;
      rec.x = Vec(2, 0.0);
      rec.psi_support = {0};
      rec.psi_probs = {1.0};
      rec.p_index = 0;
      rec.p = Vec(static_cast<size_t>(d), 0.0);
      rec.y.resize(static_cast<size_t>(d));
      for (int i = 0; i < d; ++i)
        rec.y[static_cast<size_t>(i)] =
            static_cast<double>(rng.bounded(9)) / 8.0;
      int a = static_cast<int>(rng.bounded(static_cast<uint64_t>(A)));
      played[static_cast<size_t>(t) - 1] = a;
      rec.actions = {a};
      rec.responsible = {-1};
      tr.append(std::move(rec));
    }

    SwapSlices slices = swap_slices(tr, 0, u);
    double total = *swap_total(slices, target_mask);

    // Brute force over every per-action remap into the target set.
    long combos = 1;
    for (int a = 0; a < A; ++a) combos *= B;
    double best = -1e18;
    std::vector<int> phi(static_cast<size_t>(A));
    for (long m = 0; m < combos; ++m) {
      long rest = m;
      for (int a = 0; a < A; ++a) {
        phi[static_cast<size_t>(a)] = targets[rest % B];
        rest /= B;
      }
      double gain = 0;
      for (int t = 0; t < T; ++t) {
        int a = played[static_cast<size_t>(t)];
        const Vec& y = tr.rounds[static_cast<size_t>(t)].y;
        gain += eval_utility(u, phi[static_cast<size_t>(a)], y) -
                eval_utility(u, a, y);
      }
      if (gain > best) best = gain;
    }
    ++out.instances;
    if (total != best) {
      out.ok = false;
      out.note = fmt("instance %d: decomposition %.17g, brute force %.17g",
                     k, total, best);
      return out;
    }
  }
  return out;
}

// --- battery P11: byte-identical reruns -----------------------------------

struct RerunCheck {
  int pairs = 0;
  bool ok = true;
  std::string note;
};

RerunCheck run_rerun_checks(std::ostream& log) {
  RerunCheck out;
  log << "[battery-p11] rerun pairs\n";
  std::vector<RunConfig> cfgs;
  {
    RunConfig cfg = base_cfg("acc-p11-a", 2000, 2, 42,
                             PredictionSource::forecaster);
    cfg.adversary = make_adversary_preset("benign-iid", 2);
    cfg.agents.push_back(battery_a_agent());
    cfgs.push_back(cfg);
  }
  {
    RunConfig cfg = base_cfg("acc-p11-b", 1024, 2, 5,
                             PredictionSource::uniform);
    cfg.adversary = make_adversary_preset("benign-iid", 2);
    cfg.agents.push_back(battery_b_agent());
    cfgs.push_back(cfg);
  }
  {
    RunConfig cfg = base_cfg("acc-p11-c", 2048, 2, 7,
                             PredictionSource::forecaster);
    cfg.adversary = make_adversary_preset("benign-iid", 2);
    cfg.agents.push_back(battery_c_agent(2048));
    cfgs.push_back(cfg);
  }
  {
    RunConfig cfg = base_cfg("acc-p11-d", 1024, 2, 9,
                             PredictionSource::flip);
    cfg.adversary = make_adversary_preset("masking", 2);
    cfg.agents.push_back(battery_d_agent(1024));
    cfgs.push_back(cfg);
  }
  for (const RunConfig& cfg : cfgs) {
    std::string body1 = report_body_json(run_simulation(cfg).report);
    std::string body2 = report_body_json(run_simulation(cfg).report);
    ++out.pairs;
    if (body1 != body2) {
      out.ok = false;
      out.note = fmt("config %s differs across reruns", cfg.digest.c_str());
      return out;
    }
  }
  return out;
}

}  // namespace

std::vector<CriterionResult> run_suite(bool fast, std::ostream& log) {
  std::vector<CriterionResult> out;

  BatteryA a = run_battery_a(fast, log);
  out.push_back({"P1", "played-ccv-within-action-budget", a.p1_ok,
                 fmt("%d runs, max signed ccv %.4f <= 8", a.runs, a.p1_worst),
                 a.seconds});
  out.push_back({"P2", "positive-ccv-within-headroom", a.p2_ok,
                 fmt("%d runs, worst margin %.4f <= 0", a.runs, a.p2_worst),
                 0.0});
  out.push_back({"P3", "clean-actions-never-eliminated", a.p3_ok,
                 a.p3_ok ? fmt("%d replays, all rounds covered", a.runs)
                         : a.p3_note,
                 0.0});

  BatteryB b = run_battery_b(fast, PredictionSource::uniform, "battery-b",
                             log);
  out.push_back(
      check_battery_b(b, "P4", "expected-safe-actions-survive"));

  BatteryC c = run_battery_c(fast, log);
  out.push_back({"P5", "per-subsequence-ccv-budget", c.ok,
                 fmt("%d runs, max subsequence ccv %.4f <= 18", c.runs,
                     c.worst),
                 c.seconds});

  BatteryD d = run_battery_d(fast, log);
  {
    bool pass = d.ccv_ok && d.masked_ok && d.script_ok;
    std::string detail =
        fmt("%d runs, max ccv %.1f <= %.1f, masked action removed in all",
            d.runs, d.worst, d.bound);
    if (!d.masked_ok) detail = "masked action survived a run";
    if (!d.script_ok) detail = d.script_note;
    out.push_back({"P6", "cross-subsequence-masking-caught", pass, detail,
                   d.seconds});
  }

  BatteryE e = run_battery_e(fast, log);
  {
    double bias_slope = loglog_slope(e.Ts, e.bias_mean);
    bool pass = e.bias_bound_ok && bias_slope <= 0.75;
    out.push_back({"P7", "event-bias-sublinear", pass,
                   fmt("slope %.3f <= 0.75, worst bias %.1f <= %.1f",
                       bias_slope, e.worst_bias, e.worst_bias_bound),
                   e.seconds});
    double swap_slope = loglog_slope(e.Ts, e.swap_mean);
    bool spass = e.swap_bound_ok && e.swap_defined_ok && swap_slope <= 0.75;
    out.push_back({"P8", "swap-regret-sublinear", spass,
                   fmt("slope %.3f <= 0.75, worst swap %.1f <= %.1f",
                       swap_slope, e.worst_swap, e.worst_swap_bound),
                   0.0});
  }

  {
    Timer timer;
    GameCheck g = run_game_checks(fast);
    bool pass = g.ok && e.gaps_ok;
    std::string detail =
        g.ok ? fmt("max gap %.2g <= 1e-3, max mesh diff %.2g <= 2e-3%s",
                   g.worst_gap, g.worst_mesh_diff,
                   e.gaps_ok ? ", per-round gaps certified"
                             : ", MISSING per-round gap records")
             : g.note;
    out.push_back({"P9", "game-solutions-certified", pass, detail,
                   timer.elapsed()});
  }

  {
    Timer timer;
    SwapCheck s = run_swap_checks(fast);
    out.push_back({"P10", "swap-decomposition-exact", s.ok,
                   s.ok ? fmt("%d instances match brute force exactly",
                              s.instances)
                        : s.note,
                   timer.elapsed()});
  }

  {
    Timer timer;
    RerunCheck r = run_rerun_checks(log);
    out.push_back({"P11", "reports-reproducible", r.ok,
                   r.ok ? fmt("%d configs byte-identical across reruns",
                              r.pairs)
                        : r.note,
                   timer.elapsed()});
  }

  BatteryB f = run_battery_b(fast, PredictionSource::forecaster, "battery-f",
                             log);
  out.push_back(
      check_battery_b(f, "P12", "forecast-driven-safety-preserved"));

  return out;
}

}  // namespace ocsim::acceptance
