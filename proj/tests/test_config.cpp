#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "ocsim/config.hpp"
#include "ocsim/errors.hpp"

using namespace ocsim;

namespace {

const char* kBase = R"(
[run]
horizon = 64
dim = 1
seed = 9
prediction = uniform
grid = 5

[adversary]
kind = iid
support = 0.25 ; 0.75
probs = 0.5 0.5

[agent.0]
actions = 2
utility.weights = 0.5 ; 0
utility.offsets = 0.25 0.5
constraint.0.kind = linear
constraint.0.g = 1 ; 0
constraint.0.h = -0.5 -0.25
)";

RunConfig from(const std::string& text) {
  return build_run_config(IniDoc::parse(text));
}

std::string swap(std::string text, const std::string& from_s,
                 const std::string& to) {
  size_t pos = text.find(from_s);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from_s.size(), to);
}

}  // namespace

TEST_CASE("ini parsing tolerates layout and rejects malformed lines") {
  IniDoc doc = IniDoc::parse(
      "# comment\n[b]\nx = 1\n\n; another\n[a]\n  y   =  2 3 \n");
  CHECK(doc.get("b", "x") == "1");
  CHECK(doc.get("a", "y") == "2 3");
  CHECK(doc.has("a", "y"));
  CHECK(!doc.has("a", "x"));
  CHECK(doc.get_or("a", "x", "7") == "7");

  // Canonical form sorts sections and keys, so layout stops mattering.
  CHECK(doc.canonical() == "[a]\ny = 2 3\n[b]\nx = 1\n");
  IniDoc again = IniDoc::parse(doc.canonical());
  CHECK(again.canonical() == doc.canonical());

  CHECK_THROWS_AS(IniDoc::parse("[s]\nk = 1\nk = 2\n"), ConfigError);
  CHECK_THROWS_AS(IniDoc::parse("[s\nk = 1\n"), ConfigError);
  CHECK_THROWS_AS(IniDoc::parse("[]\n"), ConfigError);
  CHECK_THROWS_AS(IniDoc::parse("k = 1\n"), ConfigError);
  CHECK_THROWS_AS(IniDoc::parse("[s]\njust a line\n"), ConfigError);
  CHECK_THROWS_AS(IniDoc::parse("[s]\n= 1\n"), ConfigError);
  CHECK_THROWS_AS(doc.get("missing", "x"), ConfigError);
  CHECK_THROWS_AS(doc.get("a", "missing"), ConfigError);
}

TEST_CASE("scalar parsers enforce their formats") {
  CHECK(parse_int("42", "w") == 42);
  CHECK(parse_int("-7", "w") == -7);
  CHECK_THROWS_AS(parse_int("4.5", "w"), ConfigError);
  CHECK_THROWS_AS(parse_int("12x", "w"), ConfigError);
  CHECK_THROWS_AS(parse_int("", "w"), ConfigError);

  CHECK(parse_double("0.5", "w") == 0.5);
  CHECK(parse_double("1e-3", "w") == 1e-3);
  CHECK_THROWS_AS(parse_double("abc", "w"), ConfigError);
  CHECK_THROWS_AS(parse_double("nan", "w"), ConfigError);
  CHECK_THROWS_AS(parse_double("1.5z", "w"), ConfigError);

  CHECK(parse_bool("true", "w"));
  CHECK(parse_bool("1", "w"));
  CHECK(parse_bool("yes", "w"));
  CHECK(!parse_bool("false", "w"));
  CHECK(!parse_bool("0", "w"));
  CHECK(!parse_bool("no", "w"));
  CHECK_THROWS_AS(parse_bool("on", "w"), ConfigError);

  CHECK(parse_vector("1 2 3", "w") == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(parse_vector("  ", "w"), ConfigError);

  auto m = parse_matrix("1 2 ; 3 4", "w");
  REQUIRE(m.size() == 2);
  CHECK(m[0] == std::vector<double>{1, 2});
  CHECK(m[1] == std::vector<double>{3, 4});
  CHECK_THROWS_AS(parse_matrix("1 ;; 2", "w"), ConfigError);
}

TEST_CASE("seed lists accept ranges and explicit entries") {
  CHECK(parse_seed_list("1:4") == std::vector<uint64_t>{1, 2, 3, 4});
  CHECK(parse_seed_list("7:7") == std::vector<uint64_t>{7});
  CHECK(parse_seed_list("5") == std::vector<uint64_t>{5});
  CHECK(parse_seed_list("3 9 12") == std::vector<uint64_t>{3, 9, 12});
  CHECK_THROWS_AS(parse_seed_list("8:1"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("-2:4"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("0:100000"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list(""), ConfigError);
}

TEST_CASE("run configs capture fields and digest the content") {
  RunConfig cfg = from(kBase);
  CHECK(cfg.horizon == 64);
  CHECK(cfg.dim == 1);
  CHECK(cfg.seed == 9);
  CHECK(cfg.delta == 0.05);
  CHECK(cfg.eps == 0.001);
  CHECK(cfg.source == PredictionSource::uniform);
  CHECK(cfg.grid_per_axis == 5);
  CHECK(cfg.adversary.kind == AdversaryDef::Kind::iid);
  REQUIRE(cfg.agents.size() == 1);
  CHECK(cfg.agents[0].spec.id == "agent-0");
  CHECK(cfg.agents[0].spec.mode == AgentMode::realization);
  CHECK(cfg.agents[0].spec.utility.actions == 2);
  CHECK(cfg.agents[0].spec.constraints.count() == 1);
  CHECK(cfg.agents[0].subseqs.empty());
  CHECK(cfg.sweep_seeds.empty());
  CHECK(cfg.sweep_threads == 1);
  CHECK(cfg.digest.size() == 16);

  // Layout changes leave the digest alone; content changes move it.
  std::string reordered = std::string("# banner\n[agent.0]\nactions = 2\n") +
      "utility.weights = 0.5 ; 0\nutility.offsets = 0.25 0.5\n" +
      "constraint.0.kind = linear\nconstraint.0.g = 1 ; 0\n" +
      "constraint.0.h = -0.5 -0.25\n[adversary]\nkind = iid\n" +
      "support = 0.25 ; 0.75\nprobs = 0.5 0.5\n[run]\ngrid = 5\n" +
      "horizon = 64\ndim = 1\nseed = 9\nprediction = uniform\n";
  CHECK(from(reordered).digest == cfg.digest);
  CHECK(from(swap(kBase, "horizon = 64", "horizon = 65")).digest !=
        cfg.digest);
}

TEST_CASE("run section bounds are enforced") {
  CHECK_THROWS_AS(from(swap(kBase, "horizon = 64", "horizon = 0")),
                  ConfigError);
  CHECK_THROWS_AS(from(swap(kBase, "horizon = 64", "horizon = 10000001")),
                  ConfigError);
  CHECK_THROWS_AS(from(swap(kBase, "dim = 1", "dim = 21")), ConfigError);
  CHECK_NOTHROW(from(kBase));
  CHECK_THROWS_AS(from(swap(kBase, "grid = 5", "grid = 1")), ConfigError);
  CHECK_THROWS_AS(
      from(swap(kBase, "prediction = uniform", "prediction = oracle")),
      ConfigError);
  std::string with_delta = swap(kBase, "seed = 9", "seed = 9\ndelta = 1.0");
  CHECK_THROWS_AS(from(with_delta), ConfigError);
  std::string with_eps = swap(kBase, "seed = 9", "seed = 9\neps = 0");
  CHECK_THROWS_AS(from(with_eps), ConfigError);
}

TEST_CASE("agent validation rejects inconsistent shapes") {
  CHECK_THROWS_AS(from(swap(kBase, "actions = 2", "actions = 0")),
                  ConfigError);
  CHECK_THROWS_AS(from(swap(kBase, "actions = 2", "actions = 65")),
                  ConfigError);
  CHECK_THROWS_AS(
      from(swap(kBase, "utility.weights = 0.5 ; 0", "utility.weights = 0.5")),
      ConfigError);
  CHECK_THROWS_AS(from(swap(kBase, "utility.offsets = 0.25 0.5",
                            "utility.offsets = 0.25")),
                  ConfigError);
  CHECK_THROWS_AS(from(swap(kBase, "utility.offsets = 0.25 0.5",
                            "utility.offsets = 0.25 1.5")),
                  ConfigError);
  CHECK_THROWS_AS(
      from(swap(kBase, "constraint.0.g = 1 ; 0", "constraint.0.g = 1")),
      ConfigError);
  CHECK_THROWS_AS(
      from(swap(kBase, "constraint.0.g = 1 ; 0", "constraint.0.g = 2 ; 0")),
      ConfigError);
  CHECK_THROWS_AS(
      from(swap(kBase, "constraint.0.kind = linear",
                "constraint.0.kind = quadratic")),
      ConfigError);

  std::string no_constraint = kBase;
  no_constraint = swap(no_constraint, "constraint.0.kind = linear\n", "");
  no_constraint = swap(no_constraint, "constraint.0.g = 1 ; 0\n", "");
  no_constraint = swap(no_constraint, "constraint.0.h = -0.5 -0.25\n", "");
  CHECK_THROWS_AS(from(no_constraint), ConfigError);

  std::string no_agent = kBase;
  no_agent = swap(no_agent, "[agent.0]", "[other]");
  CHECK_THROWS_AS(from(no_agent), ConfigError);
}

TEST_CASE("threshold and tabular constraints parse and validate") {
  std::string thr = kBase;
  thr = swap(thr, "constraint.0.kind = linear",
             "constraint.0.kind = threshold");
  thr = swap(thr, "constraint.0.g = 1 ; 0\n",
             "constraint.0.theta = 0.5 0.25\n");
  thr = swap(thr, "constraint.0.h = -0.5 -0.25\n",
             "constraint.0.scale = -1\n");
  RunConfig cfg = from(thr);
  CHECK(cfg.agents[0].spec.constraints.defs[0].kind ==
        ConstraintDef::Kind::threshold);
  CHECK(cfg.agents[0].spec.constraints.defs[0].scale == -1.0);
  CHECK(cfg.agents[0].spec.constraints.defs[0].coord == 0);
  CHECK_THROWS_AS(from(swap(thr, "constraint.0.scale = -1",
                            "constraint.0.scale = 1.5")),
                  ConfigError);
  CHECK_THROWS_AS(from(swap(thr, "constraint.0.kind = threshold",
                            "constraint.0.kind = threshold\n"
                            "constraint.0.coord = 1")),
                  ConfigError);
  CHECK_THROWS_AS(from(swap(thr, "constraint.0.theta = 0.5 0.25",
                            "constraint.0.theta = 0.5")),
                  ConfigError);

  std::string tab = kBase;
  tab = swap(tab, "constraint.0.kind = linear",
             "constraint.0.kind = tabular\nconstraint.0.cells = 2");
  tab = swap(tab, "constraint.0.g = 1 ; 0\n", "");
  tab = swap(tab, "constraint.0.h = -0.5 -0.25",
             "constraint.0.values = -0.5 0.5 ; 0 0");
  RunConfig tc = from(tab);
  CHECK(tc.agents[0].spec.constraints.defs[0].kind ==
        ConstraintDef::Kind::tabular);
  CHECK(tc.agents[0].spec.constraints.defs[0].cells == 2);
  CHECK_THROWS_AS(from(swap(tab, "constraint.0.values = -0.5 0.5 ; 0 0",
                            "constraint.0.values = -0.5 1.5 ; 0 0")),
                  ConfigError);
  CHECK_THROWS_AS(from(swap(tab, "constraint.0.values = -0.5 0.5 ; 0 0",
                            "constraint.0.values = -0.5 ; 0")),
                  ConfigError);
  CHECK_THROWS_AS(from(swap(tab, "constraint.0.cells = 2",
                            "constraint.0.cells = 0")),
                  ConfigError);
}

TEST_CASE("unknown agent modes are rejected") {
  std::string text = swap(kBase, "actions = 2", "actions = 2\nmode = greedy");
  CHECK_THROWS_AS(from(text), ConfigError);
  std::string expectation =
      swap(kBase, "actions = 2", "actions = 2\nmode = expectation");
  CHECK(from(expectation).agents[0].spec.mode == AgentMode::expectation);
}

TEST_CASE("subsequence families parse, default, and must cover the horizon") {
  std::string with_subseq = swap(
      kBase, "constraint.0.h = -0.5 -0.25",
      "constraint.0.h = -0.5 -0.25\n"
      "subseq.0.kind = interval\n"
      "subseq.1.kind = periodic\nsubseq.1.period = 2\nsubseq.1.phase = 1");
  RunConfig cfg = from(with_subseq);
  REQUIRE(cfg.agents[0].subseqs.size() == 2);
  CHECK(cfg.agents[0].subseqs[0].kind == SubsequenceDef::Kind::interval);
  CHECK(cfg.agents[0].subseqs[0].start == 1);
  CHECK(cfg.agents[0].subseqs[0].stop == 64);  // defaults to the horizon
  CHECK(cfg.agents[0].subseqs[1].period == 2);
  CHECK(cfg.agents[0].subseqs[1].phase == 1);

  std::string gap = swap(
      kBase, "constraint.0.h = -0.5 -0.25",
      "constraint.0.h = -0.5 -0.25\n"
      "subseq.0.kind = interval\nsubseq.0.start = 1\nsubseq.0.stop = 32");
  CHECK_THROWS_AS(from(gap), ConfigError);

  std::string bad_period = swap(
      kBase, "constraint.0.h = -0.5 -0.25",
      "constraint.0.h = -0.5 -0.25\n"
      "subseq.0.kind = periodic\nsubseq.0.period = 2\nsubseq.0.phase = 2");
  CHECK_THROWS_AS(from(bad_period), ConfigError);

  std::string feature_no_tau = swap(
      kBase, "constraint.0.h = -0.5 -0.25",
      "constraint.0.h = -0.5 -0.25\nmode = expectation\n"
      "subseq.0.kind = interval\n"
      "subseq.1.kind = feature-threshold\nsubseq.1.feature = 0");
  CHECK_THROWS_AS(from(feature_no_tau), ConfigError);

  std::string feature_with_tau =
      swap(feature_no_tau, "subseq.1.feature = 0",
           "subseq.1.feature = 0\ntau_subseq = 40 40");
  RunConfig ok = from(feature_with_tau);
  REQUIRE(ok.agents[0].spec.tau_per_subsequence_override.has_value());
  CHECK(ok.agents[0].spec.tau_per_subsequence_override->size() == 2);

  std::string tau_wrong_size =
      swap(feature_no_tau, "subseq.1.feature = 0",
           "subseq.1.feature = 0\ntau_subseq = 40");
  CHECK_THROWS_AS(from(tau_wrong_size), ConfigError);
}

TEST_CASE("scripted adversaries must span the horizon unless cycling") {
  std::string scripted = kBase;
  scripted = swap(scripted, "kind = iid", "kind = scripted");
  scripted = swap(scripted, "support = 0.25 ; 0.75",
                  "table.0.support = 0.25 ; 0.75");
  scripted = swap(scripted, "probs = 0.5 0.5", "table.0.probs = 0.5 0.5");
  CHECK_THROWS_AS(from(scripted), ConfigError);

  std::string cycling =
      swap(scripted, "kind = scripted", "kind = scripted\ncycle = true");
  RunConfig cfg = from(cycling);
  CHECK(cfg.adversary.kind == AdversaryDef::Kind::scripted);
  CHECK(cfg.adversary.cycle);
  REQUIRE(cfg.adversary.table.size() == 1);

  std::string preset = kBase;
  preset = swap(preset, "kind = iid", "preset = benign-iid");
  preset = swap(preset, "support = 0.25 ; 0.75\n", "");
  preset = swap(preset, "probs = 0.5 0.5\n", "");
  CHECK(from(preset).adversary.preset == "benign-iid");
  CHECK_THROWS_AS(from(swap(preset, "preset = benign-iid", "preset = bogus")),
                  ConfigError);
}

TEST_CASE("distributions must be proper and correctly shaped") {
  CHECK_THROWS_AS(from(swap(kBase, "probs = 0.5 0.5", "probs = 0.5 0.4")),
                  ConfigError);
  CHECK_THROWS_AS(from(swap(kBase, "probs = 0.5 0.5", "probs = 1.5 -0.5")),
                  ConfigError);
  CHECK_THROWS_AS(from(swap(kBase, "probs = 0.5 0.5", "probs = 1")),
                  ConfigError);
  CHECK_THROWS_AS(
      from(swap(kBase, "support = 0.25 ; 0.75", "support = 0.25 0.5 ; 0.75")),
      ConfigError);
  CHECK_THROWS_AS(from(swap(kBase, "kind = iid", "kind = markov")),
                  ConfigError);
}

TEST_CASE("sweep sections validate their seeds and threads") {
  std::string with_sweep =
      std::string(kBase) + "\n[sweep]\nseeds = 1:4\nthreads = 2\n";
  RunConfig cfg = from(with_sweep);
  CHECK(cfg.sweep_seeds == std::vector<uint64_t>{1, 2, 3, 4});
  CHECK(cfg.sweep_threads == 2);

  CHECK_THROWS_AS(from(swap(with_sweep, "threads = 2", "threads = 0")),
                  ConfigError);
  CHECK_THROWS_AS(from(swap(with_sweep, "threads = 2", "threads = 300")),
                  ConfigError);
  CHECK_THROWS_AS(
      from(std::string(kBase) + "\n[sweep]\nthreads = 2\n"),
      ConfigError);
}

TEST_CASE("config files load from disk or fail loudly") {
  CHECK_THROWS_AS(load_config("/nonexistent/path/run.ini"), ConfigError);
}
