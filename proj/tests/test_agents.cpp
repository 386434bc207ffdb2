#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ocsim/agents.hpp"

using namespace ocsim;

namespace {

LinearUtility flat_utility(int actions, Vec offsets) {
  LinearUtility u;
  u.actions = actions;
  u.dim = 1;
  u.weights.assign(static_cast<size_t>(actions), 0.0);
  u.offsets = std::move(offsets);
  return u;
}

ConstraintFamily one_linear(int actions, std::vector<Vec> g, Vec h) {
  ConstraintFamily fam;
  fam.actions = actions;
  fam.dim = static_cast<int>(g[0].size());
  ConstraintDef def;
  def.kind = ConstraintDef::Kind::linear;
  for (const Vec& row : g) def.g.insert(def.g.end(), row.begin(), row.end());
  def.h = std::move(h);
  fam.defs.push_back(std::move(def));
  return fam;
}

}  // namespace

TEST_CASE("set helpers") {
  CHECK(full_set(1) == 1ULL);
  CHECK(full_set(8) == 0xffULL);
  CHECK(full_set(64) == ~0ULL);
  CHECK(set_size(full_set(64)) == 64);
  CHECK(set_contains(0b101, 0));
  CHECK(!set_contains(0b101, 1));
  CHECK(set_size(0b1011) == 3);
}

TEST_CASE("best response maximizes predicted utility over the candidates") {
  LinearUtility u;
  u.actions = 3;
  u.dim = 2;
  u.weights = {0.5, 0, 0, 0.5, 0.25, 0.25};
  u.offsets = {0.25, 0.25, 0.375};
  // p = (1, 0): utilities 0.75, 0.25, 0.625
  CHECK(constrained_best_response(u, 0b111, {1.0, 0.0}) == 0);
  CHECK(constrained_best_response(u, 0b110, {1.0, 0.0}) == 2);
  CHECK(constrained_best_response(u, 0b010, {1.0, 0.0}) == 1);
}

TEST_CASE("best response breaks exact ties toward the lowest index") {
  LinearUtility u = flat_utility(4, {0.5, 0.5, 0.5, 0.5});
  CHECK(constrained_best_response(u, 0b1111, {0.3}) == 0);
  CHECK(constrained_best_response(u, 0b1110, {0.3}) == 1);
  CHECK(constrained_best_response(u, 0b1000, {0.3}) == 3);
}

TEST_CASE("best response on an empty candidate set throws") {
  LinearUtility u = flat_utility(2, {0.5, 0.5});
  CHECK_THROWS_AS(constrained_best_response(u, 0, {0.5}),
                  FeasibilityExhausted);
}

TEST_CASE("realization rule eliminates every violated candidate") {
  // c(a, y) = y0 - theta_a encoded linearly; outcome 0.5 violates actions
  // with theta below 0.5, exactly-zero margins survive
  ConstraintFamily fam = one_linear(
      4, {{1.0}, {1.0}, {1.0}, {1.0}}, {-0.25, -0.5, -0.75, -0.375});
  CandidateLedger led = CandidateLedger::make_realization(4, 1);
  ActionSet gone = step_alg1(led, {0.5}, fam);
  CHECK(gone == 0b1001);  // thresholds 0.25 and 0.375 are crossed
  CHECK(led.candidates[0] == 0b0110);
  // idempotent on the same outcome
  CHECK(step_alg1(led, {0.5}, fam) == 0);
  CHECK(led.candidates[0] == 0b0110);
  // a later outcome can clear the rest
  CHECK(step_alg1(led, {0.8}, fam) == 0b0110);
  CHECK(led.candidates[0] == 0);
}

TEST_CASE("realization rule drops unplayed violators too") {
  ConstraintFamily fam = one_linear(2, {{1.0}, {1.0}}, {-0.25, -0.9});
  CandidateLedger led = CandidateLedger::make_realization(2, 1);
  // nothing was "played"; the rule only looks at the outcome
  ActionSet gone = step_alg1(led, {0.5}, fam);
  CHECK(gone == 0b01);
}

TEST_CASE("accumulator rule eliminates only strictly above the threshold") {
  ConstraintFamily fam = one_linear(2, {{1.0}, {0.0}}, {-0.25, -0.5});
  CandidateLedger led = CandidateLedger::make_expectation(2, 1, 1.0);
  // c(a0, 0.75) = 0.5 each time: 0.5, then 1.0 (== tau, stays), then over
  CHECK(!step_alg2(led, 0, {0.75}, fam));
  CHECK(led.v_at(0, 0).value() == 0.5);
  CHECK(!step_alg2(led, 0, {0.75}, fam));
  CHECK(led.v_at(0, 0).value() == 1.0);
  CHECK(set_contains(led.candidates[0], 0));
  CHECK(step_alg2(led, 0, {0.75}, fam));
  CHECK(!set_contains(led.candidates[0], 0));
  CHECK(led.candidates[0] == 0b10);
}

TEST_CASE("accumulator rule tracks only the played action") {
  ConstraintFamily fam = one_linear(2, {{1.0}, {1.0}}, {-0.25, -0.25});
  CandidateLedger led = CandidateLedger::make_expectation(2, 1, 10.0);
  step_alg2(led, 1, {0.75}, fam);
  CHECK(led.v_at(0, 0).value() == 0.0);
  CHECK(led.v_at(1, 0).value() == 0.5);
}

TEST_CASE("accumulator rule rejects non-candidate plays") {
  ConstraintFamily fam = one_linear(2, {{1.0}, {0.0}}, {-0.25, -0.5});
  CandidateLedger led = CandidateLedger::make_expectation(2, 1, 0.25);
  CHECK(step_alg2(led, 0, {0.75}, fam));  // 0.5 > 0.25, eliminated
  CHECK_THROWS_AS(step_alg2(led, 0, {0.75}, fam), InvariantViolation);
}

TEST_CASE("negative accumulation never eliminates") {
  ConstraintFamily fam = one_linear(1, {{1.0}}, {-0.875});
  CandidateLedger led = CandidateLedger::make_expectation(1, 1, 0.5);
  for (int i = 0; i < 1000; ++i)
    CHECK(!step_alg2(led, 0, {0.25}, fam));
  CHECK(led.v_at(0, 0).value() == -625.0);
  CHECK(led.candidates[0] == 0b1);
}

TEST_CASE("elimination thresholds match the closed form") {
  // 4 * sqrt(T * ln(A*N*J*T / delta)), frozen against an independent
  // computation
  CHECK(threshold_tau(10000, 10, 1, 1, 0.05) ==
        doctest::Approx(1523.609280020267).epsilon(1e-12));
  CHECK(threshold_tau(4096, 6, 1, 2, 0.05) ==
        doctest::Approx(950.942835286254).epsilon(1e-12));
  CHECK(threshold_tau(8192, 4, 2, 3, 0.01) ==
        doctest::Approx(1483.658037596193).epsilon(1e-12));
}

TEST_CASE("per-subsequence thresholds match the closed form") {
  // 4 * sqrt(|S| * ln(A*N*|F|^2*J*|S| / delta))
  CHECK(tau_subsequence(2048, 3, 1, 2, 1, 0.05) ==
        doctest::Approx(655.311445938907).epsilon(1e-12));
  CHECK(tau_subsequence(8192, 6, 1, 3, 2, 0.05) ==
        doctest::Approx(1478.996740704822).epsilon(1e-12));
}

TEST_CASE("threshold formulas reject degenerate parameters") {
  CHECK_THROWS_AS(threshold_tau(0, 4, 1, 1, 0.05), ConfigError);
  CHECK_THROWS_AS(threshold_tau(100, 0, 1, 1, 0.05), ConfigError);
  CHECK_THROWS_AS(threshold_tau(100, 4, 1, 1, 1.5), ConfigError);
  CHECK_THROWS_AS(threshold_tau(100, 4, 1, 1, 0.0), ConfigError);
  CHECK_THROWS_AS(tau_subsequence(0, 4, 1, 2, 1, 0.05), ConfigError);
  CHECK_THROWS_AS(tau_subsequence(64, 4, 1, 0, 1, 0.05), ConfigError);
}

TEST_CASE("thresholds grow with the horizon and shrink with delta") {
  double t1 = threshold_tau(1000, 4, 1, 1, 0.05);
  double t2 = threshold_tau(2000, 4, 1, 1, 0.05);
  double t3 = threshold_tau(1000, 4, 1, 1, 0.01);
  CHECK(t2 > t1);
  CHECK(t3 > t1);
}

TEST_CASE("union over active subsequences") {
  CandidateLedger led = CandidateLedger::make_subseq_realization(4, 1, 3);
  led.candidates = {0b0011, 0b0100, 0b1000};
  CHECK(union_candidates(led, {0, 1}) == 0b0111);
  CHECK(union_candidates(led, {2}) == 0b1000);
  CHECK(union_candidates(led, {0, 1, 2}) == 0b1111);
  CHECK_THROWS_AS(union_candidates(led, {}), ProtocolError);
}

TEST_CASE("per-subsequence realization eliminates only in active sets") {
  ConstraintFamily fam = one_linear(2, {{1.0}, {0.0}}, {-0.25, -0.5});
  CandidateLedger led = CandidateLedger::make_subseq_realization(2, 1, 2);
  auto gone = step_alg3(led, {0.75}, fam, {1});
  REQUIRE(gone.size() == 1);
  CHECK(gone[0] == 0b01);
  CHECK(led.candidates[0] == 0b11);  // inactive set untouched
  CHECK(led.candidates[1] == 0b10);
}

TEST_CASE("responsibility goes to the first active set holding the action") {
  CandidateLedger led = CandidateLedger::make_subseq_realization(2, 1, 3);
  led.candidates = {0b10, 0b01, 0b01};
  CHECK(responsible_index(led, {0, 1, 2}, 0) == 1);
  CHECK(responsible_index(led, {0, 1, 2}, 1) == 0);
  CHECK(responsible_index(led, {1, 2}, 0) == 1);
  CHECK_THROWS_AS(responsible_index(led, {0}, 0), InvariantViolation);
}

TEST_CASE("attributed accumulators compare against the viewed threshold") {
  // One bad action: -1 on odd rounds, +0.75 on even rounds. Full-horizon
  // view never crosses its threshold of 5; the even-round view crosses its
  // threshold of 2 at round 6 and must evict from the responsible set.
  ConstraintFamily fam = one_linear(2, {{2.0}, {0.0}}, {-1.0, -0.25});
  CandidateLedger led =
      CandidateLedger::make_subseq_expectation(2, 1, {5.0, 2.0});
  std::vector<int> odd = {0}, both = {0, 1};
  int elim_round = -1;
  for (int t = 1; t <= 6; ++t) {
    const std::vector<int>& active = t % 2 == 0 ? both : odd;
    ActionSet un = union_candidates(led, active);
    int a = set_contains(un, 0) ? 0 : 1;
    int r = responsible_index(led, active, a);
    CHECK(r == 0);
    Vec y{t % 2 == 0 ? 0.875 : 0.0};
    if (step_alg4(led, a, y, fam, active, r) && elim_round < 0)
      elim_round = t;
  }
  CHECK(elim_round == 6);
  CHECK(led.candidates[0] == 0b10);  // evicted from the responsible set
  CHECK(led.candidates[1] == 0b11);  // other set untouched
  CHECK(led.w_at(0, 0, 0, 0).value() == -0.75);  // -1 -1 -1 +0.75*3
  CHECK(led.w_at(0, 0, 0, 1).value() == 2.25);
}

TEST_CASE("attributed updates touch only active views of the played action") {
  ConstraintFamily fam = one_linear(2, {{1.0}, {0.0}}, {-0.25, -0.5});
  CandidateLedger led =
      CandidateLedger::make_subseq_expectation(2, 1, {100.0, 100.0});
  step_alg4(led, 0, {0.75}, fam, {1}, 1);
  CHECK(led.w_at(0, 0, 1, 1).value() == 0.5);
  CHECK(led.w_at(0, 0, 1, 0).value() == 0.0);
  CHECK(led.w_at(0, 0, 0, 0).value() == 0.0);
  CHECK(led.w_at(1, 0, 1, 1).value() == 0.0);
}
