#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "ocsim/errors.hpp"
#include "ocsim/forecast.hpp"
#include "ocsim/rng.hpp"

using namespace ocsim;

namespace {

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

RoundRecord round_rec(int t, int action, Vec p, Vec y) {
  RoundRecord r;
  r.t = t;
  r.x = {0.0, 0.0};
  r.psi_support = {0};
  r.psi_probs = {1.0};
  r.p_index = 0;
  r.p = std::move(p);
  r.y = std::move(y);
  r.actions = {action};
  r.responsible = {-1};
  return r;
}

}  // namespace

TEST_CASE("uniform grid enumerates with the last coordinate fastest") {
  PredictionGrid g = PredictionGrid::uniform(3, 2);
  REQUIRE(g.size() == 9);
  CHECK(g.points[0] == Vec{0.0, 0.0});
  CHECK(g.points[1] == Vec{0.0, 0.5});
  CHECK(g.points[2] == Vec{0.0, 1.0});
  CHECK(g.points[3] == Vec{0.5, 0.0});
  CHECK(g.points[4] == Vec{0.5, 0.5});
  CHECK(g.points[8] == Vec{1.0, 1.0});
  REQUIRE(g.coords.size() == 2);
  for (int idx = 0; idx < g.size(); ++idx)
    for (int i = 0; i < g.dim; ++i)
      CHECK(g.coords[i][idx] == g.points[idx][i]);
}

TEST_CASE("uniform grid rejects degenerate shapes") {
  CHECK_THROWS_AS(PredictionGrid::uniform(1, 2), ConfigError);
  CHECK_THROWS_AS(PredictionGrid::uniform(3, 0), ConfigError);
  CHECK_THROWS_AS(PredictionGrid::uniform(200, 4), ConfigError);
}

TEST_CASE("nearest on a uniform grid rounds midpoints down") {
  PredictionGrid g1 = PredictionGrid::uniform(3, 1);
  CHECK(g1.nearest({0.0}) == 0);
  CHECK(g1.nearest({0.25}) == 0);
  CHECK(g1.nearest({0.26}) == 1);
  CHECK(g1.nearest({0.5}) == 1);
  CHECK(g1.nearest({0.75}) == 1);
  CHECK(g1.nearest({0.76}) == 2);
  CHECK(g1.nearest({1.0}) == 2);

  PredictionGrid g2 = PredictionGrid::uniform(3, 2);
  CHECK(g2.nearest({0.6, 0.1}) == 3);
  CHECK(g2.nearest({1.0, 1.0}) == 8);
  CHECK(g2.nearest({0.25, 0.75}) == 1);
  CHECK_THROWS_AS(g2.nearest({0.5}), ConfigError);
}

TEST_CASE("explicit point lists resolve ties to the lowest index") {
  PredictionGrid g =
      PredictionGrid::explicit_points({{0.0}, {0.5}, {1.0}, {0.5}}, 1);
  CHECK(g.per_axis == 0);
  CHECK(g.nearest({0.5}) == 1);
  CHECK(g.nearest({0.3}) == 1);
  CHECK(g.nearest({0.25}) == 0);
  CHECK(g.nearest({0.9}) == 2);

  CHECK_THROWS_AS(PredictionGrid::explicit_points({}, 1), ConfigError);
  CHECK_THROWS_AS(PredictionGrid::explicit_points({{0.5, 0.5}}, 1),
                  ConfigError);
  CHECK_THROWS_AS(PredictionGrid::explicit_points({{1.5}}, 1), ConfigError);
}

TEST_CASE("event enumeration is agent-major, then action, then subsequence") {
  std::vector<EventKey> ev = enumerate_events({2, 3}, {2, 0});
  REQUIRE(ev.size() == 7);
  auto is = [&](int k, int n, int a, int s) {
    return ev[k].agent == n && ev[k].action == a && ev[k].subseq == s;
  };
  CHECK(is(0, 0, 0, 0));
  CHECK(is(1, 0, 0, 1));
  CHECK(is(2, 0, 1, 0));
  CHECK(is(3, 0, 1, 1));
  CHECK(is(4, 1, 0, -1));
  CHECK(is(5, 1, 1, -1));
  CHECK(is(6, 1, 2, -1));

  CHECK_THROWS_AS(enumerate_events({}, {}), ConfigError);
  CHECK_THROWS_AS(enumerate_events({2}, {0, 0}), ConfigError);
  CHECK_THROWS_AS(enumerate_events({0}, {0}), ConfigError);
}

TEST_CASE("expert learning rate matches the closed form") {
  ExpertTracker tr(PredictionGrid::uniform(3, 2), {3}, {2}, 8192);
  REQUIRE(tr.event_count() == 6);
  CHECK(tr.eta == doctest::Approx(0.055709677738).epsilon(1e-10));

  std::vector<double> d = tr.weights();
  REQUIRE(d.size() == 12);
  for (double v : d) CHECK(v == 0.0);

  CHECK_THROWS_AS(
      ExpertTracker(PredictionGrid::uniform(3, 2), {3}, {2}, 0),
      ConfigError);
}

TEST_CASE("recorded outcomes tilt the matched expert pair") {
  ExpertTracker tr(PredictionGrid::uniform(2, 2), {2}, {0}, 64);
  REQUIRE(tr.event_count() == 2);
  tr.record_outcome({0.75, 0.25}, {0.25, 0.5}, {0});

  CHECK(tr.gain_plus[0] == 0.5);
  CHECK(tr.gain_minus[0] == -0.5);
  CHECK(tr.gain_plus[2] == -0.25);
  CHECK(tr.gain_minus[2] == 0.25);
  CHECK(tr.gain_plus[1] == 0.0);
  CHECK(tr.gain_minus[3] == 0.0);

  std::vector<double> d = tr.weights();
  CHECK(d[0] > 0.0);
  CHECK(d[2] < 0.0);
  CHECK(d[1] == 0.0);
  CHECK(d[3] == 0.0);

  // Independent softmax over the 2*dim*E signed experts.
  double half = tr.eta / 2.0;
  double z = 0.0;
  std::vector<double> qp(4), qm(4);
  for (int k = 0; k < 4; ++k) {
    qp[k] = std::exp(tr.gain_plus[k] * half);
    qm[k] = std::exp(tr.gain_minus[k] * half);
    z += qp[k] + qm[k];
  }
  for (int k = 0; k < 4; ++k)
    CHECK(d[k] == doctest::Approx((qp[k] - qm[k]) / z).epsilon(1e-12));

  CHECK_THROWS_AS(tr.record_outcome({0.5, 0.5}, {0.5, 0.5}, {2}),
                  InvariantViolation);
  CHECK_THROWS_AS(tr.record_outcome({0.5, 0.5}, {0.5, 0.5}, {-1}),
                  InvariantViolation);
}

TEST_CASE("round-game construction aggregates active event weights") {
  ExpertTracker tr(PredictionGrid::uniform(2, 2), {2, 2}, {2, 0}, 256);
  REQUIRE(tr.event_count() == 6);
  tr.record_outcome({1.0, 0.0}, {0.0, 1.0}, {0, 3, 4});
  tr.record_outcome({0.25, 0.75}, {0.5, 0.25}, {1, 4});

  std::vector<std::vector<int>> cbr = {{0, 1, 1, 0}, {1, 1, -1, 0}};
  std::vector<uint8_t> active = {1, 0, 1, 1, 1, 1};
  MinmaxInstance inst = tr.build_instance(cbr, active);
  REQUIRE(inst.dim == 2);
  REQUIRE(inst.points == 4);

  std::vector<double> d = tr.weights();
  int E = tr.event_count();
  std::vector<int> offset = {0, 4};
  std::vector<int> stride = {2, 1};
  for (int g = 0; g < 4; ++g) {
    double beta[2] = {0.0, 0.0};
    for (int n = 0; n < 2; ++n) {
      int a = cbr[n][g];
      if (a < 0) continue;
      int base = offset[n] + a * stride[n];
      for (int s = 0; s < stride[n]; ++s) {
        if (!active[base + s]) continue;
        for (int i = 0; i < 2; ++i) beta[i] += d[i * E + base + s];
      }
    }
    double alpha = beta[0] * tr.grid.points[g][0] + beta[1] * tr.grid.points[g][1];
    CHECK(inst.beta[0][g] == doctest::Approx(beta[0]).epsilon(1e-12));
    CHECK(inst.beta[1][g] == doctest::Approx(beta[1]).epsilon(1e-12));
    CHECK(inst.alpha[g] == doctest::Approx(alpha).epsilon(1e-12));
  }

  CHECK_THROWS_AS(tr.build_instance({{0, 1, 1, 0}}, active), ConfigError);
  CHECK_THROWS_AS(tr.build_instance(cbr, {1, 1, 1}), ConfigError);
  CHECK_THROWS_AS(tr.build_instance({{0, 1}, {1, 1, 0, 0}}, active),
                  ConfigError);
}

TEST_CASE("prediction sampling follows the solved distribution") {
  MinmaxSolution sol;
  sol.support = {3, 9};
  sol.probs = {0.0, 1.0};
  Rng rng(2024);
  for (int k = 0; k < 100; ++k) CHECK(sample_prediction(sol, rng) == 9);

  sol.probs = {1.0, 0.0};
  for (int k = 0; k < 100; ++k) CHECK(sample_prediction(sol, rng) == 3);

  sol.support = {0, 1};
  sol.probs = {0.5, 0.5};
  int lo = 0;
  for (int k = 0; k < 10000; ++k)
    if (sample_prediction(sol, rng) == 0) ++lo;
  CHECK(lo > 4500);
  CHECK(lo < 5500);

  MinmaxSolution empty;
  CHECK_THROWS_AS(sample_prediction(empty, rng), InvariantViolation);
}

TEST_CASE("conditional bias replays the transcript exactly") {
  Transcript tr;
  tr.dim = 2;
  tr.horizon = 4;
  tr.append(round_rec(1, 0, {0.5, 0.25}, {0.25, 0.25}));
  tr.append(round_rec(2, 0, {0.0, 1.0}, {0.5, 0.5}));
  tr.append(round_rec(3, 1, {1.0, 1.0}, {0.5, 0.25}));
  tr.append(round_rec(4, 1, {0.25, 0.75}, {0.75, 0.25}));

  std::vector<std::vector<SubsequenceDef>> subseqs = {
      {interval(1, 2), periodic(2, 0)}};
  std::vector<EventKey> events = enumerate_events({2}, {2});
  BiasReport rep = conditional_bias(tr, events, subseqs);

  REQUIRE(rep.counts.size() == 4);
  CHECK(rep.counts[0] == 2);
  CHECK(rep.counts[1] == 1);
  CHECK(rep.counts[2] == 0);
  CHECK(rep.counts[3] == 1);

  CHECK(rep.bias[0] == 0.25);   // (0,0,interval): |0.25 - 0.5|
  CHECK(rep.bias[1] == 0.5);    // coord 1 on the same rounds
  CHECK(rep.bias[2] == 0.5);    // (0,0,even): round 2 only
  CHECK(rep.bias[3] == 0.5);
  CHECK(rep.bias[4] == 0.0);    // (0,1,interval) never fires
  CHECK(rep.bias[5] == 0.0);
  CHECK(rep.bias[6] == 0.5);    // (0,1,even): round 4
  CHECK(rep.bias[7] == 0.5);

  std::vector<EventKey> plain = enumerate_events({2}, {0});
  BiasReport rp = conditional_bias(tr, plain, {{}});
  CHECK(rp.counts[0] == 2);
  CHECK(rp.counts[1] == 2);
  CHECK(rp.bias[0] == 0.25);    // rounds 1 and 2 cancel to -0.25
  CHECK(rp.bias[2] == 0.0);     // rounds 3 and 4 cancel in coord 0
  CHECK(rp.bias[3] == 1.25);
}

TEST_CASE("minmax solutions certify their gap on hand instances") {
  MinmaxInstance inst;
  inst.dim = 1;
  inst.points = 3;
  inst.alpha = {0.2, 0.05, -0.1};
  inst.beta = {{-0.8, -0.2, 0.4}};
  MinmaxSolution sol = solve_minmax(inst, 1e-3);
  CHECK(sol.gap <= 1e-3 + 1e-12);
  CHECK(sol.upper >= sol.lower - 1e-12);
  double mass = 0.0;
  for (double p : sol.probs) mass += p;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.upper <= mesh_min(inst, 200) + 1e-9);

  double direct = game_objective_sparse(inst, sol.support, sol.probs);
  CHECK(direct == doctest::Approx(sol.upper).epsilon(1e-9));
  CHECK(certificate_lower(inst, sol.mu) == doctest::Approx(sol.lower).epsilon(1e-9));
}
