#include "ocsim/env.hpp"

#include <algorithm>
#include <cmath>

namespace ocsim {

bool SubsequenceDef::active(int t, const Vec& x) const {
  switch (kind) {
    case Kind::interval:
      return t >= start && t <= stop;
    case Kind::periodic:
      return t % period == phase;
    case Kind::feature_threshold:
      if (feature < 0 || feature >= static_cast<int>(x.size()))
        throw ConfigError("subsequence feature index out of range");
      return x[feature] >= threshold;
    case Kind::scripted:
      return std::binary_search(rounds.begin(), rounds.end(), t);
  }
  return false;
}

std::optional<long long> SubsequenceDef::cardinality(int horizon) const {
  switch (kind) {
    case Kind::interval: {
      long long lo = std::max(start, 1);
      long long hi = std::min(stop, horizon);
      return std::max(0LL, hi - lo + 1);
    }
    case Kind::periodic: {
      long long n = 0;
      for (int t = 1; t <= horizon; ++t)
        if (t % period == phase) ++n;
      return n;
    }
    case Kind::scripted: {
      long long n = 0;
      for (int t : rounds)
        if (t >= 1 && t <= horizon) ++n;
      return n;
    }
    case Kind::feature_threshold:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<int> active_subsequences(const std::vector<SubsequenceDef>& defs,
                                     int t, const Vec& x) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(defs.size()); ++i)
    if (defs[i].active(t, x)) out.push_back(i);
  if (out.empty())
    throw ProtocolError("no subsequence covers round " + std::to_string(t) +
                        "; the family must cover every round");
  return out;
}

Outcome OutcomeDist::sample(Rng& rng) const {
  double u = rng.uniform();
  double acc = 0.0;
  for (size_t i = 0; i < support.size(); ++i) {
    acc += probs[i];
    if (u < acc) return support[i];
  }
  return support.back();
}

Vec OutcomeDist::mean() const {
  Vec m(support.empty() ? 0 : support[0].dim(), 0.0);
  for (size_t i = 0; i < support.size(); ++i)
    for (int k = 0; k < support[i].dim(); ++k)
      m[k] += probs[i] * support[i].coords[k];
  return m;
}

Vec expected_constraint(const OutcomeDist& dist, const ConstraintFamily& c,
                        int a) {
  if (dist.support.empty())
    throw UnsupportedQuery("distribution handle has no recorded support");
  Vec out(c.count(), 0.0);
  for (int j = 0; j < c.count(); ++j) {
    double acc = 0.0;
    for (size_t i = 0; i < dist.support.size(); ++i)
      acc += dist.probs[i] * c.eval(j, a, dist.support[i].coords);
    out[j] = acc;
  }
  return out;
}

namespace {

void validate_dist(const OutcomeDist& d, const char* what) {
  if (d.support.empty())
    throw ConfigError(std::string(what) + ": empty outcome support");
  if (d.support.size() != d.probs.size())
    throw ConfigError(std::string(what) + ": support/probability size mismatch");
  double total = 0.0;
  for (double p : d.probs) {
    if (!(p >= 0.0)) throw ConfigError(std::string(what) + ": negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ConfigError(std::string(what) + ": probabilities sum to " +
                      std::to_string(total));
}

}  // namespace

Adversary::Adversary(AdversaryDef def, int horizon, uint64_t seed)
    : def_(std::move(def)),
      horizon_(horizon),
      rng_(Rng::stream(seed, "adversary")) {
  switch (def_.kind) {
    case AdversaryDef::Kind::iid:
      validate_dist(def_.dist, "iid adversary");
      break;
    case AdversaryDef::Kind::scripted: {
      if (def_.table.empty())
        throw ConfigError("scripted adversary has an empty table");
      if (!def_.cycle && static_cast<int>(def_.table.size()) < horizon)
        throw ConfigError("scripted adversary table shorter than the horizon");
      for (const auto& d : def_.table) validate_dist(d, "scripted adversary");
      break;
    }
    case AdversaryDef::Kind::adaptive_flipper:
      validate_dist(def_.alt0, "adaptive adversary");
      validate_dist(def_.alt1, "adaptive adversary");
      break;
  }
}

RoundEmission Adversary::next_round(const Transcript& prefix, int t) {
  RoundEmission em;
  em.x = {static_cast<double>(t) / horizon_, rng_.uniform()};

  switch (def_.kind) {
    case AdversaryDef::Kind::iid:
      em.dist = def_.dist;
      break;
    case AdversaryDef::Kind::scripted: {
      size_t row = static_cast<size_t>(t - 1);
      if (def_.cycle) row %= def_.table.size();
      em.dist = def_.table[row];
      if (row < def_.contexts.size() && !def_.contexts[row].empty())
        em.x = def_.contexts[row];
      break;
    }
    case AdversaryDef::Kind::adaptive_flipper: {
      bool high = false;
      if (!prefix.rounds.empty()) high = prefix.rounds.back().y[0] > 0.5;
      em.dist = high ? def_.alt1 : def_.alt0;
      break;
    }
  }
  return em;
}

std::optional<OutcomeDist> Adversary::dist_for_round(int t) const {
  switch (def_.kind) {
    case AdversaryDef::Kind::iid:
      return def_.dist;
    case AdversaryDef::Kind::scripted: {
      size_t row = static_cast<size_t>(t - 1);
      if (def_.cycle) row %= def_.table.size();
      return def_.table[row];
    }
    case AdversaryDef::Kind::adaptive_flipper:
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

Outcome lattice_point(int dim, double first, double second) {
  Vec c(dim, 0.5);
  if (dim >= 1) c[0] = first;
  if (dim >= 2) c[1] = second;
  return Outcome(std::move(c));
}

}  // namespace

AdversaryDef make_adversary_preset(const std::string& name, int dim) {
  AdversaryDef def;
  def.preset = name;
  if (name == "benign-iid") {
    def.kind = AdversaryDef::Kind::iid;
    def.dist.support = {
        lattice_point(dim, 0.25, 0.25), lattice_point(dim, 0.25, 0.75),
        lattice_point(dim, 0.75, 0.25), lattice_point(dim, 0.75, 0.75)};
    def.dist.probs = {0.25, 0.25, 0.25, 0.25};
  } else if (name == "masking") {
    def.kind = AdversaryDef::Kind::scripted;
    def.cycle = true;
    OutcomeDist quiet;  // odd rounds
    quiet.support = {lattice_point(dim, 0.25, 0.25), lattice_point(dim, 0.5, 0.5)};
    quiet.probs = {0.75, 0.25};
    OutcomeDist hot;  // even rounds
    hot.support = {lattice_point(dim, 0.75, 0.75), lattice_point(dim, 0.5, 0.5)};
    hot.probs = {0.75, 0.25};
    def.table = {quiet, hot};
  } else if (name == "constraint-flipper") {
    def.kind = AdversaryDef::Kind::adaptive_flipper;
    def.alt0.support = {lattice_point(dim, 0.75, 0.5), lattice_point(dim, 0.875, 0.25)};
    def.alt0.probs = {0.5, 0.5};
    def.alt1.support = {lattice_point(dim, 0.25, 0.5), lattice_point(dim, 0.125, 0.75)};
    def.alt1.probs = {0.5, 0.5};
  } else {
    throw ConfigError("unknown adversary preset: " + name);
  }
  return def;
}

}  // namespace ocsim
