#include "ocsim/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "ocsim/errors.hpp"
#include "ocsim/kernels.hpp"

namespace ocsim {

PredictionGrid PredictionGrid::uniform(int per_axis, int dim) {
  if (per_axis < 2) throw ConfigError("prediction grid needs >= 2 points per axis");
  if (dim < 1) throw ConfigError("prediction grid needs dim >= 1");
  double cells = std::pow(static_cast<double>(per_axis), dim);
  if (cells > 1e7) throw ConfigError("prediction grid too large");
  PredictionGrid g;
  g.dim = dim;
  g.per_axis = per_axis;
  int total = 1;
  for (int i = 0; i < dim; ++i) total *= per_axis;
  g.points.reserve(total);
  g.coords.assign(dim, std::vector<double>(total));
  for (int idx = 0; idx < total; ++idx) {
    Vec p(dim);
    int rem = idx;
    for (int i = dim - 1; i >= 0; --i) {
      int digit = rem % per_axis;
      rem /= per_axis;
      p[i] = static_cast<double>(digit) / (per_axis - 1);
    }
    for (int i = 0; i < dim; ++i) g.coords[i][idx] = p[i];
    g.points.push_back(std::move(p));
  }
  return g;
}

PredictionGrid PredictionGrid::explicit_points(std::vector<Vec> pts, int dim) {
  if (dim < 1) throw ConfigError("prediction grid needs dim >= 1");
  if (pts.empty()) throw ConfigError("prediction grid needs at least one point");
  PredictionGrid g;
  g.dim = dim;
  g.per_axis = 0;
  g.coords.assign(dim, std::vector<double>(pts.size()));
  for (size_t idx = 0; idx < pts.size(); ++idx) {
    if (static_cast<int>(pts[idx].size()) != dim)
      throw ConfigError("prediction grid point has wrong dimension");
    for (int i = 0; i < dim; ++i) {
      double v = pts[idx][i];
      if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError("prediction grid point outside [0,1]");
      g.coords[i][idx] = v;
    }
  }
  g.points = std::move(pts);
  return g;
}

int PredictionGrid::nearest(const Vec& y) const {
  if (static_cast<int>(y.size()) != dim)
    throw ConfigError("nearest: query has wrong dimension");
  if (per_axis > 0) {
    int idx = 0;
    for (int i = 0; i < dim; ++i) {
      // Midpoints round down so ties pick the lower index.
      double scaled = y[i] * (per_axis - 1);
      int k = static_cast<int>(std::ceil(scaled - 0.5));
      k = std::clamp(k, 0, per_axis - 1);
      idx = idx * per_axis + k;
    }
    return idx;
  }
  int best = 0;
  double best_d2 = 0.0;
  for (int idx = 0; idx < size(); ++idx) {
    double d2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      double diff = points[idx][i] - y[i];
      d2 += diff * diff;
    }
    if (idx == 0 || d2 < best_d2) {
      best = idx;
      best_d2 = d2;
    }
  }
  return best;
}

std::vector<EventKey> enumerate_events(
    const std::vector<int>& actions_per_agent,
    const std::vector<int>& subseqs_per_agent) {
  if (actions_per_agent.empty())
    throw ConfigError("event enumeration needs at least one agent");
  if (actions_per_agent.size() != subseqs_per_agent.size())
    throw ConfigError("event enumeration: mismatched agent lists");
  std::vector<EventKey> out;
  for (size_t n = 0; n < actions_per_agent.size(); ++n) {
    int A = actions_per_agent[n];
    int S = subseqs_per_agent[n];
    if (A < 1 || S < 0) throw ConfigError("event enumeration: bad counts");
    for (int a = 0; a < A; ++a) {
      if (S == 0) {
        out.push_back({static_cast<int>(n), a, -1});
      } else {
        for (int s = 0; s < S; ++s)
          out.push_back({static_cast<int>(n), a, s});
      }
    }
  }
  return out;
}

ExpertTracker::ExpertTracker(PredictionGrid g,
                             const std::vector<int>& actions_per_agent,
                             const std::vector<int>& subseqs_per_agent,
                             long long T)
    : grid(std::move(g)),
      events(enumerate_events(actions_per_agent, subseqs_per_agent)),
      dim(grid.dim),
      horizon(T) {
  if (T < 1) throw ConfigError("expert tracker needs horizon >= 1");
  int offset = 0;
  for (size_t n = 0; n < actions_per_agent.size(); ++n) {
    AgentSlice s;
    s.offset = offset;
    s.actions = actions_per_agent[n];
    s.subseqs = subseqs_per_agent[n];
    offset += s.actions * s.stride();
    slices.push_back(s);
  }
  int E = event_count();
  eta = std::sqrt(8.0 * std::log(2.0 * dim * E) / static_cast<double>(T));
  gain_plus.assign(static_cast<size_t>(dim) * E, 0.0);
  gain_minus.assign(static_cast<size_t>(dim) * E, 0.0);
}

std::vector<double> ExpertTracker::weights() const {
  size_t n = gain_plus.size();
  double half = eta / 2.0;
  double hi = gain_plus[0] * half;
  for (size_t k = 0; k < n; ++k) {
    hi = std::max(hi, gain_plus[k] * half);
    hi = std::max(hi, gain_minus[k] * half);
  }
  std::vector<double> qp(n), qm(n);
  double z = 0.0;
  for (size_t k = 0; k < n; ++k) {
    qp[k] = std::exp(gain_plus[k] * half - hi);
    qm[k] = std::exp(gain_minus[k] * half - hi);
    z += qp[k] + qm[k];
  }
  std::vector<double> diff(n);
  for (size_t k = 0; k < n; ++k) diff[k] = (qp[k] - qm[k]) / z;
  return diff;
}

MinmaxInstance ExpertTracker::build_instance(
    const std::vector<std::vector<int>>& cbr,
    const std::vector<uint8_t>& active) const {
  int E = event_count();
  int G = grid.size();
  if (cbr.size() != slices.size())
    throw ConfigError("build_instance: wrong number of response tables");
  if (static_cast<int>(active.size()) != E)
    throw ConfigError("build_instance: wrong activity vector");
  std::vector<double> D = weights();
  MinmaxInstance inst;
  inst.dim = dim;
  inst.points = G;
  inst.alpha.assign(G, 0.0);
  inst.beta.assign(dim, std::vector<double>(G, 0.0));
  for (size_t n = 0; n < slices.size(); ++n) {
    const AgentSlice& sl = slices[n];
    if (static_cast<int>(cbr[n].size()) != G)
      throw ConfigError("build_instance: response table has wrong size");
    for (int g = 0; g < G; ++g) {
      int a = cbr[n][g];
      if (a < 0) continue;  // truncated agent plays nothing
      int base = sl.offset + a * sl.stride();
      for (int s = 0; s < sl.stride(); ++s) {
        int e = base + s;
        if (!active[e]) continue;
        for (int i = 0; i < dim; ++i)
          inst.beta[i][g] += D[static_cast<size_t>(i) * E + e];
      }
    }
  }
  const kern::Ops& ops = kern::active_ops();
  for (int i = 0; i < dim; ++i)
    ops.mul_add(inst.beta[i].data(), grid.coords[i].data(), inst.alpha.data(),
                G);
  return inst;
}

void ExpertTracker::record_outcome(const Vec& p, const Vec& y,
                                   const std::vector<int>& fired) {
  int E = event_count();
  for (int e : fired) {
    if (e < 0 || e >= E) throw InvariantViolation("fired event out of range");
    for (int i = 0; i < dim; ++i) {
      double delta = p[i] - y[i];
      gain_plus[static_cast<size_t>(i) * E + e] += delta;
      gain_minus[static_cast<size_t>(i) * E + e] -= delta;
    }
  }
}

int sample_prediction(const MinmaxSolution& sol, Rng& rng) {
  if (sol.support.empty()) throw InvariantViolation("empty prediction support");
  double u = rng.uniform();
  double acc = 0.0;
  for (size_t k = 0; k < sol.support.size(); ++k) {
    acc += sol.probs[k];
    if (u < acc) return sol.support[k];
  }
  return sol.support.back();
}

BiasReport conditional_bias(
    const Transcript& tr, const std::vector<EventKey>& events,
    const std::vector<std::vector<SubsequenceDef>>& subseqs_per_agent) {
  BiasReport rep;
  rep.dim = tr.dim;
  int E = static_cast<int>(events.size());
  rep.counts.assign(E, 0);
  rep.bias.assign(static_cast<size_t>(E) * tr.dim, 0.0);
  for (const RoundRecord& rec : tr.rounds) {
    for (int e = 0; e < E; ++e) {
      const EventKey& ev = events[e];
      if (rec.actions[ev.agent] != ev.action) continue;
      if (ev.subseq >= 0) {
        const SubsequenceDef& s = subseqs_per_agent[ev.agent][ev.subseq];
        if (!s.active(rec.t, rec.x)) continue;
      }
      rep.counts[e] += 1;
      for (int i = 0; i < tr.dim; ++i)
        rep.bias[static_cast<size_t>(e) * tr.dim + i] += rec.p[i] - rec.y[i];
    }
  }
  for (double& b : rep.bias) b = std::fabs(b);
  return rep;
}

}  // namespace ocsim
