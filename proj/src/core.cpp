#include "ocsim/core.hpp"

#include <algorithm>
#include <cmath>

#include "ocsim/kernels.hpp"

namespace ocsim {

Outcome::Outcome(Vec c) : coords(std::move(c)) {
  for (double v : coords) {
    if (!(v >= 0.0 && v <= 1.0))
      throw ConfigError("outcome coordinate " + std::to_string(v) +
                        " outside [0,1]");
  }
}

double eval_utility(const LinearUtility& u, int a, const Vec& y) {
  if (a < 0 || a >= u.actions)
    throw ConfigError("action index " + std::to_string(a) + " out of range");
  if (static_cast<int>(y.size()) != u.dim)
    throw ConfigError("utility dimension mismatch: got " +
                      std::to_string(y.size()) + ", expected " +
                      std::to_string(u.dim));
  return kern::active_ops().dot(u.w(a), y.data(), u.dim) + u.offsets[a];
}

double lipschitz_constant(const LinearUtility& u) {
  double best = 0.0;
  for (int a = 0; a < u.actions; ++a) {
    double l1 = 0.0;
    for (int i = 0; i < u.dim; ++i) l1 += std::abs(u.w(a)[i]);
    best = std::max(best, l1);
  }
  return best;
}

std::vector<RangeDiagnostic> validate_utility_range(const LinearUtility& u) {
  if (u.dim > 20)
    throw ConfigError("utility range validation refuses d > 20 (2^d vertices)");
  std::vector<RangeDiagnostic> out;
  for (int a = 0; a < u.actions; ++a) {
    for (uint32_t bits = 0; bits < (1u << u.dim); ++bits) {
      double v = u.offsets[a];
      for (int i = 0; i < u.dim; ++i)
        if (bits & (1u << i)) v += u.w(a)[i];
      if (!(v >= 0.0 && v <= 1.0)) {
        RangeDiagnostic d;
        d.action = a;
        d.vertex.resize(u.dim);
        for (int i = 0; i < u.dim; ++i) d.vertex[i] = (bits >> i) & 1;
        d.value = v;
        out.push_back(std::move(d));
      }
    }
  }
  return out;
}

double ConstraintFamily::eval(int j, int a, const Vec& y) const {
  const ConstraintDef& c = defs.at(j);
  double v = 0.0;
  switch (c.kind) {
    case ConstraintDef::Kind::linear: {
      v = c.h[a];
      const double* row = c.g.data() + static_cast<size_t>(a) * dim;
      for (int i = 0; i < dim; ++i) v += row[i] * y[i];
      break;
    }
    case ConstraintDef::Kind::threshold: {
      double delta = y[c.coord] - c.theta[a];
      v = c.scale * (delta > 0.0 ? 1.0 : (delta < 0.0 ? -1.0 : 0.0));
      break;
    }
    case ConstraintDef::Kind::tabular: {
      size_t cell = 0;
      for (int i = 0; i < dim; ++i) {
        int idx = static_cast<int>(y[i] * c.cells);
        if (idx == c.cells) idx = c.cells - 1;  // y[i] == 1 lands in last box
        cell = cell * c.cells + idx;
      }
      size_t per_action = c.values.size() / actions;
      v = c.values[static_cast<size_t>(a) * per_action + cell];
      break;
    }
  }
  if (std::isnan(v) || v < -1.0 || v > 1.0)
    throw ProtocolError("constraint " + std::to_string(j) + " evaluated to " +
                        std::to_string(v) + " outside [-1,1]");
  return v;
}

void Transcript::append(RoundRecord r) {
  if (!rounds.empty() && r.t != rounds.back().t + 1)
    throw InvariantViolation("transcript rounds must be strictly increasing");
  if (r.p_index >= 0) {
    bool member = std::find(r.psi_support.begin(), r.psi_support.end(),
                            r.p_index) != r.psi_support.end();
    if (!member)
      throw InvariantViolation(
          "sampled prediction is not in the recorded distribution support");
  }
  rounds.push_back(std::move(r));
}

}  // namespace ocsim
