#include "ocsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ocsim/rng.hpp"

namespace ocsim {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string hex64(uint64_t v) {
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[v & 0xf];
    v >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

}  // namespace

IniDoc IniDoc::parse(const std::string& text) {
  IniDoc doc;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      doc.sections[section];
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside a section");
    if (doc.sections[section].count(key))
      throw ConfigError("duplicate key " + section + "." + key);
    doc.sections[section][key] = value;
  }
  return doc;
}

std::string IniDoc::canonical() const {
  std::string out;
  for (const auto& [sec, kv] : sections) {
    out += "[" + sec + "]\n";
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  }
  return out;
}

bool IniDoc::has(const std::string& sec, const std::string& key) const {
  auto it = sections.find(sec);
  return it != sections.end() && it->second.count(key) > 0;
}

const std::string& IniDoc::get(const std::string& sec,
                               const std::string& key) const {
  auto it = sections.find(sec);
  if (it == sections.end())
    throw ConfigError("missing section [" + sec + "]");
  auto kt = it->second.find(key);
  if (kt == it->second.end())
    throw ConfigError("missing key " + sec + "." + key);
  return kt->second;
}

std::string IniDoc::get_or(const std::string& sec, const std::string& key,
                           const std::string& fallback) const {
  return has(sec, key) ? get(sec, key) : fallback;
}

long long parse_int(const std::string& v, const std::string& where) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& v, const std::string& where) {
  try {
    size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size() || std::isnan(out))
      throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(where + ": expected a boolean, got '" + v + "'");
}

std::vector<double> parse_vector(const std::string& v,
                                 const std::string& where) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok, where));
  if (out.empty()) throw ConfigError(where + ": expected at least one number");
  return out;
}

std::vector<std::vector<double>> parse_matrix(const std::string& v,
                                              const std::string& where) {
  std::vector<std::vector<double>> rows;
  std::string row;
  std::istringstream in(v);
  while (std::getline(in, row, ';')) {
    std::string t = trim(row);
    if (t.empty()) throw ConfigError(where + ": empty row");
    rows.push_back(parse_vector(t, where));
  }
  if (rows.empty()) throw ConfigError(where + ": expected at least one row");
  return rows;
}

std::vector<uint64_t> parse_seed_list(const std::string& v) {
  std::vector<uint64_t> out;
  size_t colon = v.find(':');
  if (colon != std::string::npos && v.find(' ') == std::string::npos) {
    long long a = parse_int(trim(v.substr(0, colon)), "seeds");
    long long b = parse_int(trim(v.substr(colon + 1)), "seeds");
    if (a < 0 || b < a) throw ConfigError("seeds: bad range '" + v + "'");
    if (b - a >= 100000) throw ConfigError("seeds: range too large");
    for (long long s = a; s <= b; ++s) out.push_back(static_cast<uint64_t>(s));
    return out;
  }
  std::istringstream in(v);
  std::string tok;
  while (in >> tok)
    out.push_back(static_cast<uint64_t>(parse_int(tok, "seeds")));
  if (out.empty()) throw ConfigError("seeds: empty list");
  return out;
}

const char* source_name(PredictionSource s) {
  switch (s) {
    case PredictionSource::forecaster: return "forecaster";
    case PredictionSource::uniform: return "uniform";
    case PredictionSource::flip: return "flip";
  }
  return "?";
}

namespace {

OutcomeDist parse_dist(const IniDoc& doc, const std::string& sec,
                       const std::string& prefix, int dim) {
  std::string where = sec + "." + prefix;
  auto pts = parse_matrix(doc.get(sec, prefix + "support"), where + "support");
  auto probs = parse_vector(doc.get(sec, prefix + "probs"), where + "probs");
  if (pts.size() != probs.size())
    throw ConfigError(where + ": support and probs differ in length");
  OutcomeDist d;
  double total = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (static_cast<int>(pts[i].size()) != dim)
      throw ConfigError(where + "support: point has wrong dimension");
    if (!(probs[i] >= 0.0))
      throw ConfigError(where + "probs: negative probability");
    total += probs[i];
    d.support.emplace_back(Vec(pts[i]));
    d.probs.push_back(probs[i]);
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw ConfigError(where + "probs: must sum to 1");
  for (double& p : d.probs) p /= total;
  return d;
}

AdversaryDef parse_adversary(const IniDoc& doc, int dim) {
  const std::string sec = "adversary";
  if (doc.has(sec, "preset"))
    return make_adversary_preset(doc.get(sec, "preset"), dim);
  std::string kind = doc.get(sec, "kind");
  AdversaryDef def;
  if (kind == "iid") {
    def.kind = AdversaryDef::Kind::iid;
    def.dist = parse_dist(doc, sec, "", dim);
  } else if (kind == "scripted") {
    def.kind = AdversaryDef::Kind::scripted;
    def.cycle = parse_bool(doc.get_or(sec, "cycle", "false"), sec + ".cycle");
    for (int i = 0;; ++i) {
      std::string prefix = "table." + std::to_string(i) + ".";
      if (!doc.has(sec, prefix + "support")) break;
      def.table.push_back(parse_dist(doc, sec, prefix, dim));
      std::string ckey = "context." + std::to_string(i);
      if (doc.has(sec, ckey)) {
        Vec x = parse_vector(doc.get(sec, ckey), sec + "." + ckey);
        def.contexts.resize(def.table.size());
        def.contexts.back() = std::move(x);
      }
    }
    if (def.table.empty())
      throw ConfigError("adversary: scripted kind needs table.0.support");
  } else if (kind == "adaptive-flipper") {
    def.kind = AdversaryDef::Kind::adaptive_flipper;
    def.alt0 = parse_dist(doc, sec, "alt0.", dim);
    def.alt1 = parse_dist(doc, sec, "alt1.", dim);
  } else {
    throw ConfigError("adversary.kind: unknown kind '" + kind + "'");
  }
  return def;
}

ConstraintDef parse_constraint(const IniDoc& doc, const std::string& sec,
                               const std::string& prefix, int actions,
                               int dim) {
  std::string where = sec + "." + prefix;
  std::string kind = doc.get(sec, prefix + "kind");
  ConstraintDef def;
  if (kind == "linear") {
    def.kind = ConstraintDef::Kind::linear;
    auto rows = parse_matrix(doc.get(sec, prefix + "g"), where + "g");
    auto h = parse_vector(doc.get(sec, prefix + "h"), where + "h");
    if (static_cast<int>(rows.size()) != actions)
      throw ConfigError(where + "g: need one row per action");
    if (static_cast<int>(h.size()) != actions)
      throw ConfigError(where + "h: need one value per action");
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != dim)
        throw ConfigError(where + "g: row has wrong dimension");
      def.g.insert(def.g.end(), r.begin(), r.end());
    }
    def.h = h;
    for (int a = 0; a < actions; ++a) {
      double lo = def.h[a], hi = def.h[a];
      for (int i = 0; i < dim; ++i) {
        double w = def.g[static_cast<size_t>(a) * dim + i];
        if (w > 0) hi += w; else lo += w;
      }
      if (lo < -1.0 || hi > 1.0)
        throw ConfigError(where + ": values leave [-1,1] on action " +
                          std::to_string(a));
    }
  } else if (kind == "threshold") {
    def.kind = ConstraintDef::Kind::threshold;
    def.coord = static_cast<int>(
        parse_int(doc.get_or(sec, prefix + "coord", "0"), where + "coord"));
    if (def.coord < 0 || def.coord >= dim)
      throw ConfigError(where + "coord: out of range");
    def.theta = parse_vector(doc.get(sec, prefix + "theta"), where + "theta");
    if (static_cast<int>(def.theta.size()) != actions)
      throw ConfigError(where + "theta: need one value per action");
    def.scale =
        parse_double(doc.get_or(sec, prefix + "scale", "1"), where + "scale");
    if (!(std::fabs(def.scale) <= 1.0))
      throw ConfigError(where + "scale: must lie in [-1,1]");
  } else if (kind == "tabular") {
    def.kind = ConstraintDef::Kind::tabular;
    def.cells = static_cast<int>(
        parse_int(doc.get(sec, prefix + "cells"), where + "cells"));
    if (def.cells < 1 || std::pow(def.cells, dim) > 1e6)
      throw ConfigError(where + "cells: out of range");
    auto rows = parse_matrix(doc.get(sec, prefix + "values"), where + "values");
    if (static_cast<int>(rows.size()) != actions)
      throw ConfigError(where + "values: need one row per action");
    size_t per = 1;
    for (int i = 0; i < dim; ++i) per *= def.cells;
    for (const auto& r : rows) {
      if (r.size() != per)
        throw ConfigError(where + "values: row needs cells^dim entries");
      for (double v : r)
        if (!(v >= -1.0 && v <= 1.0))
          throw ConfigError(where + "values: entry outside [-1,1]");
      def.values.insert(def.values.end(), r.begin(), r.end());
    }
  } else {
    throw ConfigError(where + "kind: unknown kind '" + kind + "'");
  }
  return def;
}

SubsequenceDef parse_subseq(const IniDoc& doc, const std::string& sec,
                            const std::string& prefix, int horizon) {
  std::string where = sec + "." + prefix;
  std::string kind = doc.get(sec, prefix + "kind");
  SubsequenceDef def;
  if (kind == "interval") {
    def.kind = SubsequenceDef::Kind::interval;
    def.start = static_cast<int>(
        parse_int(doc.get_or(sec, prefix + "start", "1"), where + "start"));
    def.stop = static_cast<int>(parse_int(
        doc.get_or(sec, prefix + "stop", std::to_string(horizon)),
        where + "stop"));
    if (def.start < 1 || def.stop < def.start)
      throw ConfigError(where + ": need 1 <= start <= stop");
  } else if (kind == "periodic") {
    def.kind = SubsequenceDef::Kind::periodic;
    def.period = static_cast<int>(
        parse_int(doc.get(sec, prefix + "period"), where + "period"));
    def.phase = static_cast<int>(
        parse_int(doc.get_or(sec, prefix + "phase", "0"), where + "phase"));
    if (def.period < 1 || def.phase < 0 || def.phase >= def.period)
      throw ConfigError(where + ": need period >= 1 and 0 <= phase < period");
  } else if (kind == "feature-threshold") {
    def.kind = SubsequenceDef::Kind::feature_threshold;
    def.feature = static_cast<int>(
        parse_int(doc.get_or(sec, prefix + "feature", "0"), where + "feature"));
    // Context vectors default to (progress, noise); scripted adversaries may
    // supply longer ones. Bounds are enforced against the actual context at
    // run time.
    if (def.feature < 0)
      throw ConfigError(where + "feature: must be >= 0");
    def.threshold = parse_double(doc.get_or(sec, prefix + "threshold", "0.5"),
                                 where + "threshold");
  } else if (kind == "scripted") {
    def.kind = SubsequenceDef::Kind::scripted;
    auto rounds = parse_vector(doc.get(sec, prefix + "rounds"), where + "rounds");
    for (double r : rounds) {
      int t = static_cast<int>(r);
      if (r != t || t < 1)
        throw ConfigError(where + "rounds: entries must be positive integers");
      if (!def.rounds.empty() && t <= def.rounds.back())
        throw ConfigError(where + "rounds: must be strictly increasing");
      def.rounds.push_back(t);
    }
  } else {
    throw ConfigError(where + "kind: unknown kind '" + kind + "'");
  }
  return def;
}

AgentConfig parse_agent(const IniDoc& doc, const std::string& sec, int index,
                        int dim, int horizon) {
  AgentConfig out;
  AgentSpec& spec = out.spec;
  spec.id = doc.get_or(sec, "id", "agent-" + std::to_string(index));
  std::string mode = doc.get_or(sec, "mode", "realization");
  if (mode == "realization")
    spec.mode = AgentMode::realization;
  else if (mode == "expectation")
    spec.mode = AgentMode::expectation;
  else
    throw ConfigError(sec + ".mode: unknown mode '" + mode + "'");

  int actions = static_cast<int>(parse_int(doc.get(sec, "actions"), sec + ".actions"));
  if (actions < 1 || actions > 64)
    throw ConfigError(sec + ".actions: must lie in [1, 64]");

  spec.utility.actions = actions;
  spec.utility.dim = dim;
  auto wrows = parse_matrix(doc.get(sec, "utility.weights"), sec + ".utility.weights");
  auto offs = parse_vector(doc.get(sec, "utility.offsets"), sec + ".utility.offsets");
  if (static_cast<int>(wrows.size()) != actions)
    throw ConfigError(sec + ".utility.weights: need one row per action");
  if (static_cast<int>(offs.size()) != actions)
    throw ConfigError(sec + ".utility.offsets: need one value per action");
  for (const auto& r : wrows) {
    if (static_cast<int>(r.size()) != dim)
      throw ConfigError(sec + ".utility.weights: row has wrong dimension");
    spec.utility.weights.insert(spec.utility.weights.end(), r.begin(), r.end());
  }
  spec.utility.offsets = offs;
  auto bad = validate_utility_range(spec.utility);
  if (!bad.empty())
    throw ConfigError(sec + ".utility: leaves [0,1] on action " +
                      std::to_string(bad.front().action));

  spec.constraints.actions = actions;
  spec.constraints.dim = dim;
  for (int k = 0;; ++k) {
    std::string prefix = "constraint." + std::to_string(k) + ".";
    if (!doc.has(sec, prefix + "kind")) break;
    spec.constraints.defs.push_back(
        parse_constraint(doc, sec, prefix, actions, dim));
  }
  if (spec.constraints.defs.empty())
    throw ConfigError(sec + ": need at least constraint.0");

  for (int k = 0;; ++k) {
    std::string prefix = "subseq." + std::to_string(k) + ".";
    if (!doc.has(sec, prefix + "kind")) break;
    out.subseqs.push_back(parse_subseq(doc, sec, prefix, horizon));
  }

  if (doc.has(sec, "tau"))
    spec.tau_override = parse_double(doc.get(sec, "tau"), sec + ".tau");
  if (doc.has(sec, "tau_subseq")) {
    auto v = parse_vector(doc.get(sec, "tau_subseq"), sec + ".tau_subseq");
    if (v.size() != out.subseqs.size())
      throw ConfigError(sec + ".tau_subseq: need one value per subsequence");
    spec.tau_per_subsequence_override = v;
  }

  if (!out.subseqs.empty()) {
    // Static coverage check over the context-free kinds; families that rely
    // on feature gates are checked per round at run time instead.
    bool has_feature = false;
    for (const auto& s : out.subseqs)
      if (s.kind == SubsequenceDef::Kind::feature_threshold) has_feature = true;
    if (!has_feature) {
      Vec dummy(dim, 0.0);
      for (int t = 1; t <= horizon; ++t) {
        bool covered = false;
        for (const auto& s : out.subseqs)
          if (s.active(t, dummy)) { covered = true; break; }
        if (!covered)
          throw ConfigError(sec + ": subsequences leave round " +
                            std::to_string(t) + " uncovered");
      }
    }
    if (spec.mode == AgentMode::expectation &&
        !spec.tau_per_subsequence_override) {
      for (const auto& s : out.subseqs)
        if (!s.cardinality(horizon))
          throw ConfigError(sec + ": context-gated subsequences need tau_subseq");
    }
  }
  return out;
}

}  // namespace

RunConfig build_run_config(const IniDoc& doc) {
  RunConfig cfg;
  cfg.horizon = static_cast<int>(parse_int(doc.get("run", "horizon"), "run.horizon"));
  if (cfg.horizon < 1 || cfg.horizon > 10000000)
    throw ConfigError("run.horizon: must lie in [1, 1e7]");
  cfg.dim = static_cast<int>(parse_int(doc.get_or("run", "dim", "1"), "run.dim"));
  if (cfg.dim < 1 || cfg.dim > 20)
    throw ConfigError("run.dim: must lie in [1, 20]");
  cfg.seed = static_cast<uint64_t>(parse_int(doc.get_or("run", "seed", "1"), "run.seed"));
  cfg.delta = parse_double(doc.get_or("run", "delta", "0.05"), "run.delta");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw ConfigError("run.delta: must lie in (0, 1)");
  cfg.eps = parse_double(doc.get_or("run", "eps", "0.001"), "run.eps");
  if (!(cfg.eps > 0.0))
    throw ConfigError("run.eps: must be positive");
  std::string src = doc.get_or("run", "prediction", "forecaster");
  if (src == "forecaster")
    cfg.source = PredictionSource::forecaster;
  else if (src == "uniform")
    cfg.source = PredictionSource::uniform;
  else if (src == "flip")
    cfg.source = PredictionSource::flip;
  else
    throw ConfigError("run.prediction: unknown source '" + src + "'");
  cfg.grid_per_axis = static_cast<int>(
      parse_int(doc.get_or("run", "grid", "9"), "run.grid"));
  if (cfg.grid_per_axis < 2)
    throw ConfigError("run.grid: must be >= 2");

  cfg.adversary = parse_adversary(doc, cfg.dim);
  if (cfg.adversary.kind == AdversaryDef::Kind::scripted &&
      !cfg.adversary.cycle &&
      static_cast<int>(cfg.adversary.table.size()) < cfg.horizon)
    throw ConfigError("adversary: scripted table shorter than the horizon");

  for (int n = 0;; ++n) {
    std::string sec = "agent." + std::to_string(n);
    if (!doc.sections.count(sec)) break;
    cfg.agents.push_back(parse_agent(doc, sec, n, cfg.dim, cfg.horizon));
  }
  if (cfg.agents.empty())
    throw ConfigError("need at least one [agent.0] section");

  if (doc.sections.count("sweep")) {
    cfg.sweep_seeds = parse_seed_list(doc.get("sweep", "seeds"));
    cfg.sweep_threads = static_cast<int>(
        parse_int(doc.get_or("sweep", "threads", "1"), "sweep.threads"));
    if (cfg.sweep_threads < 1 || cfg.sweep_threads > 256)
      throw ConfigError("sweep.threads: must lie in [1, 256]");
  }

  cfg.canonical = doc.canonical();
  cfg.digest = hex64(fnv1a64(cfg.canonical));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return build_run_config(IniDoc::parse(buf.str()));
}

}  // namespace ocsim
