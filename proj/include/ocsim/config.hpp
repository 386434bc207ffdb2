#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ocsim/core.hpp"
#include "ocsim/env.hpp"

namespace ocsim {

// INI-style document: [section] headers, key = value lines, # or ; comments.
// Section and key order is irrelevant; the canonical form sorts both, so the
// digest identifies the configuration, not the file layout.
struct IniDoc {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static IniDoc parse(const std::string& text);
  std::string canonical() const;

  bool has(const std::string& sec, const std::string& key) const;
  const std::string& get(const std::string& sec, const std::string& key) const;
  std::string get_or(const std::string& sec, const std::string& key,
                     const std::string& fallback) const;
};

long long parse_int(const std::string& v, const std::string& where);
double parse_double(const std::string& v, const std::string& where);
bool parse_bool(const std::string& v, const std::string& where);
std::vector<double> parse_vector(const std::string& v,
                                 const std::string& where);
// Semicolon-separated rows of space-separated doubles.
std::vector<std::vector<double>> parse_matrix(const std::string& v,
                                              const std::string& where);
// "a:b" inclusive range or a space-separated list.
std::vector<uint64_t> parse_seed_list(const std::string& v);

enum class PredictionSource { forecaster, uniform, flip };

const char* source_name(PredictionSource s);

struct AgentConfig {
  AgentSpec spec;
  std::vector<SubsequenceDef> subseqs;
};

struct RunConfig {
  int horizon = 0;
  uint64_t seed = 1;
  int dim = 1;
  double delta = 0.05;
  double eps = 1e-3;
  PredictionSource source = PredictionSource::forecaster;
  int grid_per_axis = 9;
  AdversaryDef adversary;
  std::vector<AgentConfig> agents;

  std::vector<uint64_t> sweep_seeds;  // empty unless [sweep] present
  int sweep_threads = 1;

  std::string canonical;
  std::string digest;  // fnv1a64 of canonical, hex
};

RunConfig build_run_config(const IniDoc& doc);
RunConfig load_config(const std::string& path);

}  // namespace ocsim
