#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocsim/core.hpp"

namespace ocsim {

struct MetricRow {
  std::string agent;
  std::string subsequence;  // "" for whole-horizon metrics
  std::string metric;
  std::string variant;
  double value = 0.0;
};

struct AgentSummary {
  std::string id;
  std::string mode;  // "realization" or "expectation", "+subseq" suffix
  int actions = 0;
  std::vector<uint64_t> final_candidates;  // bitmasks; one, or per subsequence
  int truncated_at = -1;                   // first truncated round, -1 if none
};

// Everything a finished run reports. The body serializes deterministically:
// rerunning the same config and seed yields byte-identical body text. The
// header carries the timestamp and stays outside any comparison.
struct RunReport {
  std::string config_digest;
  uint64_t seed = 0;
  int horizon = 0;
  int dim = 0;
  std::string source;
  std::string kernel;
  std::vector<AgentSummary> agents;
  std::vector<MetricRow> rows;
  std::vector<double> gaps;  // per round; forecaster runs only
  bool with_rounds = false;
  const Transcript* transcript = nullptr;  // borrowed, only for diagnostics
};

std::string report_body_json(const RunReport& rep);
std::string report_full_json(const RunReport& rep);
std::string metrics_csv(const std::vector<MetricRow>& rows);

// Extracts the body object of a full report, byte-comparable across runs.
std::string extract_body(const std::string& full_json);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ocsim
