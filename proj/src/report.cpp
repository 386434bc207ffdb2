#include "ocsim/report.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ocsim/errors.hpp"

namespace ocsim {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json body_json(const RunReport& rep) {
  ordered_json body;
  body["config_digest"] = rep.config_digest;
  body["seed"] = rep.seed;
  body["horizon"] = rep.horizon;
  body["dim"] = rep.dim;
  body["source"] = rep.source;
  body["kernel"] = rep.kernel;

  ordered_json agents = ordered_json::array();
  for (const AgentSummary& a : rep.agents) {
    ordered_json ja;
    ja["id"] = a.id;
    ja["mode"] = a.mode;
    ja["actions"] = a.actions;
    ja["final_candidates"] = a.final_candidates;
    ja["truncated_at"] = a.truncated_at;
    agents.push_back(std::move(ja));
  }
  body["agents"] = std::move(agents);

  ordered_json rows = ordered_json::array();
  for (const MetricRow& r : rep.rows) {
    ordered_json jr;
    jr["agent"] = r.agent;
    jr["subsequence"] = r.subsequence;
    jr["metric"] = r.metric;
    jr["variant"] = r.variant;
    jr["value"] = r.value;
    rows.push_back(std::move(jr));
  }
  body["metrics"] = std::move(rows);
  body["gaps"] = rep.gaps;

  if (rep.with_rounds && rep.transcript) {
    ordered_json rounds = ordered_json::array();
    for (const RoundRecord& rec : rep.transcript->rounds) {
      ordered_json jr;
      jr["t"] = rec.t;
      jr["x"] = rec.x;
      jr["psi_support"] = rec.psi_support;
      jr["psi_probs"] = rec.psi_probs;
      jr["p_index"] = rec.p_index;
      jr["p"] = rec.p;
      jr["y"] = rec.y;
      jr["actions"] = rec.actions;
      jr["responsible"] = rec.responsible;
      rounds.push_back(std::move(jr));
    }
    body["rounds"] = std::move(rounds);
  }
  return body;
}

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string report_body_json(const RunReport& rep) {
  return body_json(rep).dump(2);
}

std::string report_full_json(const RunReport& rep) {
  ordered_json full;
  full["header"] = {{"tool", "ocsim"}, {"format", 1}, {"created", timestamp_utc()}};
  full["body"] = body_json(rep);
  return full.dump(2);
}

std::string extract_body(const std::string& full_json) {
  ordered_json full = ordered_json::parse(full_json);
  if (!full.contains("body"))
    throw ProtocolError("report has no body object");
  return full["body"].dump(2);
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::string out = "agent,subsequence,metric,variant,value\n";
  char buf[64];
  for (const MetricRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.value);
    out += r.agent + "," + r.subsequence + "," + r.metric + "," + r.variant +
           "," + buf + "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  if (!out.good()) throw ConfigError("failed writing file: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace ocsim
