#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ocsim/config.hpp"
#include "ocsim/errors.hpp"
#include "ocsim/harness.hpp"
#include "ocsim/kernels.hpp"
#include "ocsim/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

ocsim::RunConfig load_config(const std::string& path) {
  ocsim::IniDoc doc = ocsim::IniDoc::parse(ocsim::read_text_file(path));
  return ocsim::build_run_config(doc);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int cmd_run(const std::string& config_path, int64_t seed_override,
            const std::string& out_dir, bool diagnostics) {
  ocsim::RunConfig cfg = load_config(config_path);
  if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
  ocsim::RunResult res = ocsim::run_simulation(cfg);
  ocsim::write_run_outputs(res, out_dir, diagnostics);
  std::printf("config %s seed %llu horizon %d kernel %s\n",
              cfg.digest.c_str(),
              static_cast<unsigned long long>(cfg.seed), cfg.horizon,
              res.report.kernel.c_str());
  for (const auto& ag : res.report.agents) {
    std::printf("agent %s mode=%s actions=%d", ag.id.c_str(),
                ag.mode.c_str(), ag.actions);
    if (ag.truncated_at >= 0)
      std::printf(" truncated@%d", ag.truncated_at);
    std::printf("\n");
  }
  std::printf("wrote %s/report.json and %s/metrics.csv\n", out_dir.c_str(),
              out_dir.c_str());
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& seeds_arg,
              int threads_arg, const std::string& out_dir, bool diagnostics) {
  ocsim::RunConfig cfg = load_config(config_path);
  std::vector<uint64_t> seeds = cfg.sweep_seeds;
  if (!seeds_arg.empty()) seeds = ocsim::parse_seed_list(seeds_arg);
  if (seeds.empty())
    throw ocsim::ConfigError(
        "sweep needs seeds from --seeds or a [sweep] section");
  int threads = threads_arg > 0 ? threads_arg : cfg.sweep_threads;
  ocsim::SweepOutcome outcome =
      ocsim::run_sweep(cfg, seeds, threads, out_dir, diagnostics);
  for (const std::string& note : outcome.notes)
    std::fprintf(stderr, "%s\n", note.c_str());
  std::printf("sweep: %d completed, %d failed, results in %s\n",
              outcome.completed, outcome.failed, out_dir.c_str());
  return outcome.failed == 0 ? kExitOk : kExitRuntime;
}

int cmd_verify(const std::string& config_path, bool full) {
  ocsim::RunConfig cfg = load_config(config_path);
  ocsim::VerifyOutcome v = ocsim::verify_run(cfg, full);
  for (const std::string& note : v.notes)
    std::printf("  %s\n", note.c_str());
  if (v.ok) {
    std::printf("verify: ok (%s)\n", full ? "full" : "fast");
    return kExitOk;
  }
  std::printf("verify: FAILED\n");
  return kExitCheckFailed;
}

void print_rows(const nlohmann::json& rep, bool all) {
  if (!rep.contains("metrics")) return;
  for (const auto& row : rep["metrics"]) {
    std::string metric = row.value("metric", "");
    std::string agent = row.value("agent", "");
    std::string sub = row.value("subsequence", "");
    std::string variant = row.value("variant", "");
    if (!all && (metric == "bias" || metric == "bias-count") &&
        variant != "max")
      continue;
    double value = row.value("value", 0.0);
    std::printf("  %-10s %-4s %-16s %-24s %.6g\n",
                agent.empty() ? "-" : agent.c_str(),
                sub.empty() ? "-" : sub.c_str(), metric.c_str(),
                variant.c_str(), value);
  }
}

int cmd_inspect(const std::string& path, bool all) {
  if (ends_with(path, ".ini")) {
    ocsim::RunConfig cfg = load_config(path);
    std::printf("config digest %s\n", cfg.digest.c_str());
    std::printf("horizon %d dim %d seed %llu source %s grid %d\n",
                cfg.horizon, cfg.dim,
                static_cast<unsigned long long>(cfg.seed),
                ocsim::source_name(cfg.source), cfg.grid_per_axis);
    for (const auto& ac : cfg.agents)
      std::printf("agent %s actions %d constraints %d subsequences %zu\n",
                  ac.spec.id.c_str(), ac.spec.utility.actions,
                  ac.spec.constraints.count(), ac.subseqs.size());
    return kExitOk;
  }
  std::string text = ocsim::read_text_file(path);
  nlohmann::json rep = nlohmann::json::parse(text);
  std::printf("report %s\n", path.c_str());
  std::printf("  tool %s format %d created %s\n",
              rep.value("tool", "?").c_str(), rep.value("format", 0),
              rep.value("created", "?").c_str());
  std::printf("  config %s seed %llu horizon %d dim %d source %s kernel %s\n",
              rep.value("config_digest", "?").c_str(),
              static_cast<unsigned long long>(
                  rep.value("seed", static_cast<uint64_t>(0))),
              rep.value("horizon", 0), rep.value("dim", 0),
              rep.value("source", "?").c_str(),
              rep.value("kernel", "?").c_str());
  if (rep.contains("agents"))
    for (const auto& ag : rep["agents"]) {
      std::printf("  agent %s mode=%s actions=%d",
                  ag.value("id", "?").c_str(), ag.value("mode", "?").c_str(),
                  ag.value("actions", 0));
      int tr = ag.value("truncated_at", -1);
      if (tr >= 0) std::printf(" truncated@%d", tr);
      std::printf("\n");
    }
  print_rows(rep, all);
  if (rep.contains("rounds"))
    std::printf("  rounds: %zu diagnostic records\n", rep["rounds"].size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained-agent simulation harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string seeds_arg;
  std::string inspect_path;
  int64_t seed_override = -1;
  int threads_arg = 0;
  bool diagnostics = false;
  bool full = false;
  bool all_rows = false;

  CLI::App* run = app.add_subcommand("run", "simulate one seed");
  run->add_option("--config", config_path, "INI config file")->required();
  run->add_option("--seed", seed_override, "override the config seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--diagnostics", diagnostics,
                "embed per-round records in report.json");

  CLI::App* sweep = app.add_subcommand("sweep", "simulate many seeds");
  sweep->add_option("--config", config_path, "INI config file")->required();
  sweep->add_option("--seeds", seeds_arg, "seed list or a:b range");
  sweep->add_option("--threads", threads_arg, "worker threads");
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_flag("--diagnostics", diagnostics,
                  "embed per-round records in each report.json");

  CLI::App* verify = app.add_subcommand("verify", "self-check a config");
  verify->add_option("--config", config_path, "INI config file")->required();
  verify->add_flag("--full", full, "verify at the configured horizon");

  CLI::App* inspect =
      app.add_subcommand("inspect", "summarize a report.json or config");
  inspect->add_option("path", inspect_path, "report.json or .ini file")
      ->required();
  inspect->add_flag("--all", all_rows, "print per-event bias rows too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed())
      return cmd_run(config_path, seed_override, out_dir, diagnostics);
    if (sweep->parsed())
      return cmd_sweep(config_path, seeds_arg, threads_arg, out_dir,
                       diagnostics);
    if (verify->parsed()) return cmd_verify(config_path, full);
    if (inspect->parsed()) return cmd_inspect(inspect_path, all_rows);
  } catch (const ocsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "malformed report: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitConfig;
}
