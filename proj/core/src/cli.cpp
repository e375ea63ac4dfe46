#include "recsim/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <optional>

#include <nlohmann/json.hpp>

#include "recsim/config.hpp"
#include "recsim/engine.hpp"
#include "recsim/error.hpp"
#include "recsim/io.hpp"
#include "recsim/metrics.hpp"
#include "recsim/transcript.hpp"

namespace recsim {

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::string out;
  std::string fixtures;
  std::optional<int> days;
  bool no_transcript = false;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_scenario) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)");
  if (with_scenario) cmd->add_option("--scenario", o.scenario, "Plurality, Balanced or Similarity");
  cmd->add_option("--seed", o.seed, "Root seed");
  cmd->add_option("--backend", o.backend, "deterministic, llm or replay");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--fixtures", o.fixtures, "Fixture directory");
}

RunConfig resolve(const Overrides& o, bool scenario_optional) {
  nlohmann::json doc = nlohmann::json::object();
  if (!o.config.empty()) {
    try {
      doc = nlohmann::json::parse(read_text_file(o.config));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    } catch (const std::runtime_error& e) {
      throw ConfigError("<file>", e.what());
    }
  }
  if (!o.scenario.empty()) doc["scenario"] = o.scenario;
  if (scenario_optional && doc.is_object() && !doc.contains("scenario")) doc["scenario"] = "Similarity";
  if (o.seed) doc["seed"] = *o.seed;
  if (!o.backend.empty()) doc["backend"] = o.backend;
  if (!o.fixtures.empty()) doc["fixtures_dir"] = o.fixtures;
  if (o.days) doc["days"] = *o.days;
  if (!o.out.empty() || o.no_transcript) {
    if (!doc.contains("output")) doc["output"] = nlohmann::json::object();
    if (!o.out.empty()) doc["output"]["dir"] = o.out;
    if (o.no_transcript) doc["output"]["transcript"] = false;
  }
  return config_from_json(doc);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void write_reports(const fs::path& dir, std::span<const ReactionTally> tallies, std::ostream& out) {
  for (const auto& rep : render_report(tallies)) {
    const std::string name = lower(to_string(rep.scenario));
    write_file_atomic(dir / ("report_" + name + ".txt"), rep.text);
    write_file_atomic(dir / ("report_" + name + ".csv"), rep.csv);
    out << rep.text << '\n';
  }
}

int cmd_gen_agents(std::size_t n, std::uint64_t seed, const std::string& path, std::ostream& out) {
  const auto agents = generate_population(n, seed);
  const std::string text = agents_to_json(agents).dump(2) + "\n";
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file_atomic(path, text);
    out << "wrote " << agents.size() << " agents to " << path << '\n';
  }
  return 0;
}

int cmd_run(const Overrides& o, std::ostream& out) {
  const RunConfig config = resolve(o, false);
  const fs::path dir = config.output.dir;
  fs::create_directories(dir);
  const std::string name = lower(to_string(config.scenario));
  auto backend = make_backend(config);

  std::optional<NdjsonFileSink> sink;
  if (config.output.transcript) sink.emplace(dir / ("transcript_" + name + ".ndjson"));
  RunOptions opts;
  opts.sink = sink ? &*sink : nullptr;
  opts.keep_series = config.output.series;
  const RunResult result = run(config, *backend, opts);
  if (sink) sink->commit();

  write_file_atomic(dir / ("config_" + name + ".json"), config_to_json(config).dump(2) + "\n");
  write_reports(dir, result.tallies, out);
  if (config.output.series) {
    const ScoreSummary summary = score_summary(result.series, config.scenario);
    write_file_atomic(dir / ("series_" + name + ".csv"), series_csv(result.series));
    write_file_atomic(dir / ("means_" + name + ".csv"), daily_means_csv(summary));
    out << std::fixed << std::setprecision(4) << "final P_s mean " << summary.final_polarization.mean << " min "
        << summary.final_polarization.min << " max " << summary.final_polarization.max << "\nfinal E_s mean "
        << summary.final_engagement.mean << " min " << summary.final_engagement.min << " max "
        << summary.final_engagement.max << '\n';
  }
  write_file_atomic(dir / ("agents_final_" + name + ".json"), agents_to_json(result.final_agents).dump(2) + "\n");
  out << std::defaultfloat << "agents " << result.final_agents.size() << ", days " << config.days << ", posts created "
      << result.posts_created << ", wall " << std::setprecision(3) << result.wall_seconds << " s\n";
  return 0;
}

int cmd_replicate(const Overrides& o, std::ostream& out) {
  const RunConfig config = resolve(o, true);
  const fs::path dir = config.output.dir;
  fs::create_directories(dir);
  auto backend = make_backend(config);
  const ReplicationResult rep = replicate_experiment(config, *backend);
  std::vector<ReactionTally> all;
  for (ScenarioKind s : kAllScenarios) {
    const auto& rows = rep.for_scenario(s);
    all.insert(all.end(), rows.begin(), rows.end());
    if (config.output.transcript) {
      write_transcript(dir / ("replication_" + lower(to_string(s)) + ".ndjson"),
                       rep.transcripts[static_cast<std::size_t>(s)]);
    }
  }
  write_reports(dir, all, out);
  return 0;
}

int cmd_report(const std::string& transcript, const std::string& scenario, const std::vector<std::string>& profiles,
               const std::string& out_dir, std::ostream& out) {
  const auto kind = scenario_from_string(scenario);
  if (!kind) throw ConfigError("scenario", "unknown scenario '" + scenario + "'");
  const auto records = read_transcript(transcript);
  std::vector<std::string> ids = profiles;
  if (ids.empty()) {
    for (const auto& r : records) {
      if (std::find(ids.begin(), ids.end(), r.agent_id) == ids.end()) ids.push_back(r.agent_id);
    }
  }
  std::vector<ReactionTally> tallies;
  for (const auto& id : ids) tallies.push_back(tally(records, id, *kind));
  if (tallies.empty()) {
    ReactionTally empty;
    empty.profile_id = "none";
    empty.scenario = *kind;
    tallies.push_back(empty);
  }
  if (out_dir.empty()) {
    for (const auto& rep : render_report(tallies)) out << rep.text;
  } else {
    fs::create_directories(out_dir);
    write_reports(out_dir, tallies, out);
  }
  return 0;
}

int cmd_verify(const std::string& transcript, const std::string& config_path, std::ostream& out) {
  DynamicsParams params;
  if (!config_path.empty()) params = parse_config(config_path).dynamics;
  const auto records = read_transcript(transcript);
  const VerifyReport report = verify_transcript(records, params);
  out << "records " << report.records << ", agent-days " << report.agent_days << ", max deviation "
      << report.max_deviation << '\n';
  for (const auto& p : report.problems) out << "  " << p << '\n';
  return report.ok() ? 0 : 1;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Agent-based social network simulator", "recsim"};
  app.require_subcommand(1);

  Overrides run_o;
  auto* run_cmd = app.add_subcommand("run", "Simulate a population and write transcript, reports and series");
  add_common(run_cmd, run_o, true);
  run_cmd->add_option("--days", run_o.days, "Override the number of days");
  run_cmd->add_flag("--no-transcript", run_o.no_transcript, "Skip the NDJSON transcript");

  Overrides rep_o;
  auto* rep_cmd = app.add_subcommand("replicate", "Run the three-profile, 30-post experiment for every scenario");
  add_common(rep_cmd, rep_o, false);

  std::size_t gen_n = 100;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen-agents", "Generate a random population as JSON");
  gen_cmd->add_option("--n", gen_n, "Number of agents")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen_seed, "Population seed");
  gen_cmd->add_option("--out", gen_out, "Output file (default stdout)");

  std::string report_transcript, report_scenario, report_out;
  std::vector<std::string> report_profiles;
  auto* report_cmd = app.add_subcommand("report", "Tabulate reactions from a transcript");
  report_cmd->add_option("--transcript", report_transcript, "NDJSON transcript")->required();
  report_cmd->add_option("--scenario", report_scenario, "Scenario label for the table")->required();
  report_cmd->add_option("--profiles", report_profiles, "Profile ids (default: all, in order of appearance)")
      ->delimiter(',');
  report_cmd->add_option("--out", report_out, "Write report files here instead of printing");

  std::string verify_transcript_path, verify_config;
  auto* verify_cmd = app.add_subcommand("replay-verify", "Re-derive every score update in a transcript");
  verify_cmd->add_option("--transcript", verify_transcript_path, "NDJSON transcript")->required();
  verify_cmd->add_option("--config", verify_config, "Config supplying alpha and beta (default 0.9)");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("recsim");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) return cmd_gen_agents(gen_n, gen_seed, gen_out, out);
    if (*run_cmd) return cmd_run(run_o, out);
    if (*rep_cmd) return cmd_replicate(rep_o, out);
    if (*report_cmd) return cmd_report(report_transcript, report_scenario, report_profiles, report_out, out);
    if (*verify_cmd) return cmd_verify(verify_transcript_path, verify_config, out);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace recsim
