// Prints one [PASS]/[FAIL] line per acceptance criterion and exits non-zero
// if any failed.

#include <sys/resource.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "../common/oracles.hpp"
#include "recsim/config.hpp"
#include "recsim/dynamics.hpp"
#include "recsim/engine.hpp"
#include "recsim/error.hpp"
#include "recsim/llm.hpp"
#include "recsim/metrics.hpp"
#include "recsim/recommender.hpp"
#include "recsim/transcript.hpp"

using namespace recsim;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = RECSIM_FIXTURES_DIR;

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

// --- 1 ---------------------------------------------------------------------

Verdict score_updates() {
  Verdict v;
  v.require(close(update_polarization(0.5, 0.0, -0.3), -0.3), "alpha = 0 takes F");
  v.require(close(update_polarization(0.5, 1.0, -0.3), 0.5), "alpha = 1 keeps P");
  v.require(close(update_polarization(0.2, 0.9, 0.7), 0.25), "P 0.2 F 0.7");
  v.require(close(update_polarization(-1.0, 0.5, 1.0), 0.0), "P -1 F 1");
  v.require(close(update_engagement(-0.4, 1.0, 0.8, 0.9), -0.4), "beta = 1 keeps E");
  v.require(close(update_engagement(0.6, 0.9, 0.0, 1.0), 0.54), "T = 0 decays E");
  v.require(close(update_engagement(0.0, 0.9, 0.5, 0.8), 0.04), "E 0 T 0.5 F 0.8");
  v.require(close(update_engagement(0.3, 0.0, 0.25, -0.8), -0.2), "beta = 0 takes T F");

  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0), signed_unit(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = unit(gen), f = signed_unit(gen), p0 = signed_unit(gen);
    double p = p0;
    for (int t = 1; t <= 100; ++t) {
      p = update_polarization(p, alpha, f);
      worst = std::max(worst, std::abs(std::abs(p - f) - std::pow(alpha, t) * std::abs(p0 - f)));
    }
  }
  v.require(worst <= 1e-12, "geometric convergence off by " + std::to_string(worst));
  return v;
}

// --- 2 ---------------------------------------------------------------------

Verdict boundedness() {
  Verdict v;
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0), signed_unit(-1.0, 1.0), stance(1.0, 7.0);
  double p = signed_unit(gen), e = signed_unit(gen);
  auto agent = generate_population(1, 8).front();
  const DynamicsParams params{0.9, 0.9, 1.0};
  for (int step = 0; step < 10000; ++step) {
    const double f = step % 97 == 0 ? (step % 2 ? 1.0 : -1.0) : signed_unit(gen);
    p = update_polarization(p, unit(gen), f);
    e = update_engagement(e, unit(gen), unit(gen), f);
    if (p < -1.0 || p > 1.0 || e < -1.0 || e > 1.0) {
      v.require(false, "score left [-1, 1] at step " + std::to_string(step));
      break;
    }

    const std::size_t n = 1 + gen() % 30;
    std::vector<double> stances(n);
    for (auto& s : stances) s = step % 2 ? 7.0 : stance(gen);
    ReactionSummary r;
    r.negative = gen() % (n + 1);
    r.positive = gen() % (n - r.negative + 1);
    r.friend_requests = gen() % 5;
    agent.dynamics = drift_dynamic_traits(agent, stances, r, params);
    const auto& d = agent.dynamics;
    for (double x : {d.political_attitude, d.social_connectivity, d.emotive_reaction}) {
      if (x < 1.0 || x > 7.0) {
        v.require(false, "trait left [1, 7] at step " + std::to_string(step));
        return v;
      }
    }
  }
  return v;
}

// --- 3 ---------------------------------------------------------------------

struct Row {
  const char* profile;
  std::array<unsigned, 8> hlwclsa_c;
  std::array<unsigned, 3> totals;
};

struct Table {
  const char* file;
  ScenarioKind scenario;
  std::array<Row, 3> rows;
  std::array<unsigned, 3> totals;
};

const Table kTables[] = {
    {"plurality",
     ScenarioKind::Plurality,
     {Row{"PROFILE_1", {0, 0, 4, 3, 16, 1, 0, 24}, {48, 23, 1}},
      Row{"PROFILE_21", {0, 4, 0, 0, 0, 0, 4, 8}, {16, 4, 4}},
      Row{"PROFILE_22", {0, 0, 1, 8, 4, 0, 14, 27}, {54, 13, 14}}},
     {118, 40, 19}},
    {"balanced",
     ScenarioKind::Balanced,
     {Row{"PROFILE_1", {0, 0, 2, 3, 15, 1, 0, 21}, {42, 20, 1}},
      Row{"PROFILE_21", {0, 4, 0, 0, 8, 0, 5, 17}, {34, 12, 5}},
      Row{"PROFILE_22", {0, 0, 1, 7, 18, 0, 3, 28}, {57, 26, 3}}},
     {133, 58, 9}},
    {"similarity",
     ScenarioKind::Similarity,
     {Row{"PROFILE_1", {0, 0, 0, 3, 22, 0, 0, 25}, {50, 25, 0}},
      Row{"PROFILE_21", {0, 2, 0, 0, 8, 0, 5, 15}, {30, 10, 5}},
      Row{"PROFILE_22", {0, 0, 3, 6, 20, 0, 1, 29}, {59, 29, 1}}},
     {139, 64, 6}},
};

std::string total_line(const std::string& text) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("In total", 0) == 0) return line;
  }
  return {};
}

Verdict table_arithmetic() {
  Verdict v;
  const ReactionKind order[] = {ReactionKind::Haha, ReactionKind::Like, ReactionKind::Wow, ReactionKind::Care,
                                ReactionKind::Love, ReactionKind::Sad,  ReactionKind::Angry};
  for (const auto& table : kTables) {
    const auto records = read_transcript(kFixtures / "tally_tables" / (std::string(table.file) + ".ndjson"));
    std::vector<ReactionTally> tallies;
    std::array<unsigned, 3> sums{};
    for (const auto& row : table.rows) {
      const auto t = tally(records, row.profile, table.scenario);
      const std::string where = std::string(table.file) + " " + row.profile;
      for (std::size_t i = 0; i < 7; ++i) v.require(t.count(order[i]) == row.hlwclsa_c[i], where + " reactions");
      v.require(t.comments == row.hlwclsa_c[7], where + " comments");
      const std::array<unsigned, 3> got{t.total_reactions(), t.total_positive(), t.total_negative()};
      v.require(got == row.totals, where + " totals");
      for (std::size_t i = 0; i < 3; ++i) sums[i] += got[i];
      tallies.push_back(t);
    }
    v.require(sums == table.totals, std::string(table.file) + " In total");
    const auto reports = render_report(tallies);
    std::ostringstream expect;
    expect << table.totals[0] << ' ' << table.totals[1] << ' ' << table.totals[2];
    std::istringstream line(total_line(reports.at(0).text));
    std::string w, got;
    line >> w >> w;
    for (int i = 0; i < 3 && line >> w; ++i) got += (i ? " " : "") + w;
    v.require(got == expect.str(), std::string(table.file) + " rendered In total row");
  }
  return v;
}

// --- 4 ---------------------------------------------------------------------

std::vector<std::string> sorted_ids(const std::vector<RankedItem>& items) {
  std::vector<std::string> out;
  for (const auto& r : items) out.emplace_back(r.id);
  std::sort(out.begin(), out.end());
  return out;
}

Verdict selection_oracle() {
  Verdict v;
  std::mt19937_64 gen(500);
  const auto vocab = tag_vocabulary();
  for (int instance = 0; instance < 500 && v.ok; ++instance) {
    const std::size_t n = 1 + gen() % 12;
    const std::size_t k = 1 + gen() % std::min<std::size_t>(4, n);
    auto agent = generate_population(1, gen()).front();
    agent.dynamics.political_attitude = 1.0 + static_cast<double>(gen() % 13) / 2.0;

    std::vector<Post> posts(n);
    std::vector<RankedItem> items;
    std::vector<oracle::Scored> scored;
    for (std::size_t i = 0; i < n; ++i) {
      Post& p = posts[i];
      p.id = "p" + std::to_string(gen() % 100) + "_" + std::to_string(i);
      p.stance = 1.0 + static_cast<double>(gen() % 7);
      p.tags = {vocab[gen() % vocab.size()]};
      if (gen() % 2) p.tags.push_back(vocab[gen() % vocab.size()]);
      std::sort(p.tags.begin(), p.tags.end());
      p.tags.erase(std::unique(p.tags.begin(), p.tags.end()), p.tags.end());
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double a = affinity(agent, posts[i]);
      items.push_back(RankedItem{a, posts[i].id, i});
      scored.push_back({a, posts[i].id});
    }
    for (bool maximize : {true, false}) {
      const auto kind = maximize ? ScenarioKind::Similarity : ScenarioKind::Plurality;
      auto expect = oracle::best_subset(scored, k, maximize);
      std::sort(expect.begin(), expect.end());
      v.require(sorted_ids(select_ranked(kind, items, k)) == expect,
                "instance " + std::to_string(instance) + " " + std::string(to_string(kind)));
    }
  }
  return v;
}

// --- 5 ---------------------------------------------------------------------

Verdict scenario_ordering() {
  Verdict v;
  RunConfig base;
  base.fixtures_dir = kFixtures.string();
  base.seed = 42;
  DeterministicBackend backend;
  const auto rep = replicate_experiment(base, backend);
  const auto p = rep.total(ScenarioKind::Plurality);
  const auto b = rep.total(ScenarioKind::Balanced);
  const auto s = rep.total(ScenarioKind::Similarity);
  std::ostringstream d;
  d << "totals " << p.total_reactions() << "/" << b.total_reactions() << "/" << s.total_reactions() << ", negatives "
    << p.total_negative() << "/" << b.total_negative() << "/" << s.total_negative();
  v.detail = d.str();
  v.require(p.total_reactions() < b.total_reactions() && b.total_reactions() < s.total_reactions(),
            "total reactions not increasing: " + d.str());
  v.require(p.total_negative() > b.total_negative() && b.total_negative() > s.total_negative(),
            "negatives not decreasing: " + d.str());
  for (ScenarioKind kind : kAllScenarios) {
    unsigned tom = 0, anna = 0;
    for (const auto& row : rep.for_scenario(kind)) {
      if (row.profile_id == "PROFILE_21") tom = row.count(ReactionKind::Angry);
      if (row.profile_id == "PROFILE_1") anna = row.count(ReactionKind::Angry);
    }
    v.require(tom > anna, std::string(to_string(kind)) + ": PROFILE 21 Angry " + std::to_string(tom) +
                              " vs PROFILE 1 " + std::to_string(anna));
  }
  return v;
}

// --- 6 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string capture(const std::string& command) {
  std::string out;
  if (FILE* pipe = popen(command.c_str(), "r")) {
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    if (pclose(pipe) != 0) out += "\n<exit status non-zero>";
  }
  return out;
}

Verdict determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / ("recsim-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);

  RunConfig c;
  c.scenario = ScenarioKind::Balanced;
  c.days = 30;
  c.seed = 7;
  c.population.kind = PopulationSource::Kind::Generated;
  c.population.n = 100;
  c.population.seed = 11;
  c.fixtures_dir = kFixtures.string();
  std::ofstream(root / "config.json") << config_to_json(c).dump(2);

  const std::string cli = RECSIM_CLI;
  for (const char* run : {"a", "b"}) {
    const auto out = capture(cli + " run --config " + (root / "config.json").string() + " --out " +
                             (root / run).string() + " 2>&1");
    v.require(out.find("non-zero") == std::string::npos, std::string("run ") + run + " failed: " + out);
  }
  const auto ta = root / "a" / "transcript_balanced.ndjson";
  const auto tb = root / "b" / "transcript_balanced.ndjson";
  const auto bytes = slurp(ta);
  v.require(!bytes.empty(), "no transcript written");
  v.require(bytes == slurp(tb), "transcripts differ");
  v.require(slurp(root / "a" / "series_balanced.csv") == slurp(root / "b" / "series_balanced.csv"), "series differ");

  const auto verify = capture(cli + " replay-verify --transcript " + ta.string() + " --config " +
                              (root / "config.json").string() + " 2>&1");
  v.require(verify.find("max deviation 0\n") != std::string::npos, "replay-verify: " + verify);
  if (v.ok) {
    v.detail = std::to_string(std::count(bytes.begin(), bytes.end(), '\n')) + " records, max deviation 0";
  }
  fs::remove_all(root);
  return v;
}

// --- 7 ---------------------------------------------------------------------

double peak_rss_mib() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<double>(usage.ru_maxrss) / 1024.0;
}

Verdict full_scale() {
  Verdict v;
  RunConfig c;
  c.scenario = ScenarioKind::Balanced;
  c.days = 365;
  c.seed = 1;
  c.population.kind = PopulationSource::Kind::Generated;
  c.population.n = 10000;
  c.population.seed = 1;
  c.fixtures_dir = kFixtures.string();
  DeterministicBackend backend;
  RunOptions opts;
  opts.keep_series = false;
  const auto result = run(c, backend, opts);
  const double rss = peak_rss_mib();
  std::ostringstream d;
  d << result.final_agents.size() << " agents, " << c.days << " days, " << result.posts_created
    << " posts created, peak RSS " << static_cast<long>(rss) << " MiB";
  v.detail = d.str();
  v.require(result.final_agents.size() == 10000, d.str());
  v.require(rss < 2048.0, "peak memory " + d.str());
  return v;
}

// --- 8 ---------------------------------------------------------------------

ChatRequest stored_request(const nlohmann::json& doc) {
  ChatRequest req;
  req.model = doc["request"]["model"];
  for (const auto& m : doc["request"]["messages"]) req.messages.push_back({m["role"], m["content"]});
  return req;
}

Verdict llm_offline() {
  Verdict v;
  const fs::path dir = kFixtures / "cassettes";
  CassetteStore store(dir);
  ReplayTransport replay(store);
  std::size_t replayed = 0, parse_errors = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto doc = nlohmann::json::parse(std::ifstream(entry.path()));
    const std::string completion = replay.complete(stored_request(doc));
    try {
      if (completion.rfind("pa:", 0) == 0) {
        parse_trait_report(completion);
      } else {
        parse_completion(completion);
      }
    } catch (const ParseError&) {
      ++parse_errors;
    }
    ++replayed;
  }
  v.require(replayed >= 20, "only " + std::to_string(replayed) + " stored completions");
  v.require(parse_errors == 0, std::to_string(parse_errors) + " ParseErrors");

  RunConfig base;
  base.fixtures_dir = kFixtures.string();
  base.seed = 42;
  base.backend = BackendKind::Replay;
  base.llm.cassette_dir = dir.string();
  auto backend = make_backend(base);
  try {
    replicate_experiment(base, *backend);
  } catch (const std::exception& e) {
    v.require(false, std::string("replayed replication failed: ") + e.what());
  }

  std::size_t round_trips = 0;
  const std::vector<std::optional<std::string>> comments{std::nullopt, "Well said", "share this, friend request?",
                                                        "Grüße aus Köln", "nothing + Like"};
  for (ReactionKind kind : kAllReactions) {
    for (int flags = 0; flags < 8; ++flags) {
      for (const auto& comment : comments) {
        const InteractionOutcome o{kind, (flags & 1) != 0, comment, (flags & 2) != 0, (flags & 4) != 0};
        if (!well_formed(o)) continue;
        ++round_trips;
        if (!(parse_completion(render_completion(o)) == o)) {
          v.require(false, "round trip broke on: " + render_completion(o));
        }
      }
    }
  }

  ChatRequest unknown;
  unknown.model = "gpt-4o";
  unknown.messages.push_back({"user", "a prompt nobody recorded"});
  bool missed = false;
  try {
    replay.complete(unknown);
  } catch (const CassetteMiss& e) {
    missed = e.key() == request_key(unknown);
  }
  v.require(missed, "replay miss did not raise CassetteMiss");
  if (v.ok) {
    v.detail = std::to_string(replayed) + " completions replayed, " + std::to_string(round_trips) +
               " outcomes round-tripped";
  }
  return v;
}

struct Criterion {
  int number;
  const char* name;
  double budget_seconds;
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "score update exactness and convergence", 1.0, score_updates},
      {2, "boundedness under long random iteration", 5.0, boundedness},
      {3, "table arithmetic on the reference rows", 1.0, table_arithmetic},
      {4, "selection matches exhaustive search", 10.0, selection_oracle},
      {5, "scenario ordering of the replication", 5.0, scenario_ordering},
      {6, "byte-identical runs and zero replay deviation", 30.0, determinism},
      {7, "10000 agents for 365 days within 5 minutes and 2 GB", 300.0, full_scale},
      {8, "offline model client", 2.0, llm_offline},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = v.ok && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] %d %s (%.2f s of %.0f s)%s%s\n", pass ? "PASS" : "FAIL", c.number, c.name, secs,
                c.budget_seconds, v.detail.empty() ? "" : ": ", v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
