#pragma once

#include <array>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recsim/agents.hpp"
#include "recsim/config.hpp"
#include "recsim/content.hpp"
#include "recsim/decision.hpp"
#include "recsim/error.hpp"
#include "recsim/llm.hpp"
#include "recsim/metrics.hpp"
#include "recsim/transcript.hpp"

namespace recsim {

/// Everything a day reads and writes. Agents are kept in ascending id order
/// and an agent's handle is its index; the pool registers them in the same
/// order.
struct SimulationState {
  int day = 0;  // last completed day
  std::vector<AgentPrompt> agents;
  std::vector<std::vector<AgentHandle>> friends;  // sorted, symmetric, no self loops
  std::vector<std::vector<PostIndex>> seen;       // sorted; consumed posts still live in the pool
  ContentPool pool;
  std::uint64_t seed = 0;

  std::span<const AgentHandle> friends_of(AgentHandle h) const { return friends.at(h); }
  /// Copies the friend graph into AgentPrompt::friends.
  void materialize_friends();
};

/// Sorts agents by id, rejects duplicates, and registers them with the pool.
/// Friends listed in the profiles seed the (symmetrised) graph. Promoted
/// posts for day 1 are added when config.promoted_per_day > 0.
SimulationState make_state(const RunConfig& config, std::vector<AgentPrompt> agents, ContentPool pool);

/// A backend failure that aborted a day. The state is left at the start of
/// the day; cause() holds the original exception.
class DayAborted : public Error {
 public:
  DayAborted(int day, std::string agent_id, std::exception_ptr cause, const std::string& what)
      : Error("engine", "day " + std::to_string(day) + ", agent " + agent_id + ": " + what),
        day_(day), agent_id_(std::move(agent_id)), cause_(std::move(cause)) {}

  int day() const noexcept { return day_; }
  const std::string& agent_id() const noexcept { return agent_id_; }
  std::exception_ptr cause() const noexcept { return cause_; }

 private:
  int day_;
  std::string agent_id_;
  std::exception_ptr cause_;
};

/// Scores and tallies produced by one day, indexed by agent handle.
struct DayOutput {
  std::vector<TranscriptRecord> records;  // ordered by (agent_id, post_id)
  std::vector<double> impact;             // NaN for agents with nothing to consume
  std::vector<ReactionTally> tallies;
};

/// Advances the state by one day. On a backend failure it throws DayAborted
/// and leaves `state` untouched. Without keep_records the day's records are
/// not built and DayOutput::records stays empty.
DayOutput run_day(SimulationState& state, const RunConfig& config, DecisionBackend& backend,
                  bool keep_records = true);

struct RunOptions {
  TranscriptSink* sink = nullptr;  // receives each day's records
  bool keep_transcript = false;    // also collect records into RunResult::transcript
  bool keep_series = true;
};

struct RunResult {
  ScenarioKind scenario = ScenarioKind::Similarity;
  std::vector<AgentPrompt> initial_agents;
  std::vector<AgentPrompt> final_agents;
  std::vector<TranscriptRecord> transcript;
  ScoreSeries series;
  std::vector<ReactionTally> tallies;  // one per agent, whole run
  std::size_t posts_created = 0;
  double wall_seconds = 0.0;
};

/// Population described by config.population, in ascending id order.
std::vector<AgentPrompt> load_population(const RunConfig& config);

/// The content pool for config: the issue fixture plus nothing else.
ContentPool load_content(const RunConfig& config);

/// Templates from llm.templates_dir, else <fixtures_dir>/templates, else the
/// built-in defaults.
PromptTemplates templates_for(const RunConfig& config);

std::unique_ptr<DecisionBackend> make_backend(const RunConfig& config);

RunResult run(const RunConfig& config, DecisionBackend& backend, const RunOptions& options = {});

/// The three replication profiles.
inline constexpr std::array<const char*, 3> kReplicationProfiles = {"PROFILE_1", "PROFILE_21", "PROFILE_22"};

struct ReplicationResult {
  std::array<std::vector<ReactionTally>, 3> tallies;        // by kAllScenarios order
  std::array<std::vector<TranscriptRecord>, 3> transcripts;

  const std::vector<ReactionTally>& for_scenario(ScenarioKind s) const {
    return tallies[static_cast<std::size_t>(s)];
  }
  ReactionTally total(ScenarioKind s) const;
};

/// The replication configuration derived from `base`: the three profiles,
/// one day, every fixture post offered as a candidate and 30 selected.
RunConfig replication_config(const RunConfig& base, ScenarioKind scenario);

/// One 30-post session per scenario with the same seed and backend.
ReplicationResult replicate_experiment(const RunConfig& base, DecisionBackend& backend);

}  // namespace recsim
