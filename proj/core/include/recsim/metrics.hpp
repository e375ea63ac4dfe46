#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recsim/reaction.hpp"
#include "recsim/recommender.hpp"
#include "recsim/transcript.hpp"

namespace recsim {

/// Reaction counts of one profile under one scenario. Comments count toward
/// engagement; shares and friend requests are tracked but excluded from it.
struct ReactionTally {
  std::string profile_id;
  ScenarioKind scenario = ScenarioKind::Similarity;
  ReactionCounts reactions{};  // indexed by ReactionKind; None is the skip count
  unsigned comments = 0;
  unsigned shares = 0;
  unsigned friend_requests = 0;

  unsigned count(ReactionKind kind) const noexcept { return reactions[static_cast<std::size_t>(kind)]; }
  void add(const InteractionOutcome& outcome) noexcept;

  unsigned total_positive() const noexcept;
  unsigned total_negative() const noexcept;
  /// Every non-None reaction plus comments.
  unsigned total_reactions() const noexcept;

  bool operator==(const ReactionTally&) const = default;
};

/// Counts the profile's records. An empty transcript yields zeros; a
/// non-empty transcript that never mentions the profile throws UnknownProfile.
ReactionTally tally(std::span<const TranscriptRecord> transcript, std::string_view profile_id,
                    ScenarioKind scenario);

/// Row label used in reports: "PROFILE_1" prints as "PROFILE 1".
std::string display_label(std::string_view profile_id);

struct ScenarioReport {
  ScenarioKind scenario = ScenarioKind::Similarity;
  std::string text;
  std::string csv;
};

/// One table per scenario present in `tallies` (Plurality, Balanced,
/// Similarity order), rows in input order, followed by an "In total" row.
std::vector<ScenarioReport> render_report(std::span<const ReactionTally> tallies);

/// Reads back a CSV table written by render_report; the "In total" row is
/// checked against the rows and dropped. Throws FixtureCorrupt.
std::vector<ReactionTally> parse_report_csv(std::string_view csv, ScenarioKind scenario);

/// Per-day population scores. Rows are days 0..days, columns agents.
struct ScoreSeries {
  std::vector<std::string> agent_ids;
  int days = 0;
  std::vector<double> polarization;  // (days + 1) * agents, row-major by day
  std::vector<double> engagement;
  std::vector<double> impact;        // NaN on day 0 and on idle agent-days

  std::size_t agents() const noexcept { return agent_ids.size(); }
  std::size_t at(int day, std::size_t agent) const noexcept {
    return static_cast<std::size_t>(day) * agent_ids.size() + agent;
  }
};

struct Stats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct DailyMeans {
  int day = 0;
  double polarization = 0.0;
  double engagement = 0.0;
};

struct ScoreSummary {
  ScenarioKind scenario = ScenarioKind::Similarity;
  Stats final_polarization;
  Stats final_engagement;
  std::vector<DailyMeans> daily;
};

Stats describe(std::span<const double> values);

ScoreSummary score_summary(const ScoreSeries& series, ScenarioKind scenario);

/// day,agent_id,P_s,E_s,F with F empty where undefined.
std::string series_csv(const ScoreSeries& series);
/// day,mean_P_s,mean_E_s
std::string daily_means_csv(const ScoreSummary& summary);

}  // namespace recsim
