#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "recsim/agents.hpp"
#include "recsim/content.hpp"
#include "recsim/reaction.hpp"
#include "recsim/recommender.hpp"
#include "recsim/rng.hpp"

namespace recsim {

/// What an agent did with one post. A skipped post (reaction None) carries no
/// comment, share or friend request, and a comment implies the agent read the
/// existing comments.
struct InteractionOutcome {
  ReactionKind reaction = ReactionKind::None;
  bool read_comments = false;
  std::optional<std::string> comment;
  bool shared = false;
  bool friend_requested = false;

  bool operator==(const InteractionOutcome&) const = default;
};

/// True when the outcome satisfies the invariants above and its comment can
/// be rendered unambiguously (non-empty, trimmed, no double quote or newline).
bool well_formed(const InteractionOutcome& outcome);

/// Everything the backend may know about how a post reached the agent. The
/// recommender setup is deliberately absent: agents are never told which mix
/// they are being served.
struct ExposureContext {
  int day = 0;
  SourceKind channel = SourceKind::Imposed;
};

/// Aggregate of one agent's session, handed to self-reporting backends.
struct SessionSummary {
  std::size_t consumed = 0;
  ReactionCounts reactions{};
  std::size_t comments = 0;
  std::size_t shares = 0;
  std::size_t friend_requests = 0;
  double mean_stance = 4.0;
};

class DecisionBackend {
 public:
  virtual ~DecisionBackend() = default;

  virtual InteractionOutcome decide(const AgentPrompt& agent, const Post& post, const ExposureContext& context,
                                    Rng& rng) = 0;

  /// Optional post-session self-report of pa/sc/er. Backends that do not
  /// self-report return nullopt and the dynamics drift law applies instead.
  virtual std::optional<DynamicTraits> report_trait_deltas(const AgentPrompt& agent,
                                                           const SessionSummary& session) = 0;

  /// Upper bound on concurrent decide() calls the backend tolerates.
  virtual unsigned max_concurrency() const { return 1; }

  virtual std::string_view name() const = 0;
};

/// Rule constants of the deterministic backend, in one place so the
/// calibration surface is explicit.
struct DecisionCalibration {
  double engage_base = 0.5;
  double engage_affinity = 0.35;     // times |affinity|: disagreement engages too
  double engage_extraversion = 0.1;  // times (e - 4) / 3
  double engage_emotive = 0.05;      // times (er - 4) / 3
  double engage_min = 0.05;
  double engage_max = 0.95;
  double love_threshold = 0.6;
  double care_threshold = 0.25;
  double neutral_band = 0.25;           // |affinity| < band reads as Wow
  int care_min_cognitive_style = 4;     // below: Like instead of Care
  double angry_min_emotive = 4.0;       // below: Sad instead of Angry
  double comment_factor = 0.5;          // comment probability = factor * p
  double read_comments_probability = 0.5;
  int share_min_agreeableness = 5;
  double friend_request_min_connectivity = 5.0;

  bool operator==(const DecisionCalibration&) const = default;
};

double engage_probability(const AgentPrompt& agent, double affinity, const DecisionCalibration& calibration = {});

/// Reaction an engaged agent picks for a post of the given affinity.
ReactionKind reaction_for(const AgentPrompt& agent, double affinity, const DecisionCalibration& calibration = {});

/// The rule engine. Consumes exactly three uniforms from `rng` (engage,
/// comment, read) so outcomes depend only on (agent, post, rng state).
InteractionOutcome decide_deterministic(const AgentPrompt& agent, const Post& post, SourceKind channel, Rng& rng,
                                        const DecisionCalibration& calibration = {}, AffinityWeights weights = {});

class DeterministicBackend final : public DecisionBackend {
 public:
  explicit DeterministicBackend(DecisionCalibration calibration = {}, AffinityWeights weights = {})
      : calibration_(calibration), weights_(weights) {}

  InteractionOutcome decide(const AgentPrompt& agent, const Post& post, const ExposureContext& context,
                            Rng& rng) override {
    return decide_deterministic(agent, post, context.channel, rng, calibration_, weights_);
  }

  std::optional<DynamicTraits> report_trait_deltas(const AgentPrompt&, const SessionSummary&) override {
    return std::nullopt;
  }

  unsigned max_concurrency() const override { return ~0u; }
  std::string_view name() const override { return "deterministic"; }

  const DecisionCalibration& calibration() const noexcept { return calibration_; }

 private:
  DecisionCalibration calibration_;
  AffinityWeights weights_;
};

/// Maps a free-text reply onto the closed option set (nothing, Like, Love,
/// Care, Haha, Wow, Angry, Sad) plus optional "read comments",
/// "comment: ...", "share" and "friend request" markers. The first option
/// word before any comment wins, case-insensitively. Throws ParseError.
InteractionOutcome parse_completion(std::string_view text);

/// Canonical reply text for an outcome; parse_completion inverts it for
/// every well_formed() outcome.
std::string render_completion(const InteractionOutcome& outcome);

/// Parses "pa: 6, sc: 7, er: 7" (any order, ':' or '='), clamping each value
/// to [1, 7]. Throws ParseError when a value is missing or non-numeric.
DynamicTraits parse_trait_report(std::string_view text);

}  // namespace recsim
