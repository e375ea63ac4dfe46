#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "recsim/agents.hpp"
#include "recsim/content.hpp"

namespace recsim {

/// The three recommender setups. Plurality serves the content that diverges
/// most from the agent, Similarity the content that matches it best, and
/// Balanced a mix of both ends.
enum class ScenarioKind : unsigned char { Plurality, Balanced, Similarity };

inline constexpr ScenarioKind kAllScenarios[] = {ScenarioKind::Plurality, ScenarioKind::Balanced,
                                                 ScenarioKind::Similarity};

std::string_view to_string(ScenarioKind kind) noexcept;
/// Case-insensitive.
std::optional<ScenarioKind> scenario_from_string(std::string_view name) noexcept;

struct AffinityWeights {
  double stance = 0.6;
  double interest = 0.4;

  bool operator==(const AffinityWeights&) const = default;
};

/// Fraction of the post's tags that the agent lists as interests. Both
/// ranges must be sorted.
double tag_overlap(std::span<const std::string> tags, std::span<const std::string> interests);

/// Agent-post alignment in [-1, 1]:
///   w_s * (1 - 2|pa - stance| / 6) + w_v * (2 * overlap - 1), clamped.
/// Rounded to 12 decimals so equal affinities compare equal and ties fall
/// to the id order.
double affinity(const AgentPrompt& agent, const Post& post, AffinityWeights weights = {});

/// The same score from a political attitude, a stance and a tag overlap.
double affinity(double political_attitude, double stance, double overlap, AffinityWeights weights = {});

/// A candidate reduced to what selection needs.
struct RankedItem {
  double affinity = 0.0;
  std::string_view id;  // tie-breaker, ascending
  std::size_t slot = 0; // caller's position for the item
};

/// Picks k items: Similarity the k highest affinities, Plurality the k lowest,
/// Balanced round(balance_ratio * k) highest plus the remainder lowest. Ties
/// go to the smaller id. The result is ordered by descending affinity, then
/// ascending id. Throws InsufficientCandidates when k exceeds the input.
std::vector<RankedItem> select_ranked(ScenarioKind kind, std::vector<RankedItem> items, std::size_t k,
                                      double balance_ratio = 0.5);

std::vector<const Post*> select(ScenarioKind kind, const AgentPrompt& agent, std::span<const Post* const> candidates,
                                std::size_t k, double balance_ratio = 0.5, AffinityWeights weights = {});

/// Mean affinity of the consumed posts, clamped to [-1, 1]. This single value
/// drives both the polarization and the engagement recurrence. Throws
/// EmptySelection.
double impact(ScenarioKind kind, const AgentPrompt& agent, std::span<const Post* const> selected,
              AffinityWeights weights = {});

/// impact() over precomputed affinities.
double mean_affinity(std::span<const double> affinities);

}  // namespace recsim
