#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace recsim {

inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 7;

/// Personality traits that never change during a run, each on a 1..7 scale.
/// cognitive_style runs from very analytical (1) to very emotional (7).
struct StaticTraits {
  int openness = 4;
  int conscientiousness = 4;
  int extraversion = 4;
  int agreeableness = 4;
  int neuroticism = 4;
  int cognitive_style = 4;
  int open_mindedness = 4;

  bool operator==(const StaticTraits&) const = default;
};

/// Traits that drift as the agent consumes content. Real-valued on [1, 7].
/// political_attitude: 1 extremely liberal .. 7 extremely conservative.
struct DynamicTraits {
  double political_attitude = 4.0;
  double social_connectivity = 4.0;
  double emotive_reaction = 4.0;

  bool operator==(const DynamicTraits&) const = default;
};

/// One simulated user profile.
///
/// Scores follow the sign convention of the model: polarization -1 means
/// extremely polarized and +1 not polarized at all; engagement -1 means not
/// engaged at all and +1 extremely engaged.
struct AgentPrompt {
  std::string id;
  std::string nickname;
  std::string bio;
  std::vector<std::string> interests;  // lowercase tags, sorted, unique
  StaticTraits statics;
  DynamicTraits dynamics;
  double polarization = 0.0;
  double engagement = 0.0;
  std::vector<std::string> friends;  // agent ids, sorted, unique
  double activity = 1.0;             // fraction of maximal daily capacity

  bool operator==(const AgentPrompt&) const = default;
};

/// Raw field set accepted by new_agent(). Scores default to 0 when absent.
struct AgentDescriptor {
  std::string id;
  std::string nickname;
  std::string bio;
  std::vector<std::string> interests;
  StaticTraits statics;
  DynamicTraits dynamics;
  std::optional<double> polarization;
  std::optional<double> engagement;
  std::vector<std::string> friends;
  double activity = 1.0;
};

/// Validates a descriptor and normalises its sets (lowercase, sorted, unique).
/// Throws RangeError naming the first field outside its scale, EmptyInterests
/// when no interest tag is given.
AgentPrompt new_agent(AgentDescriptor descriptor);

/// Checks every AgentPrompt invariant; throws like new_agent().
void validate(const AgentPrompt& agent);

/// The fixed tag vocabulary used for generated interests and promoted posts.
std::span<const std::string> tag_vocabulary();

/// `n` agents drawn deterministically from `seed`. Agent k uses its own
/// stream, so the first m agents of generate_population(n, s) equal
/// generate_population(m, s) for m <= n.
std::vector<AgentPrompt> generate_population(std::size_t n, std::uint64_t seed);

/// The 22-profile fixture (PROFILE_1 .. PROFILE_22). Throws FixtureCorrupt.
std::vector<AgentPrompt> load_fixture_profiles(const std::filesystem::path& path);

/// Parses a descriptor array with keys {id, nickname, bio, interests, o, c, e,
/// a, n, cs, om, pa, sc, er, T}. Throws FixtureCorrupt on any schema mismatch.
std::vector<AgentPrompt> agents_from_json(const nlohmann::json& doc);
nlohmann::ordered_json agents_to_json(std::span<const AgentPrompt> agents);

struct DailyCaps {
  int min = 5;
  int max = 30;

  bool operator==(const DailyCaps&) const = default;
};

/// round_half_up(min + T * (max - min)). Requires 1 <= min <= max.
int posts_per_day(const AgentPrompt& agent, DailyCaps caps);
int posts_per_day(double activity, DailyCaps caps);

}  // namespace recsim
