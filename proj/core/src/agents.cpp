#include "recsim/agents.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "recsim/error.hpp"
#include "recsim/io.hpp"
#include "recsim/rng.hpp"

namespace recsim {

namespace {

const std::array<std::string, 40> kVocabulary = {
    "activism",      "art",          "border-security", "climate",     "conspiracy",
    "culture",       "economy",      "education",       "energy",      "environment",
    "faith",         "family",       "fitness",         "food",        "freedom",
    "gardening",     "healthcare",   "human-rights",    "immigration", "insurance",
    "jobs",          "local-news",   "museums",         "music",       "nature",
    "painting",      "patriotism",   "photography",     "politics",    "public-health",
    "refugees",      "science",      "small-business",  "social-justice", "sports",
    "taxes",         "technology",   "travel",          "veterans",    "wildlife",
};

std::vector<std::string> normalise_tags(std::vector<std::string> tags) {
  for (auto& t : tags) {
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  }
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  std::erase(tags, std::string{});
  return tags;
}

void check_likert(int value, const char* field) {
  if (value < kLikertMin || value > kLikertMax) {
    throw RangeError("agents", field, std::to_string(value) + " not in 1..7");
  }
}

void check_real(double value, double lo, double hi, const char* field) {
  if (!(value >= lo && value <= hi)) {
    throw RangeError("agents", field, std::to_string(value) + " not in [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "]");
  }
}

const std::array<std::string, 15> kFixtureKeys = {"id", "nickname", "bio", "interests", "o",
                                                  "c",  "e",        "a",   "n",         "cs",
                                                  "om", "pa",       "sc",  "er",        "T"};

}  // namespace

void validate(const AgentPrompt& agent) {
  const auto& s = agent.statics;
  check_likert(s.openness, "openness");
  check_likert(s.conscientiousness, "conscientiousness");
  check_likert(s.extraversion, "extraversion");
  check_likert(s.agreeableness, "agreeableness");
  check_likert(s.neuroticism, "neuroticism");
  check_likert(s.cognitive_style, "cognitive_style");
  check_likert(s.open_mindedness, "open_mindedness");
  const auto& d = agent.dynamics;
  check_real(d.political_attitude, kLikertMin, kLikertMax, "political_attitude");
  check_real(d.social_connectivity, kLikertMin, kLikertMax, "social_connectivity");
  check_real(d.emotive_reaction, kLikertMin, kLikertMax, "emotive_reaction");
  check_real(agent.polarization, -1.0, 1.0, "polarization");
  check_real(agent.engagement, -1.0, 1.0, "engagement");
  check_real(agent.activity, 0.0, 1.0, "activity");
  if (agent.interests.empty()) throw EmptyInterests(agent.id);
  if (std::binary_search(agent.friends.begin(), agent.friends.end(), agent.id)) {
    throw RangeError("agents", "friends", "agent '" + agent.id + "' lists itself as a friend");
  }
}

AgentPrompt new_agent(AgentDescriptor d) {
  AgentPrompt agent;
  agent.id = std::move(d.id);
  agent.nickname = std::move(d.nickname);
  agent.bio = std::move(d.bio);
  agent.interests = normalise_tags(std::move(d.interests));
  agent.statics = d.statics;
  agent.dynamics = d.dynamics;
  agent.polarization = d.polarization.value_or(0.0);
  agent.engagement = d.engagement.value_or(0.0);
  agent.friends = std::move(d.friends);
  std::sort(agent.friends.begin(), agent.friends.end());
  agent.friends.erase(std::unique(agent.friends.begin(), agent.friends.end()), agent.friends.end());
  agent.activity = d.activity;
  if (agent.id.empty()) throw RangeError("agents", "id", "empty agent id");
  validate(agent);
  return agent;
}

std::span<const std::string> tag_vocabulary() { return kVocabulary; }

std::vector<AgentPrompt> generate_population(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw RangeError("agents", "n", "population size must be at least 1");
  const std::size_t digits = std::max<std::size_t>(5, std::to_string(n).size());
  std::vector<AgentPrompt> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Rng rng(stream_seed(seed, "population", {k}));
    AgentDescriptor d;
    std::string num = std::to_string(k + 1);
    num.insert(0, digits - num.size(), '0');
    d.id = "AGENT_" + num;
    d.nickname = "Agent" + num;
    d.bio = "Generated profile " + num;
    d.statics = StaticTraits{rng.uniform_int(1, 7), rng.uniform_int(1, 7), rng.uniform_int(1, 7),
                             rng.uniform_int(1, 7), rng.uniform_int(1, 7), rng.uniform_int(1, 7),
                             rng.uniform_int(1, 7)};
    d.dynamics = DynamicTraits{rng.uniform(1.0, 7.0), rng.uniform(1.0, 7.0), rng.uniform(1.0, 7.0)};
    d.activity = rng.uniform(0.2, 1.0);
    // Partial Fisher-Yates over the vocabulary for 2..6 distinct tags.
    std::array<std::size_t, kVocabulary.size()> idx;
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const int count = rng.uniform_int(2, 6);
    for (int i = 0; i < count; ++i) {
      const std::size_t j = i + rng.below(idx.size() - i);
      std::swap(idx[i], idx[j]);
      d.interests.push_back(kVocabulary[idx[i]]);
    }
    out.push_back(new_agent(std::move(d)));
  }
  return out;
}

std::vector<AgentPrompt> agents_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw FixtureCorrupt("agents", "agent document must be a JSON array");
  std::vector<AgentPrompt> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    const std::string where = "agent[" + std::to_string(i) + "]";
    if (!obj.is_object()) throw FixtureCorrupt("agents", where + " is not an object");
    if (obj.size() != kFixtureKeys.size()) {
      throw FixtureCorrupt("agents", where + " must have exactly the keys id, nickname, bio, interests, o, c, e, "
                                             "a, n, cs, om, pa, sc, er, T");
    }
    for (const auto& key : kFixtureKeys) {
      if (!obj.contains(key)) throw FixtureCorrupt("agents", where + " is missing key '" + key + "'");
    }
    try {
      AgentDescriptor d;
      d.id = obj.at("id").get<std::string>();
      d.nickname = obj.at("nickname").get<std::string>();
      d.bio = obj.at("bio").get<std::string>();
      d.interests = obj.at("interests").get<std::vector<std::string>>();
      auto likert = [&](const char* k) {
        const auto& v = obj.at(k);
        if (!v.is_number_integer()) throw FixtureCorrupt("agents", where + "." + k + " must be an integer");
        return v.get<int>();
      };
      d.statics = StaticTraits{likert("o"), likert("c"), likert("e"), likert("a"),
                               likert("n"), likert("cs"), likert("om")};
      d.dynamics = DynamicTraits{obj.at("pa").get<double>(), obj.at("sc").get<double>(), obj.at("er").get<double>()};
      d.activity = obj.at("T").get<double>();
      if (!seen.insert(d.id).second) throw FixtureCorrupt("agents", "duplicate agent id '" + d.id + "'");
      out.push_back(new_agent(std::move(d)));
    } catch (const nlohmann::json::exception& e) {
      throw FixtureCorrupt("agents", where + ": " + e.what());
    } catch (const RangeError& e) {
      throw FixtureCorrupt("agents", where + ": " + e.what());
    } catch (const EmptyInterests& e) {
      throw FixtureCorrupt("agents", where + ": " + e.what());
    }
  }
  return out;
}

nlohmann::ordered_json agents_to_json(std::span<const AgentPrompt> agents) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& a : agents) {
    nlohmann::ordered_json obj;
    obj["id"] = a.id;
    obj["nickname"] = a.nickname;
    obj["bio"] = a.bio;
    obj["interests"] = a.interests;
    obj["o"] = a.statics.openness;
    obj["c"] = a.statics.conscientiousness;
    obj["e"] = a.statics.extraversion;
    obj["a"] = a.statics.agreeableness;
    obj["n"] = a.statics.neuroticism;
    obj["cs"] = a.statics.cognitive_style;
    obj["om"] = a.statics.open_mindedness;
    obj["pa"] = a.dynamics.political_attitude;
    obj["sc"] = a.dynamics.social_connectivity;
    obj["er"] = a.dynamics.emotive_reaction;
    obj["T"] = a.activity;
    doc.push_back(std::move(obj));
  }
  return doc;
}

std::vector<AgentPrompt> load_fixture_profiles(const std::filesystem::path& path) {
  auto agents = agents_from_json(read_json_fixture(path, "agents"));
  if (agents.size() != 22) {
    throw FixtureCorrupt("agents", "expected 22 profiles, found " + std::to_string(agents.size()));
  }
  return agents;
}

int posts_per_day(double activity, DailyCaps caps) {
  if (caps.min < 1 || caps.min > caps.max) {
    throw RangeError("agents", "posts_per_day caps", "need 1 <= min <= max");
  }
  const double t = std::clamp(activity, 0.0, 1.0);
  return static_cast<int>(std::floor(caps.min + t * (caps.max - caps.min) + 0.5));
}

int posts_per_day(const AgentPrompt& agent, DailyCaps caps) { return posts_per_day(agent.activity, caps); }

}  // namespace recsim
