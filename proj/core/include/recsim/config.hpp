#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "recsim/agents.hpp"
#include "recsim/content.hpp"
#include "recsim/decision.hpp"
#include "recsim/dynamics.hpp"
#include "recsim/llm.hpp"
#include "recsim/recommender.hpp"

namespace recsim {

enum class BackendKind : unsigned char { Deterministic, Llm, Replay };

std::string_view to_string(BackendKind kind) noexcept;
std::optional<BackendKind> backend_from_string(std::string_view name) noexcept;

struct PopulationSource {
  enum class Kind : unsigned char { Fixture, Generated, File };

  Kind kind = Kind::Fixture;
  std::size_t n = 100;                // generated only
  std::uint64_t seed = 1;             // generated only
  std::string path;                   // file only: an agents JSON array
  std::vector<std::string> profiles;  // fixture/file: keep only these ids (empty = all)

  bool operator==(const PopulationSource&) const = default;
};

struct LlmConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  LlmOptions options;
  std::string cassette_dir;   // replay source (default <fixtures_dir>/cassettes); the llm backend records here when set
  std::string templates_dir;  // empty: <fixtures_dir>/templates
  int timeout_seconds = 60;

  bool operator==(const LlmConfig&) const = default;
};

struct OutputOptions {
  std::string dir = "out";
  bool transcript = true;
  bool series = true;

  bool operator==(const OutputOptions&) const = default;
};

/// A fully validated run description. Defaults mirror the documented model
/// defaults; only `scenario` is required in a config file.
struct RunConfig {
  ScenarioKind scenario = ScenarioKind::Similarity;
  int days = 365;
  std::uint64_t seed = 42;
  PopulationSource population;
  DynamicsParams dynamics;
  double initial_polarization = 0.0;
  double initial_engagement = 0.0;
  DailyCaps caps;
  std::optional<int> selection_k;  // fixed per-session k instead of posts_per_day
  BackendKind backend = BackendKind::Deterministic;
  SourceMix source_mix;
  int oversample_factor = 3;
  double balance_ratio = 0.5;
  AffinityWeights weights;
  ContentConfig content;
  int promoted_per_day = 20;
  unsigned threads = 0;  // 0: hardware concurrency
  std::string fixtures_dir = "fixtures";
  DecisionCalibration calibration;
  LlmConfig llm;
  OutputOptions output;

  bool operator==(const RunConfig&) const = default;

  std::filesystem::path agents_fixture() const { return std::filesystem::path(fixtures_dir) / "agents_22.json"; }
  std::filesystem::path content_fixture() const { return std::filesystem::path(fixtures_dir) / "content_150.json"; }
};

/// Throws ConfigError("<key path>", reason) on the first violated invariant.
void validate(const RunConfig& config);

/// Applies defaults, rejects unknown keys and validates. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig parse_config(const std::filesystem::path& path);

/// Emits every field, so config_from_json(config_to_json(c)) == c.
nlohmann::ordered_json config_to_json(const RunConfig& config);

}  // namespace recsim
