#include "recsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "recsim/error.hpp"

namespace recsim {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::Deterministic: return "deterministic";
    case BackendKind::Llm: return "llm";
    case BackendKind::Replay: return "replay";
  }
  return "deterministic";
}

std::optional<BackendKind> backend_from_string(std::string_view name) noexcept {
  for (auto k : {BackendKind::Deterministic, BackendKind::Llm, BackendKind::Replay}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

/// Reads keys of one JSON object, remembering which were consumed so that
/// leftovers can be rejected as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string key_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(const char* key) {
    used_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  const json& raw(const char* key) {
    used_.insert(key);
    return obj_.at(key);
  }

  template <typename T>
  void read(const char* key, T& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(key_path(key), "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
            throw ConfigError(key_path(key), "expected a non-negative integer");
          }
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(key_path(key), "expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(key_path(key), "expected a string");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(key_path(key), e.what());
    }
  }

  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!used_.contains(k)) throw ConfigError(key_path(k), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string, std::less<>> used_;
};

void require(bool ok, const std::string& path, const std::string& reason) {
  if (!ok) throw ConfigError(path, reason);
}

void require_unit(double v, const std::string& path) {
  require(v >= 0.0 && v <= 1.0, path, "range violation: " + std::to_string(v) + " not in [0, 1]");
}

}  // namespace

void validate(const RunConfig& c) {
  require(c.days >= 1, "days", "must be >= 1");
  require_unit(c.dynamics.alpha, "alpha");
  require_unit(c.dynamics.beta, "beta");
  require_unit(c.dynamics.drift_rate, "drift_rate");
  require(c.initial_polarization >= -1.0 && c.initial_polarization <= 1.0, "initial_polarization",
          "range violation: not in [-1, 1]");
  require(c.initial_engagement >= -1.0 && c.initial_engagement <= 1.0, "initial_engagement",
          "range violation: not in [-1, 1]");
  require(c.caps.min >= 1 && c.caps.min <= c.caps.max, "posts_per_day", "need 1 <= min <= max");
  if (c.selection_k) require(*c.selection_k >= 1, "selection_k", "must be >= 1");
  require(c.source_mix.friends >= 0 && c.source_mix.trending >= 0 && c.source_mix.imposed >= 0 &&
              c.source_mix.friends + c.source_mix.trending + c.source_mix.imposed > 0,
          "source_mix", "shares must be non-negative with a positive sum");
  require(c.oversample_factor >= 1, "oversample_factor", "must be >= 1");
  require_unit(c.balance_ratio, "balance_ratio");
  require(c.weights.stance >= 0 && c.weights.interest >= 0 &&
              std::abs(c.weights.stance + c.weights.interest - 1.0) < 1e-9,
          "affinity_weights", "weights must be non-negative and sum to 1");
  require(c.content.trending_threshold >= 1.0 && c.content.trending_threshold <= 7.0, "trending_threshold",
          "range violation: not in [1, 7]");
  require(c.content.feed_window_days >= 1, "feed_window_days", "must be >= 1");
  require(c.promoted_per_day >= 0, "promoted_per_day", "must be >= 0");
  require(!c.fixtures_dir.empty(), "fixtures_dir", "must not be empty");
  const auto& k = c.calibration;
  require(k.engage_min >= 0 && k.engage_min <= k.engage_max && k.engage_max <= 1, "calibration.engage_min",
          "need 0 <= engage_min <= engage_max <= 1");
  require_unit(k.comment_factor, "calibration.comment_factor");
  require_unit(k.read_comments_probability, "calibration.read_comments_probability");
  require(k.care_threshold <= k.love_threshold, "calibration.care_threshold", "must not exceed love_threshold");
  if (c.population.kind == PopulationSource::Kind::Generated) {
    require(c.population.n >= 1, "population.n", "must be >= 1");
  }
  if (c.population.kind == PopulationSource::Kind::File) {
    require(!c.population.path.empty(), "population.path", "required for source 'file'");
  }
  if (c.backend == BackendKind::Replay) require(!c.llm.cassette_dir.empty(), "llm.cassette_dir", "required for replay");
  require(c.llm.options.max_in_flight >= 1, "llm.max_in_flight", "must be >= 1");
  require(c.llm.timeout_seconds >= 1, "llm.timeout_seconds", "must be >= 1");
  require(!c.output.dir.empty(), "output.dir", "must not be empty");
}

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  ObjectReader r(doc, "");

  if (!r.has("scenario")) throw ConfigError("scenario", "required");
  {
    const json& v = r.raw("scenario");
    if (!v.is_string()) throw ConfigError("scenario", "expected a string");
    auto s = scenario_from_string(v.get<std::string>());
    if (!s) throw ConfigError("scenario", "unknown scenario '" + v.get<std::string>() + "'");
    c.scenario = *s;
  }
  r.read("days", c.days);
  r.read("seed", c.seed);
  if (r.has("population")) {
    ObjectReader p(r.raw("population"), "population");
    std::string source = "fixture";
    p.read("source", source);
    if (source == "fixture") {
      c.population.kind = PopulationSource::Kind::Fixture;
    } else if (source == "generated") {
      c.population.kind = PopulationSource::Kind::Generated;
    } else if (source == "file") {
      c.population.kind = PopulationSource::Kind::File;
    } else {
      throw ConfigError("population.source", "expected fixture, generated or file");
    }
    p.read("n", c.population.n);
    p.read("seed", c.population.seed);
    p.read("path", c.population.path);
    p.read("profiles", c.population.profiles);
    p.finish();
  }
  r.read("alpha", c.dynamics.alpha);
  r.read("beta", c.dynamics.beta);
  r.read("drift_rate", c.dynamics.drift_rate);
  r.read("initial_polarization", c.initial_polarization);
  r.read("initial_engagement", c.initial_engagement);
  if (r.has("posts_per_day")) {
    ObjectReader p(r.raw("posts_per_day"), "posts_per_day");
    p.read("min", c.caps.min);
    p.read("max", c.caps.max);
    p.finish();
  }
  if (r.has("selection_k")) {
    int k = 0;
    r.read("selection_k", k);
    c.selection_k = k;
  }
  if (r.has("backend")) {
    const json& v = r.raw("backend");
    if (!v.is_string()) throw ConfigError("backend", "expected a string");
    auto b = backend_from_string(v.get<std::string>());
    if (!b) throw ConfigError("backend", "expected deterministic, llm or replay");
    c.backend = *b;
  }
  if (r.has("source_mix")) {
    ObjectReader m(r.raw("source_mix"), "source_mix");
    m.read("friends", c.source_mix.friends);
    m.read("trending", c.source_mix.trending);
    m.read("imposed", c.source_mix.imposed);
    m.finish();
  }
  r.read("oversample_factor", c.oversample_factor);
  r.read("balance_ratio", c.balance_ratio);
  if (r.has("affinity_weights")) {
    ObjectReader w(r.raw("affinity_weights"), "affinity_weights");
    w.read("stance", c.weights.stance);
    w.read("interest", c.weights.interest);
    w.finish();
  }
  r.read("trending_threshold", c.content.trending_threshold);
  r.read("feed_window_days", c.content.feed_window_days);
  r.read("max_comments_per_post", c.content.max_comments_per_post);
  r.read("promoted_per_day", c.promoted_per_day);
  r.read("threads", c.threads);
  r.read("fixtures_dir", c.fixtures_dir);
  if (r.has("calibration")) {
    ObjectReader k(r.raw("calibration"), "calibration");
    auto& cal = c.calibration;
    k.read("engage_base", cal.engage_base);
    k.read("engage_affinity", cal.engage_affinity);
    k.read("engage_extraversion", cal.engage_extraversion);
    k.read("engage_emotive", cal.engage_emotive);
    k.read("engage_min", cal.engage_min);
    k.read("engage_max", cal.engage_max);
    k.read("love_threshold", cal.love_threshold);
    k.read("care_threshold", cal.care_threshold);
    k.read("neutral_band", cal.neutral_band);
    k.read("care_min_cognitive_style", cal.care_min_cognitive_style);
    k.read("angry_min_emotive", cal.angry_min_emotive);
    k.read("comment_factor", cal.comment_factor);
    k.read("read_comments_probability", cal.read_comments_probability);
    k.read("share_min_agreeableness", cal.share_min_agreeableness);
    k.read("friend_request_min_connectivity", cal.friend_request_min_connectivity);
    k.finish();
  }
  if (r.has("llm")) {
    ObjectReader l(r.raw("llm"), "llm");
    l.read("endpoint", c.llm.endpoint);
    l.read("model", c.llm.options.model);
    l.read("max_retries", c.llm.options.max_retries);
    l.read("max_in_flight", c.llm.options.max_in_flight);
    l.read("cassette_dir", c.llm.cassette_dir);
    l.read("templates_dir", c.llm.templates_dir);
    l.read("timeout_seconds", c.llm.timeout_seconds);
    l.finish();
  }
  if (r.has("output")) {
    ObjectReader o(r.raw("output"), "output");
    o.read("dir", c.output.dir);
    o.read("transcript", c.output.transcript);
    o.read("series", c.output.series);
    o.finish();
  }
  r.finish();
  if (c.backend == BackendKind::Replay && c.llm.cassette_dir.empty()) {
    c.llm.cassette_dir = (std::filesystem::path(c.fixtures_dir) / "cassettes").string();
  }
  validate(c);
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["scenario"] = to_string(c.scenario);
  j["days"] = c.days;
  j["seed"] = c.seed;
  ordered_json pop;
  switch (c.population.kind) {
    case PopulationSource::Kind::Fixture: pop["source"] = "fixture"; break;
    case PopulationSource::Kind::Generated: pop["source"] = "generated"; break;
    case PopulationSource::Kind::File: pop["source"] = "file"; break;
  }
  pop["n"] = c.population.n;
  pop["seed"] = c.population.seed;
  pop["path"] = c.population.path;
  pop["profiles"] = c.population.profiles;
  j["population"] = pop;
  j["alpha"] = c.dynamics.alpha;
  j["beta"] = c.dynamics.beta;
  j["drift_rate"] = c.dynamics.drift_rate;
  j["initial_polarization"] = c.initial_polarization;
  j["initial_engagement"] = c.initial_engagement;
  j["posts_per_day"] = {{"min", c.caps.min}, {"max", c.caps.max}};
  j["selection_k"] = c.selection_k ? ordered_json(*c.selection_k) : ordered_json(nullptr);
  j["backend"] = to_string(c.backend);
  j["source_mix"] = {{"friends", c.source_mix.friends},
                     {"trending", c.source_mix.trending},
                     {"imposed", c.source_mix.imposed}};
  j["oversample_factor"] = c.oversample_factor;
  j["balance_ratio"] = c.balance_ratio;
  j["affinity_weights"] = {{"stance", c.weights.stance}, {"interest", c.weights.interest}};
  j["trending_threshold"] = c.content.trending_threshold;
  j["feed_window_days"] = c.content.feed_window_days;
  j["max_comments_per_post"] = c.content.max_comments_per_post;
  j["promoted_per_day"] = c.promoted_per_day;
  j["threads"] = c.threads;
  j["fixtures_dir"] = c.fixtures_dir;
  const auto& k = c.calibration;
  j["calibration"] = {{"engage_base", k.engage_base},
                      {"engage_affinity", k.engage_affinity},
                      {"engage_extraversion", k.engage_extraversion},
                      {"engage_emotive", k.engage_emotive},
                      {"engage_min", k.engage_min},
                      {"engage_max", k.engage_max},
                      {"love_threshold", k.love_threshold},
                      {"care_threshold", k.care_threshold},
                      {"neutral_band", k.neutral_band},
                      {"care_min_cognitive_style", k.care_min_cognitive_style},
                      {"angry_min_emotive", k.angry_min_emotive},
                      {"comment_factor", k.comment_factor},
                      {"read_comments_probability", k.read_comments_probability},
                      {"share_min_agreeableness", k.share_min_agreeableness},
                      {"friend_request_min_connectivity", k.friend_request_min_connectivity}};
  j["llm"] = {{"endpoint", c.llm.endpoint},
              {"model", c.llm.options.model},
              {"max_retries", c.llm.options.max_retries},
              {"max_in_flight", c.llm.options.max_in_flight},
              {"cassette_dir", c.llm.cassette_dir},
              {"templates_dir", c.llm.templates_dir},
              {"timeout_seconds", c.llm.timeout_seconds}};
  j["output"] = {{"dir", c.output.dir}, {"transcript", c.output.transcript}, {"series", c.output.series}};
  return j;
}

}  // namespace recsim
