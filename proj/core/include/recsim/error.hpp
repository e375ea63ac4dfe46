#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace recsim {

/// Base of every error raised by the simulator. The message is prefixed with
/// the module that raised it, e.g. "agents: openness out of range".
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// A value lies outside its declared scale. `field()` names the offending field.
class RangeError : public Error {
 public:
  RangeError(std::string module, std::string field, const std::string& detail)
      : Error(std::move(module), field + " out of range (" + detail + ")"),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class EmptyInterests : public Error {
 public:
  explicit EmptyInterests(const std::string& agent_id)
      : Error("agents", "agent '" + agent_id + "' has no interests") {}
};

class FixtureCorrupt : public Error {
 public:
  FixtureCorrupt(std::string module, const std::string& what) : Error(std::move(module), "FixtureCorrupt: " + what) {}
};

class EmptyPool : public Error {
 public:
  explicit EmptyPool(const std::string& agent_id)
      : Error("content", "EmptyPool: no candidate posts for agent '" + agent_id + "'") {}
};

class InsufficientCandidates : public Error {
 public:
  InsufficientCandidates(std::size_t k, std::size_t available)
      : Error("recommender", "InsufficientCandidates: k=" + std::to_string(k) +
                                 " exceeds " + std::to_string(available) + " candidates") {}
};

class EmptySelection : public Error {
 public:
  EmptySelection() : Error("recommender", "EmptySelection: impact of an empty selection") {}
};

class EmptyConsumption : public Error {
 public:
  EmptyConsumption() : Error("dynamics", "EmptyConsumption: drift needs at least one consumed post") {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string text)
      : Error("decision", "ParseError: " + what + " in '" + text + "'"), text_(std::move(text)) {}

  /// The reply text that could not be mapped.
  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what) : Error("decision", "TransportError: " + what) {}
};

class RateLimited : public Error {
 public:
  RateLimited(double retry_after_seconds)
      : Error("decision", "RateLimited: retry after " + std::to_string(retry_after_seconds) + "s"),
        retry_after_(retry_after_seconds) {}

  double retry_after() const noexcept { return retry_after_; }

 private:
  double retry_after_;
};

/// Replay mode looked up a prompt that has no stored completion.
class CassetteMiss : public Error {
 public:
  CassetteMiss(const std::string& key, const std::string& dir)
      : Error("decision", "CassetteMiss: no stored completion " + key + " in " + dir), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& reason)
      : Error("harness", "ConfigError: " + key_path + ": " + reason), key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

class UnknownProfile : public Error {
 public:
  explicit UnknownProfile(const std::string& id) : Error("metrics", "UnknownProfile: " + id) {}
};

}  // namespace recsim
