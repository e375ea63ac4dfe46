#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "recsim/decision.hpp"

namespace recsim {

struct ChatMessage {
  std::string role;  // "system" | "user"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;

  bool operator==(const ChatRequest&) const = default;
};

/// Request body in chat-completions form: {"model": ..., "messages": [...]}.
nlohmann::ordered_json to_wire(const ChatRequest& request);

/// Extracts choices[0].message.content from a chat-completions response body.
/// Throws TransportError when the body does not have that shape.
std::string completion_text(std::string_view response_body);

/// Stable content hash (SHA-256, hex) of the canonical request JSON.
std::string request_key(const ChatRequest& request);

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct HttpEndpoint {
  std::string url = "https://api.openai.com/v1/chat/completions";
  std::string api_key;
  std::chrono::seconds timeout{60};
};

/// Parses "scheme://host[:port]/path". Throws ConfigError on anything else.
struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;
};
ParsedUrl parse_url(const std::string& url);

/// POSTs chat-completions requests over HTTP(S). HTTP 429 raises RateLimited
/// with the Retry-After header, other failures TransportError.
class HttpChatTransport final : public ChatTransport {
 public:
  explicit HttpChatTransport(HttpEndpoint endpoint);
  std::string complete(const ChatRequest& request) override;

 private:
  HttpEndpoint endpoint_;
  ParsedUrl url_;
};

/// Directory of `<key>.json` files, one stored completion per rendered prompt.
class CassetteStore {
 public:
  explicit CassetteStore(std::filesystem::path dir);

  std::optional<std::string> lookup(const ChatRequest& request) const;
  void store(const ChatRequest& request, const std::string& completion) const;
  std::size_t size() const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// Serves completions from a cassette store only; a miss throws CassetteMiss
/// and no network is ever touched.
class ReplayTransport final : public ChatTransport {
 public:
  explicit ReplayTransport(CassetteStore store) : store_(std::move(store)) {}
  std::string complete(const ChatRequest& request) override;

 private:
  CassetteStore store_;
};

/// Forwards to a live transport and records every completion.
class RecordingTransport final : public ChatTransport {
 public:
  RecordingTransport(std::unique_ptr<ChatTransport> inner, CassetteStore store)
      : inner_(std::move(inner)), store_(std::move(store)) {}
  std::string complete(const ChatRequest& request) override;

 private:
  std::unique_ptr<ChatTransport> inner_;
  CassetteStore store_;
};

/// Prompt text with {{placeholder}} slots. Lines starting with '#' in a
/// template file are header comments and are dropped.
struct PromptTemplates {
  std::string system;       // profile description
  std::string reaction;     // one post plus the option list
  std::string self_report;  // post-session pa/sc/er question

  static PromptTemplates defaults();
  /// Reads system.txt, reaction.txt and self_report.txt from `dir`.
  static PromptTemplates load(const std::filesystem::path& dir);
};

std::string render_template(std::string_view tmpl, const std::vector<std::pair<std::string, std::string>>& values);

/// Profile description used as the system message.
std::string describe_profile(const AgentPrompt& agent, const PromptTemplates& templates);

ChatRequest reaction_request(const AgentPrompt& agent, const Post& post, const PromptTemplates& templates,
                             const std::string& model);
ChatRequest self_report_request(const AgentPrompt& agent, const SessionSummary& session,
                                const PromptTemplates& templates, const std::string& model);

struct LlmOptions {
  std::string model = "gpt-4o";
  unsigned max_retries = 2;    // extra attempts after an unparsable reply
  unsigned max_in_flight = 4;

  bool operator==(const LlmOptions&) const = default;
};

/// Decision backend that asks a chat model for each reaction, one request per
/// (agent, post). The rng argument of decide() is unused.
class LlmBackend final : public DecisionBackend {
 public:
  LlmBackend(std::shared_ptr<ChatTransport> transport, PromptTemplates templates, LlmOptions options = {});

  InteractionOutcome decide(const AgentPrompt& agent, const Post& post, const ExposureContext& context,
                            Rng& rng) override;
  std::optional<DynamicTraits> report_trait_deltas(const AgentPrompt& agent, const SessionSummary& session) override;

  unsigned max_concurrency() const override { return options_.max_in_flight; }
  std::string_view name() const override { return "llm"; }

  std::size_t request_count() const;

 private:
  std::string ask(const ChatRequest& request);

  std::shared_ptr<ChatTransport> transport_;
  PromptTemplates templates_;
  LlmOptions options_;
  mutable std::mutex mu_;
  std::size_t requests_ = 0;
};

}  // namespace recsim
