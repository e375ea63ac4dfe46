#include "recsim/llm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "recsim/error.hpp"
#include "recsim/io.hpp"

namespace recsim {

namespace fs = std::filesystem;

nlohmann::ordered_json to_wire(const ChatRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model;
  body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : request.messages) {
    nlohmann::ordered_json msg;
    msg["role"] = m.role;
    msg["content"] = m.content;
    body["messages"].push_back(std::move(msg));
  }
  return body;
}

std::string completion_text(std::string_view response_body) {
  try {
    const auto doc = nlohmann::json::parse(response_body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat-completions response: ") + e.what());
  }
}

std::string request_key(const ChatRequest& request) {
  const std::string canonical = to_wire(request).dump();
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("decision", "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

// --- HTTP -------------------------------------------------------------------

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl out;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("llm.endpoint", "missing scheme in '" + url + "'");
  out.scheme = url.substr(0, scheme_end);
  if (out.scheme != "http" && out.scheme != "https") {
    throw ConfigError("llm.endpoint", "unsupported scheme '" + out.scheme + "'");
  }
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  std::string authority = url.substr(host_start, path_start == std::string::npos ? std::string::npos : path_start - host_start);
  out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  out.port = out.scheme == "https" ? 443 : 80;
  if (const auto colon = authority.rfind(':'); colon != std::string::npos) {
    try {
      out.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("llm.endpoint", "bad port in '" + url + "'");
    }
    authority.resize(colon);
  }
  if (authority.empty()) throw ConfigError("llm.endpoint", "missing host in '" + url + "'");
  out.host = authority;
  return out;
}

HttpChatTransport::HttpChatTransport(HttpEndpoint endpoint)
    : endpoint_(std::move(endpoint)), url_(parse_url(endpoint_.url)) {}

std::string HttpChatTransport::complete(const ChatRequest& request) {
  httplib::Client client(url_.scheme + "://" + url_.host + ":" + std::to_string(url_.port));
  const auto secs = static_cast<time_t>(endpoint_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  if (!endpoint_.api_key.empty()) client.set_bearer_token_auth(endpoint_.api_key);

  auto res = client.Post(url_.path, to_wire(request).dump(), "application/json");
  if (!res) throw TransportError("request to " + endpoint_.url + " failed: " + httplib::to_string(res.error()));
  if (res->status == 429) {
    double retry_after = 1.0;
    if (res->has_header("Retry-After")) {
      try {
        retry_after = std::stod(res->get_header_value("Retry-After"));
      } catch (const std::exception&) {
      }
    }
    throw RateLimited(retry_after);
  }
  if (res->status != 200) {
    throw TransportError("HTTP " + std::to_string(res->status) + " from " + endpoint_.url + ": " +
                         res->body.substr(0, 200));
  }
  return completion_text(res->body);
}

// --- cassettes ----------------------------------------------------------------

CassetteStore::CassetteStore(fs::path dir) : dir_(std::move(dir)) {}

std::optional<std::string> CassetteStore::lookup(const ChatRequest& request) const {
  const fs::path file = dir_ / (request_key(request) + ".json");
  std::error_code ec;
  if (!fs::exists(file, ec)) return std::nullopt;
  const auto doc = read_json_fixture(file, "decision");
  try {
    return doc.at("completion").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FixtureCorrupt("decision", file.string() + ": " + e.what());
  }
}

void CassetteStore::store(const ChatRequest& request, const std::string& completion) const {
  nlohmann::ordered_json doc;
  doc["key"] = request_key(request);
  doc["request"] = to_wire(request);
  doc["completion"] = completion;
  write_file_atomic(dir_ / (doc["key"].get<std::string>() + ".json"), doc.dump(2) + "\n");
}

std::size_t CassetteStore::size() const {
  std::error_code ec;
  if (!fs::is_directory(dir_, ec)) return 0;
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() == ".json") ++n;
  }
  return n;
}

std::string ReplayTransport::complete(const ChatRequest& request) {
  if (auto hit = store_.lookup(request)) return *hit;
  throw CassetteMiss(request_key(request), store_.dir().string());
}

std::string RecordingTransport::complete(const ChatRequest& request) {
  std::string text = inner_->complete(request);
  store_.store(request, text);
  return text;
}

// --- prompts ------------------------------------------------------------------

namespace {

constexpr const char* kDefaultSystem =
    "You are {{nickname}}, a user of a social network.\n"
    "Bio: {{bio}}\n"
    "Interests: {{interests}}\n"
    "Personality (1 very low .. 7 very high): openness {{o}} ({{o_text}}), conscientiousness {{c}} ({{c_text}}), "
    "extraversion {{e}} ({{e_text}}), agreeableness {{a}} ({{a_text}}), neuroticism {{n}} ({{n_text}}).\n"
    "Cognitive style {{cs}} on a scale from 1 (very analytical) to 7 (very emotional).\n"
    "Open-mindedness {{om}} on a scale from 1 (very closed-minded) to 7 (very open-minded).\n"
    "Political attitude {{pa}} on a scale from 1 (extremely liberal) to 7 (extremely conservative).\n"
    "Social connectivity {{sc}} and emotive reaction {{er}}, each from 1 (very low) to 7 (very high).\n"
    "Stay in character and react the way this person would.";

constexpr const char* kDefaultReaction =
    "This post appears in your feed:\n\n{{post_text}}\n\n"
    "React by either doing nothing or choosing one reaction: {{options}}.\n"
    "If you react you may also add 'read comments', 'comment: \"<your comment>\"', 'share' or "
    "'friend request' (to the post's author), joined with ' + '.\n"
    "Answer with 'nothing' or e.g. 'Love + comment: \"Great point\" + share'.";

constexpr const char* kDefaultSelfReport =
    "You just finished browsing {{consumed}} posts. Your reactions: {{reaction_summary}}; "
    "comments {{comments}}, shares {{shares}}, friend requests {{friend_requests}}.\n"
    "Your dynamic dimensions before the session were pa {{pa}}, sc {{sc}}, er {{er}}.\n"
    "Report your dimensions now, exactly as 'pa: <1-7>, sc: <1-7>, er: <1-7>'.";

std::string strip_header(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string out;
  bool body = false;
  while (std::getline(in, line)) {
    if (!body && !line.empty() && line.front() == '#') continue;
    body = true;
    out += line;
    out += '\n';
  }
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

const char* level_text(int v) {
  static constexpr const char* kLevels[] = {"very low", "low", "somewhat low", "moderate",
                                            "somewhat high", "high", "very high"};
  return kLevels[std::clamp(v, 1, 7) - 1];
}

std::string fmt(double v) {
  char buf[32];
  if (v == std::floor(v)) {
    std::snprintf(buf, sizeof buf, "%d", static_cast<int>(v));
  } else {
    std::snprintf(buf, sizeof buf, "%.1f", v);
  }
  return buf;
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

PromptTemplates PromptTemplates::defaults() { return PromptTemplates{kDefaultSystem, kDefaultReaction, kDefaultSelfReport}; }

PromptTemplates PromptTemplates::load(const fs::path& dir) {
  auto read = [&](const char* name) {
    try {
      return strip_header(read_text_file(dir / name));
    } catch (const std::runtime_error& e) {
      throw FixtureCorrupt("decision", std::string("prompt template: ") + e.what());
    }
  };
  return PromptTemplates{read("system.txt"), read("reaction.txt"), read("self_report.txt")};
}

std::string render_template(std::string_view tmpl, const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const auto open = tmpl.find("{{", i);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(i));
      break;
    }
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out.append(tmpl.substr(i));
      break;
    }
    out.append(tmpl.substr(i, open - i));
    const std::string_view key = tmpl.substr(open + 2, close - open - 2);
    bool found = false;
    for (const auto& [k, v] : values) {
      if (k == key) {
        out += v;
        found = true;
        break;
      }
    }
    if (!found) throw FixtureCorrupt("decision", "unknown template placeholder '" + std::string(key) + "'");
    i = close + 2;
  }
  return out;
}

std::string describe_profile(const AgentPrompt& agent, const PromptTemplates& templates) {
  const auto& s = agent.statics;
  const auto& d = agent.dynamics;
  return render_template(templates.system, {
                                               {"nickname", agent.nickname},
                                               {"bio", agent.bio},
                                               {"interests", join(agent.interests, ", ")},
                                               {"o", std::to_string(s.openness)},
                                               {"o_text", level_text(s.openness)},
                                               {"c", std::to_string(s.conscientiousness)},
                                               {"c_text", level_text(s.conscientiousness)},
                                               {"e", std::to_string(s.extraversion)},
                                               {"e_text", level_text(s.extraversion)},
                                               {"a", std::to_string(s.agreeableness)},
                                               {"a_text", level_text(s.agreeableness)},
                                               {"n", std::to_string(s.neuroticism)},
                                               {"n_text", level_text(s.neuroticism)},
                                               {"cs", std::to_string(s.cognitive_style)},
                                               {"om", std::to_string(s.open_mindedness)},
                                               {"pa", fmt(d.political_attitude)},
                                               {"sc", fmt(d.social_connectivity)},
                                               {"er", fmt(d.emotive_reaction)},
                                           });
}

ChatRequest reaction_request(const AgentPrompt& agent, const Post& post, const PromptTemplates& templates,
                             const std::string& model) {
  ChatRequest req;
  req.model = model;
  req.messages.push_back({"system", describe_profile(agent, templates)});
  req.messages.push_back(
      {"user", render_template(templates.reaction,
                               {{"post_text", post.text}, {"options", "Like, Love, Care, Haha, Wow, Angry, Sad"}})});
  return req;
}

ChatRequest self_report_request(const AgentPrompt& agent, const SessionSummary& session,
                                const PromptTemplates& templates, const std::string& model) {
  std::vector<std::string> parts;
  for (ReactionKind r : kAllReactions) {
    const auto n = session.reactions[static_cast<std::size_t>(r)];
    if (r != ReactionKind::None && n > 0) parts.push_back(std::string(to_string(r)) + " " + std::to_string(n));
  }
  ChatRequest req;
  req.model = model;
  req.messages.push_back({"system", describe_profile(agent, templates)});
  req.messages.push_back({"user", render_template(templates.self_report,
                                                  {{"consumed", std::to_string(session.consumed)},
                                                   {"reaction_summary", parts.empty() ? "none" : join(parts, ", ")},
                                                   {"comments", std::to_string(session.comments)},
                                                   {"shares", std::to_string(session.shares)},
                                                   {"friend_requests", std::to_string(session.friend_requests)},
                                                   {"pa", fmt(agent.dynamics.political_attitude)},
                                                   {"sc", fmt(agent.dynamics.social_connectivity)},
                                                   {"er", fmt(agent.dynamics.emotive_reaction)}})});
  return req;
}

// --- backend ------------------------------------------------------------------

LlmBackend::LlmBackend(std::shared_ptr<ChatTransport> transport, PromptTemplates templates, LlmOptions options)
    : transport_(std::move(transport)), templates_(std::move(templates)), options_(std::move(options)) {
  if (!transport_) throw ConfigError("llm", "no transport configured");
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

std::string LlmBackend::ask(const ChatRequest& request) {
  {
    std::lock_guard lock(mu_);
    ++requests_;
  }
  return transport_->complete(request);
}

std::size_t LlmBackend::request_count() const {
  std::lock_guard lock(mu_);
  return requests_;
}

InteractionOutcome LlmBackend::decide(const AgentPrompt& agent, const Post& post, const ExposureContext& context,
                                      Rng& /*rng*/) {
  const ChatRequest request = reaction_request(agent, post, templates_, options_.model);
  for (unsigned attempt = 0;; ++attempt) {
    const std::string reply = ask(request);
    try {
      InteractionOutcome out = parse_completion(reply);
      if (!post.author_id || context.channel == SourceKind::Imposed) out.friend_requested = false;
      return out;
    } catch (const ParseError&) {
      if (attempt >= options_.max_retries) throw;
    }
  }
}

std::optional<DynamicTraits> LlmBackend::report_trait_deltas(const AgentPrompt& agent, const SessionSummary& session) {
  const ChatRequest request = self_report_request(agent, session, templates_, options_.model);
  for (unsigned attempt = 0;; ++attempt) {
    const std::string reply = ask(request);
    try {
      return parse_trait_report(reply);
    } catch (const ParseError&) {
      if (attempt >= options_.max_retries) throw;
    }
  }
}

}  // namespace recsim
