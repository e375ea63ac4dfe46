#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "recsim/error.hpp"
#include "recsim/llm.hpp"
#include "support.hpp"

using namespace recsim;

namespace {

class Scripted final : public ChatTransport {
 public:
  explicit Scripted(std::string reply) : reply_(std::move(reply)) {}
  std::string complete(const ChatRequest& request) override {
    last = request;
    ++calls;
    return reply_;
  }
  ChatRequest last;
  int calls = 0;

 private:
  std::string reply_;
};

ChatRequest sample_request(std::string text = "hello") {
  return ChatRequest{"test-model", {{"system", "You are Tester."}, {"user", std::move(text)}}};
}

class LocalServer {
 public:
  LocalServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      auth = req.get_header_value("Authorization");
      body = req.body;
      const auto doc = nlohmann::json::parse(req.body);
      const std::string user = doc["messages"].back()["content"];
      if (user == "busy") {
        res.status = 429;
        res.set_header("Retry-After", "7");
        return;
      }
      if (user == "broken") {
        res.status = 500;
        res.set_content("boom", "text/plain");
        return;
      }
      if (user == "garbled") {
        res.set_content("{\"choices\": []}", "application/json");
        return;
      }
      nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "Like + share"}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  std::string auth;
  std::string body;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_SUITE("llm") {

TEST_CASE("wire format and request keys") {
  const auto wire = to_wire(sample_request());
  CHECK(wire.dump() ==
        R"({"model":"test-model","messages":[{"role":"system","content":"You are Tester."},{"role":"user","content":"hello"}]})");
  const auto key = request_key(sample_request());
  CHECK(key.size() == 64);
  CHECK(key == request_key(sample_request()));
  CHECK(key != request_key(sample_request("hello!")));
}

TEST_CASE("completion text extraction") {
  CHECK(completion_text(R"({"choices":[{"message":{"role":"assistant","content":"Wow"}}]})") == "Wow");
  CHECK_THROWS_AS(completion_text("{}"), TransportError);
  CHECK_THROWS_AS(completion_text("not json"), TransportError);
}

TEST_CASE("endpoint urls") {
  const auto u = parse_url("http://localhost:8080/v1/chat");
  CHECK(u.scheme == "http");
  CHECK(u.host == "localhost");
  CHECK(u.port == 8080);
  CHECK(u.path == "/v1/chat");
  CHECK(parse_url("https://api.example.com").port == 443);
  CHECK(parse_url("https://api.example.com").path == "/");
  CHECK_THROWS_AS(parse_url("api.example.com/v1"), ConfigError);
  CHECK_THROWS_AS(parse_url("ftp://host/x"), ConfigError);
  CHECK_THROWS_AS(parse_url("http://host:abc/x"), ConfigError);
}

TEST_CASE("http transport against a local server") {
  LocalServer server;
  HttpChatTransport http(HttpEndpoint{server.url(), "sk-test", std::chrono::seconds(5)});

  CHECK(http.complete(sample_request()) == "Like + share");
  CHECK(server.auth == "Bearer sk-test");
  CHECK(nlohmann::json::parse(server.body)["model"] == "test-model");

  try {
    http.complete(sample_request("busy"));
    FAIL("expected RateLimited");
  } catch (const RateLimited& e) {
    CHECK(e.retry_after() == 7.0);
  }
  CHECK_THROWS_AS(http.complete(sample_request("broken")), TransportError);
  CHECK_THROWS_AS(http.complete(sample_request("garbled")), TransportError);
}

TEST_CASE("unreachable endpoint is a transport error") {
  HttpChatTransport http(HttpEndpoint{"http://127.0.0.1:1/v1", "", std::chrono::seconds(2)});
  CHECK_THROWS_AS(http.complete(sample_request()), TransportError);
}

TEST_CASE("record then replay") {
  testing::TempDir dir("cassettes");
  auto inner = std::make_unique<Scripted>("Care + read comments");
  RecordingTransport recorder(std::move(inner), CassetteStore(dir.path()));
  CHECK(recorder.complete(sample_request()) == "Care + read comments");

  CassetteStore store(dir.path());
  CHECK(store.size() == 1);
  CHECK(store.lookup(sample_request()) == "Care + read comments");

  ReplayTransport replay(store);
  CHECK(replay.complete(sample_request()) == "Care + read comments");
  try {
    replay.complete(sample_request("never recorded"));
    FAIL("expected CassetteMiss");
  } catch (const CassetteMiss& e) {
    CHECK(e.key() == request_key(sample_request("never recorded")));
  }
}

TEST_CASE("templates") {
  CHECK(render_template("{{a}} and {{b}}, {{a}}", {{"a", "x"}, {"b", "y"}}) == "x and y, x");
  const auto defaults = PromptTemplates::defaults();
  const auto loaded = PromptTemplates::load(testing::fixtures() / "templates");
  CHECK(loaded.system == defaults.system);
  CHECK(loaded.reaction == defaults.reaction);
  CHECK(loaded.self_report == defaults.self_report);
  CHECK_THROWS(PromptTemplates::load(testing::fixtures() / "no-such-dir"));

  const auto anna = testing::agent("anna", 3.0, {"art", "painting"});
  const auto text = describe_profile(anna, defaults);
  CHECK(text.find("Tester") != std::string::npos);
  CHECK(text.find("art, painting") != std::string::npos);
  CHECK(text.find("{{") == std::string::npos);

  const auto req = reaction_request(anna, testing::post("p1", 2.0, {"art"}), defaults, "m");
  REQUIRE(req.messages.size() == 2);
  CHECK(req.messages[0].content == text);
  CHECK(req.messages[1].content.find("text of p1") != std::string::npos);
}

TEST_CASE("llm backend decisions") {
  const auto agent = testing::agent("anna", 3.0, {"art"});
  auto post = testing::post("p1", 2.0, {"art"});
  Rng rng(1);

  auto love = std::make_shared<Scripted>("Love + comment: 'Beautiful initiative!'");
  LlmBackend backend(love, PromptTemplates::defaults());
  const auto o = backend.decide(agent, post, ExposureContext{1, SourceKind::Imposed}, rng);
  CHECK(o.reaction == ReactionKind::Love);
  CHECK(o.comment == "Beautiful initiative!");
  CHECK(backend.request_count() == 1);
  CHECK(love->last == reaction_request(agent, post, PromptTemplates::defaults(), "gpt-4o"));

  auto nothing = std::make_shared<Scripted>("nothing");
  LlmBackend quiet(nothing, PromptTemplates::defaults());
  CHECK(quiet.decide(agent, post, ExposureContext{1, SourceKind::Friend}, rng) == InteractionOutcome{});

  auto meh = std::make_shared<Scripted>("Meh");
  LlmBackend confused(meh, PromptTemplates::defaults(), LlmOptions{"m", 2, 1});
  CHECK_THROWS_AS(confused.decide(agent, post, ExposureContext{1, SourceKind::Imposed}, rng), ParseError);
  CHECK(meh->calls == 3);

  auto befriend = std::make_shared<Scripted>("Like + friend request");
  LlmBackend eager(befriend, PromptTemplates::defaults());
  CHECK_FALSE(eager.decide(agent, post, ExposureContext{1, SourceKind::Trending}, rng).friend_requested);
  post.author_id = "bob";
  CHECK(eager.decide(agent, post, ExposureContext{1, SourceKind::Trending}, rng).friend_requested);
  CHECK_FALSE(eager.decide(agent, post, ExposureContext{1, SourceKind::Imposed}, rng).friend_requested);
}

TEST_CASE("llm backend self reports") {
  const auto agent = testing::agent("anna", 3.0, {"art"});
  auto report = std::make_shared<Scripted>("pa: 9, sc: 7, er: 7");
  LlmBackend backend(report, PromptTemplates::defaults());
  const auto t = backend.report_trait_deltas(agent, SessionSummary{});
  REQUIRE(t.has_value());
  CHECK(*t == DynamicTraits{7.0, 7.0, 7.0});

  auto vague = std::make_shared<Scripted>("I feel fine");
  LlmBackend unhelpful(vague, PromptTemplates::defaults(), LlmOptions{"m", 1, 1});
  CHECK_THROWS_AS(unhelpful.report_trait_deltas(agent, SessionSummary{}), ParseError);
  CHECK(vague->calls == 2);
}

TEST_CASE("stored fixture completions all parse") {
  const auto dir = testing::fixtures() / "cassettes";
  CassetteStore store(dir);
  REQUIRE(store.size() >= 20);
  std::size_t reactions = 0, reports = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto doc = nlohmann::json::parse(std::ifstream(entry.path()));
    const std::string completion = doc["completion"];
    ChatRequest req;
    req.model = doc["request"]["model"];
    for (const auto& m : doc["request"]["messages"]) req.messages.push_back({m["role"], m["content"]});
    CHECK(doc["key"] == request_key(req));
    CHECK(entry.path().stem() == request_key(req));
    if (completion.rfind("pa:", 0) == 0) {
      CHECK_NOTHROW(parse_trait_report(completion));
      ++reports;
    } else {
      const auto o = parse_completion(completion);
      CHECK(render_completion(o) == completion);
      ++reactions;
    }
  }
  CHECK(reactions >= 20);
  CHECK(reports > 0);
}

}
