// Writes a cassette directory that lets `recsim replicate --backend replay`
// run without a network. Reaction replies are the deterministic rule's
// outcomes rendered as reply text; self-reports repeat the agent's current
// dimensions. Only the requests the replication actually issues are stored.
#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <memory>
#include <regex>

#include <nlohmann/json.hpp>

#include "recsim/engine.hpp"
#include "recsim/llm.hpp"

namespace {

class ScriptedTransport final : public recsim::ChatTransport {
 public:
  explicit ScriptedTransport(std::map<std::string, std::string> replies) : replies_(std::move(replies)) {}

  std::string complete(const recsim::ChatRequest& request) override {
    if (auto it = replies_.find(recsim::request_key(request)); it != replies_.end()) return it->second;
    static const std::regex before(R"(were pa ([0-9.]+), sc ([0-9.]+), er ([0-9.]+))");
    std::smatch m;
    const std::string& user = request.messages.back().content;
    if (std::regex_search(user, m, before)) return "pa: " + m.str(1) + ", sc: " + m.str(2) + ", er: " + m.str(3);
    throw recsim::TransportError("no scripted reply for request " + recsim::request_key(request));
  }

 private:
  std::map<std::string, std::string> replies_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Author replay cassettes for the replication experiment", "author_cassettes"};
  std::string fixtures = "fixtures";
  std::string out = "fixtures/cassettes";
  std::uint64_t seed = 42;
  app.add_option("--fixtures", fixtures, "Fixture directory");
  app.add_option("--out", out, "Cassette directory");
  app.add_option("--seed", seed, "Seed for the scripted reactions");
  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json doc = {{"scenario", "Similarity"},
                          {"seed", seed},
                          {"fixtures_dir", fixtures},
                          {"backend", "replay"},
                          {"llm", {{"cassette_dir", out}}}};
    const recsim::RunConfig base = recsim::config_from_json(doc);
    const recsim::RunConfig rep = recsim::replication_config(base, recsim::ScenarioKind::Similarity);
    const auto templates = recsim::templates_for(base);
    const auto agents = recsim::load_population(rep);
    const auto pool = recsim::load_content(rep);

    std::map<std::string, std::string> replies;
    for (const auto& agent : agents) {
      for (recsim::PostIndex i = 0; i < static_cast<recsim::PostIndex>(pool.size()); ++i) {
        const recsim::Post& post = pool.post(i);
        recsim::Rng rng(recsim::stream_seed(seed, "cassette", {recsim::hash_bytes(agent.id), recsim::hash_bytes(post.id)}));
        const auto outcome = recsim::decide_deterministic(agent, post, recsim::SourceKind::Imposed, rng,
                                                          base.calibration, base.weights);
        const auto request = recsim::reaction_request(agent, post, templates, base.llm.options.model);
        replies.emplace(recsim::request_key(request), recsim::render_completion(outcome));
      }
    }

    auto transport = std::make_shared<recsim::RecordingTransport>(std::make_unique<ScriptedTransport>(replies),
                                                                  recsim::CassetteStore(out));
    recsim::LlmBackend backend(transport, templates, base.llm.options);
    recsim::replicate_experiment(base, backend);
    std::cout << "recorded " << backend.request_count() << " requests, " << recsim::CassetteStore(out).size()
              << " cassettes in " << out << '\n';
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
