#include "recsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "recsim/dynamics.hpp"
#include "recsim/io.hpp"
#include "recsim/llm.hpp"
#include "recsim/recommender.hpp"
#include "recsim/rng.hpp"

namespace recsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void insert_sorted(std::vector<AgentHandle>& v, AgentHandle h) {
  const auto it = std::lower_bound(v.begin(), v.end(), h);
  if (it == v.end() || *it != h) v.insert(it, h);
}

void add_into(ReactionTally& into, const ReactionTally& from) {
  for (std::size_t i = 0; i < into.reactions.size(); ++i) into.reactions[i] += from.reactions[i];
  into.comments += from.comments;
  into.shares += from.shares;
  into.friend_requests += from.friend_requests;
}

struct OwnPost {
  std::string text;
  double stance = 4.0;
  std::vector<std::string> tags;
};

/// What one agent intends to do today, computed against the frozen state.
struct AgentDay {
  bool idle = false;
  double impact = kNaN;
  double polarization = 0.0;
  double engagement = 0.0;
  DynamicTraits traits;
  std::vector<PostIndex> consumed;  // ascending post id
  std::vector<SourceKind> channels;
  std::vector<InteractionOutcome> outcomes;
  std::vector<AgentHandle> requests;
  std::optional<OwnPost> post;
  ReactionTally tally;
};

AgentDay plan_agent(const SimulationState& s, AgentHandle self, int day, const RunConfig& config,
                    DecisionBackend& backend) {
  const AgentPrompt& agent = s.agents[self];
  AgentDay out;
  out.tally.profile_id = agent.id;
  out.tally.scenario = config.scenario;
  out.polarization = agent.polarization;
  out.engagement = agent.engagement;
  out.traits = agent.dynamics;

  CandidateOptions opts;
  opts.mix = config.source_mix;
  opts.oversample_factor = config.oversample_factor;
  opts.caps = config.caps;
  std::vector<Candidate> candidates;
  try {
    candidates = daily_candidates(s.pool, agent, day, s.seed, opts, s.seen[self]);
  } catch (const EmptyPool&) {
    out.idle = true;
    return out;
  }

  std::vector<RankedItem> items;
  items.reserve(candidates.size());
  const std::uint64_t interests = s.pool.interest_mask(agent.interests);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Post& p = s.pool.post(candidates[i].index);
    const auto mask = s.pool.tag_mask(candidates[i].index);
    const double overlap = mask ? static_cast<double>(std::popcount(*mask & interests)) / static_cast<double>(p.tags.size())
                                : tag_overlap(p.tags, agent.interests);
    items.push_back(RankedItem{affinity(agent.dynamics.political_attitude, p.stance, overlap, config.weights), p.id, i});
  }
  const std::size_t want = config.selection_k ? static_cast<std::size_t>(*config.selection_k)
                                              : static_cast<std::size_t>(posts_per_day(agent, config.caps));
  auto chosen = select_ranked(config.scenario, std::move(items), std::min(want, candidates.size()),
                              config.balance_ratio);

  std::vector<double> affinities;
  affinities.reserve(chosen.size());
  for (const auto& c : chosen) affinities.push_back(c.affinity);
  out.impact = mean_affinity(affinities);

  std::sort(chosen.begin(), chosen.end(), [](const RankedItem& a, const RankedItem& b) { return a.id < b.id; });
  const std::uint64_t agent_key = hash_bytes(agent.id);
  SessionSummary session;
  std::vector<double> stances;
  ReactionSummary summary;
  for (const auto& c : chosen) {
    const Candidate& cand = candidates[c.slot];
    const Post& post = s.pool.post(cand.index);
    Rng rng(stream_seed(s.seed, "decide", {agent_key, static_cast<std::uint64_t>(day), hash_bytes(post.id)}));
    InteractionOutcome o = backend.decide(agent, post, ExposureContext{day, cand.channel}, rng);
    if (o.reaction == ReactionKind::None) o = InteractionOutcome{};
    if (o.friend_requested && (post.author_handle == kNoAgent || post.author_handle == self)) {
      o.friend_requested = false;
    }
    if (o.friend_requested) out.requests.push_back(post.author_handle);
    stances.push_back(post.stance);
    session.reactions[static_cast<std::size_t>(o.reaction)] += 1;
    if (is_positive(o.reaction)) ++summary.positive;
    if (is_negative(o.reaction)) ++summary.negative;
    if (o.comment) ++session.comments;
    if (o.shared) ++session.shares;
    if (o.friend_requested) ++summary.friend_requests;
    out.tally.add(o);
    out.consumed.push_back(cand.index);
    out.channels.push_back(cand.channel);
    out.outcomes.push_back(std::move(o));
  }
  session.consumed = chosen.size();
  session.friend_requests = summary.friend_requests;
  double stance_sum = 0.0;
  for (double st : stances) stance_sum += st;
  session.mean_stance = stance_sum / static_cast<double>(stances.size());

  out.polarization = update_polarization(agent.polarization, config.dynamics.alpha, out.impact);
  out.engagement = update_engagement(agent.engagement, config.dynamics.beta, agent.activity, out.impact);
  if (auto reported = backend.report_trait_deltas(agent, session)) {
    out.traits = *reported;
  } else {
    out.traits = drift_dynamic_traits(agent, stances, summary, config.dynamics);
  }

  Rng prng(stream_seed(s.seed, "post", {agent_key, static_cast<std::uint64_t>(day)}));
  if (prng.bernoulli(agent.statics.extraversion / 7.0 * agent.activity)) {
    OwnPost p;
    p.stance = std::clamp(agent.dynamics.political_attitude + prng.uniform(-0.5, 0.5), 1.0, 7.0);
    std::vector<std::string> pick = agent.interests;
    const int n = prng.uniform_int(1, static_cast<int>(std::min<std::size_t>(3, pick.size())));
    for (int k = 0; k < n; ++k) {
      const std::size_t j = static_cast<std::size_t>(k) + prng.below(pick.size() - static_cast<std::size_t>(k));
      std::swap(pick[static_cast<std::size_t>(k)], pick[j]);
    }
    pick.resize(static_cast<std::size_t>(n));
    std::sort(pick.begin(), pick.end());
    p.text = "Day " + std::to_string(day) + " thoughts:";
    for (const auto& t : pick) p.text += " #" + t;
    p.tags = std::move(pick);
    out.post = std::move(p);
  }
  return out;
}

unsigned worker_count(const RunConfig& config, const DecisionBackend& backend, std::size_t agents) {
  unsigned n = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min(n, std::max(1u, backend.max_concurrency()));
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, agents)));
}

void add_promoted(SimulationState& s, const RunConfig& config, int day) {
  for (auto& p : promoted_posts(day, s.seed, config.promoted_per_day)) s.pool.add_imposed_post(std::move(p));
}

}  // namespace

void SimulationState::materialize_friends() {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    auto& out = agents[i].friends;
    out.clear();
    for (AgentHandle h : friends[i]) out.push_back(agents[h].id);
    std::sort(out.begin(), out.end());
  }
}

SimulationState make_state(const RunConfig& config, std::vector<AgentPrompt> agents, ContentPool pool) {
  validate(config);
  std::sort(agents.begin(), agents.end(), [](const AgentPrompt& a, const AgentPrompt& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < agents.size(); ++i) {
    if (agents[i].id == agents[i - 1].id) throw RangeError("engine", "agent_id", "duplicate id '" + agents[i].id + "'");
  }
  if (pool.agent_count() != 0) throw RangeError("engine", "pool", "content pool already has registered agents");

  SimulationState s;
  s.seed = config.seed;
  s.friends.resize(agents.size());
  s.seen.resize(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) pool.register_agent(agents[i].id);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (const auto& f : agents[i].friends) {
      const auto h = pool.handle_of(f);
      if (!h || *h == i) continue;
      insert_sorted(s.friends[i], *h);
      insert_sorted(s.friends[*h], static_cast<AgentHandle>(i));
    }
  }
  s.agents = std::move(agents);
  s.pool = std::move(pool);
  s.materialize_friends();
  add_promoted(s, config, 1);
  return s;
}

DayOutput run_day(SimulationState& state, const RunConfig& config, DecisionBackend& backend, bool keep_records) {
  const int day = state.day + 1;
  const std::size_t n = state.agents.size();
  std::vector<AgentDay> plans(n);
  std::vector<std::exception_ptr> errors(n);

  auto work = [&](std::size_t i) {
    try {
      plans[i] = plan_agent(state, static_cast<AgentHandle>(i), day, config, backend);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const unsigned workers = worker_count(config, backend, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      work(i);
      if (errors[i]) break;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; !failed.load(std::memory_order_relaxed) && (i = next.fetch_add(1)) < n;) {
          work(i);
          if (errors[i]) failed = true;
        }
      });
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw DayAborted(day, state.agents[i].id, errors[i], what);
  }

  // Serial apply in ascending id order.
  DayOutput out;
  out.impact.resize(n, kNaN);
  out.tallies.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AgentDay& plan = plans[i];
    AgentPrompt& agent = state.agents[i];
    out.impact[i] = plan.impact;
    if (plan.idle) {
      out.tallies.push_back(std::move(plan.tally));
      continue;
    }
    for (std::size_t j = 0; j < plan.consumed.size(); ++j) {
      const PostIndex idx = plan.consumed[j];
      const InteractionOutcome& o = plan.outcomes[j];
      if (o.reaction != ReactionKind::None) state.pool.record_reaction(idx, o.reaction);
      if (o.comment) state.pool.add_comment(idx, Comment{agent.id, *o.comment, day});
      if (!keep_records) continue;
      TranscriptRecord r;
      r.day = day;
      r.agent_id = agent.id;
      r.post_id = state.pool.post(idx).id;
      r.channel = plan.channels[j];
      r.outcome = o;
      r.impact = plan.impact;
      r.activity = agent.activity;
      r.polarization_prev = agent.polarization;
      r.engagement_prev = agent.engagement;
      r.polarization = plan.polarization;
      r.engagement = plan.engagement;
      out.records.push_back(std::move(r));
    }
    agent.polarization = plan.polarization;
    agent.engagement = plan.engagement;
    agent.dynamics = plan.traits;

    auto& seen = state.seen[i];
    std::vector<PostIndex> add = plan.consumed;
    std::sort(add.begin(), add.end());
    const auto mid = seen.size();
    seen.insert(seen.end(), add.begin(), add.end());
    std::inplace_merge(seen.begin(), seen.begin() + static_cast<std::ptrdiff_t>(mid), seen.end());

    for (AgentHandle h : plan.requests) {
      if (h == i || h >= n) continue;
      insert_sorted(state.friends[i], h);
      insert_sorted(state.friends[h], static_cast<AgentHandle>(i));
    }
    out.tallies.push_back(std::move(plan.tally));
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = plans[i].post;
    if (!p) continue;
    state.pool.add_agent_post(static_cast<AgentHandle>(i), state.agents[i], state.friends[i], std::move(p->text),
                              p->stance, std::move(p->tags), day);
  }

  // Close the day: age out windowed content and stock tomorrow's promotions.
  state.day = day;
  state.pool.expire(day + 1);
  const int oldest = day + 1 - state.pool.config().feed_window_days;
  for (auto& seen : state.seen) {
    std::erase_if(seen, [&](PostIndex idx) {
      const Post& p = state.pool.post(idx);
      return !p.permanent && p.created_day < oldest;
    });
  }
  add_promoted(state, config, day + 1);
  return out;
}

std::vector<AgentPrompt> load_population(const RunConfig& config) {
  std::vector<AgentPrompt> agents;
  switch (config.population.kind) {
    case PopulationSource::Kind::Fixture:
      agents = load_fixture_profiles(config.agents_fixture());
      break;
    case PopulationSource::Kind::Generated:
      agents = generate_population(config.population.n, config.population.seed);
      break;
    case PopulationSource::Kind::File:
      agents = agents_from_json(read_json_fixture(config.population.path, "agents"));
      break;
  }
  if (!config.population.profiles.empty()) {
    std::vector<AgentPrompt> kept;
    for (const auto& id : config.population.profiles) {
      auto it = std::find_if(agents.begin(), agents.end(), [&](const AgentPrompt& a) { return a.id == id; });
      if (it == agents.end()) throw ConfigError("population.profiles", "unknown profile '" + id + "'");
      kept.push_back(*it);
    }
    agents = std::move(kept);
  }
  for (auto& a : agents) {
    a.polarization = config.initial_polarization;
    a.engagement = config.initial_engagement;
  }
  std::sort(agents.begin(), agents.end(), [](const AgentPrompt& a, const AgentPrompt& b) { return a.id < b.id; });
  return agents;
}

ContentPool load_content(const RunConfig& config) { return build_fixture_pool(config.content_fixture(), config.content); }

PromptTemplates templates_for(const RunConfig& config) {
  const std::filesystem::path tdir = config.llm.templates_dir.empty()
                                         ? std::filesystem::path(config.fixtures_dir) / "templates"
                                         : std::filesystem::path(config.llm.templates_dir);
  return std::filesystem::is_directory(tdir) ? PromptTemplates::load(tdir) : PromptTemplates::defaults();
}

std::unique_ptr<DecisionBackend> make_backend(const RunConfig& config) {
  if (config.backend == BackendKind::Deterministic) {
    return std::make_unique<DeterministicBackend>(config.calibration, config.weights);
  }
  PromptTemplates templates = templates_for(config);
  std::shared_ptr<ChatTransport> transport;
  if (config.backend == BackendKind::Replay) {
    transport = std::make_shared<ReplayTransport>(CassetteStore(config.llm.cassette_dir));
  } else {
    const char* key = std::getenv("RECSYS_LLM_API_KEY");
    if (key == nullptr || *key == '\0') throw ConfigError("RECSYS_LLM_API_KEY", "environment variable not set");
    HttpEndpoint endpoint;
    endpoint.url = config.llm.endpoint;
    endpoint.api_key = key;
    endpoint.timeout = std::chrono::seconds(config.llm.timeout_seconds);
    std::unique_ptr<ChatTransport> live = std::make_unique<HttpChatTransport>(endpoint);
    if (!config.llm.cassette_dir.empty()) {
      transport = std::make_shared<RecordingTransport>(std::move(live), CassetteStore(config.llm.cassette_dir));
    } else {
      transport = std::move(live);
    }
  }
  return std::make_unique<LlmBackend>(std::move(transport), std::move(templates), config.llm.options);
}

RunResult run(const RunConfig& config, DecisionBackend& backend, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  validate(config);
  SimulationState state = make_state(config, load_population(config), load_content(config));
  const std::size_t n = state.agents.size();
  const std::size_t initial_posts = state.pool.size();

  RunResult result;
  result.scenario = config.scenario;
  result.initial_agents = state.agents;
  result.tallies.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.tallies[i].profile_id = state.agents[i].id;
    result.tallies[i].scenario = config.scenario;
  }
  ScoreSeries& series = result.series;
  if (options.keep_series) {
    for (const auto& a : state.agents) series.agent_ids.push_back(a.id);
    series.days = config.days;
    const std::size_t cells = static_cast<std::size_t>(config.days + 1) * n;
    series.polarization.resize(cells);
    series.engagement.resize(cells);
    series.impact.resize(cells, kNaN);
    for (std::size_t i = 0; i < n; ++i) {
      series.polarization[i] = state.agents[i].polarization;
      series.engagement[i] = state.agents[i].engagement;
    }
  }

  std::size_t promoted = 0;
  for (int d = 1; d <= config.days; ++d) {
    DayOutput day = run_day(state, config, backend, options.sink != nullptr || options.keep_transcript);
    if (options.sink != nullptr) options.sink->append(day.records);
    if (options.keep_transcript) {
      result.transcript.insert(result.transcript.end(), std::make_move_iterator(day.records.begin()),
                               std::make_move_iterator(day.records.end()));
    }
    for (std::size_t i = 0; i < n; ++i) add_into(result.tallies[i], day.tallies[i]);
    if (options.keep_series) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t at = series.at(d, i);
        series.polarization[at] = state.agents[i].polarization;
        series.engagement[at] = state.agents[i].engagement;
        series.impact[at] = day.impact[i];
      }
    }
    promoted += static_cast<std::size_t>(config.promoted_per_day);
  }
  state.materialize_friends();
  result.posts_created = state.pool.size() - initial_posts - promoted;
  result.final_agents = std::move(state.agents);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ReactionTally ReplicationResult::total(ScenarioKind s) const {
  ReactionTally t;
  t.profile_id = "In total";
  t.scenario = s;
  for (const auto& row : for_scenario(s)) add_into(t, row);
  return t;
}

RunConfig replication_config(const RunConfig& base, ScenarioKind scenario) {
  RunConfig c = base;
  c.scenario = scenario;
  c.days = 1;
  c.population.kind = PopulationSource::Kind::Fixture;
  c.population.profiles.assign(kReplicationProfiles.begin(), kReplicationProfiles.end());
  c.caps = DailyCaps{30, 30};
  c.selection_k = 30;
  c.oversample_factor = 5;
  c.promoted_per_day = 0;
  return c;
}

ReplicationResult replicate_experiment(const RunConfig& base, DecisionBackend& backend) {
  ReplicationResult out;
  for (ScenarioKind s : kAllScenarios) {
    const RunConfig c = replication_config(base, s);
    RunOptions opts;
    opts.keep_transcript = true;
    opts.keep_series = false;
    RunResult r = run(c, backend, opts);
    const auto slot = static_cast<std::size_t>(s);
    for (const char* id : kReplicationProfiles) out.tallies[slot].push_back(tally(r.transcript, id, s));
    out.transcripts[slot] = std::move(r.transcript);
  }
  return out;
}

}  // namespace recsim
