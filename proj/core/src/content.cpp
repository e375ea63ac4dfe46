#include "recsim/content.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "recsim/error.hpp"
#include "recsim/io.hpp"
#include "recsim/rng.hpp"

namespace recsim {

std::string_view to_string(SourceKind s) noexcept {
  switch (s) {
    case SourceKind::Friend: return "friend";
    case SourceKind::Trending: return "trending";
    case SourceKind::Imposed: return "imposed";
  }
  return "imposed";
}

ContentPool::ContentPool(ContentConfig config) : config_(config) {
  if (config_.feed_window_days < 1) throw RangeError("content", "feed_window_days", "must be >= 1");
}

void ContentPool::add_issue(Issue issue) { issues_.push_back(std::move(issue)); }

void ContentPool::add_news(NewsArticle article) { news_.push_back(std::move(article)); }

bool ContentPool::live(const Post& p) const noexcept {
  if (p.permanent || expired_through_ == std::numeric_limits<int>::min()) return true;
  return p.created_day >= expired_through_ - config_.feed_window_days;
}

void ContentPool::check_post(const Post& p) const {
  if (!(p.stance >= 1.0 && p.stance <= 7.0)) {
    throw RangeError("content", "stance", std::to_string(p.stance) + " not in [1, 7]");
  }
  if (p.tags.empty()) throw RangeError("content", "tags", "post '" + p.id + "' has no tags");
  if (p.id.empty()) throw RangeError("content", "post_id", "empty post id");
  if (idx_.by_id.contains(p.id)) throw RangeError("content", "post_id", "duplicate post id '" + p.id + "'");
  if (p.source_kind == SourceKind::Friend && !p.author_id) {
    throw RangeError("content", "author_id", "friend post '" + p.id + "' has no author");
  }
}

PostIndex ContentPool::insert(Post post) {
  std::sort(post.tags.begin(), post.tags.end());
  post.tags.erase(std::unique(post.tags.begin(), post.tags.end()), post.tags.end());
  check_post(post);
  const auto index = static_cast<PostIndex>(posts_.size());
  idx_.by_id.emplace(post.id, index);
  if (post.issue_id) idx_.by_issue[*post.issue_id].push_back(index);
  if (post.source_kind == SourceKind::Imposed) idx_.imposed.push_back(index);
  if (post.trending) idx_.trending.push_back(index);
  for (AgentHandle h : post.audience) idx_.feeds[h].push_back(index);
  authors_.push_back(post.author_handle);
  std::optional<std::uint64_t> mask = 0;
  for (const auto& tag : post.tags) {
    auto it = tag_bits_.find(tag);
    if (it == tag_bits_.end() && tag_bits_.size() < 64) {
      it = tag_bits_.emplace(tag, static_cast<unsigned>(tag_bits_.size())).first;
    }
    if (it == tag_bits_.end()) {
      mask.reset();
      break;
    }
    *mask |= std::uint64_t{1} << it->second;
  }
  tag_masks_.push_back(mask);
  posts_.push_back(std::move(post));
  return index;
}

std::uint64_t ContentPool::interest_mask(std::span<const std::string> interests) const {
  std::uint64_t mask = 0;
  for (const auto& tag : interests) {
    if (auto it = tag_bits_.find(tag); it != tag_bits_.end()) mask |= std::uint64_t{1} << it->second;
  }
  return mask;
}

PostIndex ContentPool::add_imposed_post(Post post) {
  post.source_kind = SourceKind::Imposed;
  post.trending = false;
  post.audience.clear();
  post.author_handle = kNoAgent;
  return insert(std::move(post));
}

AgentHandle ContentPool::register_agent(std::string_view agent_id) {
  if (auto it = handles_.find(std::string(agent_id)); it != handles_.end()) return it->second;
  const auto h = static_cast<AgentHandle>(agent_ids_.size());
  agent_ids_.emplace_back(agent_id);
  handles_.emplace(std::string(agent_id), h);
  idx_.feeds.emplace_back();
  return h;
}

std::optional<AgentHandle> ContentPool::handle_of(std::string_view agent_id) const {
  if (auto it = handles_.find(std::string(agent_id)); it != handles_.end()) return it->second;
  return std::nullopt;
}

PostIndex ContentPool::add_agent_post(const AgentPrompt& author, std::string text, double stance,
                                      std::vector<std::string> tags, int day) {
  const AgentHandle self = register_agent(author.id);
  std::vector<AgentHandle> friends;
  friends.reserve(author.friends.size());
  for (const auto& f : author.friends) friends.push_back(register_agent(f));
  return add_agent_post(self, author, friends, std::move(text), stance, std::move(tags), day);
}

PostIndex ContentPool::add_agent_post(AgentHandle author, const AgentPrompt& author_profile,
                                      std::span<const AgentHandle> friends, std::string text, double stance,
                                      std::vector<std::string> tags, int day) {
  Post post;
  const std::string seq = std::to_string(posts_.size());
  post.id = "u" + std::string(9 - std::min<std::size_t>(9, seq.size()), '0') + seq;
  post.origin = author_profile.id;
  post.source_kind = SourceKind::Friend;
  post.stance = stance;
  post.tags = std::move(tags);
  post.text = std::move(text);
  post.author_id = author_profile.id;
  post.author_handle = author;
  post.created_day = day;
  post.trending = author_profile.dynamics.social_connectivity >= config_.trending_threshold;
  post.audience.reserve(friends.size());
  for (AgentHandle f : friends) {
    if (f != author && f < idx_.feeds.size()) post.audience.push_back(f);
  }
  std::sort(post.audience.begin(), post.audience.end());
  post.audience.erase(std::unique(post.audience.begin(), post.audience.end()), post.audience.end());
  return insert(std::move(post));
}

void ContentPool::expire(int day) {
  expired_through_ = day;
  auto dead = [this](PostIndex i) { return !live(posts_[i]); };
  std::erase_if(idx_.trending, dead);
  std::erase_if(idx_.imposed, dead);
  for (auto& feed : idx_.feeds) std::erase_if(feed, dead);
  // Audiences and comments are only read while a post is live. Posts are
  // appended in non-decreasing day order, so a forward cursor suffices.
  while (audience_cursor_ < posts_.size()) {
    Post& p = posts_[audience_cursor_];
    if (!p.permanent && live(p)) break;
    if (!p.permanent) {
      std::vector<AgentHandle>().swap(p.audience);
      std::vector<Comment>().swap(p.comments);
    }
    ++audience_cursor_;
  }
}

void ContentPool::record_reaction(PostIndex index, ReactionKind reaction) {
  posts_.at(index).reaction_counts[static_cast<std::size_t>(reaction)] += 1;
}

void ContentPool::add_comment(PostIndex index, Comment comment) {
  Post& p = posts_.at(index);
  p.comment_count += 1;
  if (config_.max_comments_per_post == 0) return;
  if (p.comments.size() >= config_.max_comments_per_post) p.comments.erase(p.comments.begin());
  p.comments.push_back(std::move(comment));
}

std::optional<PostIndex> ContentPool::find(std::string_view post_id) const {
  if (auto it = idx_.by_id.find(std::string(post_id)); it != idx_.by_id.end()) return it->second;
  return std::nullopt;
}

std::span<const PostIndex> ContentPool::posts_for_issue(std::string_view issue_id) const {
  if (auto it = idx_.by_issue.find(issue_id); it != idx_.by_issue.end()) return it->second;
  return {};
}

std::span<const PostIndex> ContentPool::friend_feed(AgentHandle agent) const {
  if (agent >= idx_.feeds.size()) return {};
  return idx_.feeds[agent];
}

ContentPool::Indices ContentPool::rebuild_indices() const {
  Indices out;
  out.feeds.resize(agent_ids_.size());
  for (PostIndex i = 0; i < posts_.size(); ++i) {
    const Post& p = posts_[i];
    out.by_id.emplace(p.id, i);
    if (p.issue_id) out.by_issue[*p.issue_id].push_back(i);
    if (!live(p)) continue;
    if (p.source_kind == SourceKind::Imposed) out.imposed.push_back(i);
    if (p.trending) out.trending.push_back(i);
    for (AgentHandle h : p.audience) out.feeds[h].push_back(i);
  }
  return out;
}

bool ContentPool::indices_consistent() const {
  if (idx_.by_id.size() != posts_.size()) return false;
  for (const auto& feed : idx_.feeds) {
    for (PostIndex i : feed) {
      if (i >= posts_.size() || posts_[i].source_kind != SourceKind::Friend) return false;
    }
  }
  return rebuild_indices() == idx_;
}

// --- fixture -------------------------------------------------------------

namespace {

void require_keys(const nlohmann::json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw FixtureCorrupt("content", where + " is not an object");
  if (obj.size() != keys.size()) throw FixtureCorrupt("content", where + " has unexpected keys");
  for (const char* k : keys) {
    if (!obj.contains(k)) throw FixtureCorrupt("content", where + " is missing key '" + std::string(k) + "'");
  }
}

}  // namespace

ContentPool build_fixture_pool(const std::filesystem::path& path, ContentConfig config) {
  const auto doc = read_json_fixture(path, "content");
  ContentPool pool(config);
  try {
    if (!doc.is_object() || !doc.contains("issues") || !doc.contains("news") || !doc.contains("posts")) {
      throw FixtureCorrupt("content", "document needs arrays issues, news, posts");
    }
    std::set<std::string> issue_ids;
    for (const auto& obj : doc.at("issues")) {
      require_keys(obj, {"id", "name"}, "issue");
      Issue issue{obj.at("id").get<std::string>(), obj.at("name").get<std::string>()};
      if (!issue_ids.insert(issue.id).second) throw FixtureCorrupt("content", "duplicate issue " + issue.id);
      pool.add_issue(std::move(issue));
    }
    std::map<std::string, std::string> news_issue;
    std::map<std::string, int> news_per_issue;
    for (const auto& obj : doc.at("news")) {
      require_keys(obj, {"id", "issue_id", "headline", "body"}, "news");
      NewsArticle n{obj.at("id").get<std::string>(), obj.at("issue_id").get<std::string>(),
                    obj.at("headline").get<std::string>(), obj.at("body").get<std::string>()};
      if (!issue_ids.contains(n.issue_id)) throw FixtureCorrupt("content", "news " + n.id + " has unknown issue");
      if (!news_issue.emplace(n.id, n.issue_id).second) throw FixtureCorrupt("content", "duplicate news " + n.id);
      news_per_issue[n.issue_id] += 1;
      pool.add_news(std::move(n));
    }
    std::map<std::string, int> posts_per_news;
    for (const auto& obj : doc.at("posts")) {
      require_keys(obj, {"id", "news_id", "issue_id", "stance", "tags", "text"}, "post");
      Post p;
      p.id = obj.at("id").get<std::string>();
      p.origin = obj.at("news_id").get<std::string>();
      p.issue_id = obj.at("issue_id").get<std::string>();
      p.stance = obj.at("stance").get<double>();
      p.tags = obj.at("tags").get<std::vector<std::string>>();
      p.text = obj.at("text").get<std::string>();
      p.permanent = true;
      auto it = news_issue.find(p.origin);
      if (it == news_issue.end()) throw FixtureCorrupt("content", "post " + p.id + " has unknown news_id");
      if (it->second != *p.issue_id) throw FixtureCorrupt("content", "post " + p.id + " issue does not match its news");
      posts_per_news[p.origin] += 1;
      pool.add_imposed_post(std::move(p));
    }
    if (pool.issues().size() != 3) throw FixtureCorrupt("content", "expected 3 issues");
    if (pool.news().size() != 15) throw FixtureCorrupt("content", "expected 15 news articles");
    for (const auto& [issue, count] : news_per_issue) {
      if (count != 5) throw FixtureCorrupt("content", "issue " + issue + " needs 5 news articles");
    }
    for (const auto& n : pool.news()) {
      if (posts_per_news[n.id] != 10) throw FixtureCorrupt("content", "news " + n.id + " needs 10 posts");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FixtureCorrupt("content", e.what());
  } catch (const RangeError& e) {
    throw FixtureCorrupt("content", e.what());
  }
  return pool;
}

std::vector<Post> promoted_posts(int day, std::uint64_t seed, int count) {
  const auto vocab = tag_vocabulary();
  std::vector<Post> out;
  out.reserve(static_cast<std::size_t>(std::max(0, count)));
  for (int k = 0; k < count; ++k) {
    Rng rng(stream_seed(seed, "promoted", {static_cast<std::uint64_t>(day), static_cast<std::uint64_t>(k)}));
    Post p;
    p.id = "promo-" + std::to_string(day) + "-" + std::to_string(k);
    p.origin = "promo";
    p.source_kind = SourceKind::Imposed;
    p.stance = std::round(rng.uniform(1.0, 7.0) * 100.0) / 100.0;
    const int ntags = rng.uniform_int(1, 3);
    for (int t = 0; t < ntags; ++t) p.tags.push_back(vocab[rng.below(vocab.size())]);
    std::sort(p.tags.begin(), p.tags.end());
    p.tags.erase(std::unique(p.tags.begin(), p.tags.end()), p.tags.end());
    p.text = "Sponsored: new picks for fans of #" + p.tags.front();
    p.created_day = day;
    out.push_back(std::move(p));
  }
  return out;
}

// --- candidate assembly ----------------------------------------------------

namespace {

class CandidateDraw {
 public:
  CandidateDraw(const ContentPool& pool, AgentHandle self, std::string_view self_id,
                std::span<const PostIndex> seen, Rng& rng, std::size_t capacity)
      : pool_(pool), self_(self), self_id_(self_id), seen_(seen), rng_(rng) {
    out_.reserve(capacity);
    taken_.reserve(capacity);
  }

  // `source` is ascending, as every pool index is.
  std::size_t draw(std::span<const PostIndex> source, std::size_t need, SourceKind channel) {
    if (need == 0 || source.empty()) return 0;
    std::size_t got = 0;
    if (source.size() > 4 * (need + seen_.size())) {
      // Large source: rejection-sample random slots before scanning it all.
      for (std::size_t attempt = 0; attempt < 8 * need && got < need; ++attempt) {
        const PostIndex i = source[rng_.below(source.size())];
        if (!taken(i) && !seen(i) && !own(i)) {
          take(i, channel);
          ++got;
        }
      }
      if (got == need) return got;
    }
    std::vector<PostIndex> pool;
    pool.reserve(source.size());
    auto s = seen_.begin();
    auto t = taken_.begin();
    for (PostIndex i : source) {
      while (s != seen_.end() && *s < i) ++s;
      while (t != taken_.end() && *t < i) ++t;
      if ((s != seen_.end() && *s == i) || (t != taken_.end() && *t == i) || own(i)) continue;
      pool.push_back(i);
    }
    for (std::size_t k = 0; k < pool.size() && got < need; ++k) {
      const std::size_t j = k + rng_.below(pool.size() - k);
      std::swap(pool[k], pool[j]);
      take(pool[k], channel);
      ++got;
    }
    return got;
  }

  std::vector<Candidate> release() { return std::move(out_); }

 private:
  bool taken(PostIndex i) const { return std::binary_search(taken_.begin(), taken_.end(), i); }
  bool seen(PostIndex i) const { return std::binary_search(seen_.begin(), seen_.end(), i); }

  bool own(PostIndex i) const {
    if (self_ != kNoAgent) return pool_.author_of(i) == self_;
    const auto& author = pool_.post(i).author_id;
    return author && *author == self_id_;
  }

  void take(PostIndex i, SourceKind channel) {
    out_.push_back(Candidate{i, channel});
    taken_.insert(std::upper_bound(taken_.begin(), taken_.end(), i), i);
  }

  const ContentPool& pool_;
  AgentHandle self_;
  std::string_view self_id_;
  std::span<const PostIndex> seen_;
  Rng& rng_;
  std::vector<Candidate> out_;
  std::vector<PostIndex> taken_;  // sorted copy of out_ indices
};

}  // namespace

std::vector<Candidate> daily_candidates(const ContentPool& pool, const AgentPrompt& agent, int day,
                                        std::uint64_t seed, const CandidateOptions& options,
                                        std::span<const PostIndex> seen) {
  const SourceMix& mix = options.mix;
  if (mix.friends < 0 || mix.trending < 0 || mix.imposed < 0 || mix.friends + mix.trending + mix.imposed <= 0) {
    throw RangeError("content", "source_mix", "shares must be non-negative with a positive sum");
  }
  if (options.oversample_factor < 1) throw RangeError("content", "oversample_factor", "must be >= 1");
  const std::size_t total =
      static_cast<std::size_t>(options.oversample_factor) * static_cast<std::size_t>(posts_per_day(agent, options.caps));
  const double sum = mix.friends + mix.trending + mix.imposed;
  const auto n_friend = static_cast<std::size_t>(std::floor(total * mix.friends / sum + 0.5));
  const auto n_trend = std::min(total - n_friend, static_cast<std::size_t>(std::floor(total * mix.trending / sum + 0.5)));

  const auto self = pool.handle_of(agent.id).value_or(kNoAgent);
  Rng rng(stream_seed(seed, "candidates", {hash_bytes(agent.id), static_cast<std::uint64_t>(day)}));
  CandidateDraw d(pool, self, agent.id, seen, rng, total);

  const auto feed = pool.friend_feed(self);
  std::size_t got = d.draw(feed, n_friend, SourceKind::Friend);
  got += d.draw(pool.trending(), n_trend, SourceKind::Trending);
  got += d.draw(pool.imposed(), total - got, SourceKind::Imposed);
  if (got < total) got += d.draw(pool.trending(), total - got, SourceKind::Trending);
  if (got < total) got += d.draw(feed, total - got, SourceKind::Friend);

  auto out = d.release();
  if (out.empty()) throw EmptyPool(agent.id);
  return out;
}

}  // namespace recsim
