#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recsim/agents.hpp"
#include "recsim/reaction.hpp"

namespace recsim {

enum class SourceKind : unsigned char { Friend, Trending, Imposed };

std::string_view to_string(SourceKind s) noexcept;

using PostIndex = std::uint32_t;
using AgentHandle = std::uint32_t;
inline constexpr AgentHandle kNoAgent = std::numeric_limits<AgentHandle>::max();

struct Issue {
  std::string id;
  std::string name;
};

struct NewsArticle {
  std::string id;
  std::string issue_id;
  std::string headline;
  std::string body;
};

struct Comment {
  std::string author_id;
  std::string text;
  int day = 0;
};

struct Post {
  std::string id;
  std::string origin;  // news id, agent id, or "promo"
  SourceKind source_kind = SourceKind::Imposed;
  std::optional<std::string> issue_id;
  double stance = 4.0;            // political axis, 1 liberal .. 7 conservative
  std::vector<std::string> tags;  // sorted, unique
  std::string text;
  std::optional<std::string> author_id;
  AgentHandle author_handle = kNoAgent;
  std::vector<Comment> comments;  // most recent `max_comments_per_post`
  std::uint32_t comment_count = 0;
  ReactionCounts reaction_counts{};
  int created_day = 0;
  bool permanent = false;              // fixture content never expires
  bool trending = false;               // promoted to the global trending list
  std::vector<AgentHandle> audience;   // friend feeds it was pushed to; cleared on expiry
};

struct ContentConfig {
  double trending_threshold = 6.0;  // author sc needed to reach trending
  int feed_window_days = 3;         // friend/trending/promoted posts stay visible this long
  std::size_t max_comments_per_post = 16;

  bool operator==(const ContentConfig&) const = default;
};

/// The PrimaryContent universe: every post plus the indices the feed
/// assembly reads. Single writer; readers may share it between mutations.
class ContentPool {
 public:
  explicit ContentPool(ContentConfig config = {});

  const ContentConfig& config() const noexcept { return config_; }

  void add_issue(Issue issue);
  void add_news(NewsArticle article);

  /// Inserts a news-derived or promoted post into the imposed source.
  /// Throws RangeError on an invalid stance, empty tags or a duplicate id.
  PostIndex add_imposed_post(Post post);

  /// Agents must be registered before their handles can own friend feeds.
  AgentHandle register_agent(std::string_view agent_id);
  std::optional<AgentHandle> handle_of(std::string_view agent_id) const;
  std::size_t agent_count() const noexcept { return agent_ids_.size(); }

  /// Publishes an agent post to the friend feeds of `author.friends` and, when
  /// the author's social connectivity reaches the trending threshold, to the
  /// global trending list. Registers unknown ids on the fly.
  PostIndex add_agent_post(const AgentPrompt& author, std::string text, double stance,
                           std::vector<std::string> tags, int day);

  /// Same as above with pre-resolved handles; used by the engine.
  PostIndex add_agent_post(AgentHandle author, const AgentPrompt& author_profile,
                           std::span<const AgentHandle> friends, std::string text, double stance,
                           std::vector<std::string> tags, int day);

  /// Drops windowed posts created before `day - feed_window_days` from the
  /// trending, imposed and friend-feed indices and releases their comments.
  void expire(int day);

  void record_reaction(PostIndex index, ReactionKind reaction);
  void add_comment(PostIndex index, Comment comment);

  std::size_t size() const noexcept { return posts_.size(); }
  const Post& post(PostIndex index) const { return posts_.at(index); }
  AgentHandle author_of(PostIndex index) const noexcept { return authors_[index]; }
  /// The post's tags as bits of the pool's tag table, or nullopt when the
  /// table already held 64 tags before the post arrived.
  std::optional<std::uint64_t> tag_mask(PostIndex index) const noexcept { return tag_masks_[index]; }
  /// Bits of the interests the tag table knows; other interests match no
  /// masked post.
  std::uint64_t interest_mask(std::span<const std::string> interests) const;
  const std::vector<Post>& posts() const noexcept { return posts_; }
  std::optional<PostIndex> find(std::string_view post_id) const;

  const std::vector<Issue>& issues() const noexcept { return issues_; }
  const std::vector<NewsArticle>& news() const noexcept { return news_; }
  std::span<const PostIndex> posts_for_issue(std::string_view issue_id) const;
  std::span<const PostIndex> trending() const noexcept { return idx_.trending; }
  std::span<const PostIndex> imposed() const noexcept { return idx_.imposed; }
  std::span<const PostIndex> friend_feed(AgentHandle agent) const;

  /// Rebuilds every index from the post set and compares it with the
  /// incrementally maintained one.
  bool indices_consistent() const;

 private:
  struct Indices {
    std::unordered_map<std::string, PostIndex> by_id;
    std::map<std::string, std::vector<PostIndex>, std::less<>> by_issue;
    std::vector<PostIndex> trending;
    std::vector<PostIndex> imposed;
    std::vector<std::vector<PostIndex>> feeds;

    bool operator==(const Indices&) const = default;
  };

  Indices rebuild_indices() const;
  bool live(const Post& p) const noexcept;
  void check_post(const Post& p) const;
  PostIndex insert(Post post);

  ContentConfig config_;
  std::vector<Issue> issues_;
  std::vector<NewsArticle> news_;
  std::vector<Post> posts_;
  std::vector<AgentHandle> authors_;  // posts_[i].author_handle, kept dense for candidate scans
  std::vector<std::optional<std::uint64_t>> tag_masks_;
  std::map<std::string, unsigned, std::less<>> tag_bits_;
  Indices idx_;
  std::vector<std::string> agent_ids_;
  std::unordered_map<std::string, AgentHandle> handles_;
  int expired_through_ = std::numeric_limits<int>::min();  // last day passed to expire()
  std::size_t audience_cursor_ = 0;
};

/// Loads `content_150.json`: 3 issues x 5 news x 10 posts. Throws FixtureCorrupt.
ContentPool build_fixture_pool(const std::filesystem::path& path, ContentConfig config = {});

/// Deterministic promotional posts for one day ("imposed" content that is not
/// tied to an issue). Ids are "promo-<day>-<k>".
std::vector<Post> promoted_posts(int day, std::uint64_t seed, int count);

struct SourceMix {
  double friends = 0.4;
  double trending = 0.3;
  double imposed = 0.3;

  bool operator==(const SourceMix&) const = default;
};

struct CandidateOptions {
  SourceMix mix;
  int oversample_factor = 3;
  DailyCaps caps;
};

/// A post offered to an agent together with the channel that delivered it.
struct Candidate {
  PostIndex index = 0;
  SourceKind channel = SourceKind::Imposed;

  bool operator==(const Candidate&) const = default;
};

/// Draws oversample_factor * posts_per_day(agent) candidates from the
/// agent's friend feed, the trending list and the imposed source in the
/// configured mix. Shortfalls in one source are refilled from imposed, then
/// from whichever source still has posts. Never returns a duplicate, a post
/// the agent authored, or a post listed in `seen` (sorted). Throws EmptyPool
/// when nothing is eligible.
std::vector<Candidate> daily_candidates(const ContentPool& pool, const AgentPrompt& agent, int day,
                                        std::uint64_t seed, const CandidateOptions& options = {},
                                        std::span<const PostIndex> seen = {});

}  // namespace recsim
