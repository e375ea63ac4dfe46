#include "recsim/decision.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>

#include "recsim/error.hpp"

namespace recsim {

bool well_formed(const InteractionOutcome& o) {
  if (o.reaction == ReactionKind::None) {
    return !o.read_comments && !o.comment && !o.shared && !o.friend_requested;
  }
  if (o.comment) {
    const std::string& c = *o.comment;
    if (!o.read_comments || c.empty()) return false;
    if (std::isspace(static_cast<unsigned char>(c.front())) || std::isspace(static_cast<unsigned char>(c.back()))) {
      return false;
    }
    if (c.find_first_of("\"\n\r") != std::string::npos) return false;
  }
  return true;
}

double engage_probability(const AgentPrompt& agent, double affinity, const DecisionCalibration& k) {
  const double p = k.engage_base + k.engage_affinity * std::abs(affinity) +
                   k.engage_extraversion * (agent.statics.extraversion - 4) / 3.0 +
                   k.engage_emotive * (agent.dynamics.emotive_reaction - 4.0) / 3.0;
  return std::clamp(p, k.engage_min, k.engage_max);
}

ReactionKind reaction_for(const AgentPrompt& agent, double affinity, const DecisionCalibration& k) {
  if (affinity >= k.love_threshold) return ReactionKind::Love;
  if (affinity >= k.care_threshold) {
    return agent.statics.cognitive_style >= k.care_min_cognitive_style ? ReactionKind::Care : ReactionKind::Like;
  }
  if (affinity > -k.neutral_band) return ReactionKind::Wow;
  return agent.dynamics.emotive_reaction >= k.angry_min_emotive ? ReactionKind::Angry : ReactionKind::Sad;
}

namespace {

std::string comment_template(const Post& post, double affinity) {
  const char* side = post.stance < 3.5 ? "liberal" : (post.stance > 4.5 ? "conservative" : "centrist");
  return std::string(affinity > 0 ? "Agree" : "Disagree") + " with this " + side + " take (" + post.id + ")";
}

}  // namespace

InteractionOutcome decide_deterministic(const AgentPrompt& agent, const Post& post, SourceKind channel, Rng& rng,
                                        const DecisionCalibration& k, AffinityWeights weights) {
  const double a = affinity(agent, post, weights);
  const double p = engage_probability(agent, a, k);
  const double u_engage = rng.uniform();
  const double u_comment = rng.uniform();
  const double u_read = rng.uniform();

  InteractionOutcome out;
  if (u_engage >= p) return out;
  out.reaction = reaction_for(agent, a, k);
  if (u_comment < k.comment_factor * p) out.comment = comment_template(post, a);
  out.read_comments = out.comment.has_value() || u_read < k.read_comments_probability;
  out.shared = (out.reaction == ReactionKind::Love || out.reaction == ReactionKind::Care) &&
               agent.statics.agreeableness >= k.share_min_agreeableness;
  out.friend_requested = channel == SourceKind::Trending && is_positive(out.reaction) &&
                         agent.dynamics.social_connectivity >= k.friend_request_min_connectivity &&
                         post.author_id.has_value();
  return out;
}

// --- reply parsing -----------------------------------------------------------

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<ReactionKind> option_word(std::string_view word) {
  static constexpr std::pair<std::string_view, ReactionKind> kWords[] = {
      {"nothing", ReactionKind::None}, {"none", ReactionKind::None},   {"like", ReactionKind::Like},
      {"love", ReactionKind::Love},    {"care", ReactionKind::Care},   {"haha", ReactionKind::Haha},
      {"wow", ReactionKind::Wow},      {"angry", ReactionKind::Angry}, {"sad", ReactionKind::Sad},
  };
  for (const auto& [w, r] : kWords) {
    if (w == word) return r;
  }
  return std::nullopt;
}

std::optional<ReactionKind> first_option(std::string_view lowered) {
  std::size_t i = 0;
  while (i < lowered.size()) {
    while (i < lowered.size() && !std::isalpha(static_cast<unsigned char>(lowered[i]))) ++i;
    const std::size_t start = i;
    while (i < lowered.size() && std::isalpha(static_cast<unsigned char>(lowered[i]))) ++i;
    if (i > start) {
      if (auto r = option_word(lowered.substr(start, i - start))) return r;
    }
  }
  return std::nullopt;
}

bool has_word(std::string_view lowered, std::string_view word) {
  std::size_t pos = 0;
  while ((pos = lowered.find(word, pos)) != std::string_view::npos) {
    const bool left_ok = pos == 0 || !std::isalpha(static_cast<unsigned char>(lowered[pos - 1]));
    const std::size_t end = pos + word.size();
    // Accept inflections such as "shares"/"shared".
    const bool right_ok = end == lowered.size() || !std::isalpha(static_cast<unsigned char>(lowered[end])) ||
                          lowered.substr(end, 1) == "s" || lowered.substr(end, 1) == "d";
    if (left_ok && right_ok) return true;
    pos = end;
  }
  return false;
}

bool is_quote(char c) { return c == '"' || c == '\''; }

}  // namespace

InteractionOutcome parse_completion(std::string_view text) {
  const std::string_view body = trim(text);
  if (body.empty()) throw ParseError("empty reply", std::string(text));
  const std::string low = lower(body);

  std::string_view head = body;
  std::string_view tail;
  std::optional<std::string> comment;
  if (const auto at = low.find("comment:"); at != std::string::npos) {
    head = body.substr(0, at);
    std::string_view rest = body.substr(at + 8);
    while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) rest.remove_prefix(1);
    std::string_view said;
    if (!rest.empty() && is_quote(rest.front())) {
      const char q = rest.front();
      const auto close = rest.find(q, 1);
      if (close == std::string_view::npos) {
        said = rest.substr(1);
      } else {
        said = rest.substr(1, close - 1);
        tail = rest.substr(close + 1);
      }
    } else {
      const auto end = rest.find_first_of("+\n");
      said = rest.substr(0, end);
      if (end != std::string_view::npos) tail = rest.substr(end);
    }
    said = trim(said);
    if (!said.empty()) comment = std::string(said);
  }

  const std::string head_low = lower(head);
  const auto reaction = first_option(head_low);
  if (!reaction) throw ParseError("no recognised reaction option", std::string(text));

  InteractionOutcome out;
  out.reaction = *reaction;
  if (out.reaction == ReactionKind::None) return out;

  const std::string markers = head_low + " " + lower(tail);
  out.comment = std::move(comment);
  out.shared = has_word(markers, "share") || has_word(markers, "reshare");
  out.friend_requested =
      markers.find("friend request") != std::string::npos || markers.find("friend-request") != std::string::npos;
  out.read_comments = out.comment.has_value() || markers.find("read comments") != std::string::npos ||
                      markers.find("read the comments") != std::string::npos;
  return out;
}

std::string render_completion(const InteractionOutcome& o) {
  if (o.reaction == ReactionKind::None) return "nothing";
  std::string out(to_string(o.reaction));
  if (o.read_comments) out += " + read comments";
  if (o.comment) out += " + comment: \"" + *o.comment + "\"";
  if (o.shared) out += " + share";
  if (o.friend_requested) out += " + friend request";
  return out;
}

DynamicTraits parse_trait_report(std::string_view text) {
  static const std::regex kField(R"((pa|sc|er)\s*[:=]\s*([-+]?[0-9]+(?:\.[0-9]+)?))", std::regex::icase);
  std::optional<double> pa, sc, er;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kField); it != std::sregex_iterator(); ++it) {
    const std::string key = lower((*it)[1].str());
    const double v = std::clamp(std::stod((*it)[2].str()), 1.0, 7.0);
    if (key == "pa" && !pa) pa = v;
    if (key == "sc" && !sc) sc = v;
    if (key == "er" && !er) er = v;
  }
  if (!pa || !sc || !er) throw ParseError("expected numeric pa, sc and er", s);
  return DynamicTraits{*pa, *sc, *er};
}

}  // namespace recsim
