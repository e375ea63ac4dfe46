#include "recsim/recommender.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "recsim/error.hpp"

namespace recsim {

std::string_view to_string(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::Plurality: return "Plurality";
    case ScenarioKind::Balanced: return "Balanced";
    case ScenarioKind::Similarity: return "Similarity";
  }
  return "Similarity";
}

std::optional<ScenarioKind> scenario_from_string(std::string_view name) noexcept {
  for (ScenarioKind k : kAllScenarios) {
    const auto canon = to_string(k);
    if (canon.size() == name.size() &&
        std::equal(canon.begin(), canon.end(), name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
        })) {
      return k;
    }
  }
  return std::nullopt;
}

double tag_overlap(std::span<const std::string> tags, std::span<const std::string> interests) {
  if (tags.empty()) return 0.0;
  std::size_t common = 0;
  auto a = tags.begin();
  auto b = interests.begin();
  while (a != tags.end() && b != interests.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++common;
      ++a;
      ++b;
    }
  }
  return static_cast<double>(common) / static_cast<double>(tags.size());
}

double affinity(const AgentPrompt& agent, const Post& post, AffinityWeights weights) {
  return affinity(agent.dynamics.political_attitude, post.stance, tag_overlap(post.tags, agent.interests), weights);
}

double affinity(double political_attitude, double stance, double overlap, AffinityWeights weights) {
  const double distance = std::abs(political_attitude - stance);
  const double stance_term = 1.0 - 2.0 * distance / 6.0;
  const double interest_term = 2.0 * overlap - 1.0;
  const double raw = weights.stance * stance_term + weights.interest * interest_term;
  return std::clamp(std::round(raw * 1e12) / 1e12, -1.0, 1.0);
}

namespace {

bool higher_first(const RankedItem& x, const RankedItem& y) {
  if (x.affinity != y.affinity) return x.affinity > y.affinity;
  return x.id < y.id;
}

bool lower_first(const RankedItem& x, const RankedItem& y) {
  if (x.affinity != y.affinity) return x.affinity < y.affinity;
  return x.id < y.id;
}

}  // namespace

std::vector<RankedItem> select_ranked(ScenarioKind kind, std::vector<RankedItem> items, std::size_t k,
                                      double balance_ratio) {
  if (k > items.size()) throw InsufficientCandidates(k, items.size());
  if (!(balance_ratio >= 0.0 && balance_ratio <= 1.0)) {
    throw RangeError("recommender", "balance_ratio", std::to_string(balance_ratio) + " not in [0, 1]");
  }
  std::size_t top = 0;
  switch (kind) {
    case ScenarioKind::Similarity: top = k; break;
    case ScenarioKind::Plurality: top = 0; break;
    case ScenarioKind::Balanced:
      top = static_cast<std::size_t>(std::floor(balance_ratio * static_cast<double>(k) + 0.5));
      break;
  }
  const std::size_t bottom = k - top;

  const auto mid = items.begin() + static_cast<std::ptrdiff_t>(top);
  std::partial_sort(items.begin(), mid, items.end(), higher_first);
  std::vector<RankedItem> out;
  out.reserve(k);
  out.insert(out.end(), items.begin(), mid);
  if (bottom > 0) {
    // The bottom picks come from what the top picks left over; with top + bottom
    // <= size the two ends never overlap.
    std::partial_sort(mid, mid + static_cast<std::ptrdiff_t>(bottom), items.end(), lower_first);
    out.insert(out.end(), items.begin() + static_cast<std::ptrdiff_t>(top),
               items.begin() + static_cast<std::ptrdiff_t>(top + bottom));
  }
  std::sort(out.begin(), out.end(), higher_first);
  return out;
}

std::vector<const Post*> select(ScenarioKind kind, const AgentPrompt& agent, std::span<const Post* const> candidates,
                                std::size_t k, double balance_ratio, AffinityWeights weights) {
  std::vector<RankedItem> items;
  items.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    items.push_back(RankedItem{affinity(agent, *candidates[i], weights), candidates[i]->id, i});
  }
  const auto picked = select_ranked(kind, std::move(items), k, balance_ratio);
  std::vector<const Post*> out;
  out.reserve(picked.size());
  for (const auto& r : picked) out.push_back(candidates[r.slot]);
  return out;
}

double mean_affinity(std::span<const double> affinities) {
  if (affinities.empty()) throw EmptySelection();
  double sum = 0.0;
  for (double a : affinities) sum += a;
  return std::clamp(sum / static_cast<double>(affinities.size()), -1.0, 1.0);
}

double impact(ScenarioKind /*kind*/, const AgentPrompt& agent, std::span<const Post* const> selected,
              AffinityWeights weights) {
  std::vector<double> values;
  values.reserve(selected.size());
  for (const Post* p : selected) values.push_back(affinity(agent, *p, weights));
  return mean_affinity(values);
}

}  // namespace recsim
