#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace recsim {

enum class ReactionKind : unsigned char { None, Like, Love, Care, Haha, Wow, Angry, Sad };

inline constexpr std::size_t kReactionKindCount = 8;

inline constexpr std::array<ReactionKind, kReactionKindCount> kAllReactions = {
    ReactionKind::None, ReactionKind::Like,  ReactionKind::Love, ReactionKind::Care,
    ReactionKind::Haha, ReactionKind::Wow,   ReactionKind::Angry, ReactionKind::Sad};

constexpr bool is_positive(ReactionKind r) noexcept {
  return r == ReactionKind::Haha || r == ReactionKind::Like || r == ReactionKind::Wow ||
         r == ReactionKind::Care || r == ReactionKind::Love;
}

constexpr bool is_negative(ReactionKind r) noexcept {
  return r == ReactionKind::Sad || r == ReactionKind::Angry;
}

constexpr std::string_view to_string(ReactionKind r) noexcept {
  switch (r) {
    case ReactionKind::None: return "None";
    case ReactionKind::Like: return "Like";
    case ReactionKind::Love: return "Love";
    case ReactionKind::Care: return "Care";
    case ReactionKind::Haha: return "Haha";
    case ReactionKind::Wow: return "Wow";
    case ReactionKind::Angry: return "Angry";
    case ReactionKind::Sad: return "Sad";
  }
  return "None";
}

/// Exact, case-sensitive inverse of to_string().
constexpr std::optional<ReactionKind> reaction_from_string(std::string_view s) noexcept {
  for (ReactionKind r : kAllReactions) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

using ReactionCounts = std::array<unsigned, kReactionKindCount>;

}  // namespace recsim
