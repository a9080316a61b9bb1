#pragma once

#include <optional>
#include <string_view>

#include "stancekit/text.hpp"

namespace stancekit {

/// Comment attitude toward the target policy, scored -1 / 0 / +1.
enum class Stance { Against, Neutral, Supportive };

inline int stance_score(Stance s) {
  switch (s) {
    case Stance::Against: return -1;
    case Stance::Neutral: return 0;
    case Stance::Supportive: return 1;
  }
  return 0;
}

inline const char* stance_name(Stance s) {
  switch (s) {
    case Stance::Against: return "against";
    case Stance::Neutral: return "neutral";
    case Stance::Supportive: return "supportive";
  }
  return "neutral";
}

inline std::optional<Stance> parse_stance(std::string_view s) {
  const std::string low = ascii_lower_copy(s);
  if (low == "against") return Stance::Against;
  if (low == "neutral") return Stance::Neutral;
  if (low == "supportive") return Stance::Supportive;
  return std::nullopt;
}

}  // namespace stancekit
