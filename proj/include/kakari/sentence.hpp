#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kakari {

// 1-based phrase position. 0 is reserved for the root sentinel.
using PhraseIndex = int;
inline constexpr PhraseIndex kRoot = 0;

enum class CaseMarker { Nom, Acc, Dat, Other };

enum class SentenceType { Filler, Ctrl, Eb, Lb };

std::string_view to_string(CaseMarker m);
std::string_view to_string(SentenceType t);
CaseMarker case_marker_from_string(std::string_view s);
SentenceType sentence_type_from_string(std::string_view s);

inline constexpr SentenceType kGardenPathTypes[] = {SentenceType::Ctrl, SentenceType::Eb,
                                                    SentenceType::Lb};
inline constexpr SentenceType kAllSentenceTypes[] = {SentenceType::Filler, SentenceType::Ctrl,
                                                     SentenceType::Eb, SentenceType::Lb};

// One bunsetsu.
struct Phrase {
  PhraseIndex index = 1;
  std::string surface;
  std::optional<std::string> reading;  // katakana
  int char_count = 1;
  int mora_count = 1;
  std::optional<CaseMarker> case_marker;

  bool operator==(const Phrase&) const = default;
};

struct Sentence {
  std::string id;
  std::vector<Phrase> phrases;
  SentenceType type_tag = SentenceType::Filler;

  int size() const { return static_cast<int>(phrases.size()); }
  const Phrase& phrase(PhraseIndex i) const { return phrases.at(static_cast<size_t>(i - 1)); }
  int total_morae() const;
  int total_chars() const;

  bool operator==(const Sentence&) const = default;
};

}  // namespace kakari
