#include "kakari/sentence.hpp"

#include <numeric>

#include "kakari/error.hpp"

namespace kakari {

std::string_view to_string(CaseMarker m) {
  switch (m) {
    case CaseMarker::Nom: return "NOM";
    case CaseMarker::Acc: return "ACC";
    case CaseMarker::Dat: return "DAT";
    case CaseMarker::Other: return "OTHER";
  }
  return "OTHER";
}

std::string_view to_string(SentenceType t) {
  switch (t) {
    case SentenceType::Filler: return "FILLER";
    case SentenceType::Ctrl: return "CTRL";
    case SentenceType::Eb: return "EB";
    case SentenceType::Lb: return "LB";
  }
  return "FILLER";
}

CaseMarker case_marker_from_string(std::string_view s) {
  if (s == "NOM") return CaseMarker::Nom;
  if (s == "ACC") return CaseMarker::Acc;
  if (s == "DAT") return CaseMarker::Dat;
  if (s == "OTHER") return CaseMarker::Other;
  throw ParseError("unknown case marker '" + std::string(s) + "'");
}

SentenceType sentence_type_from_string(std::string_view s) {
  if (s == "FILLER") return SentenceType::Filler;
  if (s == "CTRL") return SentenceType::Ctrl;
  if (s == "EB") return SentenceType::Eb;
  if (s == "LB") return SentenceType::Lb;
  throw ParseError("unknown sentence type '" + std::string(s) + "'");
}

int Sentence::total_morae() const {
  return std::accumulate(phrases.begin(), phrases.end(), 0,
                         [](int acc, const Phrase& p) { return acc + p.mora_count; });
}

int Sentence::total_chars() const {
  return std::accumulate(phrases.begin(), phrases.end(), 0,
                         [](int acc, const Phrase& p) { return acc + p.char_count; });
}

}  // namespace kakari
