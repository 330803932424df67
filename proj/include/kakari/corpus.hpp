#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kakari/sentence.hpp"
#include "kakari/tree.hpp"

namespace kakari {

// Counts morae in a katakana reading: one per kana, small ャュョァィゥェォ
// merge with the preceding kana, small ッ and ー count one each.
// Throws InvalidReadingError on empty input or any non-katakana character.
int count_morae(std::string_view reading);

// Number of Unicode code points in a UTF-8 string. Throws ParseError on
// malformed UTF-8.
int count_chars(std::string_view utf8);

// ---------------------------------------------------------------------------
// Garden-path templates.
//
//   NP-NOM  NP-ACC  V-PAST  NP-DAT  X  V-PAST
//
// X decides the type: NP-NOM (CTRL), NP-ACC (EB), anything else (LB).

enum class SlotRole { Np, VerbPast, XOther };

struct SlotSpec {
  SlotRole role;
  std::optional<CaseMarker> marker;
};

struct GpTemplate {
  SentenceType type;
  std::array<SlotSpec, 6> slots;
  GoldTree gold;
};

// CTRL [3,3,4,6,6,ROOT], EB [6,3,4,6,6,ROOT], LB [6,6,4,6,6,ROOT].
// Phrases 3 and 4 always attach 3->4 (relative clause on the dative NP) and
// 4->6; only the heads of phrases 1 and 2 differ between types.
GoldTree gold_tree_for(SentenceType type);
GpTemplate gp_template(SentenceType type);

struct LexEntry {
  std::string surface;
  std::string reading;
  int char_count = 0;
  int mora_count = 0;
};

// NP entries are bare nouns; the case particle is appended per slot.
struct Lexicon {
  std::vector<LexEntry> nouns;
  std::vector<LexEntry> verbs_past;
  std::vector<LexEntry> x_other;
};

Lexicon load_lexicon(const std::filesystem::path& path);
Lexicon parse_lexicon(std::string_view json_text, const std::string& source = "<lexicon>");

struct SentenceRecord {
  Sentence sentence;
  GoldTree gold;

  const std::string& id() const { return sentence.id; }
  SentenceType type() const { return sentence.type_tag; }
  bool operator==(const SentenceRecord&) const = default;
};

// Fills the six slots without repeating a noun inside the sentence.
// Throws InsufficientLexiconError when a role cannot be filled.
SentenceRecord generate_gp_sentence(SentenceType type, const Lexicon& lexicon, std::uint64_t seed,
                                    std::string id = {});

// ---------------------------------------------------------------------------
// Corpus file: UTF-8 JSON Lines. Line 1 is a header
//   {"format":"kakari-corpus","version":1}
// followed by one sentence record per line. See docs/formats.md.

inline constexpr int kCorpusFormatVersion = 1;

struct CorpusFile {
  int version = kCorpusFormatVersion;
  std::vector<SentenceRecord> records;

  const SentenceRecord* find(std::string_view id) const;
  const SentenceRecord& at(std::string_view id) const;  // throws NotFoundError
  int count(SentenceType t) const;
};

CorpusFile load_corpus(const std::filesystem::path& path);
CorpusFile parse_corpus(std::istream& in, const std::string& source = "<corpus>");
void write_corpus(std::ostream& out, const CorpusFile& corpus);

// Fills missing char/mora counts from surface/reading.
void complete_metadata(Sentence& sentence);

struct CorpusIssue {
  std::string record_id;
  std::string check;  // unique-id, tree, gp-structure, metadata, phrase
  std::string message;
};

struct CorpusReport {
  std::vector<CorpusIssue> issues;
  bool ok() const { return issues.empty(); }
};

CorpusReport validate_corpus(const CorpusFile& corpus);

}  // namespace kakari
