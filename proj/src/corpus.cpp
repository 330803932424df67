#include "kakari/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kakari/error.hpp"
#include "kakari/rng.hpp"
#include "utf8.hpp"

namespace kakari {

using ojson = nlohmann::ordered_json;

namespace {

constexpr char32_t kLongVowel = U'ー';

bool is_katakana(char32_t c) { return (c >= U'ァ' && c <= U'ヺ') || c == kLongVowel; }

bool is_merging_small_kana(char32_t c) {
  switch (c) {
    case U'ャ': case U'ュ': case U'ョ':
    case U'ァ': case U'ィ': case U'ゥ': case U'ェ': case U'ォ':
      return true;
    default:
      return false;
  }
}

struct Particle {
  const char* surface;
  const char* reading;
};

Particle particle_for(CaseMarker m) {
  switch (m) {
    case CaseMarker::Nom: return {"が", "ガ"};
    case CaseMarker::Acc: return {"を", "ヲ"};
    case CaseMarker::Dat: return {"に", "ニ"};
    case CaseMarker::Other: break;
  }
  throw InvalidStateError("no particle for marker OTHER");
}

}  // namespace

int count_morae(std::string_view reading) {
  if (reading.empty()) throw InvalidReadingError("empty reading");
  std::vector<char32_t> cps;
  try {
    cps = detail::decode_utf8(reading);
  } catch (const ParseError& e) {
    throw InvalidReadingError(std::string("reading is not valid UTF-8: ") + e.what());
  }
  int morae = 0;
  for (size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (!is_katakana(c)) {
      throw InvalidReadingError("non-katakana character at position " + std::to_string(i + 1) + " in '" +
                                std::string(reading) + "'");
    }
    if (is_merging_small_kana(c)) {
      if (i == 0) throw InvalidReadingError("reading starts with a small kana: '" + std::string(reading) + "'");
      continue;
    }
    ++morae;
  }
  return morae;
}

int count_chars(std::string_view utf8) { return static_cast<int>(detail::decode_utf8(utf8).size()); }

// ---------------------------------------------------------------------------

GoldTree gold_tree_for(SentenceType type) {
  switch (type) {
    case SentenceType::Ctrl: return GoldTree{{3, 3, 4, 6, 6, kRoot}};
    case SentenceType::Eb: return GoldTree{{6, 3, 4, 6, 6, kRoot}};
    case SentenceType::Lb: return GoldTree{{6, 6, 4, 6, 6, kRoot}};
    case SentenceType::Filler: break;
  }
  throw InvalidStateError("fillers have no template tree");
}

GpTemplate gp_template(SentenceType type) {
  SlotSpec x5{SlotRole::XOther, CaseMarker::Other};
  if (type == SentenceType::Ctrl) x5 = {SlotRole::Np, CaseMarker::Nom};
  if (type == SentenceType::Eb) x5 = {SlotRole::Np, CaseMarker::Acc};
  return GpTemplate{type,
                    {SlotSpec{SlotRole::Np, CaseMarker::Nom}, SlotSpec{SlotRole::Np, CaseMarker::Acc},
                     SlotSpec{SlotRole::VerbPast, std::nullopt}, SlotSpec{SlotRole::Np, CaseMarker::Dat}, x5,
                     SlotSpec{SlotRole::VerbPast, std::nullopt}},
                    gold_tree_for(type)};
}

// ---------------------------------------------------------------------------

namespace {

std::vector<LexEntry> parse_entries(const ojson& j, const char* key, const std::string& source) {
  std::vector<LexEntry> out;
  if (!j.contains(key)) return out;
  for (const auto& e : j.at(key)) {
    LexEntry entry;
    entry.surface = e.at("surface").get<std::string>();
    entry.reading = e.at("reading").get<std::string>();
    entry.char_count = count_chars(entry.surface);
    try {
      entry.mora_count = count_morae(entry.reading);
    } catch (const InvalidReadingError& err) {
      throw ParseError(source + ": lexicon entry '" + entry.surface + "': " + err.what());
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace

Lexicon parse_lexicon(std::string_view json_text, const std::string& source) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
  try {
    Lexicon lex;
    lex.nouns = parse_entries(j, "np", source);
    lex.verbs_past = parse_entries(j, "v_past", source);
    lex.x_other = parse_entries(j, "x_other", source);
    return lex;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lexicon(ss.str(), path.string());
}

SentenceRecord generate_gp_sentence(SentenceType type, const Lexicon& lexicon, std::uint64_t seed,
                                    std::string id) {
  const GpTemplate tpl = gp_template(type);
  const auto nouns_needed = static_cast<size_t>(
      std::count_if(tpl.slots.begin(), tpl.slots.end(), [](const SlotSpec& s) { return s.role == SlotRole::Np; }));
  if (lexicon.nouns.size() < nouns_needed) {
    throw InsufficientLexiconError(std::string(to_string(type)) + " needs " + std::to_string(nouns_needed) +
                                   " distinct nouns, lexicon has " + std::to_string(lexicon.nouns.size()));
  }
  if (lexicon.verbs_past.empty()) throw InsufficientLexiconError("lexicon has no past-tense verbs");
  if (type == SentenceType::Lb && lexicon.x_other.empty())
    throw InsufficientLexiconError("LB needs at least one non-NP entry for phrase 5");

  Rng rng(seed);
  std::vector<size_t> noun_order(lexicon.nouns.size());
  for (size_t i = 0; i < noun_order.size(); ++i) noun_order[i] = i;
  rng.shuffle(std::span<size_t>(noun_order));
  size_t next_noun = 0;

  Sentence s;
  s.id = id.empty() ? std::string(to_string(type)) + "-" + std::to_string(seed) : std::move(id);
  std::transform(s.id.begin(), s.id.end(), s.id.begin(), [](unsigned char c) { return std::tolower(c); });
  s.type_tag = type;

  for (size_t slot = 0; slot < tpl.slots.size(); ++slot) {
    const SlotSpec& spec = tpl.slots[slot];
    Phrase p;
    p.index = static_cast<PhraseIndex>(slot + 1);
    p.case_marker = spec.marker;
    const LexEntry* e = nullptr;
    switch (spec.role) {
      case SlotRole::Np: e = &lexicon.nouns[noun_order[next_noun++]]; break;
      case SlotRole::VerbPast: e = &lexicon.verbs_past[rng.below(lexicon.verbs_past.size())]; break;
      case SlotRole::XOther: e = &lexicon.x_other[rng.below(lexicon.x_other.size())]; break;
    }
    p.surface = e->surface;
    std::string reading = e->reading;
    if (spec.role == SlotRole::Np) {
      const Particle part = particle_for(*spec.marker);
      p.surface += part.surface;
      reading += part.reading;
    }
    p.reading = reading;
    p.char_count = count_chars(p.surface);
    p.mora_count = count_morae(reading);
    s.phrases.push_back(std::move(p));
  }
  return {std::move(s), tpl.gold};
}

// ---------------------------------------------------------------------------

const SentenceRecord* CorpusFile::find(std::string_view id) const {
  auto it = std::find_if(records.begin(), records.end(), [&](const SentenceRecord& r) { return r.id() == id; });
  return it == records.end() ? nullptr : &*it;
}

const SentenceRecord& CorpusFile::at(std::string_view id) const {
  if (const auto* r = find(id)) return *r;
  throw NotFoundError("sentence '" + std::string(id) + "' not in corpus");
}

int CorpusFile::count(SentenceType t) const {
  return static_cast<int>(
      std::count_if(records.begin(), records.end(), [t](const SentenceRecord& r) { return r.type() == t; }));
}

void complete_metadata(Sentence& sentence) {
  for (auto& p : sentence.phrases) {
    if (p.char_count <= 0) p.char_count = count_chars(p.surface);
    if (p.mora_count <= 0 && p.reading) p.mora_count = count_morae(*p.reading);
  }
}

namespace {

SentenceRecord record_from_json(const ojson& j) {
  SentenceRecord rec;
  Sentence& s = rec.sentence;
  s.id = j.at("id").get<std::string>();
  s.type_tag = sentence_type_from_string(j.at("type").get<std::string>());
  PhraseIndex idx = 1;
  for (const auto& pj : j.at("phrases")) {
    Phrase p;
    p.index = idx++;
    p.surface = pj.at("surface").get<std::string>();
    if (pj.contains("reading")) p.reading = pj.at("reading").get<std::string>();
    p.char_count = pj.value("chars", 0);
    p.mora_count = pj.value("morae", 0);
    if (pj.contains("marker")) p.case_marker = case_marker_from_string(pj.at("marker").get<std::string>());
    s.phrases.push_back(std::move(p));
  }
  complete_metadata(s);
  for (const auto& p : s.phrases) {
    if (p.mora_count <= 0) {
      throw ParseError("phrase " + std::to_string(p.index) + " has neither a mora count nor a reading");
    }
  }
  rec.gold.heads = j.at("heads").get<std::vector<PhraseIndex>>();
  return rec;
}

ojson record_to_json(const SentenceRecord& rec) {
  ojson j;
  j["id"] = rec.id();
  j["type"] = std::string(to_string(rec.type()));
  ojson phrases = ojson::array();
  for (const auto& p : rec.sentence.phrases) {
    ojson pj;
    pj["surface"] = p.surface;
    if (p.reading) pj["reading"] = *p.reading;
    pj["chars"] = p.char_count;
    pj["morae"] = p.mora_count;
    if (p.case_marker) pj["marker"] = std::string(to_string(*p.case_marker));
    phrases.push_back(std::move(pj));
  }
  j["phrases"] = std::move(phrases);
  j["heads"] = rec.gold.heads;
  return j;
}

}  // namespace

CorpusFile parse_corpus(std::istream& in, const std::string& source) {
  CorpusFile corpus;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!header_seen) {
      if (j.value("format", "") != "kakari-corpus") throw ParseError(where + ": missing corpus header");
      corpus.version = j.value("version", 0);
      if (corpus.version != kCorpusFormatVersion)
        throw ParseError(where + ": unsupported corpus version " + std::to_string(corpus.version));
      header_seen = true;
      continue;
    }
    try {
      corpus.records.push_back(record_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + " (record " + j.value("id", std::string("?")) + "): " + e.what());
    } catch (const Error& e) {
      throw ParseError(where + " (record " + j.value("id", std::string("?")) + "): " + e.what());
    }
  }
  if (!header_seen) throw ParseError(source + ": empty corpus file");
  return corpus;
}

CorpusFile load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path.string());
  return parse_corpus(in, path.string());
}

void write_corpus(std::ostream& out, const CorpusFile& corpus) {
  ojson header;
  header["format"] = "kakari-corpus";
  header["version"] = corpus.version;
  out << header.dump() << '\n';
  for (const auto& rec : corpus.records) out << record_to_json(rec).dump() << '\n';
}

CorpusReport validate_corpus(const CorpusFile& corpus) {
  CorpusReport report;
  auto add = [&](const std::string& id, const char* check, std::string msg) {
    report.issues.push_back({id, check, std::move(msg)});
  };

  std::set<std::string> ids;
  for (const auto& rec : corpus.records) {
    const Sentence& s = rec.sentence;
    if (!ids.insert(rec.id()).second) add(rec.id(), "unique-id", "duplicate id '" + rec.id() + "'");

    if (s.size() < 2) add(rec.id(), "phrase", "sentence has fewer than 2 phrases");
    for (int i = 0; i < s.size(); ++i) {
      const Phrase& p = s.phrases[static_cast<size_t>(i)];
      const std::string at = "phrase " + std::to_string(i + 1);
      if (p.index != i + 1) add(rec.id(), "phrase", at + " carries index " + std::to_string(p.index));
      if (p.char_count < 1) add(rec.id(), "phrase", at + " has char_count < 1");
      if (p.mora_count < 1) add(rec.id(), "phrase", at + " has mora_count < 1");
      try {
        const int chars = count_chars(p.surface);
        if (chars != p.char_count)
          add(rec.id(), "metadata",
              at + " stores " + std::to_string(p.char_count) + " chars, surface has " + std::to_string(chars));
      } catch (const Error& e) {
        add(rec.id(), "metadata", at + ": " + e.what());
      }
      if (p.reading) {
        try {
          const int morae = count_morae(*p.reading);
          if (morae != p.mora_count)
            add(rec.id(), "metadata",
                at + " stores " + std::to_string(p.mora_count) + " morae, reading has " + std::to_string(morae));
        } catch (const InvalidReadingError& e) {
          add(rec.id(), "metadata", at + ": " + e.what());
        }
      }
    }

    for (const auto& v : validate_tree(rec.gold, s.size()).violations) add(rec.id(), "tree", v.message);

    if (rec.type() != SentenceType::Filler) {
      const GpTemplate tpl = gp_template(rec.type());
      if (s.size() != 6) {
        add(rec.id(), "gp-structure", "garden-path sentence must have 6 phrases");
      } else {
        for (size_t i = 0; i < 6; ++i) {
          if (s.phrases[i].case_marker != tpl.slots[i].marker) {
            add(rec.id(), "gp-structure",
                "phrase " + std::to_string(i + 1) + " marker does not match the " +
                    std::string(to_string(rec.type())) + " template");
          }
        }
      }
      if (rec.gold != tpl.gold)
        add(rec.id(), "gp-structure", "heads differ from the " + std::string(to_string(rec.type())) + " tree");
    }
  }
  return report;
}

}  // namespace kakari
