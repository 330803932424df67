#pragma once

#include <stdexcept>
#include <string>

namespace kakari {

// Base of every error thrown by the library. `category()` is a short stable
// tag used by the CLI for exit codes and by the service for error replies.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}
  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

#define KAKARI_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(tag, what) {}         \
  }

KAKARI_DEFINE_ERROR(DegenerateInputError, "degenerate-input");
KAKARI_DEFINE_ERROR(InvalidStateError, "invalid-state");
KAKARI_DEFINE_ERROR(InvalidComparisonError, "invalid-comparison");
KAKARI_DEFINE_ERROR(InvalidReadingError, "invalid-reading");
KAKARI_DEFINE_ERROR(InsufficientLexiconError, "insufficient-lexicon");
KAKARI_DEFINE_ERROR(ParseError, "parse");
KAKARI_DEFINE_ERROR(InsufficientCorpusError, "insufficient-corpus");
KAKARI_DEFINE_ERROR(ConfigError, "config");
KAKARI_DEFINE_ERROR(ClockError, "clock");
KAKARI_DEFINE_ERROR(ExtractionError, "extraction");
KAKARI_DEFINE_ERROR(RankDeficientError, "rank-deficient");
KAKARI_DEFINE_ERROR(InsufficientDataError, "insufficient-data");
KAKARI_DEFINE_ERROR(UndefinedResidualError, "undefined-residual");
KAKARI_DEFINE_ERROR(IoError, "io");
KAKARI_DEFINE_ERROR(NotFoundError, "not-found");

#undef KAKARI_DEFINE_ERROR

}  // namespace kakari
