#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace negata {

struct Document;  // corpus.hpp

// One token of a normalized sentence. Spans are byte offsets into the
// sentence text; surface is the original substring, lemma the lowercased
// base form used for matching and vectorization.
struct Token {
  std::string surface;
  std::string lemma;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// A sentence of a document: byte span into the document text plus the
// ordered tokens found inside it.
struct Sentence {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<Token> tokens;
};

struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct RawToken {
  std::string text;  // lowercased
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Dictionary lemmatizer with a suffix-stripping fallback for forms missing
// from the table. Total and deterministic; repeated application is stable.
//
// Lookup order: exact table hit wins; otherwise the longest matching
// inflectional suffix is stripped (keeping a stem of at least three
// codepoints) and the result is looked up again, until neither applies.
// Table values are closed under lookup at load time so every returned lemma
// maps to itself.
class Lemmatizer {
 public:
  Lemmatizer() = default;
  explicit Lemmatizer(std::map<std::string, std::string> table);

  // TSV, one "surface<TAB>lemma" pair per line. Both columns are lowercased
  // on load. Conflicting duplicate surfaces are rejected.
  static Lemmatizer from_file(const std::filesystem::path& tsv);

  std::string lemmatize(std::string_view lowercased_token) const;

  std::size_t table_size() const { return table_.size(); }

  // FNV-1a over the sorted table entries; recorded in model files so a
  // reloaded model can warn when the active table differs.
  std::uint64_t checksum() const { return checksum_; }

 private:
  void close_over_values();

  std::map<std::string, std::string> table_;
  std::uint64_t checksum_ = 0;
};

// Abbreviations that suppress a sentence break after a following period.
const std::set<std::string>& default_abbreviations();

// One entry per line; returns the defaults extended with the file contents.
std::set<std::string> load_abbreviations(const std::filesystem::path& file);

// Sentence boundaries at . ! ? and newline, except after a listed
// abbreviation and inside digit.digit runs. Spans cover all non-whitespace
// text and never overlap.
std::vector<SentenceSpan> split_sentences(
    std::string_view text,
    const std::set<std::string>& abbreviations = default_abbreviations());

// Maximal letter/digit runs, internal hyphens kept, punctuation dropped.
// Token text is lowercased; spans reference the original bytes.
std::vector<RawToken> tokenize(std::string_view sentence);

// Populates doc.sentences (sentences that contain at least one token) and
// marks the document normalized. Raw text is left untouched; normalizing an
// already normalized document is a no-op.
Document normalize_document(
    Document doc, const Lemmatizer& lemmatizer,
    const std::set<std::string>& abbreviations = default_abbreviations());

}  // namespace negata
