#include "negata/textnorm.hpp"

#include <algorithm>
#include <fstream>

#include "negata/corpus.hpp"
#include "negata/errors.hpp"
#include "negata/utf8.hpp"

namespace negata {

namespace {

bool is_terminator(char32_t cp) {
  return cp == U'.' || cp == U'!' || cp == U'?';
}

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\r' || cp == U'\n' ||
         cp == U'\v' || cp == U'\f' || cp == 0x00A0;
}

// Lowercased letter/digit run ending right before byte position pos.
std::string preceding_token(std::string_view text, std::size_t pos) {
  std::size_t start = pos;
  while (start > 0) {
    std::size_t prev = start - 1;
    while (prev > 0 &&
           (static_cast<unsigned char>(text[prev]) & 0xC0) == 0x80) {
      --prev;
    }
    std::size_t tmp = prev;
    const char32_t cp = utf8::decode(text, tmp);
    if (!utf8::is_letter(cp) && !utf8::is_digit(cp)) break;
    start = prev;
  }
  if (start == pos) return {};
  return utf8::lower_copy(text.substr(start, pos - start));
}

// Inflectional endings tried by the fallback, longest first. Quality only
// needs to be coarse: dictionary hits cover the vocabulary that matters.
const std::vector<std::string>& fallback_suffixes() {
  static const std::vector<std::string> list = [] {
    std::vector<std::string> s = {
        // verbs
        "ировать", "овать", "евать", "ывать", "ивать", "ать", "ять", "еть",
        "ить", "ыть", "ует", "уют", "ает", "яет", "еет", "ишь", "ешь", "ал",
        "ял", "ел", "ил", "ала", "яла", "ела", "ила", "али", "яли", "ели",
        "или", "ало", "ело", "ило", "ет", "ют", "ит", "ат", "ят", "ен",
        "ена", "ено", "ены",
        // adjectives
        "ейший", "ого", "его", "ому", "ему", "ыми", "ими", "ый", "ий", "ая",
        "яя", "ое", "ее", "ые", "ие", "ых", "их", "ым", "им", "ую", "юю",
        // nouns
        "иями", "ями", "ами", "иях", "иям", "ией", "ях", "ах", "ям", "ам",
        "ей", "ой", "ом", "ем", "ём", "ов", "ев", "ия", "ию", "ии", "ье",
        "ья", "ью", "а", "я", "о", "е", "у", "ю", "ы", "и", "ь",
    };
    std::sort(s.begin(), s.end(), [](const std::string& a, const std::string& b) {
      const auto la = utf8::length(a), lb = utf8::length(b);
      return la != lb ? la > lb : a < b;
    });
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  }();
  return list;
}

std::string strip_longest_suffix(const std::string& word) {
  const std::size_t word_len = utf8::length(word);
  for (const auto& sfx : fallback_suffixes()) {
    if (sfx.size() >= word.size()) continue;
    const std::size_t sfx_len = utf8::length(sfx);
    if (word_len < sfx_len + 3) continue;  // keep a stem of 3+ codepoints
    if (word.compare(word.size() - sfx.size(), sfx.size(), sfx) == 0) {
      return word.substr(0, word.size() - sfx.size());
    }
  }
  return word;
}

}  // namespace

Lemmatizer::Lemmatizer(std::map<std::string, std::string> table)
    : table_(std::move(table)) {
  close_over_values();
}

void Lemmatizer::close_over_values() {
  // Make every value a fixed point of the table so lemmatization is
  // idempotent even for chained or missing lemma entries.
  for (auto& [surface, lemma] : table_) {
    std::string v = lemma;
    for (int guard = 0; guard < 16; ++guard) {
      auto it = table_.find(v);
      if (it == table_.end() || it->second == v) break;
      v = it->second;
    }
    lemma = v;
  }
  std::map<std::string, std::string> extra;
  for (const auto& [surface, lemma] : table_) {
    if (!table_.count(lemma)) extra.emplace(lemma, lemma);
  }
  table_.insert(extra.begin(), extra.end());

  std::uint64_t h = 14695981039346656037ull;  // FNV-1a 64
  auto mix = [&h](std::string_view s) {
    for (const char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  };
  for (const auto& [surface, lemma] : table_) {
    mix(surface);
    mix("\t");
    mix(lemma);
    mix("\n");
  }
  checksum_ = h;
}

Lemmatizer Lemmatizer::from_file(const std::filesystem::path& tsv) {
  std::ifstream in(tsv);
  if (!in) throw io_error("cannot read lemma table: " + tsv.string());
  std::map<std::string, std::string> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw data_format_error("lemma table line " + std::to_string(lineno) +
                              ": expected surface<TAB>lemma");
    }
    std::string surface = utf8::lower_copy(std::string_view(line).substr(0, tab));
    std::string lemma = utf8::lower_copy(std::string_view(line).substr(tab + 1));
    if (surface.empty() || lemma.empty()) {
      throw data_format_error("lemma table line " + std::to_string(lineno) +
                              ": empty surface or lemma");
    }
    auto [it, inserted] = table.emplace(surface, lemma);
    if (!inserted && it->second != lemma) {
      throw data_format_error("lemma table line " + std::to_string(lineno) +
                              ": conflicting entry for '" + surface + "'");
    }
  }
  return Lemmatizer(std::move(table));
}

std::string Lemmatizer::lemmatize(std::string_view lowercased_token) const {
  std::string cur(lowercased_token);
  while (true) {
    auto it = table_.find(cur);
    if (it != table_.end()) return it->second;
    std::string stripped = strip_longest_suffix(cur);
    if (stripped == cur) return cur;
    cur = std::move(stripped);
  }
}

const std::set<std::string>& default_abbreviations() {
  static const std::set<std::string> abbrevs = {
      "г", "гг", "мм", "рт", "ст", "т", "д", "др", "лет"};
  return abbrevs;
}

std::set<std::string> load_abbreviations(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw io_error("cannot read abbreviation list: " + file.string());
  std::set<std::string> out = default_abbreviations();
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (!line.empty()) out.insert(utf8::lower_copy(line));
  }
  return out;
}

std::vector<SentenceSpan> split_sentences(
    std::string_view text, const std::set<std::string>& abbreviations) {
  std::vector<SentenceSpan> spans;
  std::size_t i = 0;
  bool open = false;
  std::size_t start = 0;
  std::size_t last_nonws_end = 0;
  char32_t prev_cp = 0;
  while (i < text.size()) {
    const std::size_t cp_begin = i;
    const char32_t cp = utf8::decode(text, i);
    if (cp == U'\n') {
      if (open) {
        spans.push_back({start, last_nonws_end});
        open = false;
      }
      prev_cp = cp;
      continue;
    }
    if (!is_space(cp)) {
      if (!open) {
        open = true;
        start = cp_begin;
      }
      last_nonws_end = i;
    }
    if (open && is_terminator(cp)) {
      bool boundary = true;
      if (cp == U'.') {
        std::size_t j = i;
        const char32_t next = (j < text.size()) ? utf8::decode(text, j) : 0;
        if (utf8::is_digit(prev_cp) && utf8::is_digit(next)) {
          boundary = false;  // decimal like 36.6
        } else if (abbreviations.count(preceding_token(text, cp_begin))) {
          boundary = false;
        }
      }
      if (boundary) {
        // Pull the rest of a ?!. run into this sentence.
        while (i < text.size()) {
          std::size_t j = i;
          if (!is_terminator(utf8::decode(text, j))) break;
          i = j;
          last_nonws_end = i;
        }
        spans.push_back({start, last_nonws_end});
        open = false;
        prev_cp = 0;
        continue;
      }
    }
    prev_cp = cp;
  }
  if (open) spans.push_back({start, last_nonws_end});
  return spans;
}

std::vector<RawToken> tokenize(std::string_view sentence) {
  std::vector<RawToken> out;
  std::size_t i = 0;
  bool open = false;
  std::size_t start = 0;
  std::string lowered;
  auto close = [&](std::size_t end) {
    if (open) {
      out.push_back({lowered, start, end});
      lowered.clear();
      open = false;
    }
  };
  while (i < sentence.size()) {
    const std::size_t cp_begin = i;
    const char32_t cp = utf8::decode(sentence, i);
    if (utf8::is_letter(cp) || utf8::is_digit(cp)) {
      if (!open) {
        open = true;
        start = cp_begin;
      }
      utf8::append(lowered, utf8::to_lower(cp));
    } else if (cp == U'-' && open) {
      // Internal hyphen: kept only when followed by a letter or digit.
      std::size_t j = i;
      const char32_t next = (j < sentence.size()) ? utf8::decode(sentence, j) : 0;
      if (utf8::is_letter(next) || utf8::is_digit(next)) {
        lowered.push_back('-');
      } else {
        close(cp_begin);
      }
    } else {
      close(cp_begin);
    }
  }
  close(sentence.size());
  return out;
}

Document normalize_document(Document doc, const Lemmatizer& lemmatizer,
                            const std::set<std::string>& abbreviations) {
  if (doc.normalized) return doc;
  doc.sentences.clear();
  for (const auto& span : split_sentences(doc.text, abbreviations)) {
    Sentence sentence{span.begin, span.end, {}};
    const auto view =
        std::string_view(doc.text).substr(span.begin, span.end - span.begin);
    for (const auto& raw : tokenize(view)) {
      sentence.tokens.push_back(
          {std::string(view.substr(raw.begin, raw.end - raw.begin)),
           lemmatizer.lemmatize(raw.text), raw.begin, raw.end});
    }
    if (!sentence.tokens.empty()) doc.sentences.push_back(std::move(sentence));
  }
  doc.normalized = true;
  return doc;
}

}  // namespace negata
