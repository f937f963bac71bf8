// Sentence splitting, tokenization and lemmatization behavior.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "negata/corpus.hpp"
#include "negata/errors.hpp"
#include "negata/paths.hpp"
#include "negata/textnorm.hpp"

using namespace negata;

namespace {

const Lemmatizer& shipped_lemmatizer() {
  static const Lemmatizer instance =
      Lemmatizer::from_file(default_data_dir() / "lemmas.tsv");
  return instance;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("sentence splitting on periods, bangs and newlines") {
  const auto spans = split_sentences("Жалоб нет. АД 140/90 мм рт. ст.");
  REQUIRE(spans.size() == 2);

  const std::string text = "Жалоб нет. АД 140/90 мм рт. ст.";
  const std::string first = text.substr(spans[0].begin, spans[0].end - spans[0].begin);
  const std::string second = text.substr(spans[1].begin, spans[1].end - spans[1].begin);
  CHECK(first == "Жалоб нет.");
  CHECK(second == "АД 140/90 мм рт. ст.");

  CHECK(split_sentences("").empty());
  CHECK(split_sentences("ОИМ в 2012 г. отрицает").size() == 1);
  CHECK(split_sentences("Жалоб нет! Курит? Не курит.").size() == 3);
  CHECK(split_sentences("первая строка\nвторая строка").size() == 2);
}

TEST_CASE("numeric contexts do not break sentences") {
  // digit.digit stays inside one sentence, slashes are plain characters
  CHECK(split_sentences("Температура 36.6 утром.").size() == 1);
  const auto spans = split_sentences("АД 140/90.");
  REQUIRE(spans.size() == 1);
  const auto tokens = tokenize("АД 140/90");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[1].text == "140");
  CHECK(tokens[2].text == "90");
}

TEST_CASE("sentence spans cover all non-whitespace text") {
  const std::string text = "Первое предложение.   Второе!  Третье?";
  const auto spans = split_sentences(text);
  REQUIRE(spans.size() == 3);
  std::vector<bool> covered(text.size(), false);
  for (const auto& s : spans) {
    CHECK(s.begin < s.end);
    for (std::size_t i = s.begin; i < s.end; ++i) covered[i] = true;
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != ' ') CHECK(covered[i]);
  }
  // spans are ordered and disjoint
  for (std::size_t i = 1; i < spans.size(); ++i) {
    CHECK(spans[i - 1].end <= spans[i].begin);
  }
}

TEST_CASE("custom abbreviation list suppresses breaks") {
  std::set<std::string> abbrevs = default_abbreviations();
  CHECK(split_sentences("ОИМ в 2012 г. отрицает", abbrevs).size() == 1);
  abbrevs.insert("проф");
  CHECK(split_sentences("Осмотрен проф. Ивановым", abbrevs).size() == 1);
  CHECK(split_sentences("Осмотрен проф. Ивановым").size() == 2);
}

TEST_CASE("tokenize lowercases, drops punctuation, keeps internal hyphens") {
  const auto t1 = tokenize("ОИМ, отрицает.");
  REQUIRE(t1.size() == 2);
  CHECK(t1[0].text == "оим");
  CHECK(t1[1].text == "отрицает");

  const auto t2 = tokenize("сахарный диабет 2 типа");
  REQUIRE(t2.size() == 4);
  CHECK(t2[0].text == "сахарный");
  CHECK(t2[1].text == "диабет");
  CHECK(t2[2].text == "2");
  CHECK(t2[3].text == "типа");

  const auto t3 = tokenize("стент-графт");
  REQUIRE(t3.size() == 1);
  CHECK(t3[0].text == "стент-графт");

  CHECK(tokenize("…—").empty());
}

TEST_CASE("token spans reference the original bytes in order") {
  const std::string sentence = "Перенес ОИМ, стент-графт установлен.";
  const auto tokens = tokenize(sentence);
  std::size_t previous_end = 0;
  for (const auto& tok : tokens) {
    CHECK(tok.begin >= previous_end);
    CHECK(tok.begin < tok.end);
    CHECK(tok.end <= sentence.size());
    previous_end = tok.end;
  }
  // surface bytes round-trip through the span
  CHECK(sentence.substr(tokens[0].begin, tokens[0].end - tokens[0].begin) ==
        "Перенес");
  CHECK(sentence.substr(tokens[1].begin, tokens[1].end - tokens[1].begin) == "ОИМ");
}

TEST_CASE("dictionary lemmatization of clinical forms") {
  const Lemmatizer& lemmas = shipped_lemmatizer();
  CHECK(lemmas.lemmatize("отрицает") == "отрицать");
  CHECK(lemmas.lemmatize("оим") == "оим");
  CHECK(lemmas.lemmatize("миокарда") == "миокард");
  CHECK(lemmas.lemmatize("инфарктов") == "инфаркт");
  CHECK(lemmas.lemmatize("проведено") == "провести");
  CHECK(lemmas.lemmatize("ознакомлен") == "ознакомить");
  CHECK(lemmas.lemmatize("лет") == "год");
  CHECK(lemmas.lemmatize("стентирование") == "стентирование");
  CHECK(lemmas.table_size() >= 2000);
}

TEST_CASE("lemmatization is total and idempotent") {
  const Lemmatizer& lemmas = shipped_lemmatizer();
  const char* samples[] = {
      "отрицает", "оим",         "миокарда",   "гипертензией", "стенокардии",
      "котиками", "qwerty",      "12345",      "ъ",            "перенесенного",
      "болезни",  "шунтированием", "градусами", "",             "а-б-в",
  };
  for (const char* s : samples) {
    const std::string once = lemmas.lemmatize(s);
    CHECK(lemmas.lemmatize(once) == once);
  }
}

TEST_CASE("suffix fallback strips unknown inflections but keeps short stems") {
  Lemmatizer empty{std::map<std::string, std::string>{}};
  // unknown long form loses its inflectional tail
  const std::string stripped = empty.lemmatize("градусами");
  CHECK(stripped != "градусами");
  CHECK(empty.lemmatize(stripped) == stripped);
  // three-codepoint tokens stay intact (minimum stem length)
  CHECK(empty.lemmatize("гоа") == "гоа");
  CHECK(empty.lemmatize("12") == "12");
}

TEST_CASE("lemma table loading validates format") {
  CHECK_THROWS_AS(Lemmatizer::from_file("/nonexistent/lemmas.tsv"), io_error);
  const auto bad = temp_file("negata_bad_lemmas.tsv", "одна_колонка\n");
  CHECK_THROWS_AS(Lemmatizer::from_file(bad), data_format_error);
  const auto conflict =
      temp_file("negata_conflict_lemmas.tsv", "форма\tодно\nформа\tдругое\n");
  CHECK_THROWS_AS(Lemmatizer::from_file(conflict), data_format_error);
  std::filesystem::remove(bad);
  std::filesystem::remove(conflict);
}

TEST_CASE("lemma table checksum tracks content") {
  const auto a = temp_file("negata_sum_a.tsv", "оим\tоим\nотрицает\tотрицать\n");
  const auto b = temp_file("negata_sum_b.tsv", "оим\tоим\nотрицает\tотрицать\n");
  const auto c = temp_file("negata_sum_c.tsv", "оим\tоим\n");
  const auto la = Lemmatizer::from_file(a);
  const auto lb = Lemmatizer::from_file(b);
  const auto lc = Lemmatizer::from_file(c);
  CHECK(la.checksum() == lb.checksum());
  CHECK(la.checksum() != lc.checksum());
  for (const auto& p : {a, b, c}) std::filesystem::remove(p);
}

TEST_CASE("normalize_document populates sentences with lemmas") {
  Document doc;
  doc.id = "d1";
  doc.text = "ОИМ отрицает.";
  doc = normalize_document(std::move(doc), shipped_lemmatizer());
  CHECK(doc.normalized);
  REQUIRE(doc.sentences.size() == 1);
  REQUIRE(doc.sentences[0].tokens.size() == 2);
  CHECK(doc.sentences[0].tokens[0].lemma == "оим");
  CHECK(doc.sentences[0].tokens[1].lemma == "отрицать");
  CHECK(doc.sentences[0].tokens[0].surface == "ОИМ");
  CHECK(doc.text == "ОИМ отрицает.");
}

TEST_CASE("normalize_document is idempotent and drops empty sentences") {
  Document doc;
  doc.id = "d1";
  doc.text = "Жалоб нет. …— ОИМ отрицает.";
  const Document once = normalize_document(doc, shipped_lemmatizer());
  const Document twice = normalize_document(once, shipped_lemmatizer());
  CHECK(once.sentences.size() == twice.sentences.size());
  for (std::size_t i = 0; i < once.sentences.size(); ++i) {
    CHECK(once.sentences[i].begin == twice.sentences[i].begin);
    CHECK(once.sentences[i].end == twice.sentences[i].end);
    CHECK(once.sentences[i].tokens.size() == twice.sentences[i].tokens.size());
  }

  Document punct;
  punct.id = "p";
  punct.text = "…—";
  CHECK(normalize_document(std::move(punct), shipped_lemmatizer()).sentences.empty());
}

TEST_CASE("loaded abbreviations extend the defaults") {
  const auto file = temp_file("negata_abbrev.txt", "проф\nзав\n");
  const auto abbrevs = load_abbreviations(file);
  CHECK(abbrevs.count("проф") == 1);
  CHECK(abbrevs.count("г") == 1);  // defaults preserved
  std::filesystem::remove(file);
}
