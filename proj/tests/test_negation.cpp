// Term lexicon, the term-search baseline, detector training, sentence
// attribution and negation stripping.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "negata/errors.hpp"
#include "negata/negation.hpp"
#include "negata/paths.hpp"

using namespace negata;

namespace {

std::shared_ptr<const Lemmatizer> shipped_lemmatizer() {
  static const auto instance = std::make_shared<const Lemmatizer>(
      Lemmatizer::from_file(default_data_dir() / "lemmas.tsv"));
  return instance;
}

Document make_doc(const std::string& id, const std::string& text) {
  Document doc;
  doc.id = id;
  doc.text = text;
  return normalize_document(std::move(doc), *shipped_lemmatizer());
}

// Small corpus + quick boosting settings shared by the training tests.
std::vector<Document> small_corpus() {
  SynthParams params;
  params.size = 120;
  params.diseases = {"MI"};
  params.with_targets = false;
  auto docs = generate_synthetic_corpus(params);
  for (auto& doc : docs) {
    doc = normalize_document(std::move(doc), *shipped_lemmatizer());
  }
  return docs;
}

DetectorParams quick_params() {
  DetectorParams params;
  params.rounds = 60;
  params.depth = 3;
  return params;
}

const NegationDetector& trained_mi() {
  static const TrainedDetector trained = train_detector(
      small_corpus(), "MI", quick_params(), 42, shipped_lemmatizer());
  return trained.detector;
}

std::filesystem::path temp_file(const std::string& name,
                                const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("builtin lexicon covers the five diseases in canonical order") {
  const TermLexicon& lex = TermLexicon::builtin();
  CHECK(lex.diseases() == canonical_diseases());
  for (const auto& disease : canonical_diseases()) CHECK(lex.has(disease));
  CHECK_FALSE(lex.has("COPD"));
  CHECK_THROWS_AS(lex.ngrams("COPD"), argument_error);

  const auto& mi = lex.ngrams("MI");
  bool has_oim = false, has_bigram = false;
  for (const auto& ngram : mi) {
    if (ngram == std::vector<std::string>{"оим"}) has_oim = true;
    if (ngram == std::vector<std::string>{"инфаркт", "миокард"}) has_bigram = true;
  }
  CHECK(has_oim);
  CHECK(has_bigram);
}

TEST_CASE("lexicon files load in line order") {
  const auto path = temp_file("lex_order.tsv",
                              "MI\tоим\nstroke\tонмк\nMI\tинфаркт миокард\n");
  const TermLexicon lex = TermLexicon::from_file(path);
  CHECK(lex.diseases() == std::vector<DiseaseId>{"MI", "stroke"});
  REQUIRE(lex.ngrams("MI").size() == 2);
  CHECK(lex.ngrams("MI")[1] == std::vector<std::string>{"инфаркт", "миокард"});
  std::filesystem::remove(path);
}

TEST_CASE("lexicon file errors are reported") {
  CHECK_THROWS_AS(TermLexicon::from_file("/nonexistent/lexicon.tsv"), io_error);
  const auto one_column = temp_file("lex_bad.tsv", "MI\n");
  CHECK_THROWS_AS(TermLexicon::from_file(one_column), data_format_error);
  std::filesystem::remove(one_column);
  const auto empty_term = temp_file("lex_empty.tsv", "MI\t\n");
  CHECK_THROWS_AS(TermLexicon::from_file(empty_term), data_format_error);
  std::filesystem::remove(empty_term);
}

TEST_CASE("term search finds lexicon terms regardless of negation") {
  const TermLexicon& lex = TermLexicon::builtin();
  CHECK(term_search_label(lex, make_doc("a", "ОИМ отрицает."), "MI") ==
        DiseaseLabel::Present);
  CHECK(term_search_label(lex, make_doc("b", "Перенесен инфаркт миокарда."),
                          "MI") == DiseaseLabel::Present);
  CHECK(term_search_label(lex, make_doc("c", "Жалоб нет."), "MI") ==
        DiseaseLabel::NotMentioned);
  CHECK(term_search_label(lex, make_doc("d", ""), "MI") ==
        DiseaseLabel::NotMentioned);
  // unknown disease has no terms to find
  CHECK(term_search_label(lex, make_doc("e", "ОИМ."), "stroke") ==
        DiseaseLabel::NotMentioned);
}

TEST_CASE("multi-word terms must be contiguous inside one sentence") {
  TermLexicon lex;
  lex.add("X", "сахарный диабет");
  CHECK(term_search_label(lex, make_doc("a", "Выявлен сахарный диабет."), "X") ==
        DiseaseLabel::Present);
  CHECK(term_search_label(lex, make_doc("b", "Сахарный. Диабет."), "X") ==
        DiseaseLabel::NotMentioned);
  CHECK(term_search_label(lex, make_doc("c", "Сахарный песок. Диабет."), "X") ==
        DiseaseLabel::NotMentioned);
  Document raw;
  raw.id = "raw";
  raw.text = "сахарный диабет";
  CHECK_THROWS_AS(term_search_label(lex, raw, "X"), argument_error);
}

TEST_CASE("training validates labels, classes and normalization") {
  auto docs = small_corpus();
  const auto params = quick_params();

  auto missing = docs;
  missing[5].labels.erase("MI");
  CHECK_THROWS_WITH_AS(
      train_detector(missing, "MI", params, 42, shipped_lemmatizer()),
      doctest::Contains(missing[5].id.c_str()), argument_error);

  auto unnormalized = docs;
  unnormalized[3].normalized = false;
  CHECK_THROWS_AS(
      train_detector(unnormalized, "MI", params, 42, shipped_lemmatizer()),
      argument_error);

  // drop every denied document: class -1 disappears
  std::vector<Document> two_classes;
  for (const auto& doc : docs) {
    if (doc.labels.at("MI") != DiseaseLabel::Denied) two_classes.push_back(doc);
  }
  CHECK_THROWS_WITH_AS(
      train_detector(two_classes, "MI", params, 42, shipped_lemmatizer()),
      doctest::Contains("-1"), argument_error);

  CHECK_THROWS_AS(train_detector({}, "MI", params, 42, shipped_lemmatizer()),
                  argument_error);
}

TEST_CASE("a trained detector separates denial from presence") {
  const NegationDetector& detector = trained_mi();
  CHECK(detector.disease() == "MI");

  const Classification denied = detector.classify(make_doc("q1", "ОИМ отрицает."));
  CHECK(denied.label == DiseaseLabel::Denied);
  const Classification present =
      detector.classify(make_doc("q2", "Перенесен острый инфаркт миокарда."));
  CHECK(present.label == DiseaseLabel::Present);

  double total = 0.0;
  for (const double p : denied.proba) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  // held-out metrics on the easy synthetic corpus are strong
  const TrainedDetector trained = train_detector(
      small_corpus(), "MI", quick_params(), 42, shipped_lemmatizer());
  CHECK(trained.metrics.macro_f1 >= 0.8);
  CHECK(trained.metrics.accuracy >= 0.8);
  CHECK(trained.metrics.n_evaluated > 0);
  long long support = 0;
  for (const long long s : trained.metrics.support) support += s;
  CHECK(support == trained.metrics.n_evaluated);
}

TEST_CASE("classification agrees with the synthetic labels on most documents") {
  const NegationDetector& detector = trained_mi();
  const auto docs = small_corpus();
  int agree = 0;
  for (const auto& doc : docs) {
    if (detector.classify(doc).label == doc.labels.at("MI")) ++agree;
  }
  CHECK(agree >= static_cast<int>(docs.size() * 9) / 10);
}

TEST_CASE("empty text classifies as not mentioned") {
  const NegationDetector& detector = trained_mi();
  CHECK(detector.classify(make_doc("empty", "")).label ==
        DiseaseLabel::NotMentioned);
}

TEST_CASE("sentence attribution concentrates on the denial sentence") {
  const NegationDetector& detector = trained_mi();
  const Document doc = make_doc("attr", "Курит давно. ОИМ отрицает.");
  const AttributionReport report = detector.attribute_sentences(doc);

  REQUIRE(report.sentences.size() == 2);
  CHECK(report.sentences[0].sentence_index == 0);
  CHECK(report.sentences[1].sentence_index == 1);
  CHECK(report.predicted == DiseaseLabel::Denied);
  CHECK(report.sentences[1].score > report.sentences[0].score);
  CHECK(report.sentences[1].flagged);
  CHECK_FALSE(report.sentences[0].flagged);

  // scores decompose the denied-class raw score exactly
  const double raw = detector.classifier().raw_scores(
      detector.tfidf().transform(doc))[0];
  double total = report.base + report.unattributed;
  for (const auto& s : report.sentences) total += s.score;
  CHECK(std::abs(total - raw) <= 1e-9);
}

TEST_CASE("attribution never flags sentences of non-denied documents") {
  const NegationDetector& detector = trained_mi();
  const Document doc = make_doc("pres", "Перенесен острый инфаркт миокарда.");
  const AttributionReport report = detector.attribute_sentences(doc);
  CHECK(report.predicted != DiseaseLabel::Denied);
  for (const auto& s : report.sentences) CHECK_FALSE(s.flagged);
}

TEST_CASE("stripping removes flagged sentences and keeps the rest verbatim") {
  const NegationDetector& detector = trained_mi();
  const Document doc = make_doc("strip", "Курит давно. ОИМ отрицает.");
  const Document cleaned = detector.strip_negations(doc);

  CHECK(cleaned.id == doc.id);
  CHECK(cleaned.normalized);
  CHECK(cleaned.text.find("Курит давно.") == 0);
  CHECK(cleaned.text.find("отрицает") == std::string::npos);
  CHECK(detector.classify(cleaned).label != DiseaseLabel::Denied);

  // fixed point: a second pass changes nothing
  const Document again = detector.strip_negations(cleaned);
  CHECK(again.text == cleaned.text);

  // documents without denial pass through untouched
  const Document keep = make_doc("keep", "Перенесен острый инфаркт миокарда.");
  CHECK(detector.strip_negations(keep).text == keep.text);
}

TEST_CASE("stripping never introduces new term matches") {
  const NegationDetector& detector = trained_mi();
  const TermLexicon& lex = TermLexicon::builtin();
  const auto docs = small_corpus();
  for (std::size_t i = 0; i < 30; ++i) {
    const Document& doc = docs[i];
    const Document cleaned = detector.strip_negations(doc);
    if (term_search_label(lex, doc, "MI") == DiseaseLabel::NotMentioned) {
      CHECK(term_search_label(lex, cleaned, "MI") == DiseaseLabel::NotMentioned);
    }
  }
}

TEST_CASE("baseline disagreement rates match a direct recount") {
  const NegationDetector& detector = trained_mi();
  const TermLexicon& lex = TermLexicon::builtin();

  std::vector<Document> docs;
  docs.push_back(make_doc("p1", "ОИМ отрицает."));
  docs.push_back(make_doc("p2", "Перенесен инфаркт миокарда."));
  docs.push_back(make_doc("p3", "Жалоб нет."));
  docs.push_back(make_doc("p4", "Курит давно."));

  // the constructed false-positive case must actually classify as denied
  REQUIRE(detector.classify(docs[0]).label == DiseaseLabel::Denied);
  REQUIRE(term_search_label(lex, docs[0], "MI") == DiseaseLabel::Present);

  const BaselineComparison got = compare_baseline(detector, lex, docs);
  int fp = 0, fn = 0;
  for (const auto& doc : docs) {
    const DiseaseLabel term = term_search_label(lex, doc, "MI");
    const DiseaseLabel clf = detector.classify(doc).label;
    fp += term == DiseaseLabel::Present && clf == DiseaseLabel::Denied;
    fn += term == DiseaseLabel::NotMentioned && clf == DiseaseLabel::Present;
  }
  CHECK(got.fp_rate == static_cast<double>(fp) / 4.0);
  CHECK(got.fn_rate == static_cast<double>(fn) / 4.0);
  CHECK(got.fp_rate == 0.25);

  CHECK_THROWS_AS(compare_baseline(detector, lex, {}), argument_error);
}
