// Vocabulary construction and TF-IDF transformation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "negata/corpus.hpp"
#include "negata/errors.hpp"
#include "negata/textnorm.hpp"
#include "negata/vectorizer.hpp"

using namespace negata;

namespace {

// Identity lemmatizer over the words used here keeps lemmas == tokens.
const Lemmatizer& identity_lemmatizer() {
  static const Lemmatizer instance{std::map<std::string, std::string>{
      {"оим", "оим"},       {"отрицать", "отрицать"}, {"миокард", "миокард"},
      {"год", "год"},       {"нет", "нет"},           {"жалоба", "жалоба"},
      {"ибс", "ибс"},       {"анамнез", "анамнез"},
  }};
  return instance;
}

Document make_doc(const std::string& id, const std::string& text) {
  Document doc;
  doc.id = id;
  doc.text = text;
  return normalize_document(std::move(doc), identity_lemmatizer());
}

}  // namespace

TEST_CASE("vocabulary collects unigrams and within-sentence bigrams with df") {
  const std::vector<Document> docs = {make_doc("d1", "оим отрицать"),
                                      make_doc("d2", "оим")};
  const Vocabulary vocab = build_vocabulary(docs);
  REQUIRE(vocab.size() == 3);
  CHECK(vocab.index_of("оим") >= 0);
  CHECK(vocab.index_of("отрицать") >= 0);
  CHECK(vocab.index_of("оим отрицать") >= 0);
  CHECK(vocab.df(vocab.index_of("оим")) == 2);
  CHECK(vocab.df(vocab.index_of("отрицать")) == 1);
  CHECK(vocab.df(vocab.index_of("оим отрицать")) == 1);
  CHECK(vocab.doc_count() == 2);
  CHECK(vocab.index_of("никогда") == -1);
}

TEST_CASE("terms are indexed in lexicographic order") {
  const std::vector<Document> docs = {make_doc("d1", "оим отрицать"),
                                      make_doc("d2", "оим")};
  const Vocabulary vocab = build_vocabulary(docs);
  for (int i = 1; i < vocab.size(); ++i) {
    CHECK(vocab.term(i - 1) < vocab.term(i));
  }
  // two builds over the same corpus agree exactly
  const Vocabulary again = build_vocabulary(docs);
  REQUIRE(again.size() == vocab.size());
  for (int i = 0; i < vocab.size(); ++i) {
    CHECK(again.term(i) == vocab.term(i));
    CHECK(again.df(i) == vocab.df(i));
  }
}

TEST_CASE("bigrams never cross sentence boundaries") {
  const std::vector<Document> docs = {make_doc("d1", "оим. отрицать.")};
  const Vocabulary vocab = build_vocabulary(docs);
  CHECK(vocab.index_of("оим") >= 0);
  CHECK(vocab.index_of("отрицать") >= 0);
  CHECK(vocab.index_of("оим отрицать") == -1);
}

TEST_CASE("empty corpus gives an empty vocabulary") {
  const std::vector<Document> docs;
  CHECK(build_vocabulary(docs).size() == 0);
  const TfIdfModel model = fit_tfidf(docs);
  CHECK(model.vocabulary().size() == 0);
}

TEST_CASE("min_df filters rare terms") {
  const std::vector<Document> docs = {make_doc("d1", "оим отрицать"),
                                      make_doc("d2", "оим")};
  VectorizerParams params;
  params.min_df = 2;
  const Vocabulary vocab = build_vocabulary(docs, params);
  REQUIRE(vocab.size() == 1);
  CHECK(vocab.term(0) == "оим");
}

TEST_CASE("tf-idf weights match the hand-computed two-document case") {
  const std::vector<Document> docs = {make_doc("d1", "оим отрицать"),
                                      make_doc("d2", "оим")};
  VectorizerParams params;
  params.use_bigrams = false;
  const TfIdfModel model = fit_tfidf(docs, params);

  const int i_oim = model.vocabulary().index_of("оим");
  const int i_otr = model.vocabulary().index_of("отрицать");
  REQUIRE(i_oim >= 0);
  REQUIRE(i_otr >= 0);
  CHECK(model.idf(i_oim) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.idf(i_otr) == doctest::Approx(std::log(3.0 / 2.0) + 1.0).epsilon(1e-12));
  CHECK(model.idf(i_otr) == doctest::Approx(1.40546).epsilon(1e-5));

  const SparseVector v = model.transform(docs[0]);
  REQUIRE(v.entries.size() == 2);
  const double w_oim = v.get(i_oim);
  const double w_otr = v.get(i_otr);
  CHECK(w_oim == doctest::Approx(0.5797).epsilon(1e-3));
  CHECK(w_otr == doctest::Approx(0.8148).epsilon(1e-3));

  // independent evaluation of the formulas
  const double idf_otr = std::log(3.0 / 2.0) + 1.0;
  const double norm = std::sqrt(1.0 * 1.0 + idf_otr * idf_otr);
  CHECK(w_oim == doctest::Approx(1.0 / norm).epsilon(1e-9));
  CHECK(w_otr == doctest::Approx(idf_otr / norm).epsilon(1e-9));
}

TEST_CASE("single-document corpus has idf 1 everywhere") {
  const std::vector<Document> docs = {make_doc("d1", "оим оим отрицать")};
  VectorizerParams params;
  params.use_bigrams = false;
  const TfIdfModel model = fit_tfidf(docs, params);
  for (int i = 0; i < model.vocabulary().size(); ++i) {
    CHECK(model.idf(i) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // vector proportional to raw counts (2, 1)
  const SparseVector v = model.transform(docs[0]);
  const double w_oim = v.get(model.vocabulary().index_of("оим"));
  const double w_otr = v.get(model.vocabulary().index_of("отрицать"));
  CHECK(w_oim == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-9));
  CHECK(w_otr == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-9));
}

TEST_CASE("transformed vectors are L2-normalized or all-zero") {
  const std::vector<Document> docs = {
      make_doc("d1", "оим отрицать. ибс миокард."),
      make_doc("d2", "жалоба нет"),
      make_doc("d3", "оим. оим. анамнез год."),
  };
  const TfIdfModel model = fit_tfidf(docs);
  for (const auto& doc : docs) {
    const SparseVector v = model.transform(doc);
    double norm_sq = 0.0;
    int previous = -1;
    for (const auto& [index, weight] : v.entries) {
      CHECK(index > previous);
      CHECK(weight != 0.0);
      previous = index;
      norm_sq += weight * weight;
    }
    CHECK(std::abs(std::sqrt(norm_sq) - 1.0) <= 1e-9);
  }
  // a document of only out-of-vocabulary lemmas maps to the zero vector
  const SparseVector zero = model.transform(make_doc("d4", "стенокардия"));
  CHECK(zero.entries.empty());
}

TEST_CASE("idf decreases as document frequency grows") {
  const std::vector<Document> docs = {
      make_doc("d1", "оим отрицать"), make_doc("d2", "оим"),
      make_doc("d3", "оим миокард"), make_doc("d4", "миокард")};
  const TfIdfModel model = fit_tfidf(docs);
  const auto& vocab = model.vocabulary();
  for (int i = 0; i < vocab.size(); ++i) {
    for (int j = 0; j < vocab.size(); ++j) {
      if (vocab.df(i) > vocab.df(j)) CHECK(model.idf(i) < model.idf(j));
    }
  }
}

TEST_CASE("transform rejects unnormalized documents") {
  const std::vector<Document> docs = {make_doc("d1", "оим")};
  const TfIdfModel model = fit_tfidf(docs);
  Document raw;
  raw.id = "raw";
  raw.text = "оим";
  CHECK_THROWS_AS(model.transform(raw), argument_error);
}

TEST_CASE("fitting on an index subset ignores held-out documents") {
  const std::vector<Document> docs = {make_doc("d1", "оим отрицать"),
                                      make_doc("d2", "оим"),
                                      make_doc("d3", "миокард")};
  const std::vector<std::size_t> train = {0, 1};
  const TfIdfModel model = fit_tfidf(docs, train);
  CHECK(model.vocabulary().doc_count() == 2);
  CHECK(model.vocabulary().index_of("миокард") == -1);
  CHECK(model.vocabulary().index_of("оим") >= 0);
}

TEST_CASE("sentence term counts include adjacent bigrams when enabled") {
  const Document doc = make_doc("d1", "оим оим отрицать");
  REQUIRE(doc.sentences.size() == 1);
  const auto with = sentence_term_counts(doc.sentences[0], true);
  CHECK(with.at("оим") == 2);
  CHECK(with.at("отрицать") == 1);
  CHECK(with.at("оим оим") == 1);
  CHECK(with.at("оим отрицать") == 1);
  const auto without = sentence_term_counts(doc.sentences[0], false);
  CHECK(without.size() == 2);
  CHECK(without.count("оим отрицать") == 0);
}
