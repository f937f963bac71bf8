#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "negata/corpus.hpp"
#include "negata/metrics.hpp"
#include "negata/trees.hpp"
#include "negata/vectorizer.hpp"

namespace negata {

// Disease -> lemma n-grams naming the disease. Backs the plain
// term-presence baseline and downstream diagnosis features.
class TermLexicon {
 public:
  // Lexicon for the canonical diseases.
  static const TermLexicon& builtin();
  // TSV, one "disease<TAB>lemma n-gram" per line.
  static TermLexicon from_file(const std::filesystem::path& tsv);

  void add(const DiseaseId& disease, const std::string& ngram);
  bool has(const DiseaseId& disease) const;
  // Registration order; stable, used as the downstream feature order.
  const std::vector<DiseaseId>& diseases() const { return order_; }
  const std::vector<std::vector<std::string>>& ngrams(const DiseaseId& disease) const;

 private:
  std::vector<DiseaseId> order_;
  std::map<DiseaseId, std::vector<std::vector<std::string>>> ngrams_;
};

struct DetectorParams {
  int rounds = 200;
  int depth = 4;
  double eta = 0.1;
  double lambda = 1.0;
  int min_leaf = 1;
  double test_fraction = 0.33;
  double tau = 0.0;  // sentence flagging threshold
  VectorizerParams vectorizer;
};

// Probabilities are always in the fixed class order [-1, 0, 1].
struct Classification {
  DiseaseLabel label = DiseaseLabel::NotMentioned;
  std::array<double, 3> proba{0.0, 0.0, 0.0};
};

struct SentenceAttribution {
  std::size_t sentence_index = 0;
  double score = 0.0;
  bool flagged = false;
};

struct AttributionReport {
  DiseaseLabel predicted = DiseaseLabel::NotMentioned;
  std::array<double, 3> proba{0.0, 0.0, 0.0};
  double base = 0.0;
  // Contributions of vocabulary terms that do not occur in the text (the
  // classifier can still route on their absence); they belong to no
  // sentence, so they are reported here instead of being spread around.
  double unattributed = 0.0;
  std::vector<SentenceAttribution> sentences;  // one entry per sentence
};

// Per-disease negation detector: TF-IDF over lemma n-grams plus a softmax
// gradient-boosted classifier with the fixed class order [-1, 0, 1].
class NegationDetector {
 public:
  NegationDetector() = default;
  NegationDetector(DiseaseId disease, TfIdfModel tfidf, GbdtModel classifier,
                   double tau, std::shared_ptr<const Lemmatizer> lemmatizer);

  const DiseaseId& disease() const { return disease_; }
  double tau() const { return tau_; }
  const TfIdfModel& tfidf() const { return tfidf_; }
  const GbdtModel& classifier() const { return classifier_; }
  const std::shared_ptr<const Lemmatizer>& lemmatizer() const { return lemmatizer_; }

  // Normalizes first when needed. An empty text maps to the all-zero vector
  // and therefore to the classifier's empty-vector prior (label 0 on the
  // shipped synthetic training setup).
  Classification classify(const Document& doc) const;

  // Decomposes the denied-class score over sentences: each vocabulary
  // term's contribution is split across the sentences containing it,
  // proportionally to per-sentence occurrence counts. A sentence is flagged
  // iff its score exceeds tau and the document classifies as denied.
  AttributionReport attribute_sentences(const Document& doc) const;

  // Removes flagged sentences (whole sentences, with the separator that
  // follows them) and repeats until nothing is flagged, so the result is a
  // fixed point. Unflagged sentence text is preserved byte for byte.
  Document strip_negations(const Document& doc) const;

 private:
  DiseaseId disease_;
  TfIdfModel tfidf_;
  GbdtModel classifier_;
  double tau_ = 0.0;
  std::shared_ptr<const Lemmatizer> lemmatizer_;
};

struct TrainedDetector {
  NegationDetector detector;
  MetricsReport metrics;  // on the held-out test portion
};

// Stratified seeded split, TF-IDF fitted on the training portion only, then
// a softmax GBDT on the three labels. Every document must be normalized and
// labeled for the disease, and all three classes must be present.
TrainedDetector train_detector(const std::vector<Document>& docs,
                               const DiseaseId& disease,
                               const DetectorParams& params, std::uint64_t seed,
                               std::shared_ptr<const Lemmatizer> lemmatizer);

// 1 iff any lexicon n-gram of the disease occurs contiguously inside one
// sentence of the (normalized) document. The baseline has no notion of
// negation: "ОИМ отрицает" still yields 1.
DiseaseLabel term_search_label(const TermLexicon& lexicon, const Document& doc,
                               const DiseaseId& disease);

struct BaselineComparison {
  double fp_rate = 0.0;  // term search 1, classifier -1
  double fn_rate = 0.0;  // term search 0, classifier 1
};

// Disagreement rates between the term-search baseline and the classifier
// over a document set, as fractions of the set size.
BaselineComparison compare_baseline(const NegationDetector& detector,
                                    const TermLexicon& lexicon,
                                    const std::vector<Document>& docs);

}  // namespace negata
