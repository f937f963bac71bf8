#include "negata/negation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "negata/errors.hpp"
#include "negata/textnorm.hpp"
#include "negata/utf8.hpp"

namespace negata {

namespace {

std::vector<std::string> split_ngram(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> parts;
  std::string word;
  while (in >> word) parts.push_back(utf8::lower_copy(word));
  return parts;
}

bool sentence_has_phrase(const Sentence& sentence,
                         const std::vector<std::string>& phrase) {
  const auto& tokens = sentence.tokens;
  if (phrase.empty() || tokens.size() < phrase.size()) return false;
  for (std::size_t start = 0; start + phrase.size() <= tokens.size(); ++start) {
    bool all = true;
    for (std::size_t j = 0; j < phrase.size(); ++j) {
      if (tokens[start + j].lemma != phrase[j]) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

}  // namespace

const TermLexicon& TermLexicon::builtin() {
  static const TermLexicon instance = [] {
    TermLexicon lex;
    lex.add("stroke", "онмк");
    lex.add("stroke", "инсульт");
    lex.add("MI", "оим");
    lex.add("MI", "ими");
    lex.add("MI", "инфаркт");
    lex.add("MI", "инфаркт миокард");
    lex.add("AH", "гипертензия");
    lex.add("AH", "артериальный гипертензия");
    lex.add("AH", "гипертония");
    lex.add("AH", "гипертонический болезнь");
    lex.add("AH", "аг");
    lex.add("AH", "гб");
    lex.add("DM", "сд");
    lex.add("DM", "диабет");
    lex.add("DM", "сахарный диабет");
    lex.add("AP", "стенокардия");
    lex.add("AP", "стенокардия напряжение");
    return lex;
  }();
  return instance;
}

TermLexicon TermLexicon::from_file(const std::filesystem::path& tsv) {
  std::ifstream in(tsv);
  if (!in) throw io_error("cannot open lexicon file: " + tsv.string());
  TermLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw data_format_error(tsv.string() + " line " + std::to_string(line_no) +
                              ": expected disease<TAB>term");
    }
    const std::string disease = line.substr(0, tab);
    const std::string ngram = line.substr(tab + 1);
    if (disease.empty()) {
      throw data_format_error(tsv.string() + " line " + std::to_string(line_no) +
                              ": empty disease id");
    }
    if (split_ngram(ngram).empty()) {
      throw data_format_error(tsv.string() + " line " + std::to_string(line_no) +
                              ": empty term");
    }
    lex.add(disease, ngram);
  }
  if (lex.diseases().empty()) {
    throw data_format_error(tsv.string() + ": no lexicon entries");
  }
  return lex;
}

void TermLexicon::add(const DiseaseId& disease, const std::string& ngram) {
  auto phrase = split_ngram(ngram);
  if (disease.empty()) throw argument_error("lexicon disease id is empty");
  if (phrase.empty()) throw argument_error("lexicon term is empty");
  auto [it, inserted] = ngrams_.try_emplace(disease);
  if (inserted) order_.push_back(disease);
  it->second.push_back(std::move(phrase));
}

bool TermLexicon::has(const DiseaseId& disease) const {
  return ngrams_.count(disease) > 0;
}

const std::vector<std::vector<std::string>>& TermLexicon::ngrams(
    const DiseaseId& disease) const {
  const auto it = ngrams_.find(disease);
  if (it == ngrams_.end()) {
    throw argument_error("lexicon has no entries for disease: " + disease);
  }
  return it->second;
}

NegationDetector::NegationDetector(DiseaseId disease, TfIdfModel tfidf,
                                   GbdtModel classifier, double tau,
                                   std::shared_ptr<const Lemmatizer> lemmatizer)
    : disease_(std::move(disease)),
      tfidf_(std::move(tfidf)),
      classifier_(std::move(classifier)),
      tau_(tau),
      lemmatizer_(std::move(lemmatizer)) {
  if (classifier_.num_classes() != 3) {
    throw argument_error("negation classifier must have exactly 3 classes");
  }
  if (!lemmatizer_) throw argument_error("detector needs a lemmatizer");
}

Classification NegationDetector::classify(const Document& doc) const {
  Document local;
  const Document* ready = &doc;
  if (!doc.normalized) {
    local = normalize_document(doc, *lemmatizer_);
    ready = &local;
  }
  const SparseVector x = tfidf_.transform(*ready);
  const std::vector<double> proba = classifier_.predict_proba(x);
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (proba[k] > proba[best]) best = k;
  }
  Classification out;
  out.label = label_from_int(best - 1);
  out.proba = {proba[0], proba[1], proba[2]};
  return out;
}

AttributionReport NegationDetector::attribute_sentences(const Document& doc) const {
  Document local;
  const Document* ready = &doc;
  if (!doc.normalized) {
    local = normalize_document(doc, *lemmatizer_);
    ready = &local;
  }
  const SparseVector x = tfidf_.transform(*ready);
  const std::vector<double> proba = classifier_.predict_proba(x);
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (proba[k] > proba[best]) best = k;
  }

  // Stream 0 scores the denied class.
  const Decomposition decomp = decompose_prediction(classifier_, x, 0);

  const auto& vocab = tfidf_.vocabulary();
  const bool bigrams = tfidf_.params().use_bigrams;
  const std::size_t n_sent = ready->sentences.size();
  std::vector<std::map<int, int>> per_sentence(n_sent);
  std::vector<long long> doc_count(vocab.size(), 0);
  for (std::size_t s = 0; s < n_sent; ++s) {
    for (const auto& [term, count] : sentence_term_counts(ready->sentences[s], bigrams)) {
      const int idx = vocab.index_of(term);
      if (idx < 0) continue;
      per_sentence[s][idx] += count;
      doc_count[static_cast<std::size_t>(idx)] += count;
    }
  }

  AttributionReport report;
  report.predicted = label_from_int(best - 1);
  report.proba = {proba[0], proba[1], proba[2]};
  report.base = decomp.base;
  report.sentences.resize(n_sent);
  for (std::size_t i = 0; i < static_cast<std::size_t>(vocab.size()); ++i) {
    if (doc_count[i] == 0) report.unattributed += decomp.contributions[i];
  }
  const bool denied = report.predicted == DiseaseLabel::Denied;
  for (std::size_t s = 0; s < n_sent; ++s) {
    double score = 0.0;
    for (const auto& [idx, count] : per_sentence[s]) {
      const auto u = static_cast<std::size_t>(idx);
      score += decomp.contributions[u] * static_cast<double>(count) /
               static_cast<double>(doc_count[u]);
    }
    report.sentences[s].sentence_index = s;
    report.sentences[s].score = score;
    report.sentences[s].flagged = denied && score > tau_;
  }
  return report;
}

Document NegationDetector::strip_negations(const Document& doc) const {
  Document current = doc.normalized ? doc : normalize_document(doc, *lemmatizer_);
  // Each pass removes at least one sentence, so this terminates.
  for (std::size_t pass = 0; pass <= doc.text.size() + 1; ++pass) {
    const AttributionReport report = attribute_sentences(current);
    std::vector<std::pair<std::size_t, std::size_t>> cut;  // byte spans
    for (const auto& sa : report.sentences) {
      if (sa.flagged) {
        const Sentence& s = current.sentences[sa.sentence_index];
        cut.emplace_back(s.begin, s.end);
      }
    }
    if (cut.empty()) return current;
    std::string kept;
    std::size_t pos = 0;
    for (const auto& [begin, end] : cut) {
      kept.append(current.text, pos, begin - pos);
      pos = end;
      // Swallow the separator that followed the removed sentence.
      while (pos < current.text.size() &&
             (current.text[pos] == ' ' || current.text[pos] == '\t' ||
              current.text[pos] == '\n' || current.text[pos] == '\r')) {
        ++pos;
      }
    }
    kept.append(current.text, pos, current.text.size() - pos);
    Document next;
    next.id = current.id;
    next.text = std::move(kept);
    next.labels = current.labels;
    next.targets = current.targets;
    next.labs = current.labs;
    current = normalize_document(std::move(next), *lemmatizer_);
  }
  return current;
}

TrainedDetector train_detector(const std::vector<Document>& docs,
                               const DiseaseId& disease,
                               const DetectorParams& params, std::uint64_t seed,
                               std::shared_ptr<const Lemmatizer> lemmatizer) {
  if (!lemmatizer) throw argument_error("train_detector needs a lemmatizer");
  if (docs.empty()) throw argument_error("cannot train a detector on an empty corpus");
  if (params.rounds <= 0) throw argument_error("rounds must be positive");
  if (params.depth < 0) throw argument_error("depth must be non-negative");
  if (!(params.eta > 0.0)) throw argument_error("eta must be positive");
  if (params.lambda < 0.0) throw argument_error("lambda must be non-negative");
  if (params.min_leaf < 1) throw argument_error("min_leaf must be at least 1");
  if (!(params.test_fraction > 0.0) || !(params.test_fraction < 1.0)) {
    throw argument_error("test_fraction must lie strictly between 0 and 1");
  }

  std::vector<int> y(docs.size(), 0);
  std::array<long long, 3> class_total{0, 0, 0};
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const Document& doc = docs[i];
    if (!doc.normalized) {
      throw argument_error("document is not normalized: " + doc.id);
    }
    const auto it = doc.labels.find(disease);
    if (it == doc.labels.end()) {
      throw argument_error("document " + doc.id + " has no label for disease " + disease);
    }
    y[i] = to_int(it->second) + 1;
    ++class_total[static_cast<std::size_t>(y[i])];
  }
  for (int k = 0; k < 3; ++k) {
    if (class_total[static_cast<std::size_t>(k)] == 0) {
      throw argument_error("corpus has no documents with label " +
                           std::to_string(k - 1) + " for disease " + disease);
    }
  }

  const SplitIndices split = stratified_split(y, params.test_fraction, seed);
  std::array<long long, 3> train_total{0, 0, 0};
  for (const std::size_t i : split.train) {
    ++train_total[static_cast<std::size_t>(y[i])];
  }
  for (int k = 0; k < 3; ++k) {
    if (train_total[static_cast<std::size_t>(k)] == 0) {
      throw argument_error("training portion has no documents with label " +
                           std::to_string(k - 1) + " for disease " + disease);
    }
  }

  const TfIdfModel tfidf = fit_tfidf(docs, split.train, params.vectorizer);

  std::vector<SparseVector> x_train;
  std::vector<int> y_train;
  x_train.reserve(split.train.size());
  y_train.reserve(split.train.size());
  for (const std::size_t i : split.train) {
    x_train.push_back(tfidf.transform(docs[i]));
    y_train.push_back(y[i]);
  }

  GbdtParams gp;
  gp.rounds = params.rounds;
  gp.max_depth = params.depth;
  gp.eta = params.eta;
  gp.lambda = params.lambda;
  gp.min_leaf = params.min_leaf;
  gp.objective = Objective::Softmax;
  gp.num_classes = 3;
  gp.seed = seed;
  GbdtModel model = fit_gbdt(x_train, y_train, gp);

  MetricsReport metrics;
  std::vector<int> truth;
  std::vector<int> predicted;
  truth.reserve(split.test.size());
  predicted.reserve(split.test.size());
  for (const std::size_t i : split.test) {
    truth.push_back(y[i]);
    predicted.push_back(model.predict(tfidf.transform(docs[i])));
  }
  const ConfusionMatrix cm = confusion_matrix(truth, predicted, 3);
  const F1Result f1 = f1_scores(cm);
  for (int k = 0; k < 3; ++k) {
    const auto u = static_cast<std::size_t>(k);
    metrics.per_class_f1[u] = f1.per_class[u];
    metrics.support[u] = cm.row_sum(k);
    metrics.class_absent[u] = f1.absent[u];
  }
  metrics.macro_f1 = f1.macro;
  metrics.accuracy = f1.accuracy;
  metrics.n_evaluated = static_cast<long long>(split.test.size());

  TrainedDetector out{
      NegationDetector(disease, tfidf, std::move(model), params.tau, std::move(lemmatizer)),
      metrics};
  return out;
}

DiseaseLabel term_search_label(const TermLexicon& lexicon, const Document& doc,
                               const DiseaseId& disease) {
  if (!doc.normalized) {
    throw argument_error("term search needs a normalized document: " + doc.id);
  }
  const auto& phrases = lexicon.ngrams(disease);
  for (const Sentence& sentence : doc.sentences) {
    for (const auto& phrase : phrases) {
      if (sentence_has_phrase(sentence, phrase)) return DiseaseLabel::Present;
    }
  }
  return DiseaseLabel::NotMentioned;
}

BaselineComparison compare_baseline(const NegationDetector& detector,
                                    const TermLexicon& lexicon,
                                    const std::vector<Document>& docs) {
  if (docs.empty()) {
    throw argument_error("compare_baseline needs a non-empty document set");
  }
  long long fp = 0;
  long long fn = 0;
  for (const Document& doc : docs) {
    Document local;
    const Document* ready = &doc;
    if (!doc.normalized) {
      local = normalize_document(doc, *detector.lemmatizer());
      ready = &local;
    }
    const DiseaseLabel term = term_search_label(lexicon, *ready, detector.disease());
    const DiseaseLabel clf = detector.classify(*ready).label;
    if (term == DiseaseLabel::Present && clf == DiseaseLabel::Denied) ++fp;
    if (term == DiseaseLabel::NotMentioned && clf == DiseaseLabel::Present) ++fn;
  }
  BaselineComparison out;
  out.fp_rate = static_cast<double>(fp) / static_cast<double>(docs.size());
  out.fn_rate = static_cast<double>(fn) / static_cast<double>(docs.size());
  return out;
}

}  // namespace negata
