#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "negata/corpus.hpp"
#include "negata/negation.hpp"

namespace negata {

enum class NdMode { Without, With };
enum class FeatureMode { TextOnly, TextPlusOther };

const char* to_string(NdMode mode);
const char* to_string(FeatureMode mode);

struct DownstreamResult {
  std::string task;
  std::string model_family;  // "gbdt", "rf" or "knn"
  FeatureMode features = FeatureMode::TextOnly;
  NdMode nd = NdMode::Without;
  double f1 = 0.0;  // positive-class F1 on the held-out test portion
};

// One binary feature per lexicon disease, in lexicon order. Without
// negation detection the feature is a plain term search on the document;
// with it, the same term search runs on the document after that disease's
// detector stripped its negation sentences. `detectors` may be null in
// Without mode.
std::vector<int> extract_diagnosis_features(
    const Document& doc, const TermLexicon& lexicon,
    const std::map<DiseaseId, NegationDetector>* detectors, NdMode mode);

struct DownstreamParams {
  double test_fraction = 0.33;
  std::uint64_t seed = 42;
};

// Trains gbdt/rf/knn predictors of the binary target named `task` on every
// combination of feature mode and negation-detection mode, over one shared
// stratified split. Every document must carry the target; With mode needs a
// detector for every lexicon disease.
std::vector<DownstreamResult> run_downstream_experiment(
    const std::vector<Document>& docs, const std::string& task,
    const TermLexicon& lexicon,
    const std::map<DiseaseId, NegationDetector>& detectors,
    const DownstreamParams& params = {});

// Pivots results into a TSV: one row per model family, F1 columns for every
// feature/negation-detection combination.
std::string downstream_table_tsv(const std::vector<DownstreamResult>& results);

}  // namespace negata
