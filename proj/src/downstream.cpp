#include "negata/downstream.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

#include "negata/errors.hpp"
#include "negata/metrics.hpp"
#include "negata/textnorm.hpp"

namespace negata {

const char* to_string(NdMode mode) {
  return mode == NdMode::Without ? "without_nd" : "with_nd";
}

const char* to_string(FeatureMode mode) {
  return mode == FeatureMode::TextOnly ? "text" : "text_other";
}

std::vector<int> extract_diagnosis_features(
    const Document& doc, const TermLexicon& lexicon,
    const std::map<DiseaseId, NegationDetector>* detectors, NdMode mode) {
  std::vector<int> features;
  features.reserve(lexicon.diseases().size());
  for (const DiseaseId& disease : lexicon.diseases()) {
    if (mode == NdMode::Without) {
      features.push_back(to_int(term_search_label(lexicon, doc, disease)));
      continue;
    }
    if (detectors == nullptr) {
      throw argument_error("negation-aware features need detectors");
    }
    const auto it = detectors->find(disease);
    if (it == detectors->end()) {
      throw argument_error("no detector available for disease: " + disease);
    }
    const Document stripped = it->second.strip_negations(doc);
    features.push_back(to_int(term_search_label(lexicon, stripped, disease)));
  }
  return features;
}

namespace {

SparseVector to_sparse(const std::vector<double>& dense) {
  SparseVector x;
  x.dim = static_cast<int>(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    x.push(static_cast<int>(i), dense[i]);
  }
  return x;
}

double positive_f1(const std::vector<int>& truth, const std::vector<int>& predicted) {
  const ConfusionMatrix cm = confusion_matrix(truth, predicted, 2);
  return f1_scores(cm).per_class[1];
}

}  // namespace

std::vector<DownstreamResult> run_downstream_experiment(
    const std::vector<Document>& docs, const std::string& task,
    const TermLexicon& lexicon,
    const std::map<DiseaseId, NegationDetector>& detectors,
    const DownstreamParams& params) {
  if (docs.empty()) throw argument_error("downstream experiment needs documents");
  if (task.empty()) throw argument_error("downstream task name is empty");
  if (!(params.test_fraction > 0.0) || !(params.test_fraction < 1.0)) {
    throw argument_error("test_fraction must lie strictly between 0 and 1");
  }
  for (const DiseaseId& disease : lexicon.diseases()) {
    if (detectors.find(disease) == detectors.end()) {
      throw argument_error("no detector available for disease: " + disease);
    }
  }
  if (detectors.empty()) throw argument_error("downstream experiment needs detectors");
  const Lemmatizer& lemmatizer = *detectors.begin()->second.lemmatizer();

  const std::size_t n = docs.size();
  std::vector<Document> normalized;
  normalized.reserve(n);
  for (const Document& doc : docs) {
    normalized.push_back(doc.normalized ? doc : normalize_document(doc, lemmatizer));
  }

  std::vector<int> y(n, 0);
  std::set<std::string> lab_key_set;
  for (std::size_t i = 0; i < n; ++i) {
    const Document& doc = normalized[i];
    const auto it = doc.targets.find(task);
    if (it == doc.targets.end()) {
      throw argument_error("document " + doc.id + " has no target named " + task);
    }
    if (it->second != 0 && it->second != 1) {
      throw argument_error("target " + task + " of document " + doc.id +
                           " is not binary");
    }
    y[i] = it->second;
    for (const auto& [key, value] : doc.labs) {
      (void)value;
      lab_key_set.insert(key);
    }
  }
  const std::vector<std::string> lab_keys(lab_key_set.begin(), lab_key_set.end());

  const std::size_t n_diseases = lexicon.diseases().size();
  std::vector<std::vector<double>> rows_without(n), rows_with(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<int> without =
        extract_diagnosis_features(normalized[i], lexicon, nullptr, NdMode::Without);
    const std::vector<int> with =
        extract_diagnosis_features(normalized[i], lexicon, &detectors, NdMode::With);
    rows_without[i].assign(without.begin(), without.end());
    rows_with[i].assign(with.begin(), with.end());
  }

  const auto matrix_for = [&](NdMode nd, FeatureMode fm) {
    std::vector<SparseVector> X(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row =
          nd == NdMode::Without ? rows_without[i] : rows_with[i];
      if (fm == FeatureMode::TextPlusOther) {
        for (const std::string& key : lab_keys) {
          const auto it = normalized[i].labs.find(key);
          row.push_back(it == normalized[i].labs.end() ? 0.0 : it->second);
        }
      } else {
        row.resize(n_diseases);
      }
      X[i] = to_sparse(row);
    }
    return X;
  };

  const SplitIndices split = stratified_split(y, params.test_fraction, params.seed);
  std::vector<int> y_train, y_test;
  for (const std::size_t i : split.train) y_train.push_back(y[i]);
  for (const std::size_t i : split.test) y_test.push_back(y[i]);

  std::vector<DownstreamResult> results;
  const char* families[] = {"gbdt", "rf", "knn"};
  for (const char* family : families) {
    for (const FeatureMode fm : {FeatureMode::TextOnly, FeatureMode::TextPlusOther}) {
      for (const NdMode nd : {NdMode::Without, NdMode::With}) {
        const std::vector<SparseVector> X = matrix_for(nd, fm);
        std::vector<SparseVector> x_train, x_test;
        for (const std::size_t i : split.train) x_train.push_back(X[i]);
        for (const std::size_t i : split.test) x_test.push_back(X[i]);

        std::vector<int> predicted;
        predicted.reserve(x_test.size());
        const std::string name = family;
        if (name == "gbdt") {
          GbdtParams gp;
          gp.rounds = 500;
          gp.max_depth = 100;
          gp.eta = 0.1;
          gp.lambda = 1.0;
          gp.objective = Objective::BinaryLogistic;
          gp.num_classes = 2;
          gp.seed = params.seed;
          const GbdtModel model = fit_gbdt(x_train, y_train, gp);
          for (const SparseVector& x : x_test) predicted.push_back(model.predict(x));
        } else if (name == "rf") {
          RandomForestParams rp;
          rp.n_trees = 500;
          rp.max_depth = 100;
          rp.min_split = 2;
          rp.min_leaf = 1;
          rp.seed = params.seed;
          const RandomForestModel model = fit_random_forest(x_train, y_train, rp);
          for (const SparseVector& x : x_test) predicted.push_back(model.predict(x));
        } else {
          const int k = std::min<int>(10, static_cast<int>(x_train.size()));
          const KnnModel model = fit_knn(x_train, y_train, k);
          for (const SparseVector& x : x_test) predicted.push_back(model.predict(x));
        }

        DownstreamResult result;
        result.task = task;
        result.model_family = name;
        result.features = fm;
        result.nd = nd;
        result.f1 = positive_f1(y_test, predicted);
        results.push_back(std::move(result));
      }
    }
  }
  return results;
}

std::string downstream_table_tsv(const std::vector<DownstreamResult>& results) {
  if (results.empty()) throw argument_error("no downstream results to tabulate");
  const std::string& task = results.front().task;
  std::vector<std::string> families;
  for (const DownstreamResult& r : results) {
    if (std::find(families.begin(), families.end(), r.model_family) == families.end()) {
      families.push_back(r.model_family);
    }
  }
  const auto lookup = [&](const std::string& family, FeatureMode fm, NdMode nd) {
    for (const DownstreamResult& r : results) {
      if (r.model_family == family && r.features == fm && r.nd == nd) {
        std::ostringstream out;
        out.setf(std::ios::fixed);
        out.precision(4);
        out << r.f1;
        return out.str();
      }
    }
    return std::string("-");
  };
  std::ostringstream out;
  out << "task\tmodel\tf1_text_without_nd\tf1_text_with_nd"
      << "\tf1_text_other_without_nd\tf1_text_other_with_nd\n";
  for (const std::string& family : families) {
    out << task << '\t' << family << '\t'
        << lookup(family, FeatureMode::TextOnly, NdMode::Without) << '\t'
        << lookup(family, FeatureMode::TextOnly, NdMode::With) << '\t'
        << lookup(family, FeatureMode::TextPlusOther, NdMode::Without) << '\t'
        << lookup(family, FeatureMode::TextPlusOther, NdMode::With) << '\n';
  }
  return out.str();
}

}  // namespace negata
