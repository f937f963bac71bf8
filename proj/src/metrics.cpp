#include "negata/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "negata/errors.hpp"
#include "negata/rng.hpp"

namespace negata {

ConfusionMatrix::ConfusionMatrix(int num_classes) : k_(num_classes) {
  if (num_classes < 1) throw argument_error("confusion matrix needs >= 1 class");
  counts_.assign(static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_), 0);
}

long long& ConfusionMatrix::at(int truth, int predicted) {
  if (truth < 0 || truth >= k_ || predicted < 0 || predicted >= k_) {
    throw argument_error("confusion matrix index out of range");
  }
  return counts_[static_cast<std::size_t>(truth) * static_cast<std::size_t>(k_) +
                 static_cast<std::size_t>(predicted)];
}

long long ConfusionMatrix::at(int truth, int predicted) const {
  return const_cast<ConfusionMatrix*>(this)->at(truth, predicted);
}

long long ConfusionMatrix::total() const {
  long long t = 0;
  for (const auto c : counts_) t += c;
  return t;
}

long long ConfusionMatrix::row_sum(int truth) const {
  long long t = 0;
  for (int p = 0; p < k_; ++p) t += at(truth, p);
  return t;
}

long long ConfusionMatrix::col_sum(int predicted) const {
  long long t = 0;
  for (int r = 0; r < k_; ++r) t += at(r, predicted);
  return t;
}

ConfusionMatrix confusion_matrix(std::span<const int> truth,
                                 std::span<const int> predicted,
                                 int num_classes) {
  if (truth.size() != predicted.size()) {
    throw argument_error("truth and prediction lengths differ");
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= num_classes || predicted[i] < 0 ||
        predicted[i] >= num_classes) {
      throw argument_error("label outside the declared class set");
    }
    ++cm.at(truth[i], predicted[i]);
  }
  return cm;
}

F1Result f1_scores(const ConfusionMatrix& cm) {
  const int k = cm.num_classes();
  F1Result result;
  result.per_class.resize(static_cast<std::size_t>(k), 0.0);
  result.absent.resize(static_cast<std::size_t>(k), false);
  for (int c = 0; c < k; ++c) {
    const long long diag = cm.at(c, c);
    const long long col = cm.col_sum(c);
    const long long row = cm.row_sum(c);
    const double precision =
        col > 0 ? static_cast<double>(diag) / static_cast<double>(col) : 0.0;
    const double recall =
        row > 0 ? static_cast<double>(diag) / static_cast<double>(row) : 0.0;
    const double f1 = (precision + recall) > 0.0
                          ? 2.0 * precision * recall / (precision + recall)
                          : 0.0;
    result.per_class[static_cast<std::size_t>(c)] = f1;
    result.absent[static_cast<std::size_t>(c)] = (row == 0 && col == 0);
  }
  result.macro = macro_f1(result.per_class);
  const long long total = cm.total();
  long long trace = 0;
  for (int c = 0; c < k; ++c) trace += cm.at(c, c);
  result.accuracy =
      total > 0 ? static_cast<double>(trace) / static_cast<double>(total) : 0.0;
  return result;
}

double macro_f1(std::span<const double> per_class) {
  if (per_class.empty()) return 0.0;
  double sum = 0.0;
  for (const double f1 : per_class) sum += f1;
  return sum / static_cast<double>(per_class.size());
}

SplitIndices stratified_split(std::span<const int> labels, double test_fraction,
                              std::uint64_t seed) {
  if (labels.empty()) throw argument_error("cannot split an empty label list");
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
    throw argument_error("test fraction must lie strictly between 0 and 1");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(i);
  }
  Rng rng(seed);
  SplitIndices split;
  for (auto& [label, indices] : by_class) {
    if (indices.size() < 2) {
      throw argument_error("class " + std::to_string(label) +
                           " has fewer than 2 members; cannot stratify");
    }
    rng.shuffle(indices);
    auto n_test = static_cast<std::size_t>(std::llround(
        static_cast<double>(indices.size()) * test_fraction));
    if (n_test > indices.size()) n_test = indices.size();
    for (std::size_t i = 0; i < indices.size(); ++i) {
      (i < n_test ? split.test : split.train).push_back(indices[i]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace negata
