#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace negata {

// Square confusion matrix, rows = true class, columns = predicted class,
// over a fixed class ordering supplied by the caller.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);

  int num_classes() const { return k_; }
  long long& at(int truth, int predicted);
  long long at(int truth, int predicted) const;
  long long total() const;
  long long row_sum(int truth) const;
  long long col_sum(int predicted) const;

 private:
  int k_ = 0;
  std::vector<long long> counts_;
};

ConfusionMatrix confusion_matrix(std::span<const int> truth,
                                 std::span<const int> predicted,
                                 int num_classes);

struct F1Result {
  std::vector<double> per_class;
  double macro = 0.0;
  double accuracy = 0.0;
  // Classes absent from both truth and prediction; their F1 is 0 by
  // convention and flagged here.
  std::vector<bool> absent;
};

// Per class: P = diag/col, R = diag/row, F1 = 2PR/(P+R), with 0/0 read as 0.
// Macro is the unweighted mean; accuracy is trace/total.
F1Result f1_scores(const ConfusionMatrix& cm);

double macro_f1(std::span<const double> per_class);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded stratified split: per-class test counts are round(size * fraction),
// so proportions hold within one document per class. Classes with fewer than
// two members are rejected.
SplitIndices stratified_split(std::span<const int> labels, double test_fraction,
                              std::uint64_t seed);

// Evaluation summary of one detector, in the fixed class order [-1, 0, 1].
struct MetricsReport {
  std::array<double, 3> per_class_f1{0.0, 0.0, 0.0};
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::array<long long, 3> support{0, 0, 0};
  long long n_evaluated = 0;
  std::array<bool, 3> class_absent{false, false, false};
  std::optional<double> fp_rate;  // term search positive, classifier denied
  std::optional<double> fn_rate;  // term search negative, classifier present
};

}  // namespace negata
