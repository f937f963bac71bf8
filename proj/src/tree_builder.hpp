#pragma once

// Internal exact-greedy tree construction shared by fit_tree and fit_gbdt.
// Feature columns are pre-sorted once per dataset; per node only the explicit
// (nonzero) entries are walked, with the implicit zero block spliced into the
// scan at its sorted position.

#include <span>
#include <vector>

#include "negata/trees.hpp"

namespace negata::detail {

struct ColumnEntry {
  int sample;
  double value;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<SparseVector>& X, int num_features);

  DecisionTree fit(std::span<const double> grad, std::span<const double> hess,
                   const TreeParams& params) const;

  int num_features() const { return num_features_; }

 private:
  const std::vector<SparseVector>& X_;
  int num_features_;
  std::vector<std::vector<ColumnEntry>> columns_;  // per feature, value order
};

}  // namespace negata::detail
