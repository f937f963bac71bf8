#include <algorithm>

#include "negata/errors.hpp"
#include "negata/trees.hpp"

namespace negata {

KnnModel::KnnModel(std::vector<SparseVector> X, std::vector<int> y, int k)
    : X_(std::move(X)), y_(std::move(y)), k_(k) {
  if (X_.empty()) throw argument_error("cannot fit knn on empty data");
  if (y_.size() != X_.size()) {
    throw argument_error("label count must match the sample count");
  }
  if (k_ < 1) throw argument_error("k must be >= 1");
  if (static_cast<std::size_t>(k_) > X_.size()) {
    throw argument_error("k exceeds the number of training points");
  }
  for (const int label : y_) {
    if (label < 0) throw argument_error("class labels must be >= 0");
    num_classes_ = std::max(num_classes_, label + 1);
  }
}

KnnModel fit_knn(std::vector<SparseVector> X, std::vector<int> y, int k) {
  return KnnModel(std::move(X), std::move(y), k);
}

int KnnModel::predict(const SparseVector& x) const {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(X_.size());
  for (std::size_t i = 0; i < X_.size(); ++i) {
    dist.emplace_back(squared_distance(X_[i], x), i);
  }
  // Pair order implements the distance tie-break: lower training index wins.
  std::sort(dist.begin(), dist.end());
  std::vector<int> votes(static_cast<std::size_t>(num_classes_), 0);
  for (int i = 0; i < k_; ++i) {
    ++votes[static_cast<std::size_t>(y_[dist[static_cast<std::size_t>(i)].second])];
  }
  int best = 0;
  for (int c = 1; c < num_classes_; ++c) {
    if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) {
      best = c;  // strict: vote ties keep the lower class label
    }
  }
  return best;
}

}  // namespace negata
