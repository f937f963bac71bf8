#include <algorithm>
#include <cmath>

#include "negata/errors.hpp"
#include "negata/rng.hpp"
#include "negata/trees.hpp"

namespace negata {

int ClassificationTree::predict(const SparseVector& x) const {
  if (nodes_.empty()) return 0;
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x.get(n.feature) < n.threshold ? n.left : n.right);
  }
  return nodes_[i].label;
}

namespace {

struct GiniContext {
  const std::vector<SparseVector>* X;
  std::span<const int> y;
  const RandomForestParams* params;
  int num_classes;
  int num_features;
  Rng* rng;
  std::vector<ClassificationTree::Node> nodes;
};

int majority_class(const std::vector<int>& counts) {
  int best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  return best;
}

double weighted_gini(const std::vector<int>& counts, int n) {
  if (n == 0) return 0.0;
  double sum_sq = 0.0;
  for (const int c : counts) {
    sum_sq += static_cast<double>(c) * static_cast<double>(c);
  }
  const double nn = static_cast<double>(n);
  return nn * (1.0 - sum_sq / (nn * nn));
}

struct GiniSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child impurity
};

// Exhaustive scan over midpoint thresholds of the candidate features.
// Candidates are evaluated in ascending (feature, threshold) order, so the
// first strict improvement fixes the tie-break.
GiniSplit best_gini_split(GiniContext& ctx, const std::vector<int>& samples,
                          const std::vector<int>& features) {
  const int total = static_cast<int>(samples.size());
  const int min_leaf = ctx.params->min_leaf;
  GiniSplit best;
  std::vector<std::pair<double, int>> values;  // (feature value, label)
  std::vector<int> left_counts(static_cast<std::size_t>(ctx.num_classes));
  std::vector<int> right_counts(static_cast<std::size_t>(ctx.num_classes));
  for (const int f : features) {
    values.clear();
    for (const int s : samples) {
      values.emplace_back((*ctx.X)[static_cast<std::size_t>(s)].get(f),
                          ctx.y[static_cast<std::size_t>(s)]);
    }
    std::sort(values.begin(), values.end());
    std::fill(left_counts.begin(), left_counts.end(), 0);
    std::fill(right_counts.begin(), right_counts.end(), 0);
    for (const auto& [v, label] : values) {
      ++right_counts[static_cast<std::size_t>(label)];
    }
    int moved = 0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      ++left_counts[static_cast<std::size_t>(values[i].second)];
      --right_counts[static_cast<std::size_t>(values[i].second)];
      ++moved;
      if (values[i].first == values[i + 1].first) continue;
      if (moved < min_leaf || total - moved < min_leaf) continue;
      const double impurity = weighted_gini(left_counts, moved) +
                              weighted_gini(right_counts, total - moved);
      if (!best.found || impurity < best.impurity) {
        best.found = true;
        best.feature = f;
        best.threshold = 0.5 * (values[i].first + values[i + 1].first);
        best.impurity = impurity;
      }
    }
  }
  return best;
}

int build_gini_node(GiniContext& ctx, std::vector<int> samples, int depth) {
  std::vector<int> counts(static_cast<std::size_t>(ctx.num_classes), 0);
  for (const int s : samples) ++counts[static_cast<std::size_t>(ctx.y[static_cast<std::size_t>(s)])];
  const int node_id = static_cast<int>(ctx.nodes.size());
  ctx.nodes.emplace_back();
  ctx.nodes[static_cast<std::size_t>(node_id)].label = majority_class(counts);

  const int n = static_cast<int>(samples.size());
  const bool pure =
      *std::max_element(counts.begin(), counts.end()) == n;
  if (pure || n < ctx.params->min_split || depth >= ctx.params->max_depth) {
    return node_id;
  }

  // Feature subsample for this split.
  std::vector<int> features(static_cast<std::size_t>(ctx.num_features));
  for (int f = 0; f < ctx.num_features; ++f) features[static_cast<std::size_t>(f)] = f;
  int mtry = ctx.params->mtry;
  if (mtry <= 0) {
    mtry = std::max(1, static_cast<int>(std::floor(
                           std::sqrt(static_cast<double>(ctx.num_features)))));
  }
  mtry = std::min(mtry, ctx.num_features);
  if (mtry < ctx.num_features) {
    for (int k = 0; k < mtry; ++k) {
      const auto j = k + static_cast<int>(ctx.rng->uniform_index(
                             static_cast<std::size_t>(ctx.num_features - k)));
      std::swap(features[static_cast<std::size_t>(k)], features[static_cast<std::size_t>(j)]);
    }
    features.resize(static_cast<std::size_t>(mtry));
    std::sort(features.begin(), features.end());
  }

  const GiniSplit split = best_gini_split(ctx, samples, features);
  if (!split.found) return node_id;
  const double parent_impurity = weighted_gini(counts, n);
  if (parent_impurity - split.impurity <= 1e-12) return node_id;

  std::vector<int> left, right;
  for (const int s : samples) {
    const double v = (*ctx.X)[static_cast<std::size_t>(s)].get(split.feature);
    (v < split.threshold ? left : right).push_back(s);
  }
  samples.clear();
  samples.shrink_to_fit();
  const int left_id = build_gini_node(ctx, std::move(left), depth + 1);
  const int right_id = build_gini_node(ctx, std::move(right), depth + 1);
  auto& node = ctx.nodes[static_cast<std::size_t>(node_id)];
  node.feature = split.feature;
  node.threshold = split.threshold;
  node.left = left_id;
  node.right = right_id;
  return node_id;
}

}  // namespace

RandomForestModel fit_random_forest(const std::vector<SparseVector>& X,
                                    std::span<const int> y,
                                    const RandomForestParams& params) {
  if (X.empty()) throw argument_error("cannot fit a forest on empty data");
  if (y.size() != X.size()) {
    throw argument_error("label count must match the sample count");
  }
  if (params.n_trees < 1) throw argument_error("n_trees must be >= 1");
  int num_classes = 0;
  for (const int label : y) {
    if (label < 0) throw argument_error("class labels must be >= 0");
    num_classes = std::max(num_classes, label + 1);
  }
  int num_features = 0;
  for (const auto& x : X) num_features = std::max(num_features, x.dim);

  Rng rng(params.seed);
  std::vector<ClassificationTree> trees;
  trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    std::vector<int> samples(X.size());
    if (params.bootstrap) {
      for (auto& s : samples) {
        s = static_cast<int>(rng.uniform_index(X.size()));
      }
    } else {
      for (std::size_t i = 0; i < X.size(); ++i) samples[i] = static_cast<int>(i);
    }
    GiniContext ctx{&X, y, &params, num_classes, num_features, &rng, {}};
    build_gini_node(ctx, std::move(samples), 0);
    trees.emplace_back(std::move(ctx.nodes));
  }
  return RandomForestModel(std::move(trees), num_classes);
}

int RandomForestModel::predict(const SparseVector& x) const {
  const auto proba = predict_proba(x);
  return static_cast<int>(
      std::max_element(proba.begin(), proba.end()) - proba.begin());
}

std::vector<double> RandomForestModel::predict_proba(const SparseVector& x) const {
  std::vector<double> votes(static_cast<std::size_t>(num_classes_), 0.0);
  for (const auto& tree : trees_) {
    ++votes[static_cast<std::size_t>(tree.predict(x))];
  }
  for (auto& v : votes) v /= static_cast<double>(trees_.size());
  return votes;
}

}  // namespace negata
