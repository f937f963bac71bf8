#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "negata/sparse.hpp"

namespace negata {

// Routing convention everywhere: feature value < threshold goes left,
// otherwise right; features absent from a sparse vector read as 0.0.

struct TreeParams {
  int max_depth = 6;
  int min_leaf = 1;
  double lambda = 1.0;  // L2 regularization on leaf values
};

// Regression tree for boosting. Nodes store split gain and cover (sum of
// hessians seen at fit time); cover drives the expected-value estimates used
// by prediction decomposition.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double gain = 0.0;
    double cover = 0.0;
    double value = 0.0;  // leaf value
    bool is_leaf() const { return feature < 0; }
  };

  DecisionTree() = default;
  explicit DecisionTree(std::vector<Node> nodes);

  double eval(const SparseVector& x) const;
  double eval(std::span<const double> dense) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  // Cover-weighted mean of the leaves below each node.
  const std::vector<double>& expected_values() const { return expected_; }

 private:
  std::vector<Node> nodes_;
  std::vector<double> expected_;
};

// Exact greedy fit on gradient/hessian pairs: split gain
//   1/2 * (GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda)),
// leaf value -G/(H+lambda). Stops on depth, min_leaf or when no split has
// positive gain. Equal-gain candidates resolve to the lowest feature index,
// then the lowest threshold.
DecisionTree fit_tree(const std::vector<SparseVector>& X,
                      std::span<const double> grad, std::span<const double> hess,
                      const TreeParams& params);

enum class Objective {
  Softmax,         // one tree per class per round
  BinaryLogistic,  // one tree per round
};

struct GbdtParams {
  int rounds = 200;
  int max_depth = 4;
  double eta = 0.1;
  double lambda = 1.0;
  int min_leaf = 1;
  Objective objective = Objective::Softmax;
  int num_classes = 0;  // 0: infer as max(y) + 1
  std::uint64_t seed = 42;  // recorded in metadata; fitting itself is exact
};

class GbdtModel {
 public:
  GbdtModel() = default;
  GbdtModel(std::vector<std::vector<DecisionTree>> trees,
            std::vector<double> base_scores, double eta, Objective objective,
            int num_classes, int num_features);

  int num_classes() const { return num_classes_; }
  int num_features() const { return num_features_; }
  int rounds() const { return static_cast<int>(trees_.size()); }
  int trees_per_round() const {
    return objective_ == Objective::Softmax ? num_classes_ : 1;
  }
  double eta() const { return eta_; }
  Objective objective() const { return objective_; }
  const std::vector<double>& base_scores() const { return base_; }
  const std::vector<std::vector<DecisionTree>>& trees() const { return trees_; }
  const std::vector<double>& train_loss() const { return train_loss_; }
  void set_train_loss(std::vector<double> loss) { train_loss_ = std::move(loss); }

  // base_k + eta * sum of per-round tree outputs; one entry per tree stream.
  std::vector<double> raw_scores(const SparseVector& x) const;
  // Softmax over raw scores (for binary logistic: {1-p, p}); sums to 1.
  std::vector<double> predict_proba(const SparseVector& x) const;
  int predict(const SparseVector& x) const;  // argmax, lowest index on ties

 private:
  std::vector<std::vector<DecisionTree>> trees_;  // [round][stream]
  std::vector<double> base_;
  double eta_ = 0.1;
  Objective objective_ = Objective::Softmax;
  int num_classes_ = 0;
  int num_features_ = 0;
  std::vector<double> train_loss_;
};

// Newton boosting on softmax / binary logistic loss. Training is
// deterministic; per-round training log-loss is recorded on the model.
GbdtModel fit_gbdt(const std::vector<SparseVector>& X, std::span<const int> y,
                   const GbdtParams& params);

// Total split gain per feature, normalized to sum 1 (all zeros for models
// that never split).
std::vector<double> feature_importance(const GbdtModel& model);

struct Decomposition {
  double base = 0.0;               // base score + per-tree root expectations
  std::vector<double> contributions;  // per feature
};

// Path decomposition of one raw score: walking each tree root-to-leaf, the
// change in cover-weighted expected value at every split is credited to the
// split feature. base + sum(contributions) equals raw_scores(x)[stream].
Decomposition decompose_prediction(const GbdtModel& model, const SparseVector& x,
                                   int stream);

struct RandomForestParams {
  int n_trees = 500;
  int max_depth = 100;
  int min_split = 2;
  int min_leaf = 1;
  int mtry = 0;  // features tried per split; 0 means floor(sqrt(n_features))
  bool bootstrap = true;
  std::uint64_t seed = 42;
};

class ClassificationTree {
 public:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;  // leaf majority class
    bool is_leaf() const { return feature < 0; }
  };

  ClassificationTree() = default;
  explicit ClassificationTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  int predict(const SparseVector& x) const;
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
};

class RandomForestModel {
 public:
  RandomForestModel() = default;
  RandomForestModel(std::vector<ClassificationTree> trees, int num_classes)
      : trees_(std::move(trees)), num_classes_(num_classes) {}

  int num_classes() const { return num_classes_; }
  const std::vector<ClassificationTree>& trees() const { return trees_; }

  // Majority vote; ties resolve to the lowest class label.
  int predict(const SparseVector& x) const;
  // Vote fractions per class; sums to 1.
  std::vector<double> predict_proba(const SparseVector& x) const;

 private:
  std::vector<ClassificationTree> trees_;
  int num_classes_ = 0;
};

// Seeded bootstrap + per-split feature subsampling, exact greedy gini
// splits. With bootstrap off and mtry = n_features a single tree is the
// plain exhaustive CART fit.
RandomForestModel fit_random_forest(const std::vector<SparseVector>& X,
                                    std::span<const int> y,
                                    const RandomForestParams& params);

class KnnModel {
 public:
  KnnModel() = default;
  KnnModel(std::vector<SparseVector> X, std::vector<int> y, int k);

  // Majority label of the k nearest training points by Euclidean distance.
  // Distance ties resolve to the lower training index, vote ties to the
  // lower class label.
  int predict(const SparseVector& x) const;
  int k() const { return k_; }

 private:
  std::vector<SparseVector> X_;
  std::vector<int> y_;
  int k_ = 0;
  int num_classes_ = 0;
};

KnnModel fit_knn(std::vector<SparseVector> X, std::vector<int> y, int k);

}  // namespace negata
