#include <algorithm>
#include <cmath>

#include "negata/errors.hpp"
#include "negata/trees.hpp"
#include "tree_builder.hpp"

namespace negata {

namespace {

void softmax_inplace(std::vector<double>& scores) {
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (auto& s : scores) {
    s = std::exp(s - m);
    sum += s;
  }
  for (auto& s : scores) s /= sum;
}

double clipped_log(double p) { return std::log(std::max(p, 1e-15)); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

GbdtModel::GbdtModel(std::vector<std::vector<DecisionTree>> trees,
                     std::vector<double> base_scores, double eta,
                     Objective objective, int num_classes, int num_features)
    : trees_(std::move(trees)),
      base_(std::move(base_scores)),
      eta_(eta),
      objective_(objective),
      num_classes_(num_classes),
      num_features_(num_features) {
  const auto streams =
      static_cast<std::size_t>(objective_ == Objective::Softmax ? num_classes_ : 1);
  if (base_.size() != streams) {
    throw argument_error("base score count must match the tree streams");
  }
  for (const auto& round : trees_) {
    if (round.size() != streams) {
      throw argument_error("every round must carry one tree per stream");
    }
  }
}

std::vector<double> GbdtModel::raw_scores(const SparseVector& x) const {
  std::vector<double> scores(base_);
  for (const auto& round : trees_) {
    for (std::size_t k = 0; k < round.size(); ++k) {
      scores[k] += eta_ * round[k].eval(x);
    }
  }
  return scores;
}

std::vector<double> GbdtModel::predict_proba(const SparseVector& x) const {
  auto raw = raw_scores(x);
  if (objective_ == Objective::Softmax) {
    softmax_inplace(raw);
    return raw;
  }
  const double p = sigmoid(raw[0]);
  return {1.0 - p, p};
}

int GbdtModel::predict(const SparseVector& x) const {
  const auto proba = predict_proba(x);
  return static_cast<int>(
      std::max_element(proba.begin(), proba.end()) - proba.begin());
}

GbdtModel fit_gbdt(const std::vector<SparseVector>& X, std::span<const int> y,
                   const GbdtParams& params) {
  if (X.empty()) throw argument_error("cannot fit gbdt on empty data");
  if (y.size() != X.size()) {
    throw argument_error("label count must match the sample count");
  }
  if (params.rounds < 0) throw argument_error("rounds must be >= 0");
  if (params.eta <= 0) throw argument_error("eta must be > 0");

  const auto n = X.size();
  int num_features = 0;
  for (const auto& x : X) num_features = std::max(num_features, x.dim);

  int max_label = 0;
  for (const int label : y) {
    if (label < 0) throw argument_error("class labels must be >= 0");
    max_label = std::max(max_label, label);
  }

  int num_classes;
  if (params.objective == Objective::BinaryLogistic) {
    if (max_label > 1) {
      throw argument_error("binary logistic objective requires labels in {0, 1}");
    }
    num_classes = 2;
  } else {
    num_classes = params.num_classes > 0 ? params.num_classes : max_label + 1;
    if (max_label >= num_classes) {
      throw argument_error("label exceeds the declared class count");
    }
  }

  const int streams = params.objective == Objective::Softmax ? num_classes : 1;
  const detail::TreeBuilder builder(X, num_features);
  const TreeParams tree_params{params.max_depth, params.min_leaf, params.lambda};

  // raw[i * streams + k]
  std::vector<double> raw(n * static_cast<std::size_t>(streams), 0.0);
  std::vector<double> grad(n), hess(n);
  std::vector<std::vector<DecisionTree>> trees;
  trees.reserve(static_cast<std::size_t>(params.rounds));
  std::vector<double> train_loss;
  train_loss.reserve(static_cast<std::size_t>(params.rounds));

  std::vector<double> proba(static_cast<std::size_t>(streams));
  std::vector<std::vector<double>> p(n, std::vector<double>(
                                            static_cast<std::size_t>(num_classes)));

  auto refresh_probabilities = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      if (params.objective == Objective::Softmax) {
        for (int k = 0; k < streams; ++k) {
          p[i][static_cast<std::size_t>(k)] =
              raw[i * static_cast<std::size_t>(streams) + static_cast<std::size_t>(k)];
        }
        softmax_inplace(p[i]);
      } else {
        const double pos = sigmoid(raw[i]);
        p[i][0] = 1.0 - pos;
        p[i][1] = pos;
      }
    }
  };

  auto log_loss = [&] {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      loss -= clipped_log(p[i][static_cast<std::size_t>(y[i])]);
    }
    return loss / static_cast<double>(n);
  };

  for (int round = 0; round < params.rounds; ++round) {
    refresh_probabilities();
    std::vector<DecisionTree> round_trees;
    round_trees.reserve(static_cast<std::size_t>(streams));
    for (int k = 0; k < streams; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        if (params.objective == Objective::Softmax) {
          const double pik = p[i][static_cast<std::size_t>(k)];
          grad[i] = pik - (y[i] == k ? 1.0 : 0.0);
          hess[i] = pik * (1.0 - pik);
        } else {
          const double pos = p[i][1];
          grad[i] = pos - static_cast<double>(y[i]);
          hess[i] = pos * (1.0 - pos);
        }
      }
      DecisionTree tree = builder.fit(grad, hess, tree_params);
      for (std::size_t i = 0; i < n; ++i) {
        raw[i * static_cast<std::size_t>(streams) + static_cast<std::size_t>(k)] +=
            params.eta * tree.eval(X[i]);
      }
      round_trees.push_back(std::move(tree));
    }
    trees.push_back(std::move(round_trees));
    refresh_probabilities();
    train_loss.push_back(log_loss());
  }

  GbdtModel model(std::move(trees), std::vector<double>(static_cast<std::size_t>(streams), 0.0),
                  params.eta, params.objective, num_classes, num_features);
  model.set_train_loss(std::move(train_loss));
  return model;
}

std::vector<double> feature_importance(const GbdtModel& model) {
  std::vector<double> importance(static_cast<std::size_t>(model.num_features()), 0.0);
  double total = 0.0;
  for (const auto& round : model.trees()) {
    for (const auto& tree : round) {
      for (const auto& node : tree.nodes()) {
        if (!node.is_leaf()) {
          importance[static_cast<std::size_t>(node.feature)] += node.gain;
          total += node.gain;
        }
      }
    }
  }
  if (total > 0.0) {
    for (auto& v : importance) v /= total;
  }
  return importance;
}

Decomposition decompose_prediction(const GbdtModel& model, const SparseVector& x,
                                   int stream) {
  if (stream < 0 || stream >= model.trees_per_round()) {
    throw argument_error("stream index out of range");
  }
  Decomposition result;
  result.base = model.base_scores()[static_cast<std::size_t>(stream)];
  result.contributions.assign(static_cast<std::size_t>(model.num_features()), 0.0);
  const double eta = model.eta();
  for (const auto& round : model.trees()) {
    const auto& tree = round[static_cast<std::size_t>(stream)];
    const auto& nodes = tree.nodes();
    const auto& expected = tree.expected_values();
    if (nodes.empty()) continue;
    result.base += eta * expected[0];
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& node = nodes[i];
      const auto next = static_cast<std::size_t>(
          x.get(node.feature) < node.threshold ? node.left : node.right);
      result.contributions[static_cast<std::size_t>(node.feature)] +=
          eta * (expected[next] - expected[i]);
      i = next;
    }
  }
  return result;
}

}  // namespace negata
