#include <algorithm>
#include <cmath>
#include <limits>

#include "negata/errors.hpp"
#include "negata/trees.hpp"
#include "tree_builder.hpp"

namespace negata {

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  expected_.assign(nodes_.size(), 0.0);
  // Children are stored after their parent, so a reverse pass sees both
  // children resolved before the parent.
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) {
      expected_[i] = n.value;
    } else {
      const auto l = static_cast<std::size_t>(n.left);
      const auto r = static_cast<std::size_t>(n.right);
      const double cl = nodes_[l].cover;
      const double cr = nodes_[r].cover;
      expected_[i] = (cl + cr > 0.0)
                         ? (expected_[l] * cl + expected_[r] * cr) / (cl + cr)
                         : 0.5 * (expected_[l] + expected_[r]);
    }
  }
}

double DecisionTree::eval(const SparseVector& x) const {
  if (nodes_.empty()) return 0.0;
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x.get(n.feature) < n.threshold ? n.left : n.right);
  }
  return nodes_[i].value;
}

double DecisionTree::eval(std::span<const double> dense) const {
  if (nodes_.empty()) return 0.0;
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    const auto f = static_cast<std::size_t>(n.feature);
    const double v = f < dense.size() ? dense[f] : 0.0;
    i = static_cast<std::size_t>(v < n.threshold ? n.left : n.right);
  }
  return nodes_[i].value;
}

namespace detail {

TreeBuilder::TreeBuilder(const std::vector<SparseVector>& X, int num_features)
    : X_(X), num_features_(num_features) {
  columns_.resize(static_cast<std::size_t>(num_features_));
  for (std::size_t s = 0; s < X_.size(); ++s) {
    for (const auto& [f, v] : X_[s].entries) {
      if (f < num_features_) {
        columns_[static_cast<std::size_t>(f)].push_back(
            {static_cast<int>(s), v});
      }
    }
  }
  for (auto& col : columns_) {
    std::sort(col.begin(), col.end(), [](const ColumnEntry& a, const ColumnEntry& b) {
      return a.value != b.value ? a.value < b.value : a.sample < b.sample;
    });
  }
}

namespace {

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct BuildContext {
  std::span<const double> grad;
  std::span<const double> hess;
  const TreeParams* params;
  const std::vector<std::vector<ColumnEntry>>* columns;
  const std::vector<SparseVector>* X;
  std::vector<int> node_of;  // sample -> current node id, -1 when inactive
  std::vector<DecisionTree::Node> nodes;
};

double leaf_objective(double g, double h, double lambda) {
  return g * g / (h + lambda);
}

// Returns the best positive-gain split of `samples`, walking each feature's
// explicit entries and splicing the zero block in sorted order.
SplitCandidate best_split(BuildContext& ctx, const std::vector<int>& samples,
                          int node_id, double G, double H) {
  const double lambda = ctx.params->lambda;
  const int min_leaf = ctx.params->min_leaf;
  const auto total = static_cast<int>(samples.size());
  const double parent_obj = leaf_objective(G, H, lambda);
  SplitCandidate best;

  std::vector<ColumnEntry> scratch;
  for (int f = 0; f < static_cast<int>(ctx.columns->size()); ++f) {
    const auto& column = (*ctx.columns)[static_cast<std::size_t>(f)];
    scratch.clear();
    double g_explicit = 0.0, h_explicit = 0.0;
    for (const auto& entry : column) {
      if (ctx.node_of[static_cast<std::size_t>(entry.sample)] == node_id) {
        scratch.push_back(entry);
        g_explicit += ctx.grad[static_cast<std::size_t>(entry.sample)];
        h_explicit += ctx.hess[static_cast<std::size_t>(entry.sample)];
      }
    }
    if (scratch.empty()) continue;  // feature constant (all zero) here
    const int zero_count = total - static_cast<int>(scratch.size());
    const double g_zero = G - g_explicit;
    const double h_zero = H - h_explicit;

    double gl = 0.0, hl = 0.0;
    int cl = 0;
    bool first = true;
    double prev_value = 0.0;
    auto feed = [&](double value, double g, double h, int count) {
      if (!first && value != prev_value) {
        if (cl >= min_leaf && total - cl >= min_leaf) {
          const double threshold = 0.5 * (prev_value + value);
          const double gain =
              0.5 * (leaf_objective(gl, hl, lambda) +
                     leaf_objective(G - gl, H - hl, lambda) - parent_obj);
          if (gain > best.gain) best = {gain, f, threshold};
        }
      }
      first = false;
      prev_value = value;
      gl += g;
      hl += h;
      cl += count;
    };

    bool zero_done = zero_count == 0;
    std::size_t i = 0;
    while (i < scratch.size()) {
      const double v = scratch[i].value;
      if (!zero_done && v > 0.0) {
        feed(0.0, g_zero, h_zero, zero_count);
        zero_done = true;
      }
      double gg = 0.0, hh = 0.0;
      int cc = 0;
      while (i < scratch.size() && scratch[i].value == v) {
        gg += ctx.grad[static_cast<std::size_t>(scratch[i].sample)];
        hh += ctx.hess[static_cast<std::size_t>(scratch[i].sample)];
        ++cc;
        ++i;
      }
      feed(v, gg, hh, cc);
    }
    if (!zero_done) feed(0.0, g_zero, h_zero, zero_count);
  }
  return best;
}

int build_node(BuildContext& ctx, std::vector<int> samples, int depth) {
  double G = 0.0, H = 0.0;
  for (const int s : samples) {
    G += ctx.grad[static_cast<std::size_t>(s)];
    H += ctx.hess[static_cast<std::size_t>(s)];
  }
  const int node_id = static_cast<int>(ctx.nodes.size());
  ctx.nodes.emplace_back();
  ctx.nodes[static_cast<std::size_t>(node_id)].cover = H;
  ctx.nodes[static_cast<std::size_t>(node_id)].value =
      -G / (H + ctx.params->lambda);

  const bool can_split =
      depth < ctx.params->max_depth &&
      static_cast<int>(samples.size()) >= 2 * ctx.params->min_leaf;
  if (can_split) {
    for (const int s : samples) ctx.node_of[static_cast<std::size_t>(s)] = node_id;
    const SplitCandidate split = best_split(ctx, samples, node_id, G, H);
    if (split.feature >= 0 && split.gain > 0.0) {
      std::vector<int> left, right;
      for (const int s : samples) {
        const double v = (*ctx.X)[static_cast<std::size_t>(s)].get(split.feature);
        (v < split.threshold ? left : right).push_back(s);
      }
      samples.clear();
      samples.shrink_to_fit();
      const int left_id = build_node(ctx, std::move(left), depth + 1);
      const int right_id = build_node(ctx, std::move(right), depth + 1);
      auto& node = ctx.nodes[static_cast<std::size_t>(node_id)];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.gain = split.gain;
      node.left = left_id;
      node.right = right_id;
      node.value = 0.0;
      return node_id;
    }
  }
  return node_id;
}

}  // namespace

DecisionTree TreeBuilder::fit(std::span<const double> grad,
                              std::span<const double> hess,
                              const TreeParams& params) const {
  if (X_.empty()) throw argument_error("cannot fit a tree on empty data");
  if (grad.size() != X_.size() || hess.size() != X_.size()) {
    throw argument_error("gradient/hessian size must match the sample count");
  }
  if (params.min_leaf < 1) throw argument_error("min_leaf must be >= 1");
  if (params.max_depth < 0) throw argument_error("max_depth must be >= 0");

  BuildContext ctx{grad, hess, &params, &columns_, &X_, {}, {}};
  ctx.node_of.assign(X_.size(), -1);
  std::vector<int> all(X_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  build_node(ctx, std::move(all), 0);
  return DecisionTree(std::move(ctx.nodes));
}

}  // namespace detail

DecisionTree fit_tree(const std::vector<SparseVector>& X,
                      std::span<const double> grad, std::span<const double> hess,
                      const TreeParams& params) {
  int num_features = 0;
  for (const auto& x : X) num_features = std::max(num_features, x.dim);
  const detail::TreeBuilder builder(X, num_features);
  return builder.fit(grad, hess, params);
}

}  // namespace negata
