#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "negata/errors.hpp"

namespace negata {

// Sparse feature vector: strictly increasing indices, nonzero weights.
// Absent indices read as 0.0.
struct SparseVector {
  std::vector<std::pair<int, double>> entries;
  int dim = 0;

  void push(int index, double weight) {
    if (weight == 0.0) return;
    if (index < 0 || (!entries.empty() && index <= entries.back().first)) {
      throw argument_error("sparse vector indices must be strictly increasing");
    }
    entries.emplace_back(index, weight);
    if (index >= dim) dim = index + 1;
  }

  double get(int index) const {
    auto it = std::lower_bound(
        entries.begin(), entries.end(), index,
        [](const std::pair<int, double>& e, int i) { return e.first < i; });
    return (it != entries.end() && it->first == index) ? it->second : 0.0;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& [i, w] : entries) s += w * w;
    return std::sqrt(s);
  }

  std::vector<double> densify() const {
    std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
    for (const auto& [i, w] : entries) out[static_cast<std::size_t>(i)] = w;
    return out;
  }
};

inline double squared_distance(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() || j < b.entries.size()) {
    if (j >= b.entries.size() ||
        (i < a.entries.size() && a.entries[i].first < b.entries[j].first)) {
      s += a.entries[i].second * a.entries[i].second;
      ++i;
    } else if (i >= a.entries.size() ||
               b.entries[j].first < a.entries[i].first) {
      s += b.entries[j].second * b.entries[j].second;
      ++j;
    } else {
      const double d = a.entries[i].second - b.entries[j].second;
      s += d * d;
      ++i;
      ++j;
    }
  }
  return s;
}

}  // namespace negata
