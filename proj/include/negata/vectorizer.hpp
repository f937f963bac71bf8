#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "negata/corpus.hpp"
#include "negata/sparse.hpp"

namespace negata {

struct VectorizerParams {
  int min_df = 1;
  bool use_bigrams = true;  // bigrams never cross sentence boundaries
};

// Lemma n-gram vocabulary. Terms are unigrams and (optionally) space-joined
// within-sentence bigrams; indices are dense and follow lexicographic term
// order, so equal corpora produce identical index assignments.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<int> df,
             std::size_t doc_count);

  int index_of(const std::string& term) const;  // -1 when absent
  const std::string& term(int index) const { return terms_[static_cast<std::size_t>(index)]; }
  int df(int index) const { return df_[static_cast<std::size_t>(index)]; }
  int size() const { return static_cast<int>(terms_.size()); }
  std::size_t doc_count() const { return doc_count_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<int>& dfs() const { return df_; }

 private:
  std::vector<std::string> terms_;  // sorted
  std::vector<int> df_;
  std::map<std::string, int> index_;
  std::size_t doc_count_ = 0;
};

// Counts each distinct term once per document it occurs in. Documents must
// be normalized.
Vocabulary build_vocabulary(std::span<const Document> docs,
                            const VectorizerParams& params = {});
Vocabulary build_vocabulary(std::span<const Document> docs,
                            std::span<const std::size_t> indices,
                            const VectorizerParams& params = {});

// TF-IDF with idf(t) = ln((1 + N) / (1 + df(t))) + 1 and L2-normalized
// count * idf weights. Out-of-vocabulary terms are ignored.
class TfIdfModel {
 public:
  TfIdfModel() = default;
  TfIdfModel(Vocabulary vocab, VectorizerParams params);

  const Vocabulary& vocabulary() const { return vocab_; }
  const VectorizerParams& params() const { return params_; }
  double idf(int index) const { return idf_[static_cast<std::size_t>(index)]; }
  const std::vector<double>& idf_values() const { return idf_; }

  SparseVector transform(const Document& doc) const;

 private:
  Vocabulary vocab_;
  VectorizerParams params_;
  std::vector<double> idf_;
};

TfIdfModel fit_tfidf(std::span<const Document> docs,
                     const VectorizerParams& params = {});
TfIdfModel fit_tfidf(std::span<const Document> docs,
                     std::span<const std::size_t> indices,
                     const VectorizerParams& params = {});

// Raw term counts of one sentence (unigrams plus adjacent bigrams when
// enabled). Shared by vectorization, phrase lookups and attribution.
std::map<std::string, int> sentence_term_counts(const Sentence& sentence,
                                                bool use_bigrams);

}  // namespace negata
