#include "negata/vectorizer.hpp"

#include <cmath>
#include <set>

#include "negata/errors.hpp"

namespace negata {

namespace {

void require_normalized(const Document& doc) {
  if (!doc.normalized) {
    throw argument_error("document '" + doc.id +
                         "' must be normalized before vectorization");
  }
}

std::map<std::string, int> document_term_counts(const Document& doc,
                                                bool use_bigrams) {
  std::map<std::string, int> counts;
  for (const auto& sentence : doc.sentences) {
    for (const auto& [term, count] : sentence_term_counts(sentence, use_bigrams)) {
      counts[term] += count;
    }
  }
  return counts;
}

}  // namespace

std::map<std::string, int> sentence_term_counts(const Sentence& sentence,
                                                bool use_bigrams) {
  std::map<std::string, int> counts;
  const auto& tokens = sentence.tokens;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    ++counts[tokens[i].lemma];
    if (use_bigrams && i + 1 < tokens.size()) {
      ++counts[tokens[i].lemma + " " + tokens[i + 1].lemma];
    }
  }
  return counts;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<int> df,
                       std::size_t doc_count)
    : terms_(std::move(terms)), df_(std::move(df)), doc_count_(doc_count) {
  if (terms_.size() != df_.size()) {
    throw argument_error("vocabulary terms and document frequencies differ in size");
  }
  for (std::size_t i = 1; i < terms_.size(); ++i) {
    if (!(terms_[i - 1] < terms_[i])) {
      throw argument_error("vocabulary terms must be sorted and unique");
    }
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    index_.emplace(terms_[i], static_cast<int>(i));
  }
}

int Vocabulary::index_of(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : it->second;
}

Vocabulary build_vocabulary(std::span<const Document> docs,
                            std::span<const std::size_t> indices,
                            const VectorizerParams& params) {
  if (params.min_df < 1) throw argument_error("min_df must be >= 1");
  std::map<std::string, int> df;
  for (const auto idx : indices) {
    const auto& doc = docs[idx];
    require_normalized(doc);
    for (const auto& [term, count] : document_term_counts(doc, params.use_bigrams)) {
      (void)count;
      ++df[term];  // once per document
    }
  }
  std::vector<std::string> terms;
  std::vector<int> dfs;
  for (const auto& [term, d] : df) {
    if (d >= params.min_df) {
      terms.push_back(term);
      dfs.push_back(d);
    }
  }
  return Vocabulary(std::move(terms), std::move(dfs), indices.size());
}

Vocabulary build_vocabulary(std::span<const Document> docs,
                            const VectorizerParams& params) {
  std::vector<std::size_t> indices(docs.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  return build_vocabulary(docs, indices, params);
}

TfIdfModel::TfIdfModel(Vocabulary vocab, VectorizerParams params)
    : vocab_(std::move(vocab)), params_(params) {
  idf_.resize(static_cast<std::size_t>(vocab_.size()));
  const double n = static_cast<double>(vocab_.doc_count());
  for (int i = 0; i < vocab_.size(); ++i) {
    idf_[static_cast<std::size_t>(i)] =
        std::log((1.0 + n) / (1.0 + static_cast<double>(vocab_.df(i)))) + 1.0;
  }
}

SparseVector TfIdfModel::transform(const Document& doc) const {
  require_normalized(doc);
  SparseVector vec;
  vec.dim = vocab_.size();
  for (const auto& [term, count] : document_term_counts(doc, params_.use_bigrams)) {
    const int idx = vocab_.index_of(term);
    if (idx < 0) continue;  // out of vocabulary
    vec.push(idx, static_cast<double>(count) * idf(idx));
  }
  const double norm = vec.norm();
  if (norm > 0.0) {
    for (auto& [idx, w] : vec.entries) w /= norm;
  }
  vec.dim = vocab_.size();
  return vec;
}

TfIdfModel fit_tfidf(std::span<const Document> docs,
                     std::span<const std::size_t> indices,
                     const VectorizerParams& params) {
  return TfIdfModel(build_vocabulary(docs, indices, params), params);
}

TfIdfModel fit_tfidf(std::span<const Document> docs,
                     const VectorizerParams& params) {
  return TfIdfModel(build_vocabulary(docs, params), params);
}

}  // namespace negata
