#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "altc/textprep.hpp"

namespace altc {

// Sparse feature vector with strictly increasing indices and nonzero values.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::size_t dim = 0;

  std::size_t nnz() const noexcept { return indices.size(); }
  double norm() const noexcept;
  double dot(std::span<const double> dense) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

struct FeatureConfig {
  std::size_t min_df = 1;
  // 0 keeps every term that passes min_df.
  std::size_t max_vocab = 0;
  // tf = 1 + ln(count) instead of the raw count.
  bool sublinear_tf = false;
  // Adds adjacent-token bigrams ("a b") to the unigrams.
  bool bigrams = false;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  // Terms must be sorted, unique, with 1 <= df <= corpus_size.
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> document_frequency,
             std::size_t corpus_size);

  std::size_t size() const noexcept { return terms_.size(); }
  std::size_t corpus_size() const noexcept { return corpus_size_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::uint32_t document_frequency(std::size_t index) const { return df_.at(index); }
  std::optional<std::uint32_t> index_of(std::string_view term) const;

  // ln((1 + N) / (1 + df)) + 1
  double idf(std::size_t index) const { return idf_.at(index); }

  // {"version":1, "corpus_size":N, "terms":[{"t":term,"df":n}, ...]}
  std::string to_json() const;
  static Vocabulary from_json(std::string_view json);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.terms_ == b.terms_ && a.df_ == b.df_ && a.corpus_size_ == b.corpus_size_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::vector<double> idf_;
  std::size_t corpus_size_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Expands a token list into the terms counted by the feature config.
std::vector<std::string> feature_terms(std::span<const std::string> tokens,
                                       const FeatureConfig& cfg);

// Terms are indexed in sorted order. With max_vocab set, the highest-df terms
// win, ties going to the lexicographically smaller term. Throws EmptyCorpus.
Vocabulary fit_vocabulary(std::span<const std::vector<std::string>> corpus_tokens,
                          const FeatureConfig& cfg = {});

// tf x idf per vocabulary term, L2-normalized. Out-of-vocabulary tokens are
// dropped; an all-OOV document gives the zero vector.
SparseVector transform(std::span<const std::string> tokens, const Vocabulary& vocab,
                       const FeatureConfig& cfg = {});

// Text -> features with a fixed preprocessing and vocabulary.
class TextFeaturizer {
 public:
  TextFeaturizer() = default;
  TextFeaturizer(PrepConfig prep, FeatureConfig features, Vocabulary vocab)
      : prep_(prep), features_(features), vocab_(std::move(vocab)) {}

  // Fits the vocabulary on `texts` after preprocessing.
  static TextFeaturizer fit(std::span<const std::string> texts, const PrepConfig& prep,
                            const FeatureConfig& features);

  SparseVector featurize(std::string_view text) const;
  std::vector<SparseVector> featurize_all(std::span<const std::string> texts) const;

  const PrepConfig& prep() const noexcept { return prep_; }
  const FeatureConfig& features() const noexcept { return features_; }
  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  std::size_t dim() const noexcept { return vocab_.size(); }

 private:
  PrepConfig prep_;
  FeatureConfig features_;
  Vocabulary vocab_;
};

}  // namespace altc
