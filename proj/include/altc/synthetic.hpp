#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "altc/corpus.hpp"

namespace altc {

// Splits `total` across classes proportionally to `ratio` by largest
// remainder, so the counts always sum to `total`.
std::vector<std::size_t> proportional_counts(std::span<const double> ratio, std::size_t total);

// Letter-only pseudo-word for vocabulary index i ("baaa", "baab", ...), so
// that it survives preprocessing untouched.
std::string synthetic_word(std::size_t i);

// Each class owns `keywords_per_class` words; a document mixes
// `keywords_per_doc` of its class's words with `noise_per_doc` words from a
// shared pool. Linearly separable by construction.
struct SeparableConfig {
  std::vector<std::size_t> class_counts;
  std::size_t keywords_per_class = 15;
  std::size_t shared_words = 60;
  std::size_t keywords_per_doc = 4;
  std::size_t noise_per_doc = 8;
  std::uint64_t seed = 0;
};

std::vector<LabeledDocument> separable_corpus(const SeparableConfig& cfg);

// Gaussian bag of words. Each class has a latent mean mu_c ~ N(0, sep^2 I);
// a document draws z ~ N(mu_c, spread^2 I) and then `length` words from
// softmax(E z), where E is a fixed random V x d embedding. Classes overlap,
// so some documents sit near decision boundaries.
struct GaussianBagConfig {
  std::vector<std::size_t> class_counts;
  std::size_t vocab_size = 400;
  std::size_t latent_dim = 6;
  double class_separation = 1.0;
  double doc_spread = 1.0;
  double embedding_scale = 1.0;
  std::size_t min_length = 15;
  std::size_t max_length = 30;
  std::uint64_t seed = 0;
};

std::vector<LabeledDocument> gaussian_bag_corpus(const GaussianBagConfig& cfg);

}  // namespace altc
