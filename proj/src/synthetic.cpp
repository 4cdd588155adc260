#include "altc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "altc/error.hpp"
#include "altc/random.hpp"

namespace altc {
namespace {

std::string doc_id(std::size_t i, std::size_t total) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::to_string(total > 0 ? total - 1 : 0).size();
  return "d" + std::string(width - digits.size(), '0') + digits;
}

// Class labels in an interleaved order so file order carries no signal.
std::vector<std::size_t> shuffled_labels(std::span<const std::size_t> counts, Rng& rng) {
  std::vector<std::size_t> labels;
  for (std::size_t k = 0; k < counts.size(); ++k) labels.insert(labels.end(), counts[k], k);
  if (labels.empty()) throw Error(ErrorCode::EmptyCorpus, "class counts sum to zero");
  rng.shuffle(labels);
  return labels;
}

std::size_t draw_categorical(std::span<const double> cdf, Rng& rng) {
  const double u = rng.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

std::vector<std::size_t> proportional_counts(std::span<const double> ratio, std::size_t total) {
  const double sum = std::accumulate(ratio.begin(), ratio.end(), 0.0);
  if (ratio.empty() || !(sum > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "ratio must have a positive sum");
  }
  std::vector<std::size_t> counts(ratio.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < ratio.size(); ++k) {
    if (ratio[k] < 0.0) throw Error(ErrorCode::InvalidArgument, "ratio entries must be nonnegative");
    const double exact = ratio[k] / sum * static_cast<double>(total);
    counts[k] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[k];
    remainders.emplace_back(exact - std::floor(exact), k);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++counts[remainders[i].second];
  return counts;
}

std::string synthetic_word(std::size_t i) {
  // 'b' followed by at least three base-26 letters, most significant first.
  std::string word;
  std::size_t n = i;
  for (int k = 0; k < 3 || n > 0; ++k) {
    word.push_back(static_cast<char>('a' + n % 26));
    n /= 26;
  }
  word.push_back('b');
  std::reverse(word.begin(), word.end());
  return word;
}

std::vector<LabeledDocument> separable_corpus(const SeparableConfig& cfg) {
  if (cfg.keywords_per_class == 0 || cfg.keywords_per_doc == 0) {
    throw Error(ErrorCode::InvalidArgument, "documents need at least one class keyword");
  }
  Rng rng(cfg.seed);
  const auto labels = shuffled_labels(cfg.class_counts, rng);
  const std::size_t shared_base = cfg.class_counts.size() * cfg.keywords_per_class;

  std::vector<LabeledDocument> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t k = labels[i];
    std::vector<std::string> words;
    for (std::size_t j = 0; j < cfg.keywords_per_doc; ++j) {
      words.push_back(synthetic_word(k * cfg.keywords_per_class + rng.below(cfg.keywords_per_class)));
    }
    for (std::size_t j = 0; j < cfg.noise_per_doc && cfg.shared_words > 0; ++j) {
      words.push_back(synthetic_word(shared_base + rng.below(cfg.shared_words)));
    }
    rng.shuffle(words);
    std::string text;
    for (const auto& w : words) {
      if (!text.empty()) text.push_back(' ');
      text += w;
    }
    out.push_back({Document{doc_id(i, labels.size()), std::move(text), std::nullopt}, k});
  }
  return out;
}

std::vector<LabeledDocument> gaussian_bag_corpus(const GaussianBagConfig& cfg) {
  if (cfg.vocab_size == 0 || cfg.latent_dim == 0 || cfg.min_length == 0 ||
      cfg.max_length < cfg.min_length) {
    throw Error(ErrorCode::InvalidArgument, "invalid Gaussian bag configuration");
  }
  Rng rng(cfg.seed);
  const std::size_t K = cfg.class_counts.size();
  const std::size_t V = cfg.vocab_size;
  const std::size_t d = cfg.latent_dim;

  std::vector<double> embedding(V * d);
  for (auto& e : embedding) e = rng.normal(0.0, cfg.embedding_scale);
  std::vector<double> means(K * d);
  for (auto& m : means) m = rng.normal(0.0, cfg.class_separation);

  const auto labels = shuffled_labels(cfg.class_counts, rng);
  std::vector<double> z(d);
  std::vector<double> logits(V);
  std::vector<double> cdf(V);

  std::vector<LabeledDocument> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t k = labels[i];
    for (std::size_t j = 0; j < d; ++j) z[j] = rng.normal(means[k * d + j], cfg.doc_spread);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < V; ++v) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += embedding[v * d + j] * z[j];
      logits[v] = s;
      peak = std::max(peak, s);
    }
    double acc = 0.0;
    for (std::size_t v = 0; v < V; ++v) {
      acc += std::exp(logits[v] - peak);
      cdf[v] = acc;
    }
    const std::size_t length =
        cfg.min_length + rng.below(cfg.max_length - cfg.min_length + 1);
    std::string text;
    for (std::size_t w = 0; w < length; ++w) {
      if (!text.empty()) text.push_back(' ');
      text += synthetic_word(draw_categorical(cdf, rng));
    }
    out.push_back({Document{doc_id(i, labels.size()), std::move(text), std::nullopt}, k});
  }
  return out;
}

}  // namespace altc
