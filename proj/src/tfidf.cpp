#include "altc/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "altc/error.hpp"
#include "json.hpp"

namespace altc {

double SparseVector::norm() const noexcept {
  double sum = 0.0;
  for (const double v : values) sum += v * v;
  return std::sqrt(sum);
}

double SparseVector::dot(std::span<const double> dense) const {
  if (dense.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "feature dimension " + std::to_string(dim) + " does not match " +
                    std::to_string(dense.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) sum += values[i] * dense[indices[i]];
  return sum;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> document_frequency,
                       std::size_t corpus_size)
    : terms_(std::move(terms)), df_(std::move(document_frequency)), corpus_size_(corpus_size) {
  if (terms_.size() != df_.size()) {
    throw Error(ErrorCode::LengthMismatch, "vocabulary terms and frequencies differ in length");
  }
  idf_.reserve(terms_.size());
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw Error(ErrorCode::InvalidArgument, "vocabulary terms must be sorted and unique",
                  terms_[i]);
    }
    if (df_[i] < 1 || df_[i] > corpus_size_) {
      throw Error(ErrorCode::InvalidArgument, "document frequency out of range", terms_[i]);
    }
    idf_.push_back(std::log((1.0 + static_cast<double>(corpus_size_)) /
                            (1.0 + static_cast<double>(df_[i]))) +
                   1.0);
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::to_json() const {
  nlohmann::ordered_json obj;
  obj["version"] = 1;
  obj["corpus_size"] = corpus_size_;
  auto terms = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    nlohmann::ordered_json t;
    t["t"] = terms_[i];
    t["df"] = df_[i];
    terms.push_back(std::move(t));
  }
  obj["terms"] = std::move(terms);
  return obj.dump();
}

Vocabulary Vocabulary::from_json(std::string_view json) {
  try {
    const auto obj = nlohmann::json::parse(json);
    if (obj.at("version").get<int>() != 1) {
      throw Error(ErrorCode::InvalidArgument, "unsupported vocabulary version");
    }
    std::vector<std::string> terms;
    std::vector<std::uint32_t> df;
    for (const auto& t : obj.at("terms")) {
      terms.push_back(t.at("t").get<std::string>());
      df.push_back(t.at("df").get<std::uint32_t>());
    }
    return Vocabulary(std::move(terms), std::move(df), obj.at("corpus_size").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("invalid vocabulary JSON: ") + e.what());
  }
}

std::vector<std::string> feature_terms(std::span<const std::string> tokens,
                                       const FeatureConfig& cfg) {
  std::vector<std::string> terms(tokens.begin(), tokens.end());
  if (cfg.bigrams) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      terms.push_back(tokens[i] + ' ' + tokens[i + 1]);
    }
  }
  return terms;
}

Vocabulary fit_vocabulary(std::span<const std::vector<std::string>> corpus_tokens,
                          const FeatureConfig& cfg) {
  if (corpus_tokens.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "cannot fit a vocabulary on an empty corpus");
  }
  std::map<std::string, std::uint32_t> df;
  for (const auto& tokens : corpus_tokens) {
    std::set<std::string> unique;
    for (auto& term : feature_terms(tokens, cfg)) unique.insert(std::move(term));
    for (const auto& term : unique) ++df[term];
  }

  std::vector<std::pair<std::string, std::uint32_t>> kept;
  for (auto& [term, count] : df) {
    if (count >= cfg.min_df) kept.emplace_back(term, count);
  }
  if (cfg.max_vocab > 0 && kept.size() > cfg.max_vocab) {
    std::ranges::stable_sort(kept, [](const auto& a, const auto& b) { return a.second > b.second; });
    kept.resize(cfg.max_vocab);
    std::ranges::sort(kept, [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  std::vector<std::string> terms;
  std::vector<std::uint32_t> freqs;
  terms.reserve(kept.size());
  freqs.reserve(kept.size());
  for (auto& [term, count] : kept) {
    terms.push_back(std::move(term));
    freqs.push_back(count);
  }
  return Vocabulary(std::move(terms), std::move(freqs), corpus_tokens.size());
}

SparseVector transform(std::span<const std::string> tokens, const Vocabulary& vocab,
                       const FeatureConfig& cfg) {
  std::vector<std::uint32_t> hits;
  for (const auto& term : feature_terms(tokens, cfg)) {
    if (const auto idx = vocab.index_of(term)) hits.push_back(*idx);
  }
  std::ranges::sort(hits);

  SparseVector out;
  out.dim = vocab.size();
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    const auto count = static_cast<double>(j - i);
    const double tf = cfg.sublinear_tf ? 1.0 + std::log(count) : count;
    out.indices.push_back(hits[i]);
    out.values.push_back(tf * vocab.idf(hits[i]));
    i = j;
  }
  const double norm = out.norm();
  if (norm > 0.0) {
    for (auto& v : out.values) v /= norm;
  }
  return out;
}

TextFeaturizer TextFeaturizer::fit(std::span<const std::string> texts, const PrepConfig& prep,
                                   const FeatureConfig& features) {
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(texts.size());
  for (const auto& text : texts) tokens.push_back(preprocess(text, prep));
  return TextFeaturizer(prep, features, fit_vocabulary(tokens, features));
}

SparseVector TextFeaturizer::featurize(std::string_view text) const {
  return transform(preprocess(text, prep_), vocab_, features_);
}

std::vector<SparseVector> TextFeaturizer::featurize_all(std::span<const std::string> texts) const {
  std::vector<SparseVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(featurize(text));
  return out;
}

}  // namespace altc
