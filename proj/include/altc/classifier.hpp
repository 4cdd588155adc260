#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "altc/corpus.hpp"
#include "altc/linear_model.hpp"
#include "altc/metrics.hpp"
#include "altc/tfidf.hpp"

namespace altc {

// Everything inference needs: schema, preprocessing, vocabulary and heads.
struct TextClassifier {
  LabelSchema schema;
  TextFeaturizer featurizer;
  OvrLinearModel model;
  TrainConfig train_config;

  std::vector<double> predict_proba(std::string_view text) const;
  std::size_t predict(std::string_view text) const;
};

struct TrainedClassifier {
  TextClassifier classifier;
  FitResult fit;
};

// Fits the vocabulary on the training texts, weights classes by inverse
// frequency and trains the heads.
TrainedClassifier train_classifier(std::span<const LabeledDocument> docs, const LabelSchema& schema,
                                   const PrepConfig& prep, const FeatureConfig& features,
                                   const TrainConfig& train,
                                   std::span<const LabeledDocument> validation = {});

EvaluationReport evaluate_classifier(const TextClassifier& clf,
                                     std::span<const LabeledDocument> docs);

inline constexpr const char* kModelFile = "model.json";
inline constexpr const char* kVocabFile = "vocab.json";

// {"version":1, "schema":[...], "prep":{...}, "features":{...},
//  "vocab_ref":"vocab.json", "heads":[{"w":[...],"b":...}], "train_config":{...}}
std::string model_json(const TextClassifier& clf, std::string_view vocab_ref);

// Writes model.json and vocab.json into `dir`, creating it if needed.
void save_classifier(const TextClassifier& clf, const std::filesystem::path& dir);

// Reads a model.json; vocab_ref resolves relative to its directory.
TextClassifier load_classifier(const std::filesystem::path& model_path);

}  // namespace altc
