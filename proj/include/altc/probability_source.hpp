#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "altc/corpus.hpp"
#include "altc/linear_model.hpp"
#include "altc/tfidf.hpp"

namespace altc {

// Anything that maps a document to K per-class probabilities in [0, 1].
class ProbabilitySource {
 public:
  virtual ~ProbabilitySource() = default;
  virtual std::size_t num_classes() const = 0;
  virtual std::vector<double> predict_proba(const Document& doc) = 0;
};

// Featurizes raw text and scores it with a linear model.
class LinearModelSource final : public ProbabilitySource {
 public:
  LinearModelSource(const TextFeaturizer& featurizer, const OvrLinearModel& model)
      : featurizer_(featurizer), model_(model) {}

  std::size_t num_classes() const override { return model_.num_classes(); }
  std::vector<double> predict_proba(const Document& doc) override;

 private:
  const TextFeaturizer& featurizer_;
  const OvrLinearModel& model_;
};

// Talks to a child process, one JSON request per line:
//   stdin:  {"id": ..., "text": ...}
//   stdout: {"id": ..., "probs": [...]}
// Replies must echo the id and carry exactly K values in [0, 1]; anything
// else raises ProtocolError.
class ExternalProcessSource final : public ProbabilitySource {
 public:
  ExternalProcessSource(std::vector<std::string> argv, std::size_t num_classes);
  ~ExternalProcessSource() override;

  ExternalProcessSource(const ExternalProcessSource&) = delete;
  ExternalProcessSource& operator=(const ExternalProcessSource&) = delete;

  std::size_t num_classes() const override { return num_classes_; }
  std::vector<double> predict_proba(const Document& doc) override;

 private:
  std::string read_line();

  std::size_t num_classes_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

// Validates a probability vector against the source contract.
void check_probabilities(const std::vector<double>& probs, std::size_t num_classes);

}  // namespace altc
