#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace altc {

// Entry (i, j) counts gold class i predicted as class j.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t num_classes)
      : k_(num_classes), cells_(num_classes * num_classes, 0) {}

  std::size_t num_classes() const noexcept { return k_; }
  std::size_t at(std::size_t gold, std::size_t pred) const { return cells_.at(gold * k_ + pred); }
  std::size_t& at(std::size_t gold, std::size_t pred) { return cells_.at(gold * k_ + pred); }
  std::size_t total() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::size_t> cells_;
};

// Throws LengthMismatch or LabelOutOfRange.
ConfusionMatrix confusion(std::span<const std::size_t> gold, std::span<const std::size_t> pred,
                          std::size_t num_classes);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct AveragedScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvaluationReport {
  ConfusionMatrix confusion;
  std::vector<ClassScores> per_class;
  AveragedScores macro;
  AveragedScores micro;
  AveragedScores weighted;  // gold-support weights
  double accuracy = 0.0;
  // Classes where precision or recall was 0/0 and therefore reported as 0.
  std::size_t undefined_classes = 0;
};

// 0/0 rates are reported as 0. In single-label evaluation micro precision,
// recall and F1 all equal accuracy. Throws EmptyMatrix.
EvaluationReport report(const ConfusionMatrix& cm);

// Versioned machine-readable form. Class names are optional.
std::string report_json(const EvaluationReport& r, std::span<const std::string> class_names = {});
// Fixed-width table in the shape of a classification report.
std::string report_table(const EvaluationReport& r, std::span<const std::string> class_names = {});
// Header row of predicted classes, one row per gold class.
std::string confusion_csv(const ConfusionMatrix& cm, std::span<const std::string> class_names = {});

struct ComparisonRow {
  std::string run;
  double precision = 0.0;  // weighted
  double recall = 0.0;     // weighted
  double f1 = 0.0;         // weighted
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
};

std::vector<ComparisonRow> compare_runs(
    std::span<const std::pair<std::string, EvaluationReport>> reports);

// run,precision,recall,f1,accuracy,macro_f1,micro_f1
std::string comparison_csv(std::span<const ComparisonRow> rows);

}  // namespace altc
