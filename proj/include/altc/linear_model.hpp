#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "altc/corpus.hpp"
#include "altc/tfidf.hpp"

namespace altc {

// One independent sigmoid head per class: p_k = sigmoid(w_k . x + b_k).
class OvrLinearModel {
 public:
  OvrLinearModel() = default;
  // Zero-initialized.
  OvrLinearModel(std::size_t num_classes, std::size_t feature_dim);

  std::size_t num_classes() const noexcept { return bias_.size(); }
  std::size_t feature_dim() const noexcept { return dim_; }

  std::span<double> weights(std::size_t k) { return {weights_.data() + k * dim_, dim_}; }
  std::span<const double> weights(std::size_t k) const {
    return {weights_.data() + k * dim_, dim_};
  }
  double& bias(std::size_t k) { return bias_.at(k); }
  double bias(std::size_t k) const { return bias_.at(k); }

  // Row-major K x V.
  std::span<double> all_weights() noexcept { return weights_; }
  std::span<const double> all_weights() const noexcept { return weights_; }

  bool all_finite() const noexcept;

  friend bool operator==(const OvrLinearModel&, const OvrLinearModel&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

// Per-class loss multipliers; every entry positive and finite.
struct ClassWeights {
  std::vector<double> w;

  static ClassWeights uniform(std::size_t num_classes) {
    return {std::vector<double>(num_classes, 1.0)};
  }
  void validate() const;
};

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double l2_penalty = 1e-4;
  std::uint64_t seed = 0;
  // Probabilities are clamped into [eps, 1 - eps] before logarithms.
  double prob_clamp = 1e-7;
  // Epochs without held-out improvement before stopping; 0 disables.
  std::size_t early_stop_patience = 5;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Balanced inverse frequency: total / (K * count_k). Throws ZeroClassCount.
ClassWeights compute_class_weights(const ClassDistribution& dist);

double sigmoid(double z) noexcept;

// Pre-activations w_k . x + b_k. Throws DimensionMismatch.
std::vector<double> margins(const OvrLinearModel& model, const SparseVector& x);

// Independent head probabilities; they need not sum to one.
std::vector<double> predict_proba(const OvrLinearModel& model, const SparseVector& x);

// argmax_k p_k, lowest index on ties.
std::size_t argmax(std::span<const double> values);
std::size_t predict_label(const OvrLinearModel& model, const SparseVector& x);

std::vector<double> one_hot(std::size_t label, std::size_t num_classes);

// -sum_k w_k [y_k ln p_k + (1 - y_k) ln(1 - p_k)] on p clamped to [eps, 1-eps].
// Throws LengthMismatch.
double weighted_bce_loss(std::span<const double> p, std::span<const double> y,
                         const ClassWeights& cw, double eps = 1e-7);

// The per-example objective minimized by fit():
// weighted_bce_loss + (l2 / 2) * sum_k ||w_k||^2.
double regularized_loss(const OvrLinearModel& model, const SparseVector& x,
                        std::span<const double> y, const ClassWeights& cw, double l2,
                        double eps = 1e-7);

struct HeadGradient {
  std::vector<double> weights;  // dense, feature_dim entries
  double bias = 0.0;
};

// Gradient of regularized_loss: dL/dz_k = cw_k (p_k - y_k),
// dL/dw_k = dL/dz_k * x + l2 * w_k, dL/db_k = dL/dz_k.
std::vector<HeadGradient> loss_gradient(const OvrLinearModel& model, const SparseVector& x,
                                        std::span<const double> y, const ClassWeights& cw,
                                        double l2);

struct Example {
  SparseVector x;
  std::size_t label = 0;
};

struct FitResult {
  OvrLinearModel model;
  // Mean regularized loss per epoch, measured before each mini-batch update.
  std::vector<double> loss_history;
  // Mean held-out weighted BCE per epoch, when a validation set was given.
  std::vector<double> validation_history;
  std::size_t best_epoch = 0;
};

// Mini-batch gradient descent with a fixed learning rate from zero (or
// `init`). Shuffling is seeded by cfg.seed. With a validation set, training
// stops after `early_stop_patience` epochs without improvement and the best
// parameters are returned. Throws EmptyTrainingSet, DimensionMismatch,
// NonFiniteLoss.
FitResult fit(std::span<const Example> train, std::size_t num_classes, const TrainConfig& cfg,
              const ClassWeights& cw, const OvrLinearModel* init = nullptr,
              std::span<const Example> validation = {});

}  // namespace altc
