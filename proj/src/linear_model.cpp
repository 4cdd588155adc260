#include "altc/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "altc/error.hpp"
#include "altc/random.hpp"

namespace altc {
namespace {

void check_lengths(std::size_t p, std::size_t y, std::size_t w) {
  if (p != y || p != w) {
    throw Error(ErrorCode::LengthMismatch, "probability, target and weight vectors differ in length (" +
                                               std::to_string(p) + ", " + std::to_string(y) + ", " +
                                               std::to_string(w) + ")");
  }
}

double squared_norm(std::span<const double> v) {
  double sum = 0.0;
  for (const double x : v) sum += x * x;
  return sum;
}

double mean_loss(const OvrLinearModel& model, std::span<const Example> data,
                 const ClassWeights& cw, double eps) {
  double sum = 0.0;
  const std::size_t K = model.num_classes();
  for (const auto& ex : data) {
    sum += weighted_bce_loss(predict_proba(model, ex.x), one_hot(ex.label, K), cw, eps);
  }
  return sum / static_cast<double>(data.size());
}

}  // namespace

OvrLinearModel::OvrLinearModel(std::size_t num_classes, std::size_t feature_dim)
    : dim_(feature_dim), weights_(num_classes * feature_dim, 0.0), bias_(num_classes, 0.0) {}

bool OvrLinearModel::all_finite() const noexcept {
  const auto finite = [](double v) { return std::isfinite(v); };
  return std::ranges::all_of(weights_, finite) && std::ranges::all_of(bias_, finite);
}

void ClassWeights::validate() const {
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!(w[k] > 0.0) || !std::isfinite(w[k])) {
      throw Error(ErrorCode::InvalidArgument,
                  "class weight " + std::to_string(k) + " must be positive and finite",
                  std::to_string(k));
    }
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::InvalidArgument, "learning rate must be a nonnegative finite number");
  }
  if (epochs == 0) throw Error(ErrorCode::InvalidArgument, "epochs must be positive");
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  if (!(l2_penalty >= 0.0)) throw Error(ErrorCode::InvalidArgument, "l2 penalty must be >= 0");
  if (!(prob_clamp > 0.0 && prob_clamp < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "probability clamp must lie in (0, 0.5)");
  }
}

ClassWeights compute_class_weights(const ClassDistribution& dist) {
  const auto K = static_cast<double>(dist.counts.size());
  ClassWeights cw;
  cw.w.reserve(dist.counts.size());
  for (std::size_t k = 0; k < dist.counts.size(); ++k) {
    if (dist.counts[k] == 0) {
      throw Error(ErrorCode::ZeroClassCount, "class " + std::to_string(k) + " has no documents",
                  std::to_string(k));
    }
    cw.w.push_back(static_cast<double>(dist.total) / (K * static_cast<double>(dist.counts[k])));
  }
  return cw;
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> margins(const OvrLinearModel& model, const SparseVector& x) {
  if (x.dim != model.feature_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "feature dimension " + std::to_string(x.dim) + " does not match model dimension " +
                    std::to_string(model.feature_dim()));
  }
  std::vector<double> z(model.num_classes());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = x.dot(model.weights(k)) + model.bias(k);
  return z;
}

std::vector<double> predict_proba(const OvrLinearModel& model, const SparseVector& x) {
  auto p = margins(model, x);
  for (auto& v : p) v = sigmoid(v);
  return p;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return best;
}

std::size_t predict_label(const OvrLinearModel& model, const SparseVector& x) {
  return argmax(predict_proba(model, x));
}

std::vector<double> one_hot(std::size_t label, std::size_t num_classes) {
  if (label >= num_classes) {
    throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(label) + " out of range",
                std::to_string(label));
  }
  std::vector<double> y(num_classes, 0.0);
  y[label] = 1.0;
  return y;
}

double weighted_bce_loss(std::span<const double> p, std::span<const double> y,
                         const ClassWeights& cw, double eps) {
  check_lengths(p.size(), y.size(), cw.w.size());
  double loss = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double pk = std::clamp(p[k], eps, 1.0 - eps);
    loss -= cw.w[k] * (y[k] * std::log(pk) + (1.0 - y[k]) * std::log(1.0 - pk));
  }
  return loss;
}

double regularized_loss(const OvrLinearModel& model, const SparseVector& x,
                        std::span<const double> y, const ClassWeights& cw, double l2,
                        double eps) {
  return weighted_bce_loss(predict_proba(model, x), y, cw, eps) +
         0.5 * l2 * squared_norm(model.all_weights());
}

std::vector<HeadGradient> loss_gradient(const OvrLinearModel& model, const SparseVector& x,
                                        std::span<const double> y, const ClassWeights& cw,
                                        double l2) {
  const auto p = predict_proba(model, x);
  check_lengths(p.size(), y.size(), cw.w.size());
  std::vector<HeadGradient> grads(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double dz = cw.w[k] * (p[k] - y[k]);
    auto& g = grads[k];
    const auto w = model.weights(k);
    g.weights.resize(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) g.weights[j] = l2 * w[j];
    for (std::size_t i = 0; i < x.nnz(); ++i) g.weights[x.indices[i]] += dz * x.values[i];
    g.bias = dz;
  }
  return grads;
}

FitResult fit(std::span<const Example> train, std::size_t num_classes, const TrainConfig& cfg,
              const ClassWeights& cw, const OvrLinearModel* init,
              std::span<const Example> validation) {
  cfg.validate();
  cw.validate();
  if (train.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training examples");
  if (cw.w.size() != num_classes) {
    throw Error(ErrorCode::LengthMismatch, "class weights do not match the number of classes");
  }
  const std::size_t dim = train.front().x.dim;
  const auto check_example = [&](const Example& ex) {
    if (ex.x.dim != dim) {
      throw Error(ErrorCode::DimensionMismatch, "inconsistent feature dimensions in training set");
    }
    if (ex.label >= num_classes) {
      throw Error(ErrorCode::LabelOutOfRange, "training label out of range",
                  std::to_string(ex.label));
    }
  };
  std::ranges::for_each(train, check_example);
  std::ranges::for_each(validation, check_example);

  FitResult result;
  if (init) {
    if (init->num_classes() != num_classes || init->feature_dim() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "warm-start model has the wrong shape");
    }
    result.model = *init;
  } else {
    result.model = OvrLinearModel(num_classes, dim);
  }
  OvrLinearModel& model = result.model;

  const std::size_t n = train.size();
  const double lr = cfg.learning_rate;
  const double l2 = cfg.l2_penalty;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);

  std::vector<double> grad_w(num_classes * dim);
  std::vector<double> grad_b(num_classes);
  std::vector<double> z(num_classes);

  OvrLinearModel best = model;
  double best_validation = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    const double penalty = 0.5 * l2 * squared_norm(model.all_weights());
    double data_loss = 0.0;

    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      std::ranges::fill(grad_w, 0.0);
      std::ranges::fill(grad_b, 0.0);
      for (std::size_t pos = start; pos < stop; ++pos) {
        const Example& ex = train[order[pos]];
        for (std::size_t k = 0; k < num_classes; ++k) {
          const double pk = sigmoid(ex.x.dot(model.weights(k)) + model.bias(k));
          const double yk = ex.label == k ? 1.0 : 0.0;
          const double clamped = std::clamp(pk, cfg.prob_clamp, 1.0 - cfg.prob_clamp);
          data_loss -= cw.w[k] * (yk * std::log(clamped) + (1.0 - yk) * std::log(1.0 - clamped));
          const double dz = cw.w[k] * (pk - yk);
          double* gw = grad_w.data() + k * dim;
          for (std::size_t i = 0; i < ex.x.nnz(); ++i) gw[ex.x.indices[i]] += dz * ex.x.values[i];
          grad_b[k] += dz;
        }
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      auto w = model.all_weights();
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= lr * (grad_w[j] * scale + l2 * w[j]);
      for (std::size_t k = 0; k < num_classes; ++k) model.bias(k) -= lr * grad_b[k] * scale;
    }

    const double epoch_loss = data_loss / static_cast<double>(n) + penalty;
    if (!std::isfinite(epoch_loss) || !model.all_finite()) {
      throw Error(ErrorCode::NonFiniteLoss,
                  "training diverged at epoch " + std::to_string(epoch + 1) +
                      "; lower the learning rate",
                  std::to_string(epoch + 1));
    }
    result.loss_history.push_back(epoch_loss);
    result.best_epoch = epoch;

    if (!validation.empty()) {
      const double v = mean_loss(model, validation, cw, cfg.prob_clamp);
      result.validation_history.push_back(v);
      if (v < best_validation) {
        best_validation = v;
        best = model;
        since_best = 0;
      } else if (cfg.early_stop_patience > 0 && ++since_best >= cfg.early_stop_patience) {
        break;
      }
    }
  }

  if (!validation.empty()) {
    result.best_epoch = static_cast<std::size_t>(
        std::ranges::min_element(result.validation_history) - result.validation_history.begin());
    result.model = std::move(best);
  }
  return result;
}

}  // namespace altc
