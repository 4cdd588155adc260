#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "altc/corpus.hpp"
#include "altc/linear_model.hpp"
#include "altc/metrics.hpp"
#include "altc/probability_source.hpp"
#include "altc/random.hpp"
#include "altc/tfidf.hpp"

namespace altc {

enum class Strategy { Entropy, Random };

// How entropy is taken over independent sigmoid heads.
enum class EntropyMode {
  // Renormalize p to sum to one, then -sum p_k ln p_k.
  CategoricalNormalized,
  // Sum of per-head binary entropies.
  BinarySum,
};

std::string_view to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view name);
std::string_view to_string(EntropyMode m) noexcept;
EntropyMode parse_entropy_mode(std::string_view name);

struct AcquisitionConfig {
  std::size_t batch_size = 10;
  // Acquisition rounds; 0 runs until the pool is empty.
  std::size_t max_iterations = 0;
  std::size_t seed_size = 40;
  Strategy strategy = Strategy::Entropy;
  EntropyMode entropy_mode = EntropyMode::CategoricalNormalized;
  // Seeds the initial labeled set and random acquisition.
  std::uint64_t seed = 0;
  // Continue from the previous model instead of retraining from zero.
  bool warm_start = false;
};

// Natural-log entropy with 0 ln 0 = 0. Throws AllZeroVector in categorical
// mode when p sums to zero.
double uncertainty(std::span<const double> p, EntropyMode mode = EntropyMode::CategoricalNormalized);

// Indices of the `b` highest scores, highest first, ties by ascending id.
// With b >= size every index is returned. Throws EmptyPool.
std::vector<std::size_t> top_uncertain(std::span<const std::string> ids,
                                       std::span<const double> scores, std::size_t b);

// Uniform sample of `b` distinct indices in draw order. Throws EmptyPool.
std::vector<std::size_t> random_sample(std::size_t pool_size, std::size_t b, Rng& rng);

// A pool document together with the model's view of it.
struct Candidate {
  Document doc;
  std::vector<double> probs;
  double uncertainty = 0.0;
};

// Scores a pool and picks B_t. The entropy strategy maximizes the batch's
// total uncertainty; the random strategy draws from `rng`.
std::vector<Candidate> select_batch(const OvrLinearModel& model, std::span<const Document> pool,
                                    std::span<const SparseVector> features, std::size_t b,
                                    Strategy strategy, EntropyMode mode, Rng& rng);
std::vector<Candidate> select_batch(ProbabilitySource& source, std::span<const Document> pool,
                                    std::size_t b, Strategy strategy, EntropyMode mode, Rng& rng);

// Supplies gold labels for a selected batch.
class LabelOracle {
 public:
  virtual ~LabelOracle() = default;
  virtual std::vector<LabeledDocument> label(std::span<const Candidate> batch) = 0;
};

// Reveals labels from a hidden id -> label map. Throws MissingGoldLabel.
class SimulatedOracle final : public LabelOracle {
 public:
  explicit SimulatedOracle(std::unordered_map<std::string, std::size_t> gold)
      : gold_(std::move(gold)) {}
  std::vector<LabeledDocument> label(std::span<const Candidate> batch) override;

 private:
  std::unordered_map<std::string, std::size_t> gold_;
};

struct IterationRecord {
  std::size_t t = 0;
  std::size_t labeled = 0;
  // Absent when there is no evaluation set.
  std::optional<double> macro_f1;
  std::optional<double> micro_f1;
  std::optional<double> accuracy;
  // Mean weighted BCE of the retrained model over L_t.
  double mean_train_loss = 0.0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct ActiveLearningState {
  std::vector<LabeledDocument> labeled;
  std::vector<Document> pool;
  std::size_t iteration = 0;
  std::vector<IterationRecord> history;
};

// {"t":..,"labeled":..,"macro_f1":..,"micro_f1":..,"accuracy":..,"mean_train_loss":..}
std::string history_record_json(const IterationRecord& r);
// One record per line.
std::string history_jsonl(std::span<const IterationRecord> history);

struct Simulation {
  ActiveLearningState state;
  std::unordered_map<std::string, std::size_t> gold;  // pool labels, hidden from the learner
};

// Draws a stratified seed set (one document per class first, the rest
// uniformly) and puts everything else in the pool with its label hidden.
Simulation make_simulation(std::span<const LabeledDocument> corpus, std::size_t num_classes,
                           std::size_t seed_size, std::uint64_t seed);

struct LoopObserver {
  // After each history append, including the seed-only model at t = 0.
  std::function<void(const ActiveLearningState&, const OvrLinearModel&)> on_iteration;
};

struct LoopResult {
  OvrLinearModel model;
  ActiveLearningState state;
};

// Retrains on L_0, then per round: score U, select B_t, label via the
// oracle, move B_t from U to L, retrain, evaluate, record. Stops after
// max_iterations rounds or when U is empty. Class weights are recomputed
// from L_t before every retrain.
LoopResult run_loop(ActiveLearningState state, const LabelSchema& schema,
                    const AcquisitionConfig& acq, const TrainConfig& train,
                    const TextFeaturizer& featurizer, std::span<const LabeledDocument> eval,
                    LabelOracle& oracle, const LoopObserver& observer = {});

// Labels in L_t at the first record whose macro-F1 reaches `target`.
std::optional<std::size_t> labels_to_reach(std::span<const IterationRecord> history,
                                           double target);

}  // namespace altc
