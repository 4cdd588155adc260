#include "altc/active_learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "altc/error.hpp"
#include "json.hpp"

namespace altc {
namespace {

double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

std::vector<Candidate> to_candidates(std::span<const Document> pool,
                                     std::vector<std::vector<double>>& probs,
                                     std::span<const double> scores,
                                     std::span<const std::size_t> picked) {
  std::vector<Candidate> out;
  out.reserve(picked.size());
  for (const std::size_t i : picked) out.push_back({pool[i], std::move(probs[i]), scores[i]});
  return out;
}

std::vector<Candidate> choose(std::span<const Document> pool,
                              std::vector<std::vector<double>> probs, std::size_t b,
                              Strategy strategy, EntropyMode mode, Rng& rng) {
  std::vector<double> scores(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) scores[i] = uncertainty(probs[i], mode);
  std::vector<std::size_t> picked;
  if (strategy == Strategy::Entropy) {
    std::vector<std::string> ids;
    ids.reserve(pool.size());
    for (const auto& d : pool) ids.push_back(d.id);
    picked = top_uncertain(ids, scores, b);
  } else {
    picked = random_sample(pool.size(), b, rng);
  }
  return to_candidates(pool, probs, scores, picked);
}

struct Evaluation {
  std::optional<double> macro_f1;
  std::optional<double> micro_f1;
  std::optional<double> accuracy;
};

Evaluation evaluate(const OvrLinearModel& model, std::span<const SparseVector> features,
                    std::span<const LabeledDocument> eval) {
  if (eval.empty()) return {};
  std::vector<std::size_t> gold;
  std::vector<std::size_t> pred;
  gold.reserve(eval.size());
  pred.reserve(eval.size());
  for (std::size_t i = 0; i < eval.size(); ++i) {
    gold.push_back(eval[i].label);
    pred.push_back(predict_label(model, features[i]));
  }
  const auto r = report(confusion(gold, pred, model.num_classes()));
  return {r.macro.f1, r.micro.f1, r.accuracy};
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  return s == Strategy::Random ? "random" : "entropy";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "entropy") return Strategy::Entropy;
  if (name == "random") return Strategy::Random;
  throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(EntropyMode m) noexcept {
  return m == EntropyMode::BinarySum ? "binary_sum" : "categorical_normalized";
}

EntropyMode parse_entropy_mode(std::string_view name) {
  if (name == "categorical_normalized") return EntropyMode::CategoricalNormalized;
  if (name == "binary_sum") return EntropyMode::BinarySum;
  throw Error(ErrorCode::InvalidArgument, "unknown entropy mode '" + std::string(name) + "'");
}

double uncertainty(std::span<const double> p, EntropyMode mode) {
  if (mode == EntropyMode::BinarySum) {
    double h = 0.0;
    for (const double pk : p) h -= plogp(pk) + plogp(1.0 - pk);
    return h;
  }
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(sum > 0.0)) {
    throw Error(ErrorCode::AllZeroVector, "cannot renormalize an all-zero probability vector");
  }
  double h = 0.0;
  for (const double pk : p) h -= plogp(pk / sum);
  // Rounding can leave -0.0 or a hair below zero for one-hot inputs.
  return std::max(h, 0.0);
}

std::vector<std::size_t> top_uncertain(std::span<const std::string> ids,
                                       std::span<const double> scores, std::size_t b) {
  if (ids.empty()) throw Error(ErrorCode::EmptyPool, "cannot select from an empty pool");
  if (ids.size() != scores.size()) {
    throw Error(ErrorCode::LengthMismatch, "ids and scores differ in length");
  }
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto better = [&](std::size_t a, std::size_t c) {
    if (scores[a] != scores[c]) return scores[a] > scores[c];
    return ids[a] < ids[c];
  };
  const std::size_t take = std::min(b, ids.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    better);
  order.resize(take);
  return order;
}

std::vector<std::size_t> random_sample(std::size_t pool_size, std::size_t b, Rng& rng) {
  if (pool_size == 0) throw Error(ErrorCode::EmptyPool, "cannot select from an empty pool");
  std::vector<std::size_t> idx(pool_size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t take = std::min(b, pool_size);
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool_size - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  return idx;
}

std::vector<Candidate> select_batch(const OvrLinearModel& model, std::span<const Document> pool,
                                    std::span<const SparseVector> features, std::size_t b,
                                    Strategy strategy, EntropyMode mode, Rng& rng) {
  if (pool.empty()) throw Error(ErrorCode::EmptyPool, "cannot select from an empty pool");
  if (features.size() != pool.size()) {
    throw Error(ErrorCode::LengthMismatch, "pool and feature lists differ in length");
  }
  std::vector<std::vector<double>> probs;
  probs.reserve(pool.size());
  for (const auto& x : features) probs.push_back(predict_proba(model, x));
  return choose(pool, std::move(probs), b, strategy, mode, rng);
}

std::vector<Candidate> select_batch(ProbabilitySource& source, std::span<const Document> pool,
                                    std::size_t b, Strategy strategy, EntropyMode mode, Rng& rng) {
  if (pool.empty()) throw Error(ErrorCode::EmptyPool, "cannot select from an empty pool");
  std::vector<std::vector<double>> probs;
  probs.reserve(pool.size());
  for (const auto& doc : pool) {
    auto p = source.predict_proba(doc);
    check_probabilities(p, source.num_classes());
    probs.push_back(std::move(p));
  }
  return choose(pool, std::move(probs), b, strategy, mode, rng);
}

std::vector<LabeledDocument> SimulatedOracle::label(std::span<const Candidate> batch) {
  std::vector<LabeledDocument> out;
  out.reserve(batch.size());
  for (const auto& c : batch) {
    const auto it = gold_.find(c.doc.id);
    if (it == gold_.end()) {
      throw Error(ErrorCode::MissingGoldLabel, "no gold label for '" + c.doc.id + "'", c.doc.id);
    }
    out.push_back({c.doc, it->second});
  }
  return out;
}

std::string history_record_json(const IterationRecord& r) {
  nlohmann::ordered_json obj;
  obj["t"] = r.t;
  obj["labeled"] = r.labeled;
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json();
  };
  obj["macro_f1"] = opt(r.macro_f1);
  obj["micro_f1"] = opt(r.micro_f1);
  obj["accuracy"] = opt(r.accuracy);
  obj["mean_train_loss"] = r.mean_train_loss;
  return obj.dump();
}

std::string history_jsonl(std::span<const IterationRecord> history) {
  std::string out;
  for (const auto& r : history) {
    out += history_record_json(r);
    out += '\n';
  }
  return out;
}

Simulation make_simulation(std::span<const LabeledDocument> corpus, std::size_t num_classes,
                           std::size_t seed_size, std::uint64_t seed) {
  if (seed_size < num_classes) {
    throw Error(ErrorCode::InvalidArgument, "seed size must be at least the number of classes");
  }
  if (seed_size > corpus.size()) {
    throw Error(ErrorCode::InvalidArgument, "seed size exceeds the corpus size");
  }
  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].label >= num_classes) {
      throw Error(ErrorCode::LabelOutOfRange, "corpus label out of range", corpus[i].doc.id);
    }
    members[corpus[i].label].push_back(i);
  }

  Rng rng(seed);
  std::vector<bool> in_seed(corpus.size(), false);
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (members[k].empty()) {
      throw Error(ErrorCode::ZeroClassCount,
                  "class " + std::to_string(k) + " has no documents to seed from",
                  std::to_string(k));
    }
    in_seed[members[k][rng.below(members[k].size())]] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!in_seed[i]) rest.push_back(i);
  }
  if (seed_size > num_classes) {
    for (const std::size_t i : random_sample(rest.size(), seed_size - num_classes, rng)) {
      in_seed[rest[i]] = true;
    }
  }

  Simulation sim;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (in_seed[i]) {
      sim.state.labeled.push_back(corpus[i]);
    } else {
      sim.state.pool.push_back(corpus[i].doc);
      sim.gold.emplace(corpus[i].doc.id, corpus[i].label);
    }
  }
  return sim;
}

LoopResult run_loop(ActiveLearningState state, const LabelSchema& schema,
                    const AcquisitionConfig& acq, const TrainConfig& train,
                    const TextFeaturizer& featurizer, std::span<const LabeledDocument> eval,
                    LabelOracle& oracle, const LoopObserver& observer) {
  if (state.labeled.empty()) {
    throw Error(ErrorCode::EmptyTrainingSet, "the seed labeled set is empty");
  }
  if (acq.batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");

  const std::size_t num_classes = schema.size();

  std::unordered_set<std::string> ids;
  for (const auto& d : state.labeled) ids.insert(d.doc.id);
  for (const auto& d : state.pool) {
    if (!ids.insert(d.id).second) {
      throw Error(ErrorCode::DuplicateId, "pool and labeled set share id '" + d.id + "'", d.id);
    }
  }
  for (const auto& d : eval) {
    if (ids.contains(d.doc.id)) {
      throw Error(ErrorCode::DuplicateId,
                  "evaluation document '" + d.doc.id + "' also appears in the pool or labeled set",
                  d.doc.id);
    }
  }

  std::unordered_map<std::string, SparseVector> cache;
  for (const auto& d : state.labeled) cache.emplace(d.doc.id, featurizer.featurize(d.doc.text));
  for (const auto& d : state.pool) cache.emplace(d.id, featurizer.featurize(d.text));
  std::vector<SparseVector> eval_features;
  eval_features.reserve(eval.size());
  for (const auto& d : eval) eval_features.push_back(featurizer.featurize(d.doc.text));

  LoopResult result;
  const auto retrain = [&]() {
    std::vector<Example> examples;
    examples.reserve(state.labeled.size());
    for (const auto& d : state.labeled) examples.push_back({cache.at(d.doc.id), d.label});
    const auto cw = compute_class_weights(distribution(state.labeled, schema));
    const bool warm = acq.warm_start && result.model.num_classes() == num_classes;
    auto fitted = fit(examples, num_classes, train, cw, warm ? &result.model : nullptr);
    result.model = std::move(fitted.model);

    double loss = 0.0;
    for (const auto& ex : examples) {
      loss += weighted_bce_loss(predict_proba(result.model, ex.x), one_hot(ex.label, num_classes),
                                cw, train.prob_clamp);
    }
    const auto ev = evaluate(result.model, eval_features, eval);
    state.history.push_back({state.iteration, state.labeled.size(), ev.macro_f1, ev.micro_f1,
                             ev.accuracy, loss / static_cast<double>(examples.size())});
    if (observer.on_iteration) observer.on_iteration(state, result.model);
  };

  retrain();
  Rng rng(acq.seed ^ 0x9E3779B97F4A7C15ULL);
  while (!state.pool.empty() && (acq.max_iterations == 0 || state.iteration < acq.max_iterations)) {
    std::vector<SparseVector> features;
    features.reserve(state.pool.size());
    for (const auto& d : state.pool) features.push_back(cache.at(d.id));
    const auto batch = select_batch(result.model, state.pool, features, acq.batch_size,
                                    acq.strategy, acq.entropy_mode, rng);

    auto labeled = oracle.label(batch);
    if (labeled.size() != batch.size()) {
      throw Error(ErrorCode::ProtocolError, "oracle returned a different number of labels");
    }
    std::unordered_set<std::string> picked;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (labeled[i].doc.id != batch[i].doc.id) {
        throw Error(ErrorCode::ProtocolError, "oracle reordered or replaced batch documents",
                    labeled[i].doc.id);
      }
      if (labeled[i].label >= num_classes) {
        throw Error(ErrorCode::LabelOutOfRange, "oracle label out of range", labeled[i].doc.id);
      }
      picked.insert(batch[i].doc.id);
    }
    std::erase_if(state.pool, [&](const Document& d) { return picked.contains(d.id); });
    for (auto& d : labeled) state.labeled.push_back(std::move(d));
    ++state.iteration;
    retrain();
  }

  result.state = std::move(state);
  return result;
}

std::optional<std::size_t> labels_to_reach(std::span<const IterationRecord> history,
                                           double target) {
  for (const auto& r : history) {
    if (r.macro_f1 && *r.macro_f1 >= target) return r.labeled;
  }
  return std::nullopt;
}

}  // namespace altc
