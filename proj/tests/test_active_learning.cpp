#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "altc/active_learning.hpp"
#include "altc/error.hpp"
#include "altc/synthetic.hpp"
#include "json.hpp"
#include "support.hpp"

namespace altc {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL_CHECK("no Error thrown");
  return ErrorCode::InvalidArgument;
}

TEST_CASE("Uncertainty.CategoricalExamples") {
  const std::vector<double> uniform = {0.25, 0.25, 0.25, 0.25};
  CHECK_NEAR(uncertainty(uniform), std::log(4.0), 1e-12);
  const std::vector<double> hot = {1.0, 0.0, 0.0, 0.0};
  CHECK_EQ(uncertainty(hot), 0.0);
  const std::vector<double> p = {0.7, 0.2, 0.1};
  CHECK_NEAR(uncertainty(p), 0.801819, 1e-6);
  const std::vector<double> two = {0.2, 0.8};
  CHECK_NEAR(uncertainty(two), 0.500402, 1e-6);
}

TEST_CASE("Uncertainty.RenormalizesIndependentHeads") {
  // Unnormalized sigmoid outputs behave like their normalized version.
  const std::vector<double> raw = {0.6, 0.3, 0.3};
  const std::vector<double> norm = {0.5, 0.25, 0.25};
  CHECK_NEAR(uncertainty(raw), uncertainty(norm), 1e-15);
  CHECK_NEAR(uncertainty(norm), 1.5 * std::numbers::ln2, 1e-12);
}

TEST_CASE("Uncertainty.BoundedByLogK") {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> p(2 + rng.below(6));
    for (auto& v : p) v = rng.uniform();
    p[0] += 1e-3;
    const double h = uncertainty(p);
    CHECK_GE(h, 0.0);
    CHECK_LE(h, std::log(static_cast<double>(p.size())) + 1e-12);
  }
}

TEST_CASE("Uncertainty.AllZeroThrows") {
  const std::vector<double> z = {0.0, 0.0};
  CHECK_EQ(code_of([&] { uncertainty(z); }), ErrorCode::AllZeroVector);
  // Binary-sum mode has no renormalization and is fine.
  CHECK_EQ(uncertainty(z, EntropyMode::BinarySum), 0.0);
}

TEST_CASE("Uncertainty.BinarySumMode") {
  const std::vector<double> p = {0.5, 0.5, 1.0};
  CHECK_NEAR(uncertainty(p, EntropyMode::BinarySum), 2.0 * std::numbers::ln2, 1e-12);
  const std::vector<double> q = {0.1};
  CHECK_NEAR(uncertainty(q, EntropyMode::BinarySum), -(0.1 * std::log(0.1) + 0.9 * std::log(0.9)),
              1e-15);
}

TEST_CASE("TopUncertain.Examples") {
  const std::vector<std::string> ids = {"a", "b", "c"};
  const std::vector<double> s = {0.9, 1.2, 0.1};
  CHECK_EQ(top_uncertain(ids, s, 2), (std::vector<std::size_t>{1, 0}));
  CHECK_EQ(top_uncertain(ids, s, 5), (std::vector<std::size_t>{1, 0, 2}));
  CHECK(top_uncertain(ids, s, 0).empty());
}

TEST_CASE("TopUncertain.TiesPreferLowerIds") {
  const std::vector<std::string> ids = {"d3", "d1", "d2", "d0"};
  const std::vector<double> s = {0.5, 0.5, 0.5, 0.1};
  CHECK_EQ(top_uncertain(ids, s, 2), (std::vector<std::size_t>{1, 2}));
}

TEST_CASE("TopUncertain.EmptyPoolThrows") {
  CHECK_EQ(code_of([] { top_uncertain({}, {}, 3); }), ErrorCode::EmptyPool);
}

// Exhaustive maximization over all b-subsets.
double best_subset_sum(const std::vector<double>& s, std::size_t b) {
  const std::size_t n = s.size();
  double best = -1.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != b) continue;
    std::vector<double> picked;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) picked.push_back(s[i]);
    }
    std::sort(picked.rbegin(), picked.rend());
    double sum = 0.0;
    for (const double v : picked) sum += v;
    best = std::max(best, sum);
  }
  return best;
}

TEST_CASE("TopUncertain.MaximizesBatchUncertaintyExhaustively") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5;
    std::vector<std::string> ids;
    std::vector<double> s;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back("x" + std::to_string(i));
      // Coarse values so ties happen.
      s.push_back(trial % 2 == 0 ? static_cast<double>(rng.below(4)) / 4.0 : rng.uniform());
    }
    const auto picked = top_uncertain(ids, s, 2);
    REQUIRE_EQ(picked.size(), 2u);
    std::vector<double> vals = {s[picked[0]], s[picked[1]]};
    std::sort(vals.rbegin(), vals.rend());
    CHECK_EQ(vals[0] + vals[1], best_subset_sum(s, 2));
    CHECK_GE(s[picked[0]], s[picked[1]]);
  }
}

TEST_CASE("RandomSample.DistinctDeterministicAndClamped") {
  Rng a(5), b(5);
  const auto x = random_sample(50, 10, a);
  CHECK_EQ(x, random_sample(50, 10, b));
  CHECK_EQ(std::set<std::size_t>(x.begin(), x.end()).size(), 10u);
  for (const auto i : x) CHECK_LT(i, 50u);
  Rng c(1);
  CHECK_EQ(random_sample(3, 10, c).size(), 3u);
  CHECK_EQ(code_of([&] { random_sample(0, 1, c); }), ErrorCode::EmptyPool);
}

TEST_CASE("Strategy.NamesRoundTrip") {
  CHECK_EQ(parse_strategy("random"), Strategy::Random);
  CHECK_EQ(to_string(Strategy::Entropy), "entropy");
  CHECK_EQ(parse_entropy_mode("binary_sum"), EntropyMode::BinarySum);
  CHECK_THROWS_AS(parse_strategy("margin"), Error);
}

TEST_CASE("SimulatedOracle.RevealsGoldOrThrows") {
  SimulatedOracle oracle({{"d1", 2}});
  std::vector<Candidate> batch = {{{"d1", "x", std::nullopt}, {}, 0.0}};
  const auto got = oracle.label(batch);
  REQUIRE_EQ(got.size(), 1u);
  CHECK_EQ(got[0].label, 2u);
  CHECK_EQ(got[0].doc.id, "d1");
  batch.push_back({{"d9", "y", std::nullopt}, {}, 0.0});
  try {
    oracle.label(batch);
    FAIL("no exception thrown");
  } catch (const Error& e) {
    CHECK_EQ(e.code(), ErrorCode::MissingGoldLabel);
    CHECK_EQ(e.subject(), "d9");
  }
}

std::vector<LabeledDocument> toy_corpus(std::size_t n, std::uint64_t seed = 1) {
  SeparableConfig cfg;
  cfg.class_counts = proportional_counts(std::vector<double>{4, 3, 2, 1}, n);
  cfg.seed = seed;
  return separable_corpus(cfg);
}

TEST_CASE("MakeSimulation.StratifiedSeedAndHiddenPool") {
  const auto corpus = toy_corpus(200);
  const auto sim = make_simulation(corpus, 4, 12, 3);
  CHECK_EQ(sim.state.labeled.size(), 12u);
  CHECK_EQ(sim.state.pool.size(), 188u);
  CHECK_EQ(sim.gold.size(), 188u);
  std::set<std::size_t> classes;
  for (const auto& d : sim.state.labeled) classes.insert(d.label);
  CHECK_EQ(classes.size(), 4u);
  for (const auto& d : sim.state.labeled) CHECK_FALSE(sim.gold.contains(d.doc.id));
  const auto again = make_simulation(corpus, 4, 12, 3);
  CHECK_EQ(again.state.labeled, sim.state.labeled);
  CHECK_EQ(code_of([&] { make_simulation(corpus, 4, 3, 0); }), ErrorCode::InvalidArgument);
}

struct LoopFixture {
  std::vector<LabeledDocument> corpus;
  std::vector<LabeledDocument> eval;
  Simulation sim;
  TextFeaturizer featurizer;
  LabelSchema schema{std::vector<std::string>{"w", "x", "y", "z"}};

  LoopFixture(std::size_t pool, std::size_t seed_size) {
    auto all = toy_corpus(pool + seed_size + 40);
    const auto split = stratified_split(all, 0.8, 4);
    corpus = split.train;
    eval = split.held;
    sim = make_simulation(corpus, 4, seed_size, 8);
    std::vector<std::string> texts;
    for (const auto& d : corpus) texts.push_back(d.doc.text);
    featurizer = TextFeaturizer::fit(texts, PrepConfig{}, FeatureConfig{});
  }
};

TrainConfig quick_train() {
  TrainConfig t;
  t.learning_rate = 1.0;
  t.epochs = 10;
  t.batch_size = 16;
  return t;
}

TEST_CASE("RunLoop.BudgetAndHistoryLength") {
  LoopFixture f(100, 12);
  AcquisitionConfig acq;
  acq.batch_size = 10;
  acq.max_iterations = 3;
  SimulatedOracle oracle(f.sim.gold);
  const std::size_t pool_before = f.sim.state.pool.size();
  const auto r = run_loop(f.sim.state, f.schema, acq, quick_train(), f.featurizer, f.eval, oracle);
  CHECK_EQ(r.state.labeled.size(), 12u + 30u);
  CHECK_EQ(r.state.pool.size(), pool_before - 30u);
  REQUIRE_EQ(r.state.history.size(), 4u);
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK_EQ(r.state.history[t].t, t);
    CHECK_EQ(r.state.history[t].labeled, 12u + 10u * t);
    REQUIRE(r.state.history[t].macro_f1.has_value());
    CHECK_EQ(*r.state.history[t].micro_f1, *r.state.history[t].accuracy);
  }
  CHECK_EQ(r.state.iteration, 3u);
}

TEST_CASE("RunLoop.ConservationAndDisjointness") {
  LoopFixture f(60, 8);
  AcquisitionConfig acq;
  acq.batch_size = 7;
  acq.max_iterations = 4;
  for (const auto strategy : {Strategy::Entropy, Strategy::Random}) {
    acq.strategy = strategy;
    SimulatedOracle oracle(f.sim.gold);
    std::size_t checks = 0;
    LoopObserver obs;
    obs.on_iteration = [&](const ActiveLearningState& s, const OvrLinearModel&) {
      CHECK_EQ(s.labeled.size() + s.pool.size(), f.corpus.size());
      std::set<std::string> ids;
      for (const auto& d : s.labeled) ids.insert(d.doc.id);
      for (const auto& d : s.pool) CHECK_FALSE(ids.contains(d.id));
      ++checks;
    };
    const auto r =
        run_loop(f.sim.state, f.schema, acq, quick_train(), f.featurizer, f.eval, oracle, obs);
    CHECK_EQ(checks, 5u);
    // Labels come from the oracle's gold map.
    for (const auto& d : r.state.labeled) {
      if (f.sim.gold.contains(d.doc.id)) CHECK_EQ(f.sim.gold.at(d.doc.id), d.label);
    }
  }
}

TEST_CASE("RunLoop.StopsWhenPoolRunsOut") {
  LoopFixture f(20, 8);
  f.sim.state.pool.resize(5);
  AcquisitionConfig acq;
  acq.batch_size = 10;
  acq.max_iterations = 5;
  SimulatedOracle oracle(f.sim.gold);
  const std::size_t pool = 5;
  const auto r = run_loop(f.sim.state, f.schema, acq, quick_train(), f.featurizer, f.eval, oracle);
  CHECK(r.state.pool.empty());
  CHECK_EQ(r.state.history.size(), 2u);
  CHECK_EQ(r.state.labeled.size(), 8u + pool);
}

TEST_CASE("RunLoop.DeterministicForFixedSeeds") {
  LoopFixture f(80, 10);
  AcquisitionConfig acq;
  acq.batch_size = 5;
  acq.max_iterations = 3;
  for (const auto strategy : {Strategy::Entropy, Strategy::Random}) {
    acq.strategy = strategy;
    SimulatedOracle o1(f.sim.gold), o2(f.sim.gold);
    const auto a = run_loop(f.sim.state, f.schema, acq, quick_train(), f.featurizer, f.eval, o1);
    const auto b = run_loop(f.sim.state, f.schema, acq, quick_train(), f.featurizer, f.eval, o2);
    CHECK_EQ(history_jsonl(a.state.history), history_jsonl(b.state.history));
    CHECK_EQ(a.model, b.model);
    CHECK_EQ(a.state.labeled, b.state.labeled);
  }
}

TEST_CASE("RunLoop.EntropyPicksTheMostUncertainDocuments") {
  LoopFixture f(50, 8);
  AcquisitionConfig acq;
  acq.batch_size = 4;
  acq.max_iterations = 1;
  OvrLinearModel seed_model;
  LoopObserver obs;
  obs.on_iteration = [&](const ActiveLearningState& s, const OvrLinearModel& m) {
    if (s.iteration == 0) seed_model = m;
  };
  SimulatedOracle oracle(f.sim.gold);
  const auto r =
      run_loop(f.sim.state, f.schema, acq, quick_train(), f.featurizer, f.eval, oracle, obs);
  std::vector<double> scores;
  for (const auto& d : f.sim.state.pool) {
    scores.push_back(uncertainty(predict_proba(seed_model, f.featurizer.featurize(d.text))));
  }
  std::vector<double> sorted = scores;
  std::sort(sorted.rbegin(), sorted.rend());
  const std::vector<LabeledDocument> added(r.state.labeled.begin() + 8, r.state.labeled.end());
  REQUIRE_EQ(added.size(), 4u);
  double picked_sum = 0.0;
  for (const auto& d : added) {
    const auto it = std::find_if(f.sim.state.pool.begin(), f.sim.state.pool.end(),
                                 [&](const Document& p) { return p.id == d.doc.id; });
    picked_sum += scores[static_cast<std::size_t>(it - f.sim.state.pool.begin())];
  }
  CHECK_NEAR(picked_sum, sorted[0] + sorted[1] + sorted[2] + sorted[3], 1e-12);
}

TEST_CASE("RunLoop.WithoutEvaluationSetMetricsAreNull") {
  LoopFixture f(30, 8);
  AcquisitionConfig acq;
  acq.max_iterations = 1;
  SimulatedOracle oracle(f.sim.gold);
  const auto r = run_loop(f.sim.state, f.schema, acq, quick_train(), f.featurizer, {}, oracle);
  const auto line = history_record_json(r.state.history[0]);
  const auto j = nlohmann::json::parse(line);
  CHECK(j["macro_f1"].is_null());
  CHECK(j["accuracy"].is_null());
  CHECK_EQ(j["t"], 0);
  CHECK_EQ(line.rfind("{\"t\":0,\"labeled\":8,\"macro_f1\":null", 0), 0u);
}

TEST_CASE("RunLoop.WarmStartStillRespectsBudget") {
  LoopFixture f(60, 8);
  AcquisitionConfig acq;
  acq.batch_size = 5;
  acq.max_iterations = 2;
  acq.warm_start = true;
  SimulatedOracle oracle(f.sim.gold);
  const auto r = run_loop(f.sim.state, f.schema, acq, quick_train(), f.featurizer, f.eval, oracle);
  CHECK_EQ(r.state.labeled.size(), 18u);
  CHECK_EQ(r.state.history.size(), 3u);
}

TEST_CASE("RunLoop.RejectsBadInput") {
  LoopFixture f(20, 8);
  AcquisitionConfig acq;
  SimulatedOracle oracle(f.sim.gold);
  auto empty = f.sim.state;
  empty.labeled.clear();
  CHECK_EQ(code_of([&] {
              run_loop(empty, f.schema, acq, quick_train(), f.featurizer, f.eval, oracle);
            }),
            ErrorCode::EmptyTrainingSet);
  auto dup = f.sim.state;
  dup.pool.push_back(dup.labeled[0].doc);
  CHECK_EQ(code_of([&] {
              run_loop(dup, f.schema, acq, quick_train(), f.featurizer, f.eval, oracle);
            }),
            ErrorCode::DuplicateId);
}

TEST_CASE("LabelsToReach.FirstCrossing") {
  std::vector<IterationRecord> h = {{0, 40, 0.5, 0.5, 0.5, 1.0},
                                    {1, 50, 0.81, 0.8, 0.8, 1.0},
                                    {2, 60, 0.79, 0.8, 0.8, 1.0},
                                    {3, 70, 0.9, 0.9, 0.9, 1.0}};
  CHECK_EQ(labels_to_reach(h, 0.8), 50u);
  CHECK_EQ(labels_to_reach(h, 0.85), 70u);
  CHECK_FALSE(labels_to_reach(h, 0.95).has_value());
  h[1].macro_f1.reset();
  CHECK_EQ(labels_to_reach(h, 0.8), 70u);
}

class FixedSource final : public ProbabilitySource {
 public:
  std::size_t num_classes() const override { return 2; }
  std::vector<double> predict_proba(const Document& doc) override {
    if (doc.id == "bad") return {0.5, 1.5};
    const double p = static_cast<double>(doc.text.size()) / 10.0;
    return {p, 1.0 - p};
  }
};

TEST_CASE("SelectBatch.ThroughProbabilitySource") {
  FixedSource src;
  Rng rng(0);
  // Text length 5 gives p = 0.5, the most uncertain.
  const std::vector<Document> pool = {{"a", "x", {}}, {"b", "xxxxx", {}}, {"c", "xxxx", {}}};
  const auto picked = select_batch(src, pool, 2, Strategy::Entropy, EntropyMode::CategoricalNormalized, rng);
  REQUIRE_EQ(picked.size(), 2u);
  CHECK_EQ(picked[0].doc.id, "b");
  CHECK_EQ(picked[1].doc.id, "c");
  CHECK_NEAR(picked[0].uncertainty, std::numbers::ln2, 1e-12);
  const std::vector<Document> bad = {{"bad", "x", {}}};
  CHECK_EQ(code_of([&] {
              select_batch(src, bad, 1, Strategy::Entropy, EntropyMode::CategoricalNormalized, rng);
            }),
            ErrorCode::ProtocolError);
}

}  // namespace
}  // namespace altc
