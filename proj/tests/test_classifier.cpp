#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "altc/classifier.hpp"
#include "altc/error.hpp"
#include "altc/synthetic.hpp"
#include "json.hpp"
#include "support.hpp"

namespace altc {
namespace {

using testing::read_file;
using testing::TempDir;
using testing::write_file;

struct Trained {
  std::vector<LabeledDocument> train, held;
  TrainedClassifier result;
};

Trained train_small() {
  SeparableConfig cfg;
  cfg.class_counts = {60, 40, 30, 20};
  cfg.seed = 5;
  const auto all = separable_corpus(cfg);
  auto split = stratified_split(all, 0.8, 1);
  TrainConfig t;
  t.learning_rate = 1.0;
  t.epochs = 40;
  t.batch_size = 16;
  auto r = train_classifier(split.train, LabelSchema{}, PrepConfig{}, FeatureConfig{}, t);
  return {std::move(split.train), std::move(split.held), std::move(r)};
}

TEST_CASE("TrainClassifier.LearnsSeparableData") {
  const auto t = train_small();
  const auto rep = evaluate_classifier(t.result.classifier, t.held);
  CHECK_GE(rep.macro.f1, 0.95);
  CHECK_EQ(t.result.fit.loss_history.size(), 40u);
  CHECK_EQ(t.result.classifier.schema, LabelSchema{});
}

TEST_CASE("TrainClassifier.EmptyInputThrows") {
  try {
    train_classifier({}, LabelSchema{}, PrepConfig{}, FeatureConfig{}, TrainConfig{});
    FAIL("no exception thrown");
  } catch (const Error& e) {
    CHECK_EQ(e.code(), ErrorCode::EmptyTrainingSet);
  }
}

TEST_CASE("Artifacts.SaveLoadRoundTripPredictsIdentically") {
  const auto t = train_small();
  TempDir dir;
  save_classifier(t.result.classifier, dir.path() / "m");
  const auto loaded = load_classifier(dir.path() / "m" / kModelFile);
  CHECK_EQ(loaded.schema, t.result.classifier.schema);
  CHECK_EQ(loaded.model, t.result.classifier.model);
  CHECK_EQ(loaded.featurizer.vocabulary(), t.result.classifier.featurizer.vocabulary());
  CHECK_EQ(loaded.train_config, t.result.classifier.train_config);
  for (const auto& d : t.held) {
    CHECK_EQ(loaded.predict_proba(d.doc.text), t.result.classifier.predict_proba(d.doc.text));
  }
}

TEST_CASE("Artifacts.ByteIdenticalAcrossRuns") {
  const auto a = train_small();
  const auto b = train_small();
  TempDir dir;
  save_classifier(a.result.classifier, dir.path() / "a");
  save_classifier(b.result.classifier, dir.path() / "b");
  CHECK_EQ(read_file(dir.path() / "a" / kModelFile), read_file(dir.path() / "b" / kModelFile));
  CHECK_EQ(read_file(dir.path() / "a" / kVocabFile), read_file(dir.path() / "b" / kVocabFile));
}

TEST_CASE("Artifacts.ModelJsonShape") {
  const auto t = train_small();
  const auto j = nlohmann::json::parse(model_json(t.result.classifier, "vocab.json"));
  CHECK_EQ(j["version"], 1);
  CHECK_EQ(j["vocab_ref"], "vocab.json");
  CHECK_EQ(j["schema"].size(), 4u);
  REQUIRE_EQ(j["heads"].size(), 4u);
  CHECK_EQ(j["heads"][0]["w"].size(), t.result.classifier.featurizer.dim());
  CHECK(j.contains("train_config"));
}

ErrorCode load_error(const std::filesystem::path& p) {
  try {
    load_classifier(p);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL_CHECK("load succeeded");
  return ErrorCode::InvalidArgument;
}

TEST_CASE("Artifacts.LoadRejectsInconsistentFiles") {
  const auto t = train_small();
  TempDir dir;
  save_classifier(t.result.classifier, dir.path());
  const auto model_path = dir.path() / kModelFile;
  auto j = nlohmann::json::parse(read_file(model_path));

  auto fewer = j;
  fewer["heads"].erase(fewer["heads"].size() - 1);
  write_file(dir.path() / "fewer.json", fewer.dump());
  CHECK_EQ(load_error(dir.path() / "fewer.json"), ErrorCode::SchemaMismatch);

  auto narrow = j;
  narrow["heads"][0]["w"].erase(0);
  write_file(dir.path() / "narrow.json", narrow.dump());
  CHECK_EQ(load_error(dir.path() / "narrow.json"), ErrorCode::DimensionMismatch);

  write_file(dir.path() / "broken.json", "{\"version\":");
  CHECK_EQ(load_error(dir.path() / "broken.json"), ErrorCode::MalformedRecord);

  CHECK_EQ(load_error(dir.path() / "absent.json"), ErrorCode::IoError);
}

}  // namespace
}  // namespace altc
