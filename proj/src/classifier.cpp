#include "altc/classifier.hpp"

#include <fstream>
#include <sstream>

#include "altc/error.hpp"
#include "json.hpp"

namespace altc {
namespace {

using ojson = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string(), path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string(), path.string());
  out << content;
}

ojson prep_to_json(const PrepConfig& p) {
  ojson o;
  o["lowercase"] = p.lowercase;
  o["strip_mentions"] = p.strip_mentions;
  o["strip_urls"] = p.strip_urls;
  o["strip_digits"] = p.strip_digits;
  o["strip_special"] = p.strip_special;
  o["tokenizer"] = std::string(to_string(p.tokenizer));
  return o;
}

PrepConfig prep_from_json(const nlohmann::json& o) {
  PrepConfig p;
  p.lowercase = o.at("lowercase").get<bool>();
  p.strip_mentions = o.at("strip_mentions").get<bool>();
  p.strip_urls = o.at("strip_urls").get<bool>();
  p.strip_digits = o.at("strip_digits").get<bool>();
  p.strip_special = o.at("strip_special").get<bool>();
  p.tokenizer = parse_tokenizer(o.at("tokenizer").get<std::string>());
  return p;
}

ojson features_to_json(const FeatureConfig& f) {
  ojson o;
  o["min_df"] = f.min_df;
  o["max_vocab"] = f.max_vocab;
  o["sublinear_tf"] = f.sublinear_tf;
  o["bigrams"] = f.bigrams;
  return o;
}

FeatureConfig features_from_json(const nlohmann::json& o) {
  FeatureConfig f;
  f.min_df = o.at("min_df").get<std::size_t>();
  f.max_vocab = o.at("max_vocab").get<std::size_t>();
  f.sublinear_tf = o.at("sublinear_tf").get<bool>();
  f.bigrams = o.at("bigrams").get<bool>();
  return f;
}

ojson train_to_json(const TrainConfig& t) {
  ojson o;
  o["learning_rate"] = t.learning_rate;
  o["epochs"] = t.epochs;
  o["batch_size"] = t.batch_size;
  o["l2_penalty"] = t.l2_penalty;
  o["seed"] = t.seed;
  o["prob_clamp"] = t.prob_clamp;
  o["early_stop_patience"] = t.early_stop_patience;
  return o;
}

TrainConfig train_from_json(const nlohmann::json& o) {
  TrainConfig t;
  t.learning_rate = o.at("learning_rate").get<double>();
  t.epochs = o.at("epochs").get<std::size_t>();
  t.batch_size = o.at("batch_size").get<std::size_t>();
  t.l2_penalty = o.at("l2_penalty").get<double>();
  t.seed = o.at("seed").get<std::uint64_t>();
  t.prob_clamp = o.at("prob_clamp").get<double>();
  t.early_stop_patience = o.at("early_stop_patience").get<std::size_t>();
  return t;
}

std::vector<Example> to_examples(const TextFeaturizer& featurizer,
                                 std::span<const LabeledDocument> docs) {
  std::vector<Example> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back({featurizer.featurize(d.doc.text), d.label});
  return out;
}

}  // namespace

std::vector<double> TextClassifier::predict_proba(std::string_view text) const {
  return altc::predict_proba(model, featurizer.featurize(text));
}

std::size_t TextClassifier::predict(std::string_view text) const {
  return argmax(predict_proba(text));
}

TrainedClassifier train_classifier(std::span<const LabeledDocument> docs, const LabelSchema& schema,
                                   const PrepConfig& prep, const FeatureConfig& features,
                                   const TrainConfig& train,
                                   std::span<const LabeledDocument> validation) {
  if (docs.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training documents");
  std::vector<std::string> texts;
  texts.reserve(docs.size());
  for (const auto& d : docs) texts.push_back(d.doc.text);

  TrainedClassifier out;
  out.classifier.schema = schema;
  out.classifier.featurizer = TextFeaturizer::fit(texts, prep, features);
  out.classifier.train_config = train;

  const auto examples = to_examples(out.classifier.featurizer, docs);
  const auto held = to_examples(out.classifier.featurizer, validation);
  const auto cw = compute_class_weights(distribution(docs, schema));
  out.fit = fit(examples, schema.size(), train, cw, nullptr, held);
  out.classifier.model = out.fit.model;
  return out;
}

EvaluationReport evaluate_classifier(const TextClassifier& clf,
                                     std::span<const LabeledDocument> docs) {
  std::vector<std::size_t> gold;
  std::vector<std::size_t> pred;
  gold.reserve(docs.size());
  pred.reserve(docs.size());
  for (const auto& d : docs) {
    gold.push_back(d.label);
    pred.push_back(clf.predict(d.doc.text));
  }
  return report(confusion(gold, pred, clf.schema.size()));
}

std::string model_json(const TextClassifier& clf, std::string_view vocab_ref) {
  ojson o;
  o["version"] = 1;
  o["schema"] = clf.schema.names();
  o["prep"] = prep_to_json(clf.featurizer.prep());
  o["features"] = features_to_json(clf.featurizer.features());
  o["vocab_ref"] = std::string(vocab_ref);
  auto heads = ojson::array();
  for (std::size_t k = 0; k < clf.model.num_classes(); ++k) {
    ojson head;
    const auto w = clf.model.weights(k);
    head["w"] = std::vector<double>(w.begin(), w.end());
    head["b"] = clf.model.bias(k);
    heads.push_back(std::move(head));
  }
  o["heads"] = std::move(heads);
  o["train_config"] = train_to_json(clf.train_config);
  return o.dump();
}

void save_classifier(const TextClassifier& clf, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / kVocabFile, clf.featurizer.vocabulary().to_json());
  write_file(dir / kModelFile, model_json(clf, kVocabFile));
}

TextClassifier load_classifier(const std::filesystem::path& model_path) {
  const auto text = read_file(model_path);
  try {
    const auto o = nlohmann::json::parse(text);
    if (o.at("version").get<int>() != 1) {
      throw Error(ErrorCode::InvalidArgument, "unsupported model version");
    }
    TextClassifier clf;
    clf.schema = LabelSchema(o.at("schema").get<std::vector<std::string>>());
    const auto vocab_path = model_path.parent_path() / o.at("vocab_ref").get<std::string>();
    clf.featurizer = TextFeaturizer(prep_from_json(o.at("prep")),
                                    features_from_json(o.at("features")),
                                    Vocabulary::from_json(read_file(vocab_path)));
    clf.train_config = train_from_json(o.at("train_config"));

    const auto& heads = o.at("heads");
    if (heads.size() != clf.schema.size()) {
      throw Error(ErrorCode::SchemaMismatch, "model has " + std::to_string(heads.size()) +
                                                 " heads but " + std::to_string(clf.schema.size()) +
                                                 " classes");
    }
    clf.model = OvrLinearModel(clf.schema.size(), clf.featurizer.dim());
    for (std::size_t k = 0; k < heads.size(); ++k) {
      const auto w = heads[k].at("w").get<std::vector<double>>();
      if (w.size() != clf.featurizer.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "head " + std::to_string(k) +
                                                      " does not match the vocabulary size");
      }
      std::ranges::copy(w, clf.model.weights(k).begin());
      clf.model.bias(k) = heads[k].at("b").get<double>();
    }
    return clf;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, "invalid model artifact " + model_path.string() + ": " +
                                                e.what(),
                model_path.string());
  }
}

}  // namespace altc
