#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "altc/active_learning.hpp"
#include "altc/classifier.hpp"
#include "altc/error.hpp"
#include "altc/linear_model.hpp"
#include "altc/metrics.hpp"
#include "altc/textprep.hpp"

namespace py = pybind11;

namespace {

altc::PrepConfig make_prep(bool lowercase, bool strip_mentions, bool strip_urls, bool strip_digits,
                           bool strip_special, const std::string& tokenizer) {
  altc::PrepConfig p;
  p.lowercase = lowercase;
  p.strip_mentions = strip_mentions;
  p.strip_urls = strip_urls;
  p.strip_digits = strip_digits;
  p.strip_special = strip_special;
  p.tokenizer = altc::parse_tokenizer(tokenizer);
  return p;
}

altc::TrainConfig make_train(double lr, std::size_t epochs, std::size_t batch_size, double l2,
                             std::uint64_t seed) {
  altc::TrainConfig t;
  t.learning_rate = lr;
  t.epochs = epochs;
  t.batch_size = batch_size;
  t.l2_penalty = l2;
  t.seed = seed;
  t.validate();
  return t;
}

altc::LabelSchema make_schema(const std::optional<std::vector<std::string>>& names) {
  return names ? altc::LabelSchema(*names) : altc::LabelSchema();
}

std::vector<altc::LabeledDocument> make_docs(const std::vector<std::string>& texts,
                                             const std::vector<std::size_t>& labels) {
  if (texts.size() != labels.size()) {
    throw altc::Error(altc::ErrorCode::LengthMismatch, "texts and labels differ in length");
  }
  std::vector<altc::LabeledDocument> docs;
  docs.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    docs.push_back({altc::Document{std::to_string(i), texts[i], std::nullopt}, labels[i]});
  }
  return docs;
}

py::dict averaged(const altc::AveragedScores& s) {
  py::dict d;
  d["precision"] = s.precision;
  d["recall"] = s.recall;
  d["f1"] = s.f1;
  return d;
}

py::dict report_dict(const altc::EvaluationReport& r) {
  py::dict d;
  d["accuracy"] = r.accuracy;
  d["macro"] = averaged(r.macro);
  d["micro"] = averaged(r.micro);
  d["weighted"] = averaged(r.weighted);
  py::list per_class;
  for (const auto& s : r.per_class) {
    py::dict c;
    c["precision"] = s.precision;
    c["recall"] = s.recall;
    c["f1"] = s.f1;
    c["support"] = s.support;
    per_class.append(c);
  }
  d["per_class"] = per_class;
  std::vector<std::vector<std::size_t>> matrix(r.confusion.num_classes(),
                                               std::vector<std::size_t>(r.confusion.num_classes()));
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t j = 0; j < matrix.size(); ++j) matrix[i][j] = r.confusion.at(i, j);
  }
  d["confusion"] = matrix;
  d["undefined_classes"] = r.undefined_classes;
  return d;
}

py::dict record_dict(const altc::IterationRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["labeled"] = r.labeled;
  d["macro_f1"] = r.macro_f1;
  d["micro_f1"] = r.micro_f1;
  d["accuracy"] = r.accuracy;
  d["mean_train_loss"] = r.mean_train_loss;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Active-learning text classification core";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::exception<altc::Error>(m, "AltcError", PyExc_ValueError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const altc::Error& e) {
      const std::string msg = std::string(altc::to_string(e.code())) + ": " + e.what();
      py::set_error(error_type.get_stored(), msg.c_str());
    }
  });

  m.def(
      "normalize",
      [](const std::string& text, bool lowercase, bool strip_mentions, bool strip_urls,
         bool strip_digits, bool strip_special) {
        return altc::normalize(text, make_prep(lowercase, strip_mentions, strip_urls, strip_digits,
                                               strip_special, "unicode_words"));
      },
      py::arg("text"), py::kw_only(), py::arg("lowercase") = true,
      py::arg("strip_mentions") = true, py::arg("strip_urls") = true,
      py::arg("strip_digits") = true, py::arg("strip_special") = true);

  m.def(
      "preprocess",
      [](const std::string& text, const std::string& tokenizer) {
        return altc::preprocess(text, make_prep(true, true, true, true, true, tokenizer));
      },
      py::arg("text"), py::arg("tokenizer") = "unicode_words",
      "Normalize with all filters on, then tokenize.");

  m.def(
      "uncertainty",
      [](const std::vector<double>& p, const std::string& mode) {
        return altc::uncertainty(p, altc::parse_entropy_mode(mode));
      },
      py::arg("p"), py::arg("mode") = "categorical_normalized");

  m.def(
      "class_weights",
      [](const std::vector<std::size_t>& counts) {
        altc::ClassDistribution dist{counts, 0};
        for (const auto c : counts) dist.total += c;
        return altc::compute_class_weights(dist).w;
      },
      py::arg("counts"));

  m.def(
      "weighted_bce_loss",
      [](const std::vector<double>& p, const std::vector<double>& y, const std::vector<double>& cw,
         double eps) { return altc::weighted_bce_loss(p, y, altc::ClassWeights{cw}, eps); },
      py::arg("p"), py::arg("y"), py::arg("cw"), py::arg("eps") = 1e-7);

  m.def(
      "evaluate",
      [](const std::vector<std::size_t>& gold, const std::vector<std::size_t>& pred,
         std::size_t num_classes) {
        return report_dict(altc::report(altc::confusion(gold, pred, num_classes)));
      },
      py::arg("gold"), py::arg("pred"), py::arg("num_classes"));

  py::class_<altc::TextClassifier>(m, "TextClassifier")
      .def_static(
          "train",
          [](const std::vector<std::string>& texts, const std::vector<std::size_t>& labels,
             const std::optional<std::vector<std::string>>& schema, double lr, std::size_t epochs,
             std::size_t batch_size, double l2, std::uint64_t seed, std::size_t min_df,
             std::size_t max_vocab) {
            const auto docs = make_docs(texts, labels);
            altc::FeatureConfig features;
            features.min_df = min_df;
            features.max_vocab = max_vocab;
            return altc::train_classifier(docs, make_schema(schema), altc::PrepConfig{}, features,
                                          make_train(lr, epochs, batch_size, l2, seed))
                .classifier;
          },
          py::arg("texts"), py::arg("labels"), py::kw_only(), py::arg("schema") = py::none(),
          py::arg("lr") = 0.1, py::arg("epochs") = 50, py::arg("batch_size") = 64,
          py::arg("l2") = 1e-4, py::arg("seed") = 0, py::arg("min_df") = 1,
          py::arg("max_vocab") = 0)
      .def_static("load", &altc::load_classifier, py::arg("model_path"))
      .def("save", [](const altc::TextClassifier& c, const std::filesystem::path& dir) {
        altc::save_classifier(c, dir);
      }, py::arg("dir"))
      .def("predict_proba", &altc::TextClassifier::predict_proba, py::arg("text"))
      .def("predict", &altc::TextClassifier::predict, py::arg("text"))
      .def("evaluate",
           [](const altc::TextClassifier& c, const std::vector<std::string>& texts,
              const std::vector<std::size_t>& labels) {
             return report_dict(altc::evaluate_classifier(c, make_docs(texts, labels)));
           },
           py::arg("texts"), py::arg("labels"))
      .def_property_readonly("schema", [](const altc::TextClassifier& c) { return c.schema.names(); })
      .def_property_readonly("num_features",
                             [](const altc::TextClassifier& c) { return c.featurizer.dim(); });

  m.def(
      "simulate",
      [](const std::vector<std::string>& texts, const std::vector<std::size_t>& labels,
         const std::optional<std::vector<std::string>>& schema_names, std::size_t seed_size,
         std::size_t batch_size, std::size_t iterations, const std::string& strategy,
         std::uint64_t seed, double eval_fraction, double lr, std::size_t epochs,
         std::size_t train_batch) {
        const auto schema = make_schema(schema_names);
        const auto docs = make_docs(texts, labels);
        auto split = altc::stratified_split(docs, 1.0 - eval_fraction, seed);
        std::vector<std::string> learn_texts;
        for (const auto& d : split.train) learn_texts.push_back(d.doc.text);
        const auto featurizer =
            altc::TextFeaturizer::fit(learn_texts, altc::PrepConfig{}, altc::FeatureConfig{});

        auto sim = altc::make_simulation(split.train, schema.size(), seed_size, seed);
        altc::SimulatedOracle oracle(std::move(sim.gold));
        altc::AcquisitionConfig acq;
        acq.batch_size = batch_size;
        acq.max_iterations = iterations;
        acq.seed_size = seed_size;
        acq.strategy = altc::parse_strategy(strategy);
        acq.seed = seed;

        altc::LoopResult result;
        {
          py::gil_scoped_release release;
          result = altc::run_loop(std::move(sim.state), schema, acq,
                                  make_train(lr, epochs, train_batch, 1e-4, seed), featurizer,
                                  split.held, oracle);
        }
        py::list history;
        for (const auto& r : result.state.history) history.append(record_dict(r));
        return history;
      },
      py::arg("texts"), py::arg("labels"), py::kw_only(), py::arg("schema") = py::none(),
      py::arg("seed_size") = 40, py::arg("batch_size") = 10, py::arg("iterations") = 10,
      py::arg("strategy") = "entropy", py::arg("seed") = 0, py::arg("eval_fraction") = 0.25,
      py::arg("lr") = 1.0, py::arg("epochs") = 30, py::arg("train_batch") = 32,
      "Run a simulated active-learning loop and return its history records.");
}
