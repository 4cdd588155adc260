// altc: command-line front end for the active-learning text classifier.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "altc/active_learning.hpp"
#include "altc/classifier.hpp"
#include "altc/corpus.hpp"
#include "altc/error.hpp"
#include "altc/metrics.hpp"
#include "altc/service.hpp"
#include "altc/synthetic.hpp"
#include "httplib.h"
#include "json.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Relative artifact paths live under ALTC_DATA_DIR when it is set.
fs::path artifact_path(const std::string& p) {
  fs::path path(p);
  if (path.is_absolute()) return path;
  if (const char* root = std::getenv("ALTC_DATA_DIR"); root != nullptr && *root != '\0') {
    return fs::path(root) / path;
  }
  return path;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw altc::Error(altc::ErrorCode::IoError, "cannot write " + path.string(), path.string());
  out << content;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw altc::Error(altc::ErrorCode::IoError, "cannot open " + path.string(), path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct DataOptions {
  std::string format;
  std::string schema;

  altc::DatasetFormat format_for(const fs::path& path) const {
    return format.empty() ? altc::format_from_extension(path) : altc::parse_format(format);
  }
  altc::LabelSchema label_schema() const {
    return schema.empty() ? altc::LabelSchema() : altc::parse_schema(schema);
  }
};

struct ModelOptions {
  double lr = altc::TrainConfig{}.learning_rate;
  std::size_t epochs = altc::TrainConfig{}.epochs;
  std::size_t train_batch = altc::TrainConfig{}.batch_size;
  double l2 = altc::TrainConfig{}.l2_penalty;
  std::size_t patience = altc::TrainConfig{}.early_stop_patience;
  std::size_t min_df = 1;
  std::size_t max_vocab = 0;
  bool sublinear = false;
  bool bigrams = false;
  std::string tokenizer = "unicode_words";
  bool keep_case = false;

  altc::TrainConfig train(std::uint64_t seed) const {
    altc::TrainConfig t;
    t.learning_rate = lr;
    t.epochs = epochs;
    t.batch_size = train_batch;
    t.l2_penalty = l2;
    t.early_stop_patience = patience;
    t.seed = seed;
    t.validate();
    return t;
  }
  altc::FeatureConfig features() const { return {min_df, max_vocab, sublinear, bigrams}; }
  altc::PrepConfig prep() const {
    altc::PrepConfig p;
    p.lowercase = !keep_case;
    p.tokenizer = altc::parse_tokenizer(tokenizer);
    return p;
  }
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--format", o.format, "csv, tsv or jsonl (default: by file extension)");
  cmd->add_option("--schema", o.schema, "comma-separated class names in index order");
}

void add_model_options(CLI::App* cmd, ModelOptions& o) {
  cmd->add_option("--lr", o.lr, "learning rate");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--train-batch", o.train_batch, "mini-batch size for gradient descent");
  cmd->add_option("--l2", o.l2, "L2 penalty");
  cmd->add_option("--patience", o.patience, "early-stopping patience on validation loss");
  cmd->add_option("--min-df", o.min_df, "minimum document frequency");
  cmd->add_option("--max-vocab", o.max_vocab, "vocabulary cap, 0 for none");
  cmd->add_flag("--sublinear-tf", o.sublinear, "use 1 + ln(tf)");
  cmd->add_flag("--bigrams", o.bigrams, "add word bigrams");
  cmd->add_option("--tokenizer", o.tokenizer, "unicode_words or whitespace");
  cmd->add_flag("--keep-case", o.keep_case, "skip case folding");
}

altc::Ingested<altc::LabeledDocument> load(const std::string& path, const DataOptions& o,
                                           const altc::LabelSchema& schema) {
  auto data = altc::ingest(path, o.format_for(path), schema);
  if (data.empty_texts > 0) {
    std::cerr << "warning: " << data.empty_texts << " documents have empty text\n";
  }
  return data;
}

int cmd_ingest(const std::string& input, const std::string& out_dir, const DataOptions& o,
               bool write) {
  const auto schema = o.label_schema();
  const auto data = load(input, o, schema);
  const auto dist = altc::distribution(data.records, schema);
  if (write) {
    const auto dir = artifact_path(out_dir);
    fs::create_directories(dir);
    altc::export_corpus(dir / "corpus.jsonl", altc::DatasetFormat::Jsonl, data.records, schema);
    write_text(dir / "distribution.json", altc::distribution_json(dist, schema) + "\n");
  }
  std::cout << altc::distribution_table(dist, schema);
  return 0;
}

int cmd_train(const std::string& input, const std::string& validation, const std::string& out_dir,
              const DataOptions& o, const ModelOptions& m, std::uint64_t seed) {
  const auto schema = o.label_schema();
  const auto data = load(input, o, schema);
  std::vector<altc::LabeledDocument> held;
  if (!validation.empty()) held = load(validation, o, schema).records;

  const auto trained = altc::train_classifier(data.records, schema, m.prep(), m.features(),
                                              m.train(seed), held);
  const auto dir = artifact_path(out_dir);
  altc::save_classifier(trained.classifier, dir);

  ojson history;
  history["loss"] = trained.fit.loss_history;
  history["validation_loss"] = trained.fit.validation_history;
  history["best_epoch"] = trained.fit.best_epoch;
  write_text(dir / "loss_history.json", history.dump() + "\n");

  ojson meta;
  meta["created_at"] = utc_timestamp();
  meta["corpus"] = input;
  meta["documents"] = data.records.size();
  write_text(dir / "train_meta.json", meta.dump(2) + "\n");

  const auto r = altc::evaluate_classifier(trained.classifier, data.records);
  std::cout << "trained " << schema.size() << " heads over " << trained.classifier.featurizer.dim()
            << " features on " << data.records.size() << " documents; train accuracy "
            << r.accuracy << "\n";
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& input, const std::string& out_dir,
             const DataOptions& o) {
  const auto clf = altc::load_classifier(artifact_path(model_path));
  if (!o.schema.empty() && !(o.label_schema() == clf.schema)) {
    throw altc::Error(altc::ErrorCode::SchemaMismatch,
                      "--schema differs from the schema stored in the model", o.schema);
  }
  const auto data = load(input, o, clf.schema);
  const auto r = altc::evaluate_classifier(clf, data.records);
  const auto dir = artifact_path(out_dir);
  write_text(dir / "report.json", altc::report_json(r, clf.schema.names()) + "\n");
  write_text(dir / "confusion.csv", altc::confusion_csv(r.confusion, clf.schema.names()));
  std::cout << altc::report_table(r, clf.schema.names());
  return 0;
}

struct SimOptions {
  std::string eval_path;
  double eval_fraction = 0.25;
  std::uint64_t split_seed = 0;
  std::size_t seed_size = 40;
  std::size_t batch_size = 10;
  std::size_t iterations = 0;
  std::string strategy = "both";
  std::string entropy_mode = "categorical_normalized";
  std::vector<std::uint64_t> seeds{0};
  double target = 0.80;
  bool warm_start = false;
};

std::string csv_number(double v) { return nlohmann::json(v).dump(); }

int cmd_al_sim(const std::string& input, const std::string& out_dir, const DataOptions& o,
               const ModelOptions& m, const SimOptions& s) {
  const auto schema = o.label_schema();
  auto data = load(input, o, schema);

  std::vector<altc::LabeledDocument> learn;
  std::vector<altc::LabeledDocument> eval;
  if (!s.eval_path.empty()) {
    learn = std::move(data.records);
    eval = load(s.eval_path, o, schema).records;
  } else if (s.eval_fraction > 0.0) {
    auto split = altc::stratified_split(data.records, 1.0 - s.eval_fraction, s.split_seed);
    learn = std::move(split.train);
    eval = std::move(split.held);
  } else {
    learn = std::move(data.records);
  }

  std::vector<std::string> texts;
  texts.reserve(learn.size());
  for (const auto& d : learn) texts.push_back(d.doc.text);
  const auto featurizer = altc::TextFeaturizer::fit(texts, m.prep(), m.features());

  std::vector<altc::Strategy> strategies;
  if (s.strategy == "both") {
    strategies = {altc::Strategy::Entropy, altc::Strategy::Random};
  } else {
    strategies = {altc::parse_strategy(s.strategy)};
  }

  const auto dir = artifact_path(out_dir);
  fs::create_directories(dir);
  std::ostringstream comparison;
  comparison << "strategy,seed,iterations,final_labeled,final_macro_f1,final_accuracy,"
                "labels_to_target\n";
  // strategy -> t -> (labeled, sum of macro-F1, runs)
  std::map<std::string, std::map<std::size_t, std::tuple<std::size_t, double, std::size_t>>> curves;
  ojson summary;
  summary["target_macro_f1"] = s.target;

  for (const auto strategy : strategies) {
    const std::string name(altc::to_string(strategy));
    std::vector<double> budgets;
    double final_sum = 0.0;
    for (const auto seed : s.seeds) {
      auto sim = altc::make_simulation(learn, schema.size(), s.seed_size, seed);
      altc::SimulatedOracle oracle(std::move(sim.gold));
      altc::AcquisitionConfig acq;
      acq.batch_size = s.batch_size;
      acq.max_iterations = s.iterations;
      acq.seed_size = s.seed_size;
      acq.strategy = strategy;
      acq.entropy_mode = altc::parse_entropy_mode(s.entropy_mode);
      acq.seed = seed;
      acq.warm_start = s.warm_start;
      const auto result = altc::run_loop(std::move(sim.state), schema, acq, m.train(seed),
                                         featurizer, eval, oracle);
      const auto& history = result.state.history;
      write_text(dir / ("history_" + name + "_seed" + std::to_string(seed) + ".jsonl"),
                 altc::history_jsonl(history));

      const auto& last = history.back();
      const auto reach = altc::labels_to_reach(history, s.target);
      comparison << name << ',' << seed << ',' << last.t << ',' << last.labeled << ','
                 << (last.macro_f1 ? csv_number(*last.macro_f1) : "") << ','
                 << (last.accuracy ? csv_number(*last.accuracy) : "") << ','
                 << (reach ? std::to_string(*reach) : "") << '\n';
      budgets.push_back(reach ? static_cast<double>(*reach)
                              : std::numeric_limits<double>::infinity());
      final_sum += last.macro_f1.value_or(0.0);
      for (const auto& r : history) {
        auto& [labeled, sum, runs] = curves[name][r.t];
        labeled = r.labeled;
        sum += r.macro_f1.value_or(0.0);
        ++runs;
      }
    }
    std::sort(budgets.begin(), budgets.end());
    const std::size_t n = budgets.size();
    const double median = n % 2 == 1 ? budgets[n / 2] : 0.5 * (budgets[n / 2 - 1] + budgets[n / 2]);
    ojson entry;
    entry["runs"] = n;
    entry["median_labels_to_target"] = std::isfinite(median) ? ojson(median) : ojson(nullptr);
    entry["mean_final_macro_f1"] = final_sum / static_cast<double>(n);
    summary[name] = std::move(entry);
  }

  std::ostringstream curve_csv;
  curve_csv << "strategy,t,labeled,mean_macro_f1\n";
  for (const auto& [name, points] : curves) {
    for (const auto& [t, point] : points) {
      const auto& [labeled, sum, runs] = point;
      curve_csv << name << ',' << t << ',' << labeled << ','
                << csv_number(sum / static_cast<double>(runs)) << '\n';
    }
  }
  write_text(dir / "comparison.csv", comparison.str());
  write_text(dir / "curves.csv", curve_csv.str());
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

struct ServeOptions {
  std::string eval_path;
  std::string session = "default";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  std::size_t batch_size = 10;
  std::size_t iterations = 0;
  std::string strategy = "entropy";
  std::string entropy_mode = "categorical_normalized";
};

int cmd_serve(const std::string& input, const DataOptions& o, const ModelOptions& m,
              const ServeOptions& s, std::uint64_t seed) {
  const auto schema = o.label_schema();
  const auto pool_data = altc::ingest_pool(input, o.format_for(input), schema);
  std::vector<altc::LabeledDocument> labeled;
  std::vector<altc::Document> pool;
  for (const auto& r : pool_data.records) {
    if (r.label) {
      labeled.push_back({r.doc, *r.label});
    } else {
      pool.push_back(r.doc);
    }
  }
  std::vector<altc::LabeledDocument> eval;
  if (!s.eval_path.empty()) eval = load(s.eval_path, o, schema).records;

  altc::SessionConfig cfg;
  cfg.id = s.session;
  cfg.dir = artifact_path("sessions") / s.session;
  cfg.acq.batch_size = s.batch_size;
  cfg.acq.max_iterations = s.iterations;
  cfg.acq.seed_size = labeled.size();
  cfg.acq.strategy = altc::parse_strategy(s.strategy);
  cfg.acq.entropy_mode = altc::parse_entropy_mode(s.entropy_mode);
  cfg.acq.seed = seed;
  cfg.train = m.train(seed);
  cfg.prep = m.prep();
  cfg.features = m.features();

  altc::AnnotationSession session(schema, std::move(labeled), std::move(pool), std::move(eval), cfg);
  httplib::Server server;
  altc::mount_routes(server, session, s.static_dir);
  if (!server.bind_to_port(s.host, s.port)) {
    throw altc::Error(altc::ErrorCode::IoError, "cannot bind " + s.host + ":" + std::to_string(s.port));
  }
  if (session.replayed_labels() > 0) {
    std::cerr << "replaying " << session.replayed_labels() << " journaled labels\n";
  }
  session.start();
  std::cout << "serving session '" << s.session << "' on http://" << s.host << ':' << s.port
            << std::endl;
  server.listen_after_bind();
  return 0;
}

int cmd_synth(const std::string& out, const std::string& kind, std::size_t docs,
              const std::vector<double>& ratio, double separation, std::uint64_t seed,
              const DataOptions& o) {
  const auto schema = o.label_schema();
  if (ratio.size() != schema.size()) {
    throw altc::Error(altc::ErrorCode::InvalidArgument,
                      "--ratio needs one entry per schema class");
  }
  const auto counts = altc::proportional_counts(ratio, docs);
  std::vector<altc::LabeledDocument> corpus;
  if (kind == "separable") {
    altc::SeparableConfig cfg;
    cfg.class_counts = counts;
    cfg.seed = seed;
    corpus = altc::separable_corpus(cfg);
  } else if (kind == "gaussian") {
    altc::GaussianBagConfig cfg;
    cfg.class_counts = counts;
    cfg.class_separation = separation;
    cfg.seed = seed;
    corpus = altc::gaussian_bag_corpus(cfg);
  } else {
    throw altc::Error(altc::ErrorCode::InvalidArgument, "unknown corpus kind '" + kind + "'", kind);
  }
  const auto path = artifact_path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  altc::export_corpus(path, o.format_for(path), corpus, schema);
  std::cout << altc::distribution_table(altc::distribution(corpus, schema), schema);
  return 0;
}

altc::EvaluationReport report_from_json(const fs::path& path) {
  const auto j = nlohmann::json::parse(read_text(path));
  altc::EvaluationReport r;
  const auto avg = [](const nlohmann::json& o) {
    return altc::AveragedScores{o.at("precision").get<double>(), o.at("recall").get<double>(),
                                o.at("f1").get<double>()};
  };
  r.accuracy = j.at("accuracy").get<double>();
  r.macro = avg(j.at("macro"));
  r.micro = avg(j.at("micro"));
  r.weighted = avg(j.at("weighted"));
  return r;
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<std::pair<std::string, altc::EvaluationReport>> runs;
  for (const auto& in : inputs) {
    std::string name;
    fs::path path;
    if (const auto eq = in.find('='); eq != std::string::npos) {
      name = in.substr(0, eq);
      path = in.substr(eq + 1);
    } else {
      path = in;
      name = path.filename() == "report.json" && path.has_parent_path()
                 ? path.parent_path().filename().string()
                 : path.stem().string();
    }
    runs.emplace_back(name, report_from_json(artifact_path(path.string())));
  }
  const auto csv = altc::comparison_csv(altc::compare_runs(runs));
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_text(artifact_path(out), csv);
  }
  return 0;
}

bool is_ingest_error(altc::ErrorCode code) {
  switch (code) {
    case altc::ErrorCode::UnknownLabel:
    case altc::ErrorCode::DuplicateId:
    case altc::ErrorCode::MalformedRecord:
    case altc::ErrorCode::MissingColumn:
      return true;
    default:
      return false;
  }
}

void print_error(std::string_view code, const std::string& message, const std::string& subject) {
  ojson err;
  err["error"] = std::string(code);
  err["message"] = message;
  err["subject"] = subject;
  std::cerr << err.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active-learning text classification toolkit"};
  app.require_subcommand(1);

  DataOptions data;
  ModelOptions model;
  std::uint64_t seed = 0;
  std::string input;
  std::string out_dir = "out";

  auto* ingest = app.add_subcommand("ingest", "Validate a dataset, write it as JSONL with its class distribution");
  ingest->add_option("input", input, "dataset file")->required();
  ingest->add_option("--out", out_dir, "output directory");
  add_data_options(ingest, data);

  auto* stats = app.add_subcommand("stats", "Print the class distribution of a dataset");
  stats->add_option("input", input, "dataset file")->required();
  add_data_options(stats, data);

  std::string validation;
  auto* train = app.add_subcommand("train", "Train a classifier and write model artifacts");
  train->add_option("input", input, "labeled training set")->required();
  train->add_option("--validation", validation, "held-out set for early stopping");
  train->add_option("--out", out_dir, "artifact directory");
  train->add_option("--seed", seed, "shuffle seed");
  add_data_options(train, data);
  add_model_options(train, model);

  std::string model_path;
  auto* eval = app.add_subcommand("eval", "Score a model on a labeled set");
  eval->add_option("--model", model_path, "model.json written by train")->required();
  eval->add_option("input", input, "labeled evaluation set")->required();
  eval->add_option("--out", out_dir, "report directory");
  add_data_options(eval, data);

  SimOptions sim;
  std::string seed_list;
  auto* al_sim = app.add_subcommand("al-sim", "Simulate active learning with a gold-label oracle");
  al_sim->add_option("input", input, "labeled corpus; labels are revealed only when queried")
      ->required();
  al_sim->add_option("--out", out_dir, "output directory");
  al_sim->add_option("--eval", sim.eval_path, "evaluation set (default: held-out split)");
  al_sim->add_option("--eval-fraction", sim.eval_fraction, "held-out fraction when --eval is absent");
  al_sim->add_option("--split-seed", sim.split_seed, "seed for the held-out split");
  al_sim->add_option("--seed-size", sim.seed_size, "initial labeled set size");
  al_sim->add_option("--batch-size", sim.batch_size, "documents labeled per round");
  al_sim->add_option("--iterations", sim.iterations, "acquisition rounds, 0 until the pool is empty");
  al_sim->add_option("--strategy", sim.strategy, "entropy, random or both");
  al_sim->add_option("--entropy-mode", sim.entropy_mode, "categorical_normalized or binary_sum");
  al_sim->add_option("--seed", seed_list, "comma-separated run seeds");
  al_sim->add_option("--target", sim.target, "macro-F1 target for the label budget column");
  al_sim->add_flag("--warm-start", sim.warm_start, "continue from the previous model each round");
  add_data_options(al_sim, data);
  add_model_options(al_sim, model);

  ServeOptions serve_opts;
  auto* serve = app.add_subcommand("serve", "Run the annotation service for a human oracle");
  serve->add_option("input", input, "pool file; labeled rows seed the session")->required();
  serve->add_option("--eval", serve_opts.eval_path, "labeled evaluation set");
  serve->add_option("--session", serve_opts.session, "session name");
  serve->add_option("--host", serve_opts.host, "bind address");
  serve->add_option("--port", serve_opts.port, "listen port");
  serve->add_option("--static", serve_opts.static_dir, "directory served at /");
  serve->add_option("--batch-size", serve_opts.batch_size, "documents per batch");
  serve->add_option("--iterations", serve_opts.iterations, "rounds, 0 until the pool is empty");
  serve->add_option("--strategy", serve_opts.strategy, "entropy or random");
  serve->add_option("--entropy-mode", serve_opts.entropy_mode, "categorical_normalized or binary_sum");
  serve->add_option("--seed", seed, "selection and training seed");
  add_data_options(serve, data);
  add_model_options(serve, model);

  std::string synth_out;
  std::string kind = "gaussian";
  std::size_t docs = 4000;
  std::vector<double> ratio{2245, 1284, 540, 472};
  double separation = 1.4;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  synth->add_option("output", synth_out, "output file")->required();
  synth->add_option("--kind", kind, "gaussian or separable");
  synth->add_option("--docs", docs, "number of documents");
  synth->add_option("--ratio", ratio, "class proportions")->delimiter(',');
  synth->add_option("--separation", separation, "class mean spread (gaussian)");
  synth->add_option("--seed", seed, "generator seed");
  add_data_options(synth, data);

  std::vector<std::string> reports;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "Tabulate several evaluation reports as CSV");
  compare->add_option("reports", reports, "report.json files, optionally NAME=PATH")->required();
  compare->add_option("--out", compare_out, "CSV file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(input, out_dir, data, true);
    if (*stats) return cmd_ingest(input, out_dir, data, false);
    if (*train) return cmd_train(input, validation, out_dir, data, model, seed);
    if (*eval) return cmd_eval(model_path, input, out_dir, data);
    if (*al_sim) {
      if (!seed_list.empty()) {
        sim.seeds.clear();
        std::stringstream ss(seed_list);
        for (std::string part; std::getline(ss, part, ',');) sim.seeds.push_back(std::stoull(part));
      }
      return cmd_al_sim(input, out_dir, data, model, sim);
    }
    if (*serve) return cmd_serve(input, data, model, serve_opts, seed);
    if (*synth) return cmd_synth(synth_out, kind, docs, ratio, separation, seed, data);
    if (*compare) return cmd_compare(reports, compare_out);
  } catch (const altc::Error& e) {
    print_error(altc::to_string(e.code()), e.what(), e.subject());
    return is_ingest_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    print_error("InternalError", e.what(), "");
    return 1;
  }
  return 0;
}
