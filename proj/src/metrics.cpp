#include "altc/metrics.hpp"

#include <iomanip>
#include <numeric>
#include <sstream>

#include "altc/error.hpp"
#include "json.hpp"

namespace altc {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) {
  if (p == r) return p;
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::string class_name(std::span<const std::string> names, std::size_t k) {
  return k < names.size() ? names[k] : std::to_string(k);
}

nlohmann::ordered_json averaged_json(const AveragedScores& s) {
  nlohmann::ordered_json obj;
  obj["precision"] = s.precision;
  obj["recall"] = s.recall;
  obj["f1"] = s.f1;
  return obj;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (const char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  return q + '"';
}

// Doubles in CSV use the shortest round-trip form nlohmann produces.
std::string number(double v) { return nlohmann::json(v).dump(); }

}  // namespace

std::size_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(cells_.begin(), cells_.end(), std::size_t{0});
}

ConfusionMatrix confusion(std::span<const std::size_t> gold, std::span<const std::size_t> pred,
                          std::size_t num_classes) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorCode::LengthMismatch, "gold and predicted label lists differ in length");
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= num_classes || pred[i] >= num_classes) {
      throw Error(ErrorCode::LabelOutOfRange, "label out of range at position " + std::to_string(i),
                  std::to_string(i));
    }
    ++cm.at(gold[i], pred[i]);
  }
  return cm;
}

EvaluationReport report(const ConfusionMatrix& cm) {
  const std::size_t K = cm.num_classes();
  const std::size_t total = cm.total();
  if (total == 0) throw Error(ErrorCode::EmptyMatrix, "cannot score an empty confusion matrix");

  EvaluationReport r;
  r.confusion = cm;
  r.per_class.resize(K);
  std::size_t trace = 0;
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t j = 0; j < K; ++j) {
      predicted += cm.at(j, k);
      actual += cm.at(k, j);
    }
    const std::size_t tp = cm.at(k, k);
    trace += tp;
    auto& s = r.per_class[k];
    s.precision = ratio(tp, predicted);
    s.recall = ratio(tp, actual);
    s.f1 = harmonic(s.precision, s.recall);
    s.support = actual;
    if (predicted == 0 || actual == 0) ++r.undefined_classes;

    r.macro.precision += s.precision;
    r.macro.recall += s.recall;
    r.macro.f1 += s.f1;
    const double weight = static_cast<double>(actual);
    r.weighted.precision += weight * s.precision;
    r.weighted.recall += weight * s.recall;
    r.weighted.f1 += weight * s.f1;
  }
  const auto Kd = static_cast<double>(K);
  const auto Nd = static_cast<double>(total);
  r.macro = {r.macro.precision / Kd, r.macro.recall / Kd, r.macro.f1 / Kd};
  r.weighted = {r.weighted.precision / Nd, r.weighted.recall / Nd, r.weighted.f1 / Nd};
  // Every sample is one prediction: pooled tp+fp and tp+fn both equal total.
  r.accuracy = ratio(trace, total);
  r.micro = {r.accuracy, r.accuracy, r.accuracy};
  return r;
}

std::string report_json(const EvaluationReport& r, std::span<const std::string> class_names) {
  nlohmann::ordered_json obj;
  obj["version"] = 1;
  obj["accuracy"] = r.accuracy;
  obj["macro"] = averaged_json(r.macro);
  obj["micro"] = averaged_json(r.micro);
  obj["weighted"] = averaged_json(r.weighted);
  auto per_class = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < r.per_class.size(); ++k) {
    nlohmann::ordered_json row;
    row["class"] = class_name(class_names, k);
    row["precision"] = r.per_class[k].precision;
    row["recall"] = r.per_class[k].recall;
    row["f1"] = r.per_class[k].f1;
    row["support"] = r.per_class[k].support;
    per_class.push_back(std::move(row));
  }
  obj["per_class"] = std::move(per_class);
  auto matrix = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.confusion.num_classes(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < r.confusion.num_classes(); ++j) row.push_back(r.confusion.at(i, j));
    matrix.push_back(std::move(row));
  }
  obj["confusion"] = std::move(matrix);
  obj["undefined_classes"] = r.undefined_classes;
  return obj.dump(2);
}

std::string report_table(const EvaluationReport& r, std::span<const std::string> class_names) {
  std::size_t width = 12;
  for (std::size_t k = 0; k < r.per_class.size(); ++k) {
    width = std::max(width, class_name(class_names, k).size());
  }
  const int w = static_cast<int>(width);
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::setw(w) << "" << "  " << std::setw(9) << "precision" << "  " << std::setw(9)
      << "recall" << "  " << std::setw(9) << "f1-score" << "  " << std::setw(9) << "support"
      << "\n\n";
  for (std::size_t k = 0; k < r.per_class.size(); ++k) {
    const auto& s = r.per_class[k];
    out << std::setw(w) << class_name(class_names, k) << "  " << std::setw(9) << s.precision << "  "
        << std::setw(9) << s.recall << "  " << std::setw(9) << s.f1 << "  " << std::setw(9)
        << s.support << '\n';
  }
  const std::size_t total = r.confusion.total();
  out << '\n'
      << std::setw(w) << "accuracy" << "  " << std::setw(9) << "" << "  " << std::setw(9) << ""
      << "  " << std::setw(9) << r.accuracy << "  " << std::setw(9) << total << '\n';
  const auto avg_row = [&](const char* name, const AveragedScores& s) {
    out << std::setw(w) << name << "  " << std::setw(9) << s.precision << "  " << std::setw(9)
        << s.recall << "  " << std::setw(9) << s.f1 << "  " << std::setw(9) << total << '\n';
  };
  avg_row("macro avg", r.macro);
  avg_row("micro avg", r.micro);
  avg_row("weighted avg", r.weighted);
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm, std::span<const std::string> class_names) {
  std::ostringstream out;
  out << "gold\\pred";
  for (std::size_t j = 0; j < cm.num_classes(); ++j) out << ',' << csv_quote(class_name(class_names, j));
  out << '\n';
  for (std::size_t i = 0; i < cm.num_classes(); ++i) {
    out << csv_quote(class_name(class_names, i));
    for (std::size_t j = 0; j < cm.num_classes(); ++j) out << ',' << cm.at(i, j);
    out << '\n';
  }
  return out.str();
}

std::vector<ComparisonRow> compare_runs(
    std::span<const std::pair<std::string, EvaluationReport>> reports) {
  std::vector<ComparisonRow> rows;
  rows.reserve(reports.size());
  for (const auto& [name, r] : reports) {
    rows.push_back({name, r.weighted.precision, r.weighted.recall, r.weighted.f1, r.accuracy,
                    r.macro.f1, r.micro.f1});
  }
  return rows;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
  std::ostringstream out;
  out << "run,precision,recall,f1,accuracy,macro_f1,micro_f1\n";
  for (const auto& row : rows) {
    out << csv_quote(row.run) << ',' << number(row.precision) << ',' << number(row.recall) << ','
        << number(row.f1) << ',' << number(row.accuracy) << ',' << number(row.macro_f1) << ','
        << number(row.micro_f1) << '\n';
  }
  return out.str();
}

}  // namespace altc
