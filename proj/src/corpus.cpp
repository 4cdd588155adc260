#include "altc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "altc/error.hpp"
#include "altc/random.hpp"
#include "delimited.hpp"
#include "json.hpp"

namespace altc {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

struct RawRecord {
  std::size_t line = 0;
  std::string id;
  std::string text;
  std::string label;
  std::optional<std::string> language;
};

std::string line_subject(std::size_t line) { return std::to_string(line); }

std::vector<RawRecord> read_delimited(std::istream& in, char delimiter) {
  detail::DelimitedReader reader(in, delimiter);
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!reader.next(fields, line)) {
    throw Error(ErrorCode::MissingColumn, "missing header row; expected columns id, text, label",
                "id");
  }

  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < fields.size(); ++i) column.emplace(std::string(trim(fields[i])), i);
  const auto require = [&](const char* name) {
    const auto it = column.find(name);
    if (it == column.end()) {
      throw Error(ErrorCode::MissingColumn, std::string("missing column '") + name + "'", name);
    }
    return it->second;
  };
  const std::size_t id_col = require("id");
  const std::size_t text_col = require("text");
  const std::size_t label_col = require("label");
  const auto lang_it = column.find("language");
  const std::size_t width = fields.size();

  std::vector<RawRecord> out;
  while (reader.next(fields, line)) {
    if (fields.size() != width) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line) + ": expected " + std::to_string(width) +
                      " fields, found " + std::to_string(fields.size()),
                  line_subject(line));
    }
    RawRecord rec;
    rec.line = line;
    rec.id = std::move(fields[id_col]);
    rec.text = std::move(fields[text_col]);
    rec.label = std::move(fields[label_col]);
    if (lang_it != column.end() && !fields[lang_it->second].empty()) {
      rec.language = std::move(fields[lang_it->second]);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RawRecord> read_jsonl(std::istream& in) {
  std::vector<RawRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (line == 1 && text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
    if (trim(text).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": invalid JSON",
                  line_subject(line));
    }
    if (!obj.is_object()) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line) + ": expected a JSON object", line_subject(line));
    }
    RawRecord rec;
    rec.line = line;
    for (const char* key : {"id", "text", "label"}) {
      if (!obj.contains(key)) {
        throw Error(ErrorCode::MissingColumn,
                    "line " + std::to_string(line) + ": missing key '" + key + "'", key);
      }
    }
    const auto as_string = [&](const nlohmann::json& v, bool allow_null) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (allow_null && v.is_null()) return {};
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line) + ": expected a string value", line_subject(line));
    };
    rec.id = as_string(obj["id"], false);
    rec.text = as_string(obj["text"], false);
    rec.label = as_string(obj["label"], true);
    if (obj.contains("language") && obj["language"].is_string() &&
        !obj["language"].get_ref<const std::string&>().empty()) {
      rec.language = obj["language"].get<std::string>();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RawRecord> read_records(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string(), path.string());
  switch (format) {
    case DatasetFormat::Csv:
      return read_delimited(in, ',');
    case DatasetFormat::Tsv:
      return read_delimited(in, '\t');
    case DatasetFormat::Jsonl:
      return read_jsonl(in);
  }
  return {};
}

template <typename Record, typename MakeRecord>
Ingested<Record> ingest_with(const std::filesystem::path& path, DatasetFormat format,
                             MakeRecord make) {
  Ingested<Record> result;
  std::unordered_set<std::string> seen;
  for (auto& raw : read_records(path, format)) {
    if (raw.id.empty()) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(raw.line) + ": empty id",
                  line_subject(raw.line));
    }
    if (!seen.insert(raw.id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate id '" + raw.id + "'", raw.id);
    }
    if (raw.text.empty()) ++result.empty_texts;
    result.records.push_back(make(raw));
  }
  return result;
}

std::size_t require_label(const LabelSchema& schema, const RawRecord& raw) {
  const auto index = schema.index_of(raw.label);
  if (!index) {
    throw Error(ErrorCode::UnknownLabel,
                "record '" + raw.id + "': unknown label '" + raw.label + "'", raw.id);
  }
  return *index;
}

char delimiter_for(DatasetFormat format) { return format == DatasetFormat::Tsv ? '\t' : ','; }

bool any_language(std::span<const Document> docs) {
  return std::ranges::any_of(docs, [](const Document& d) { return d.language.has_value(); });
}

void write_records(const std::filesystem::path& path, DatasetFormat format,
                   std::span<const Document> docs,
                   const std::vector<std::optional<std::string>>& labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string(), path.string());
  const bool with_language = any_language(docs);
  if (format == DatasetFormat::Jsonl) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      nlohmann::ordered_json obj;
      obj["id"] = docs[i].id;
      obj["text"] = docs[i].text;
      obj["label"] = labels[i] ? nlohmann::ordered_json(*labels[i]) : nlohmann::ordered_json();
      if (docs[i].language) obj["language"] = *docs[i].language;
      out << obj.dump() << '\n';
    }
    return;
  }
  const char delim = delimiter_for(format);
  out << "id" << delim << "text" << delim << "label";
  if (with_language) out << delim << "language";
  out << '\n';
  for (std::size_t i = 0; i < docs.size(); ++i) {
    out << detail::quote_field(docs[i].id, delim) << delim
        << detail::quote_field(docs[i].text, delim) << delim
        << detail::quote_field(labels[i].value_or(""), delim);
    if (with_language) out << delim << detail::quote_field(docs[i].language.value_or(""), delim);
    out << '\n';
  }
}

}  // namespace

LabelSchema::LabelSchema()
    : names_{"Not Hope", "Generalized Hope", "Realistic Hope", "Unrealistic Hope"} {}

LabelSchema::LabelSchema(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "a label schema needs at least two classes");
  }
  std::unordered_set<std::string> seen;
  for (auto& name : names_) {
    name = std::string(trim(name));
    if (name.empty()) throw Error(ErrorCode::InvalidArgument, "empty class name in schema");
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate class name '" + name + "'", name);
    }
  }
}

std::optional<std::size_t> LabelSchema::index_of(std::string_view label) const {
  const auto needle = trim(label);
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == needle) return i;
  }
  return std::nullopt;
}

LabelSchema parse_schema(std::string_view comma_separated) {
  std::vector<std::string> names;
  std::size_t start = 0;
  while (true) {
    const auto comma = comma_separated.find(',', start);
    names.emplace_back(comma_separated.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return LabelSchema(std::move(names));
}

DatasetFormat parse_format(std::string_view name) {
  if (name == "csv") return DatasetFormat::Csv;
  if (name == "tsv") return DatasetFormat::Tsv;
  if (name == "jsonl") return DatasetFormat::Jsonl;
  throw Error(ErrorCode::InvalidArgument, "unknown dataset format '" + std::string(name) + "'");
}

std::string_view to_string(DatasetFormat format) noexcept {
  switch (format) {
    case DatasetFormat::Csv:
      return "csv";
    case DatasetFormat::Tsv:
      return "tsv";
    case DatasetFormat::Jsonl:
      return "jsonl";
  }
  return "csv";
}

DatasetFormat format_from_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".tsv") return DatasetFormat::Tsv;
  if (ext == ".jsonl") return DatasetFormat::Jsonl;
  return DatasetFormat::Csv;
}

Ingested<LabeledDocument> ingest(const std::filesystem::path& path, DatasetFormat format,
                                 const LabelSchema& schema) {
  return ingest_with<LabeledDocument>(path, format, [&](RawRecord& raw) {
    const std::size_t label = require_label(schema, raw);
    return LabeledDocument{Document{std::move(raw.id), std::move(raw.text), std::move(raw.language)},
                           label};
  });
}

Ingested<PoolDocument> ingest_pool(const std::filesystem::path& path, DatasetFormat format,
                                   const LabelSchema& schema) {
  return ingest_with<PoolDocument>(path, format, [&](RawRecord& raw) {
    std::optional<std::size_t> label;
    if (!trim(raw.label).empty()) label = require_label(schema, raw);
    return PoolDocument{Document{std::move(raw.id), std::move(raw.text), std::move(raw.language)},
                        label};
  });
}

void export_corpus(const std::filesystem::path& path, DatasetFormat format,
                   std::span<const LabeledDocument> docs, const LabelSchema& schema) {
  std::vector<Document> plain;
  std::vector<std::optional<std::string>> labels;
  plain.reserve(docs.size());
  labels.reserve(docs.size());
  for (const auto& d : docs) {
    plain.push_back(d.doc);
    labels.emplace_back(schema.name(d.label));
  }
  write_records(path, format, plain, labels);
}

void export_pool(const std::filesystem::path& path, DatasetFormat format,
                 std::span<const Document> docs) {
  write_records(path, format, docs, std::vector<std::optional<std::string>>(docs.size()));
}

ClassDistribution distribution(std::span<const LabeledDocument> docs, const LabelSchema& schema) {
  ClassDistribution dist;
  dist.counts.assign(schema.size(), 0);
  for (const auto& d : docs) ++dist.counts.at(d.label);
  dist.total = docs.size();
  return dist;
}

std::string distribution_json(const ClassDistribution& dist, const LabelSchema& schema) {
  nlohmann::ordered_json obj;
  obj["schema"] = schema.names();
  obj["counts"] = dist.counts;
  obj["total"] = dist.total;
  return obj.dump();
}

std::string distribution_table(const ClassDistribution& dist, const LabelSchema& schema) {
  std::size_t width = 5;
  for (const auto& n : schema.names()) width = std::max(width, n.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "class" << "  " << std::right
      << std::setw(8) << "count" << "  " << std::setw(7) << "share" << '\n';
  for (std::size_t k = 0; k < schema.size(); ++k) {
    const double share =
        dist.total == 0 ? 0.0 : static_cast<double>(dist.counts[k]) / static_cast<double>(dist.total);
    out << std::left << std::setw(static_cast<int>(width)) << schema.name(k) << "  " << std::right
        << std::setw(8) << dist.counts[k] << "  " << std::setw(6) << std::fixed
        << std::setprecision(2) << share * 100.0 << "%\n";
  }
  out << std::left << std::setw(static_cast<int>(width)) << "total" << "  " << std::right
      << std::setw(8) << dist.total << '\n';
  return out.str();
}

Split stratified_split(std::span<const LabeledDocument> docs, double fraction,
                       std::uint64_t seed) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot split an empty corpus");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "split fraction must lie in (0, 1)");
  }
  std::size_t classes = 0;
  for (const auto& d : docs) classes = std::max(classes, d.label + 1);

  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t i = 0; i < docs.size(); ++i) members[docs[i].label].push_back(i);

  Rng rng(seed);
  std::vector<bool> to_train(docs.size(), false);
  for (auto& idx : members) {
    // Guard against 0.29 * 100 = 28.999999999999996.
    const auto take = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(idx.size()) + 1e-9));
    rng.shuffle(idx);
    for (std::size_t j = 0; j < take; ++j) to_train[idx[j]] = true;
  }

  Split split;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    (to_train[i] ? split.train : split.held).push_back(docs[i]);
  }
  return split;
}

}  // namespace altc
