#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace altc {

// Ordered class names. The position of a name is its class index.
class LabelSchema {
 public:
  // Not Hope, Generalized Hope, Realistic Hope, Unrealistic Hope.
  LabelSchema();
  explicit LabelSchema(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t index) const { return names_.at(index); }

  // Exact match after trimming surrounding whitespace.
  std::optional<std::size_t> index_of(std::string_view label) const;

  friend bool operator==(const LabelSchema&, const LabelSchema&) = default;

 private:
  std::vector<std::string> names_;
};

// Parses a comma-separated list of class names.
LabelSchema parse_schema(std::string_view comma_separated);

struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> language;

  friend bool operator==(const Document&, const Document&) = default;
};

struct LabeledDocument {
  Document doc;
  std::size_t label = 0;

  friend bool operator==(const LabeledDocument&, const LabeledDocument&) = default;
};

// A pool record: gold label present only if the file carried one.
struct PoolDocument {
  Document doc;
  std::optional<std::size_t> label;
};

struct ClassDistribution {
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  friend bool operator==(const ClassDistribution&, const ClassDistribution&) = default;
};

enum class DatasetFormat { Csv, Tsv, Jsonl };

DatasetFormat parse_format(std::string_view name);
std::string_view to_string(DatasetFormat format) noexcept;
// csv/tsv/jsonl by extension, csv otherwise.
DatasetFormat format_from_extension(const std::filesystem::path& path);

template <typename Record>
struct Ingested {
  std::vector<Record> records;
  // Documents whose text is empty; they are kept and featurize to zero.
  std::size_t empty_texts = 0;
};

// Reads a labeled dataset. Throws Error with UnknownLabel, DuplicateId,
// MalformedRecord, MissingColumn or IoError.
Ingested<LabeledDocument> ingest(const std::filesystem::path& path, DatasetFormat format,
                                 const LabelSchema& schema);

// Same formats, but an empty label is allowed and yields an unlabeled record.
Ingested<PoolDocument> ingest_pool(const std::filesystem::path& path, DatasetFormat format,
                                   const LabelSchema& schema);

void export_corpus(const std::filesystem::path& path, DatasetFormat format,
                   std::span<const LabeledDocument> docs, const LabelSchema& schema);
void export_pool(const std::filesystem::path& path, DatasetFormat format,
                 std::span<const Document> docs);

ClassDistribution distribution(std::span<const LabeledDocument> docs, const LabelSchema& schema);

// {"schema": [...], "counts": [...], "total": n}
std::string distribution_json(const ClassDistribution& dist, const LabelSchema& schema);

// Per-class table for terminals.
std::string distribution_table(const ClassDistribution& dist, const LabelSchema& schema);

struct Split {
  std::vector<LabeledDocument> train;
  std::vector<LabeledDocument> held;
};

// Per class, floor(fraction * count) documents go to `train`. Both halves
// keep input order. Throws EmptyCorpus on empty input.
Split stratified_split(std::span<const LabeledDocument> docs, double fraction,
                       std::uint64_t seed);

}  // namespace altc
