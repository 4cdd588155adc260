#pragma once

// RFC 4180 style reader/writer shared by the CSV and TSV dataset formats.
// Fields may be quoted with '"'; quoted fields may contain the delimiter,
// newlines and doubled quotes.

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace altc::detail {

class DelimitedReader {
 public:
  DelimitedReader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

  // Reads the next record into `fields`. Returns false at end of input.
  // `line` receives the 1-based line on which the record starts.
  // Throws Error(MalformedRecord) on an unterminated quote or stray text
  // after a closing quote.
  bool next(std::vector<std::string>& fields, std::size_t& line);

 private:
  int get();
  int peek();

  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 1;
  bool first_ = true;
};

std::string quote_field(std::string_view field, char delimiter);

}  // namespace altc::detail
