#include "delimited.hpp"

#include "altc/error.hpp"

namespace altc::detail {

int DelimitedReader::get() {
  const int c = in_.get();
  if (c == '\n') ++line_;
  return c;
}

int DelimitedReader::peek() { return in_.peek(); }

bool DelimitedReader::next(std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  if (first_) {
    first_ = false;
    // UTF-8 byte order mark
    if (peek() == 0xEF) {
      char bom[3];
      in_.read(bom, 3);
      if (!(in_.gcount() == 3 && static_cast<unsigned char>(bom[1]) == 0xBB &&
            static_cast<unsigned char>(bom[2]) == 0xBF)) {
        in_.clear();
        in_.seekg(0);
      }
    }
  }

  // Skip blank lines between records.
  while (true) {
    const int c = peek();
    if (c == EOF) return false;
    if (c == '\n') {
      get();
    } else if (c == '\r') {
      get();
    } else {
      break;
    }
  }

  line = line_;
  std::string field;
  bool quoted = false;
  bool after_quote = false;
  while (true) {
    const int c = get();
    if (quoted) {
      if (c == EOF) {
        throw Error(ErrorCode::MalformedRecord,
                    "unterminated quoted field starting on line " + std::to_string(line),
                    std::to_string(line));
      }
      if (c == '"') {
        if (peek() == '"') {
          get();
          field.push_back('"');
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        field.push_back(static_cast<char>(c));
      }
      continue;
    }
    if (c == EOF || c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(std::move(field));
      return true;
    }
    if (c == delimiter_) {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
      continue;
    }
    if (after_quote) {
      if (c == '\r' && (peek() == '\n' || peek() == EOF)) continue;
      throw Error(ErrorCode::MalformedRecord,
                  "unexpected character after closing quote on line " + std::to_string(line_),
                  std::to_string(line));
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      continue;
    }
    field.push_back(static_cast<char>(c));
  }
}

std::string quote_field(std::string_view field, char delimiter) {
  const bool needs_quotes = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                            std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace altc::detail
