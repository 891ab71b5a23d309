#include "labelvec/csv.hpp"

#include "labelvec/error.hpp"

namespace labelvec {

std::optional<std::vector<std::string>> CsvReader::next() {
  if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
  record_line_ = line_;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  int c;
  while ((c = in_.get()) != std::char_traits<char>::eof()) {
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (ch == delimiter_) {
      fields.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (ch == '\r' && in_.peek() == '\n') {
      continue;
    } else if (ch == '\n') {
      ++line_;
      fields.push_back(std::move(field));
      return fields;
    } else {
      field.push_back(ch);
      field_started = true;
    }
  }
  if (quoted) {
    throw InputError("unterminated quoted field in record starting at line " +
                     std::to_string(record_line_));
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace labelvec
