#pragma once

#include <istream>
#include <string>
#include <vector>

#include "trolldetect/util/error.hpp"

namespace trolldetect::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. Returns false at end of input.
inline bool read_row(std::istream& in, Row& row) {
  row.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c = 0;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get(c);
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (quoted) throw ValidationError("csv: unterminated quoted field");
  if (!any) return false;
  row.push_back(std::move(field));
  return true;
}

inline std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string join(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(row[i]);
  }
  return out;
}

}  // namespace trolldetect::csv
