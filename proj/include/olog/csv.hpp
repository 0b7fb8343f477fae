#pragma once

// Minimal RFC 4180 reader and writer: comma separator, double-quote quoting,
// "" as an escaped quote, LF or CRLF line ends.

#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <vector>

#include "olog/error.hpp"

namespace olog::csv {

  using Row = std::vector<std::string>;

  inline std::vector<Row> parse(std::string const& text) {
    std::vector<Row> rows;
    Row              row;
    std::string      field;
    bool             quoted      = false;
    bool             field_begun = false;
    std::size_t      line        = 1;

    auto end_field = [&] {
      row.push_back(std::move(field));
      field.clear();
      field_begun = false;
    };
    auto end_row = [&] {
      end_field();
      // A line holding nothing at all is skipped.
      if (!(row.size() == 1 && row[0].empty())) {
        rows.push_back(std::move(row));
      }
      row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
      char const c = text[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') {
            ++line;
          }
          field += c;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (field_begun && !field.empty()) {
            throw Error(ErrorKind::parse,
                        "line " + std::to_string(line)
                            + ": stray quote inside unquoted field");
          }
          quoted      = true;
          field_begun = true;
          break;
        case ',': end_field(); break;
        case '\r':
          if (i + 1 < text.size() && text[i + 1] == '\n') {
            break;
          }
          field += c;
          break;
        case '\n':
          end_row();
          ++line;
          break;
        default: field += c; field_begun = true;
      }
    }
    if (quoted) {
      throw Error(ErrorKind::parse, "unterminated quoted field");
    }
    if (!field.empty() || field_begun || !row.empty()) {
      end_row();
    }
    return rows;
  }

  inline std::vector<Row> read(std::istream& in) {
    std::string text{std::istreambuf_iterator<char>(in), {}};
    return parse(text);
  }

  inline std::string quote(std::string const& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos && !s.empty()
        && s.front() != ' ' && s.back() != ' ') {
      return s;
    }
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') {
        out += '"';
      }
      out += c;
    }
    return out + '"';
  }

  inline void write_row(std::ostream& out, Row const& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i != 0) {
        out << ',';
      }
      out << quote(row[i]);
    }
    out << '\n';
  }

}  // namespace olog::csv
