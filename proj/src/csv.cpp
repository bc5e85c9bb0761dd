#include "dtnsim/csv.hpp"

#include <algorithm>

#include "dtnsim/error.hpp"

namespace dtnsim::csv {

int Table::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

std::size_t Table::require_column(std::string_view name) const {
  int c = column(name);
  if (c < 0) throw FeedError(file, 1, "missing required column '" + std::string(name) + "'");
  return static_cast<std::size_t>(c);
}

Table parse(std::string_view file_name, std::string_view content) {
  Table table;
  table.file = std::string(file_name);
  if (content.size() >= 3 && static_cast<unsigned char>(content[0]) == 0xEF &&
      static_cast<unsigned char>(content[1]) == 0xBB && static_cast<unsigned char>(content[2]) == 0xBF) {
    content.remove_prefix(3);
  }

  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool have_header = false;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    bool blank = record.size() == 1 && record.front().empty();
    if (!blank) {
      for (auto& f : record) {
        // Unquoted GTFS fields are commonly padded.
        auto b = f.find_first_not_of(' ');
        auto e = f.find_last_not_of(' ');
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
      }
      if (!have_header) {
        table.header = std::move(record);
        have_header = true;
      } else {
        if (record.size() != table.header.size()) {
          throw FeedError(table.file, record_line,
                          "expected " + std::to_string(table.header.size()) + " fields, found " +
                              std::to_string(record.size()));
        }
        table.rows.push_back(std::move(record));
        table.lines.push_back(record_line);
      }
    }
    record.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started || field.find_first_not_of(' ') == std::string::npos) {
          field.clear();
          in_quotes = true;
          field_started = true;
        } else {
          throw FeedError(table.file, line, "stray quote inside an unquoted field");
        }
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (in_quotes) throw FeedError(table.file, record_line, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  if (!have_header) throw FeedError(table.file, 0, "file is empty");
  return table;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace dtnsim::csv
