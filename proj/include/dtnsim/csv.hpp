#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dtnsim::csv {

/// RFC 4180 style table: quoted fields, doubled quotes, CRLF or LF, optional
/// UTF-8 BOM. Blank lines are skipped.
struct Table {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  ///< 1-based physical line where each row starts

  /// -1 when the column is absent.
  int column(std::string_view name) const;
  /// Throws FeedError naming the file when the column is absent.
  std::size_t require_column(std::string_view name) const;
};

/// Throws FeedError(file, line) when a row's field count differs from the
/// header or a quote is left open.
Table parse(std::string_view file_name, std::string_view content);

/// Quotes `field` when it holds a comma, quote or newline.
std::string escape(std::string_view field);

}  // namespace dtnsim::csv
