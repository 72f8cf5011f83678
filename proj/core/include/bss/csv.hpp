#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace bss::csv {

// One parsed record plus its 1-based line number in the source (header = 1).
struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// RFC 4180-style table: quoted fields, embedded commas/quotes/newlines, CRLF
// or LF line endings. Throws DataError on an unterminated quote.
struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  // Index of a header column, or -1.
  int column(const std::string& name) const;
};

Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

// Quotes a field only when it contains a comma, quote or newline.
std::string escape_field(const std::string& field);

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

// Shortest decimal form of `v` that parses back to the same double. Keeps
// dumped artifacts both readable and bit-exact to re-ingest.
std::string format_double(double v);

// Fixed-precision decimal, for human-facing fractions (shares, modularity).
std::string format_fixed(double v, int digits);

}  // namespace bss::csv
