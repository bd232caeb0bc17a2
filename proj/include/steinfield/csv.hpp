#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace steinfield {

// Shortest decimal string that round-trips a double (up to 17 significant
// digits); the single numeric format used in all CSV output.
std::string format_full(double v);

// RFC 4180 writer: CRLF line endings, quoting when a field contains
// comma, quote, or newline. Output is byte-deterministic given the rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void row(const std::vector<std::string>& fields);
  void close();

  static std::string escape(const std::string& field);

 private:
  std::ofstream out_;
};

}  // namespace steinfield
