#include "steinfield/csv.hpp"

#include <cmath>
#include <cstdio>

#include "steinfield/errors.hpp"

namespace steinfield {

std::string format_full(double v) {
  char buf[40];
  // Shortest representation that round-trips: try increasing precision.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v || (std::isnan(back) && std::isnan(v))) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw ConfigError("cannot open output file: " + path);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << escape(fields[i]);
  }
  out_ << "\r\n";
}

void CsvWriter::close() { out_.close(); }

std::string CsvWriter::escape(const std::string& field) {
  bool needs_quote = false;
  for (char ch : field)
    if (ch == ',' || ch == '"' || ch == '\n' || ch == '\r') {
      needs_quote = true;
      break;
    }
  if (!needs_quote) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace steinfield
