#pragma once

#include <map>
#include <string>
#include <vector>

// =============================================================================
// Experiment configuration.
//
// Primary format: a flat key-value text file with dot-nested keys,
// `#` comments, and bracketed scalar lists:
//
//     # convergence sweep
//     experiment  = convergence
//     seeds.master = 42
//     sweep.n1     = [8, 64, 512, 4096]
//
// A `.json` file is accepted as an alternative; nested objects flatten
// to the same dot-keys. Text-format keys remember their line number so
// validation errors can point at the offending line.
// =============================================================================

namespace steinfield {

class Config {
 public:
  struct Entry {
    std::string raw;  // unparsed value text (lists keep their brackets)
    int line = 0;     // 0 when the source format has no line info (JSON)
  };

  // Dispatches on the file extension: ".json" parses as JSON, anything
  // else as the key-value text format. Throws ConfigError with a
  // file:line message on malformed input.
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text, const std::string& name);
  static Config from_json_text(const std::string& text, const std::string& name);

  const std::string& name() const { return name_; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  // Typed getters; the no-fallback forms throw ConfigError when the key
  // is missing, and all of them throw on a value of the wrong shape.
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<long long> get_int_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  // Sorted keys sharing a prefix; used to echo the config into metadata.
  std::vector<std::string> keys() const;

  // Inserts or overwrites an entry (used for command-line overrides).
  void set(const std::string& key, const std::string& raw);

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  const Entry& require(const std::string& key) const;

  std::string name_ = "<none>";
  std::map<std::string, Entry> entries_;
};

}  // namespace steinfield
