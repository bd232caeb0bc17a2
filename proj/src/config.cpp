#include "steinfield/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "steinfield/errors.hpp"

namespace steinfield {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Strips a trailing comment: `#` at the start of the value or preceded
// by whitespace begins a comment; `#` inside quotes does not.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted &&
        (i == 0 || std::isspace(static_cast<unsigned char>(s[i - 1])))) {
      return s.substr(0, i);
    }
  }
  return s;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
          c == '.')) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> split_list(const std::string& raw) {
  const std::string body = trim(raw);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
    // A bare scalar is accepted as a one-element list.
    return {body};
  }
  std::vector<std::string> items;
  std::string inner = body.substr(1, body.size() - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  if (items.size() == 1 && items[0].empty()) items.clear();
  return items;
}

void flatten_json(const nlohmann::json& node, const std::string& prefix,
                  std::map<std::string, Config::Entry>& out, const std::string& name) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
      flatten_json(it.value(), key, out, name);
    }
    return;
  }
  Config::Entry e;
  if (node.is_array()) {
    std::string raw = "[";
    for (std::size_t i = 0; i < node.size(); ++i) {
      const auto& v = node[i];
      if (v.is_structured()) {
        throw ConfigError(name + ": key '" + prefix +
                          "': nested arrays/objects inside arrays are not supported");
      }
      if (i) raw += ", ";
      raw += v.is_string() ? v.get<std::string>() : v.dump();
    }
    raw += "]";
    e.raw = raw;
  } else if (node.is_string()) {
    e.raw = node.get<std::string>();
  } else {
    e.raw = node.dump();
  }
  out[prefix] = e;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return json ? from_json_text(buf.str(), path) : from_text(buf.str(), path);
}

Config Config::from_text(const std::string& text, const std::string& name) {
  Config cfg;
  cfg.name_ = name;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": expected `key = value`, got '" + body + "'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = unquote(trim(body.substr(eq + 1)));
    if (!valid_key(key)) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": invalid key '" +
                        key + "'");
    }
    if (cfg.entries_.count(key)) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" +
                        key + "' (first set on line " +
                        std::to_string(cfg.entries_[key].line) + ")");
    }
    cfg.entries_[key] = Entry{value, lineno};
  }
  return cfg;
}

Config Config::from_json_text(const std::string& text, const std::string& name) {
  Config cfg;
  cfg.name_ = name;
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(name + ": JSON parse error: " + e.what());
  }
  if (!root.is_object()) throw ConfigError(name + ": top-level JSON must be an object");
  flatten_json(root, "", cfg.entries_, name);
  return cfg;
}

void Config::fail(const std::string& key, const std::string& what) const {
  auto it = entries_.find(key);
  std::string where = name_;
  if (it != entries_.end() && it->second.line > 0) {
    where += ":" + std::to_string(it->second.line);
  }
  throw ConfigError(where + ": key '" + key + "' " + what);
}

const Config::Entry& Config::require(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(name_ + ": missing required key '" + key + "'");
  }
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return require(key).raw; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second.raw;
}

namespace {

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

long long Config::get_int(const std::string& key) const {
  long long v;
  if (!parse_int(require(key).raw, v)) {
    fail(key, "expects an integer, got '" + require(key).raw + "'");
  }
  return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  double v;
  if (!parse_double(require(key).raw, v)) {
    fail(key, "expects a number, got '" + require(key).raw + "'");
  }
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string raw = require(key).raw;
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  fail(key, "expects a boolean (true/false), got '" + raw + "'");
}

std::vector<long long> Config::get_int_list(const std::string& key) const {
  std::vector<long long> out;
  for (const std::string& item : split_list(require(key).raw)) {
    long long v;
    if (!parse_int(item, v)) fail(key, "expects a list of integers, got '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : split_list(require(key).raw)) {
    double v;
    if (!parse_double(item, v)) fail(key, "expects a list of numbers, got '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key) const {
  std::vector<std::string> out;
  for (const std::string& item : split_list(require(key).raw)) out.push_back(unquote(item));
  return out;
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& kv : entries_) out.push_back(kv.first);
  return out;
}

void Config::set(const std::string& key, const std::string& raw) {
  entries_[key] = Entry{raw, 0};
}

}  // namespace steinfield
