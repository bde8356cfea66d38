#include "chase/toml_lite.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "chase/errors.hpp"

namespace chase {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("toml parse error at line " + std::to_string(line) + ": " +
                    what);
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Removes a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

nlohmann::json parse_scalar(const std::string& token, int line) {
  if (token.empty()) fail(line, "empty value");
  if (token.front() == '"') {
    if (token.size() < 2 || token.back() != '"')
      fail(line, "unterminated string");
    return token.substr(1, token.size() - 2);
  }
  if (token == "true") return true;
  if (token == "false") return false;
  char* end = nullptr;
  if (token.find_first_of(".eE") == std::string::npos ||
      token.find_first_of("0123456789") > token.find_first_of("eE")) {
    const long long v = std::strtoll(token.c_str(), &end, 10);
    if (end && *end == '\0') return v;
  }
  const double d = std::strtod(token.c_str(), &end);
  if (end && *end == '\0') return d;
  fail(line, "cannot parse value '" + token + "'");
}

nlohmann::json parse_value(const std::string& raw, int line) {
  const std::string value = strip(raw);
  if (value.empty()) fail(line, "missing value");
  if (value.front() != '[') return parse_scalar(value, line);
  if (value.back() != ']') fail(line, "unterminated array");

  nlohmann::json arr = nlohmann::json::array();
  std::string inner = value.substr(1, value.size() - 2);
  std::string token;
  bool in_string = false;
  for (const char ch : inner) {
    if (ch == '"') in_string = !in_string;
    if (ch == ',' && !in_string) {
      if (!strip(token).empty()) arr.push_back(parse_scalar(strip(token), line));
      token.clear();
    } else {
      token += ch;
    }
  }
  if (!strip(token).empty()) arr.push_back(parse_scalar(strip(token), line));
  return arr;
}

}  // namespace

nlohmann::json toml_lite_parse(const std::string& text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated table header");
      const std::string name = strip(line.substr(1, line.size() - 2));
      if (name.empty() || name.find('.') != std::string::npos)
        fail(line_no, "only single-level tables are supported");
      root[name] = nlohmann::json::object();
      table = &root[name];
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = strip(line.substr(0, eq));
    if (key.empty()) fail(line_no, "empty key");
    for (const char ch : key)
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' &&
          ch != '-')
        fail(line_no, "invalid key '" + key + "'");
    (*table)[key] = parse_value(line.substr(eq + 1), line_no);
  }
  return root;
}

}  // namespace chase
