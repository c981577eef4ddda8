#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"

namespace biobench::eval {

namespace detail {

// Recursive-descent reader for the TOML subset used by run configs: tables,
// dotted keys, basic/literal strings, integers, floats, booleans, arrays and
// inline tables. Dates and multi-line strings are not supported.
class TomlReader {
public:
  explicit TomlReader(std::string_view text) : s_(text) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    for (;;) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        skip_inline_ws();
        const auto path = read_key_path();
        skip_inline_ws();
        expect(']');
        if (!headers_.insert(path).second) fail("table '" + path.back() + "' defined twice");
        table = &descend(root, path);
      } else {
        const auto path = read_key_path();
        skip_inline_ws();
        expect('=');
        skip_inline_ws();
        nlohmann::json value = read_value();
        assign(*table, path, std::move(value));
      }
      end_of_line();
    }
    return root;
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::set<std::vector<std::string>> headers_;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  int line() const {
    int n = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) n += s_[i] == '\n';
    return n;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError("config line " + std::to_string(line()) + ": " + msg); }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_ws_comments_newlines() {
    for (;;) {
      skip_inline_ws();
      skip_comment();
      if (peek() == '\r' || peek() == '\n') {
        ++pos_;
        continue;
      }
      break;
    }
  }

  void end_of_line() {
    skip_inline_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (!eof() && peek() != '\n') fail("unexpected trailing characters");
  }

  std::string read_key() {
    if (peek() == '"' || peek() == '\'') return read_string();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) k += s_[pos_++];
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::vector<std::string> read_key_path() {
    std::vector<std::string> path{read_key()};
    for (;;) {
      skip_inline_ws();
      if (peek() != '.') break;
      ++pos_;
      skip_inline_ws();
      path.push_back(read_key());
    }
    return path;
  }

  nlohmann::json& descend(nlohmann::json& root, const std::vector<std::string>& path) {
    nlohmann::json* t = &root;
    for (std::size_t i = 0; i < path.size(); ++i) {
      auto& next = (*t)[path[i]];
      if (next.is_null()) next = nlohmann::json::object();
      else if (!next.is_object()) fail("key '" + path[i] + "' is not a table");
      t = &next;
    }
    return *t;
  }

  void assign(nlohmann::json& table, const std::vector<std::string>& path, nlohmann::json value) {
    nlohmann::json* t = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      auto& next = (*t)[path[i]];
      if (next.is_null()) next = nlohmann::json::object();
      else if (!next.is_object()) fail("key '" + path[i] + "' is not a table");
      t = &next;
    }
    if (t->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*t)[path.back()] = std::move(value);
  }

  std::string read_string() {
    const char q = peek();
    ++pos_;
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[pos_++];
      if (c == q) break;
      if (c == '\\' && q == '"') {
        if (eof()) fail("unterminated string");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  nlohmann::json read_value() {
    const char c = peek();
    if (c == '"' || c == '\'') {
      if (s_.substr(pos_, 3) == "\"\"\"" || s_.substr(pos_, 3) == "'''") fail("multi-line strings are not supported");
      return read_string();
    }
    if (c == '[') return read_array();
    if (c == '{') return read_inline_table();
    std::string tok;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' || peek() == '.' ||
                      peek() == '_'))
      tok += s_[pos_++];
    if (tok.empty()) fail("expected a value");
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string digits;
    for (char ch : tok)
      if (ch != '_') digits += ch;
    const bool is_float = digits.find_first_of(".eE") != std::string::npos || digits == "inf" || digits == "nan";
    if (!is_float) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(digits, &used, 10);
        if (used == digits.size()) return v;
      } catch (const std::exception&) {
      }
      fail("invalid value '" + tok + "'");
    }
    try {
      return parse_double(digits);
    } catch (const DataError&) {
      fail("invalid value '" + tok + "'");
    }
  }

  nlohmann::json read_array() {
    expect('[');
    nlohmann::json arr = nlohmann::json::array();
    for (;;) {
      skip_ws_comments_newlines();
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(read_value());
      skip_ws_comments_newlines();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() != ']') fail("expected ',' or ']' in array");
    }
  }

  nlohmann::json read_inline_table() {
    expect('{');
    nlohmann::json t = nlohmann::json::object();
    skip_inline_ws();
    if (peek() == '}') {
      ++pos_;
      return t;
    }
    for (;;) {
      skip_inline_ws();
      const auto path = read_key_path();
      skip_inline_ws();
      expect('=');
      skip_inline_ws();
      assign(t, path, read_value());
      skip_inline_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return t;
    }
  }
};

} // namespace detail

inline nlohmann::json parse_toml(std::string_view text) { return detail::TomlReader(text).parse(); }

// TOML by default; JSON when the file ends in .json or its first
// non-blank character is '{'.
inline nlohmann::json parse_config_text(std::string_view text, bool json_hint = false) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (json_hint || (first != std::string_view::npos && text[first] == '{')) {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("invalid JSON config: ") + e.what());
    }
  }
  return parse_toml(text);
}

inline nlohmann::json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.extension() == ".json");
}

} // namespace biobench::eval
