#include "gms/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace gms::toml {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

struct Cursor {
  const std::string& s;
  size_t i = 0;
  const std::string& origin;
  int line;

  bool done() const { return i >= s.size(); }
  char peek() const { return s[i]; }
  void skip_ws() {
    while (!done() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
};

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
  Value v;
  v.kind = Value::Kind::Array;
  ++c.i;  // consume '['
  c.skip_ws();
  while (true) {
    if (c.done()) fail(c.origin, c.line, "unterminated array");
    if (c.peek() == ']') {
      ++c.i;
      return v;
    }
    v.items.push_back(parse_value(c));
    c.skip_ws();
    if (!c.done() && c.peek() == ',') {
      ++c.i;
      c.skip_ws();
    }
  }
}

Value parse_value(Cursor& c) {
  c.skip_ws();
  if (c.done()) fail(c.origin, c.line, "missing value");
  char ch = c.peek();
  if (ch == '[') return parse_array(c);
  Value v;
  if (ch == '"') {
    ++c.i;
    std::string out;
    while (!c.done() && c.peek() != '"') {
      if (c.peek() == '\\' && c.i + 1 < c.s.size()) {
        ++c.i;
        char e = c.peek();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(c.origin, c.line, "unsupported escape");
        }
        ++c.i;
      } else {
        out += c.peek();
        ++c.i;
      }
    }
    if (c.done()) fail(c.origin, c.line, "unterminated string");
    ++c.i;
    v.kind = Value::Kind::String;
    v.str = out;
    return v;
  }
  // bare token: bool or number
  size_t start = c.i;
  while (!c.done()) {
    char t = c.peek();
    if (t == ',' || t == ']' || t == '#' || t == ' ' || t == '\t') break;
    ++c.i;
  }
  std::string tok = c.s.substr(start, c.i - start);
  if (tok == "true" || tok == "false") {
    v.kind = Value::Kind::Bool;
    v.boolean = (tok == "true");
    return v;
  }
  std::string plain;
  plain.reserve(tok.size());
  for (char t : tok)
    if (t != '_') plain += t;
  bool looks_float = plain.find_first_of(".eE") != std::string::npos;
  if (!looks_float) {
    std::int64_t iv = 0;
    auto [p, ec] = std::from_chars(plain.data(), plain.data() + plain.size(), iv);
    if (ec == std::errc() && p == plain.data() + plain.size()) {
      v.kind = Value::Kind::Int;
      v.integer = iv;
      v.number = double(iv);
      return v;
    }
  }
  try {
    size_t used = 0;
    double dv = std::stod(plain, &used);
    if (used != plain.size()) fail(c.origin, c.line, "bad number '" + tok + "'");
    v.kind = Value::Kind::Float;
    v.number = dv;
    return v;
  } catch (const std::exception&) {
    fail(c.origin, c.line, "bad value '" + tok + "'");
  }
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// strip trailing comment that is not inside a string
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

}  // namespace

double Value::as_number(const std::string& where) const {
  if (kind == Kind::Float || kind == Kind::Int) return number;
  throw ConfigError(where + ": expected a number");
}

std::int64_t Value::as_int(const std::string& where) const {
  if (kind == Kind::Int) return integer;
  throw ConfigError(where + ": expected an integer");
}

const std::string& Value::as_string(const std::string& where) const {
  if (kind == Kind::String) return str;
  throw ConfigError(where + ": expected a string");
}

bool Value::as_bool(const std::string& where) const {
  if (kind == Kind::Bool) return boolean;
  throw ConfigError(where + ": expected a bool");
}

std::vector<double> Value::as_number_array(const std::string& where) const {
  if (kind != Kind::Array) throw ConfigError(where + ": expected an array");
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.as_number(where));
  return out;
}

std::vector<std::vector<double>> Value::as_number_matrix(const std::string& where) const {
  if (kind != Kind::Array) throw ConfigError(where + ": expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& it : items) out.push_back(it.as_number_array(where));
  return out;
}

const Value& Table::require(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("[" + name + "]: missing key '" + key + "'");
  return it->second;
}

std::string Table::get_string(const std::string& key) const {
  return require(key).as_string("[" + name + "]." + key);
}
std::string Table::get_string(const std::string& key, const std::string& dflt) const {
  return has(key) ? get_string(key) : dflt;
}
double Table::get_number(const std::string& key) const {
  return require(key).as_number("[" + name + "]." + key);
}
double Table::get_number(const std::string& key, double dflt) const {
  return has(key) ? get_number(key) : dflt;
}
std::int64_t Table::get_int(const std::string& key) const {
  return require(key).as_int("[" + name + "]." + key);
}
std::int64_t Table::get_int(const std::string& key, std::int64_t dflt) const {
  return has(key) ? get_int(key) : dflt;
}
bool Table::get_bool(const std::string& key, bool dflt) const {
  return has(key) ? require(key).as_bool("[" + name + "]." + key) : dflt;
}
std::vector<double> Table::get_number_array(const std::string& key) const {
  return require(key).as_number_array("[" + name + "]." + key);
}
std::vector<double> Table::get_number_array(const std::string& key, const std::vector<double>& dflt) const {
  return has(key) ? get_number_array(key) : dflt;
}
std::vector<std::vector<double>> Table::get_number_matrix(const std::string& key) const {
  return require(key).as_number_matrix("[" + name + "]." + key);
}

const Table& Document::table(const std::string& name) const {
  auto it = tables.find(name);
  if (it == tables.end()) throw ConfigError("missing table [" + name + "]");
  return it->second;
}

const std::vector<Table>& Document::table_array(const std::string& name) const {
  auto it = table_arrays.find(name);
  if (it == table_arrays.end()) throw ConfigError("missing array of tables [[" + name + "]]");
  return it->second;
}

Document parse(const std::string& text, const std::string& origin) {
  Document doc;
  doc.root.name = "<root>";
  Table* current = &doc.root;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      bool array_table = line.size() > 1 && line[1] == '[';
      size_t open = array_table ? 2 : 1;
      std::string close = array_table ? "]]" : "]";
      size_t end = line.find(close, open);
      if (end == std::string::npos || trim(line.substr(end + close.size())) != "")
        fail(origin, line_no, "malformed table header");
      std::string name = trim(line.substr(open, end - open));
      if (!valid_key(name)) fail(origin, line_no, "bad table name '" + name + "'");
      if (array_table) {
        auto& vec = doc.table_arrays[name];
        vec.emplace_back();
        vec.back().name = name;
        current = &vec.back();
      } else {
        if (doc.tables.count(name)) fail(origin, line_no, "duplicate table [" + name + "]");
        Table t;
        t.name = name;
        auto [it, ok] = doc.tables.emplace(name, std::move(t));
        (void)ok;
        current = &it->second;
      }
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!valid_key(key)) fail(origin, line_no, "bad key '" + key + "'");
    if (current->values.count(key)) fail(origin, line_no, "duplicate key '" + key + "'");
    std::string rest = trim(line.substr(eq + 1));
    if (rest.empty()) fail(origin, line_no, "missing value for '" + key + "'");
    Cursor c{rest, 0, origin, line_no};
    Value v = parse_value(c);
    c.skip_ws();
    if (!c.done()) fail(origin, line_no, "trailing characters after value");
    current->values.emplace(key, std::move(v));
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

}  // namespace gms::toml
