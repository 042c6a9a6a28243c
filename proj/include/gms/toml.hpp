#pragma once

// Minimal TOML subset used by the config files: [table] headers, [[array of
// tables]] headers, key = value pairs with string / bool / integer / float /
// (nested) array values, and # comments. No dotted keys, no inline tables,
// no multi-line strings.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gms/common.hpp"

namespace gms::toml {

struct Value {
  enum class Kind { String, Bool, Int, Float, Array };
  Kind kind = Kind::Int;
  std::string str;
  bool boolean = false;
  std::int64_t integer = 0;
  double number = 0.0;
  std::vector<Value> items;

  bool is_array() const { return kind == Kind::Array; }
  double as_number(const std::string& where) const;
  std::int64_t as_int(const std::string& where) const;
  const std::string& as_string(const std::string& where) const;
  bool as_bool(const std::string& where) const;
  std::vector<double> as_number_array(const std::string& where) const;
  std::vector<std::vector<double>> as_number_matrix(const std::string& where) const;
};

struct Table {
  std::string name;  // for error messages
  std::map<std::string, Value> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  const Value& require(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& dflt) const;
  double get_number(const std::string& key) const;
  double get_number(const std::string& key, double dflt) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<double> get_number_array(const std::string& key) const;
  std::vector<double> get_number_array(const std::string& key, const std::vector<double>& dflt) const;
  std::vector<std::vector<double>> get_number_matrix(const std::string& key) const;
};

struct Document {
  Table root;
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> table_arrays;

  bool has_table(const std::string& name) const { return tables.count(name) != 0; }
  const Table& table(const std::string& name) const;
  const std::vector<Table>& table_array(const std::string& name) const;
};

Document parse(const std::string& text, const std::string& origin = "<string>");
Document parse_file(const std::string& path);

}  // namespace gms::toml
