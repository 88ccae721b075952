#pragma once

#include "aharm/types.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace aharm {

/* Shortest round-trip style decimal rendering used everywhere a double is
 * written to a report, so that identical runs produce identical bytes. */
std::string format_double(double x);
std::string format_int(long long x);

/* Minimal JSON document builder with insertion-ordered object keys. */
class JsonValue {
public:
  JsonValue() : kind_(Kind::Null) {}

  static JsonValue object();
  static JsonValue array();
  static JsonValue number(double x);
  static JsonValue integer(long long x);
  static JsonValue boolean(bool b);
  static JsonValue str(std::string s);

  JsonValue& set(const std::string& key, JsonValue v); // objects only
  JsonValue& push(JsonValue v);                        // arrays only

  std::string dump(int indent = 2) const;

private:
  enum class Kind { Null, Object, Array, Number, Integer, Bool, String };
  Kind kind_;
  double num_ = 0;
  long long int_ = 0;
  bool bool_ = false;
  std::string str_;
  std::vector<std::pair<std::string, JsonValue>> members_;
  std::vector<JsonValue> items_;

  void dump_to(std::string& out, int indent, int depth) const;
};

/* Plain CSV writer: one header row, then numeric/string rows. */
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return out_; }

private:
  size_t columns_;
  std::string out_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace aharm
