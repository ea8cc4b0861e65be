#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rlab/linalg.hpp"

namespace rlab {

/// Ordered JSON value. Objects keep insertion order so rendered reports are
/// stable; numbers render with 17 significant digits and non-finite numbers
/// as null.
class Json {
 public:
  enum class Kind { Null, Bool, Number, Integer, String, Array, Object };
  using Array = std::vector<Json>;
  using Object = std::vector<std::pair<std::string, Json>>;

  Json() = default;
  Json(bool b) : value_(b) {}
  Json(double d) : value_(d) {}
  Json(int i) : value_(static_cast<std::int64_t>(i)) {}
  Json(long i) : value_(static_cast<std::int64_t>(i)) {}
  Json(long long i) : value_(static_cast<std::int64_t>(i)) {}
  Json(unsigned long i) : value_(static_cast<std::int64_t>(i)) {}
  Json(unsigned long long i) : value_(static_cast<std::int64_t>(i)) {}
  Json(std::string s) : value_(std::move(s)) {}
  Json(const char* s) : value_(std::string(s)) {}
  Json(Array a) : value_(std::move(a)) {}
  Json(Object o) : value_(std::move(o)) {}

  static Json array() { return Json(Array{}); }
  static Json object() { return Json(Object{}); }

  Kind kind() const;
  bool is_object() const { return kind() == Kind::Object; }
  bool is_array() const { return kind() == Kind::Array; }

  /// Object insert; replaces the value of an existing key in place.
  Json& set(const std::string& key, Json value);
  /// Array append.
  Json& push(Json value);

  const Json* find(const std::string& key) const;
  const Array& as_array() const;
  const Object& as_object() const;
  double as_number() const;
  bool as_bool() const;
  const std::string& as_string() const;

  /// indent < 0 renders on one line.
  std::string dump(int indent = 2) const;

 private:
  void dump_to(std::string& out, int indent, int depth) const;

  std::variant<std::monostate, bool, double, std::int64_t, std::string, Array, Object> value_;
};

Json to_json(const SmallVec& v);
/// Array of rows.
Json to_json(const SmallMat& m);

/// Flattens nested objects into dotted keys and arrays into key[i]. An
/// array of objects becomes one row per element under a shared header;
/// anything else becomes a single header row and a single value row.
std::string render_csv(const Json& value);

/// Indented key: value listing.
std::string render_pretty(const Json& value);

enum class OutputFormat { Json, Csv, Pretty };

OutputFormat parse_output_format(const std::string& name);
std::string render(const Json& value, OutputFormat format);

}  // namespace rlab
