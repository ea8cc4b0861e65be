#include "rlab/report.hpp"

#include <cmath>
#include <map>

#include "rlab/error.hpp"
#include "rlab/format.hpp"

namespace rlab {

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          static constexpr char kHex[] = "0123456789abcdef";
          out += "\\u00";
          out += kHex[c >> 4];
          out += kHex[c & 0xf];
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

std::string scalar_text(const Json& v) {
  switch (v.kind()) {
    case Json::Kind::Null: return "null";
    case Json::Kind::Bool: return v.as_bool() ? "true" : "false";
    case Json::Kind::Number: return std::isfinite(v.as_number()) ? format_double17(v.as_number()) : "null";
    case Json::Kind::Integer: return v.dump(-1);
    case Json::Kind::String: return v.as_string();
    default: return v.dump(-1);
  }
}

void flatten(const Json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [k, child] : v.as_object()) flatten(child, prefix.empty() ? k : prefix + "." + k, out);
  } else if (v.is_array()) {
    const auto& a = v.as_array();
    for (std::size_t i = 0; i < a.size(); ++i) flatten(a[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, scalar_text(v));
  }
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void pretty_into(std::string& out, const Json& v, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  if (v.is_object()) {
    for (const auto& [k, child] : v.as_object()) {
      if ((child.is_object() && !child.as_object().empty()) || (child.is_array() && !child.as_array().empty() &&
                                                                 (child.as_array()[0].is_object() || child.as_array()[0].is_array()))) {
        out += pad + k + ":\n";
        pretty_into(out, child, depth + 1);
      } else {
        out += pad + k + ": " + (child.is_array() ? child.dump(-1) : scalar_text(child)) + "\n";
      }
    }
  } else if (v.is_array()) {
    const auto& a = v.as_array();
    for (std::size_t i = 0; i < a.size(); ++i) {
      out += pad + "- [" + std::to_string(i) + "]\n";
      pretty_into(out, a[i], depth + 1);
    }
  } else {
    out += pad + scalar_text(v) + "\n";
  }
}

}  // namespace

Json::Kind Json::kind() const { return static_cast<Kind>(value_.index()); }

Json& Json::set(const std::string& key, Json value) {
  if (kind() == Kind::Null) value_ = Object{};
  auto* obj = std::get_if<Object>(&value_);
  if (!obj) throw InvalidArgument("JSON value is not an object");
  for (auto& [k, v] : *obj) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  obj->emplace_back(key, std::move(value));
  return *this;
}

Json& Json::push(Json value) {
  if (kind() == Kind::Null) value_ = Array{};
  auto* arr = std::get_if<Array>(&value_);
  if (!arr) throw InvalidArgument("JSON value is not an array");
  arr->push_back(std::move(value));
  return *this;
}

const Json* Json::find(const std::string& key) const {
  const auto* obj = std::get_if<Object>(&value_);
  if (!obj) return nullptr;
  for (const auto& [k, v] : *obj)
    if (k == key) return &v;
  return nullptr;
}

const Json::Array& Json::as_array() const {
  if (const auto* a = std::get_if<Array>(&value_)) return *a;
  throw InvalidArgument("JSON value is not an array");
}

const Json::Object& Json::as_object() const {
  if (const auto* o = std::get_if<Object>(&value_)) return *o;
  throw InvalidArgument("JSON value is not an object");
}

double Json::as_number() const {
  if (const auto* d = std::get_if<double>(&value_)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&value_)) return static_cast<double>(*i);
  throw InvalidArgument("JSON value is not a number");
}

bool Json::as_bool() const {
  if (const auto* b = std::get_if<bool>(&value_)) return *b;
  throw InvalidArgument("JSON value is not a boolean");
}

const std::string& Json::as_string() const {
  if (const auto* s = std::get_if<std::string>(&value_)) return *s;
  throw InvalidArgument("JSON value is not a string");
}

std::string Json::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  return out;
}

void Json::dump_to(std::string& out, int indent, int depth) const {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (kind()) {
    case Kind::Null: out += "null"; break;
    case Kind::Bool: out += std::get<bool>(value_) ? "true" : "false"; break;
    case Kind::Number: {
      const double d = std::get<double>(value_);
      out += std::isfinite(d) ? format_double17(d) : "null";
      break;
    }
    case Kind::Integer: out += std::to_string(std::get<std::int64_t>(value_)); break;
    case Kind::String: escape_into(out, std::get<std::string>(value_)); break;
    case Kind::Array: {
      const auto& a = std::get<Array>(value_);
      if (a.empty()) {
        out += "[]";
        break;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : a) flat = flat && !e.is_array() && !e.is_object();
      out += '[';
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += flat || indent < 0 ? (indent < 0 ? "," : ", ") : ",";
        if (!flat) newline(depth + 1);
        a[i].dump_to(out, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      break;
    }
    case Kind::Object: {
      const auto& o = std::get<Object>(value_);
      if (o.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      for (std::size_t i = 0; i < o.size(); ++i) {
        if (i) out += ',';
        newline(depth + 1);
        escape_into(out, o[i].first);
        out += indent < 0 ? ":" : ": ";
        o[i].second.dump_to(out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      break;
    }
  }
}

Json to_json(const SmallVec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push(v(i));
  return a;
}

Json to_json(const SmallMat& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push(to_json(SmallVec(m.row(i).transpose())));
  return a;
}

std::string render_csv(const Json& value) {
  std::vector<std::vector<std::pair<std::string, std::string>>> rows;
  bool table = value.is_array() && !value.as_array().empty();
  if (table)
    for (const auto& e : value.as_array()) table = table && e.is_object();
  if (table) {
    for (const auto& e : value.as_array()) {
      rows.emplace_back();
      flatten(e, "", rows.back());
    }
  } else {
    rows.emplace_back();
    flatten(value, "", rows.back());
  }
  // Header: union of keys in first-seen order.
  std::vector<std::string> header;
  std::map<std::string, std::size_t> column;
  for (const auto& r : rows)
    for (const auto& [k, v] : r)
      if (column.emplace(k, header.size()).second) header.push_back(k);
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + csv_cell(header[i]);
  out += '\n';
  for (const auto& r : rows) {
    std::vector<std::string> cells(header.size());
    for (const auto& [k, v] : r) cells[column[k]] = v;
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_cell(cells[i]);
    out += '\n';
  }
  return out;
}

std::string render_pretty(const Json& value) {
  std::string out;
  pretty_into(out, value, 0);
  return out;
}

OutputFormat parse_output_format(const std::string& name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "pretty") return OutputFormat::Pretty;
  throw InvalidArgument("unknown output format '" + name + "' (expected json, csv or pretty)");
}

std::string render(const Json& value, OutputFormat format) {
  switch (format) {
    case OutputFormat::Json: return value.dump(2) + "\n";
    case OutputFormat::Csv: return render_csv(value);
    case OutputFormat::Pretty: return render_pretty(value);
  }
  return {};
}

}  // namespace rlab
