#pragma once

// Typed field access for request and file schemas. Failures throw
// Error(SchemaViolation) carrying the dotted path of the field.

#include <cmath>
#include <string>

#include "json.hpp"
#include "lanescan/error.hpp"
#include "lanescan/lane.hpp"

namespace lanescan::json_fields {

inline std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

inline std::string index(const std::string& parent, std::size_t i) {
  return parent + "[" + std::to_string(i) + "]";
}

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, path + ": " + what, path);
}

inline const nlohmann::json& member(const nlohmann::json& obj, const std::string& key,
                                    const std::string& parent) {
  if (!obj.is_object()) fail(parent.empty() ? "<root>" : parent, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(join(parent, key), "missing required field");
  return *it;
}

inline double number(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "expected a finite number");
  return d;
}

inline double number(const nlohmann::json& obj, const std::string& key, const std::string& parent) {
  return number(member(obj, key, parent), join(parent, key));
}

inline int integer(const nlohmann::json& obj, const std::string& key, const std::string& parent) {
  const auto& v = member(obj, key, parent);
  if (!v.is_number_integer()) fail(join(parent, key), "expected an integer");
  const auto i = v.get<long long>();
  if (i < -2147483647LL || i > 2147483647LL) fail(join(parent, key), "integer out of range");
  return static_cast<int>(i);
}

inline std::string string(const nlohmann::json& obj, const std::string& key, const std::string& parent) {
  const auto& v = member(obj, key, parent);
  if (!v.is_string()) fail(join(parent, key), "expected a string");
  return v.get<std::string>();
}

inline const nlohmann::json& array(const nlohmann::json& obj, const std::string& key,
                                   const std::string& parent) {
  const auto& v = member(obj, key, parent);
  if (!v.is_array()) fail(join(parent, key), "expected an array");
  return v;
}

inline Point point(const nlohmann::json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected an [x, y] pair");
  return Point{number(v[0], index(path, 0)), number(v[1], index(path, 1))};
}

// [[x, y], [x, y]]
inline std::pair<Point, Point> point_pair(const nlohmann::json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected two [x, y] points");
  return {point(v[0], index(path, 0)), point(v[1], index(path, 1))};
}

}  // namespace lanescan::json_fields
