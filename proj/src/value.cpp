#include "gips/value.hpp"

#include <charconv>
#include <cmath>

#include "gips/errors.hpp"

namespace gips {

AttrKind kind_of(const Value& v) {
  switch (v.index()) {
    case 0: return AttrKind::Int;
    case 1: return AttrKind::Real;
    case 2: return AttrKind::Bool;
    default: return AttrKind::String;
  }
}

std::string_view kind_name(AttrKind kind) {
  switch (kind) {
    case AttrKind::Int: return "int";
    case AttrKind::Real: return "real";
    case AttrKind::Bool: return "bool";
    case AttrKind::String: return "string";
  }
  return "?";
}

std::optional<AttrKind> parse_kind(std::string_view name) {
  if (name == "int") return AttrKind::Int;
  if (name == "real") return AttrKind::Real;
  if (name == "bool") return AttrKind::Bool;
  if (name == "string") return AttrKind::String;
  return std::nullopt;
}

bool is_numeric(AttrKind kind) { return kind == AttrKind::Int || kind == AttrKind::Real; }

double as_number(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw TypeError("expected a numeric value, got " + std::string(kind_name(kind_of(v))));
}

std::optional<Value> coerce(const Value& v, AttrKind declared) {
  const AttrKind actual = kind_of(v);
  if (actual == declared) return v;
  if (actual == AttrKind::Int && declared == AttrKind::Real) {
    return Value{static_cast<double>(std::get<std::int64_t>(v))};
  }
  return std::nullopt;
}

Value default_value(AttrKind kind) {
  switch (kind) {
    case AttrKind::Int: return std::int64_t{0};
    case AttrKind::Real: return 0.0;
    case AttrKind::Bool: return false;
    case AttrKind::String: return std::string{};
  }
  return std::int64_t{0};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_string(const Value& v) {
  switch (kind_of(v)) {
    case AttrKind::Int: return std::to_string(std::get<std::int64_t>(v));
    case AttrKind::Real: return format_double(std::get<double>(v));
    case AttrKind::Bool: return std::get<bool>(v) ? "true" : "false";
    case AttrKind::String: return std::get<std::string>(v);
  }
  return {};
}

}  // namespace gips
