#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace gips {

enum class AttrKind { Int, Real, Bool, String };

// Attribute value. Real attributes always hold a double, even when written as
// an integer literal.
using Value = std::variant<std::int64_t, double, bool, std::string>;

AttrKind kind_of(const Value& v);
std::string_view kind_name(AttrKind kind);
std::optional<AttrKind> parse_kind(std::string_view name);

bool is_numeric(AttrKind kind);

// Numeric view of an int or real value. Throws TypeError otherwise.
double as_number(const Value& v);

// Converts `v` to the declared kind when the conversion is lossless
// (int -> real only). Returns nullopt if the kinds are incompatible.
std::optional<Value> coerce(const Value& v, AttrKind declared);

Value default_value(AttrKind kind);

// Deterministic text form: ints in decimal, reals in shortest round-trip form,
// bools as true/false, strings verbatim.
std::string to_string(const Value& v);

// Shortest round-trip representation of a double.
std::string format_double(double x);

}  // namespace gips
