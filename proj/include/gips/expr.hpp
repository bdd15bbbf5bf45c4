#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gips/source_span.hpp"
#include "gips/value.hpp"

namespace gips {

enum class BinaryOp { Add, Sub, Mul, Div };
enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };

std::string_view op_symbol(BinaryOp op);
std::string_view op_symbol(CmpOp op);

// `var.attr` reads an attribute of a node bound to a pattern variable;
// `ctx.var.attr` reads from the binding of an enclosing forEach context.
struct AttrRef {
  bool context = false;
  std::string var;
  std::string attr;

  friend bool operator==(const AttrRef&, const AttrRef&) = default;
};

std::string to_string(const AttrRef& ref);

// Immutable arithmetic expression tree with value semantics (nodes are
// shared, never mutated).
class Expr {
 public:
  enum class Kind { Literal, Attr, Neg, Binary, Call };

  Expr();  // literal int 0

  static Expr literal(Value v, SourceSpan span = {});
  static Expr attr(AttrRef ref, SourceSpan span = {});
  static Expr neg(Expr operand, SourceSpan span = {});
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, SourceSpan span = {});
  // Supported functions: min, max (two or more arguments).
  static Expr call(std::string fn, std::vector<Expr> args, SourceSpan span = {});

  Kind kind() const;
  const SourceSpan& span() const;
  const Value& value() const;            // Literal
  const AttrRef& ref() const;            // Attr
  BinaryOp op() const;                   // Binary
  const Expr& lhs() const;               // Binary; Neg operand
  const Expr& rhs() const;               // Binary
  const std::string& fn() const;         // Call
  const std::vector<Expr>& args() const; // Call

  // Calls `visit` on every attribute reference in the tree.
  void for_each_ref(const std::function<void(const AttrRef&, const SourceSpan&)>& visit) const;
  bool has_refs() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

// Fully parenthesized source form; re-parses to an equal tree.
std::string to_source(const Expr& e);

using AttrResolver = std::function<Value(const AttrRef&)>;

// Evaluates `e`. Throws DivisionByZero, TypeError, or whatever `resolve`
// throws for unresolvable references.
Value evaluate(const Expr& e, const AttrResolver& resolve);
double evaluate_number(const Expr& e, const AttrResolver& resolve);

bool compare(const Value& a, CmpOp op, const Value& b);

using RefKindFn = std::function<AttrKind(const AttrRef&, const SourceSpan&)>;

// Static kind of `e`. Throws TypeError naming the offending construct.
AttrKind infer_kind(const Expr& e, const RefKindFn& ref_kind);

// Throws TypeError unless the kinds can be compared with `op`.
void check_comparable(AttrKind a, CmpOp op, AttrKind b);

}  // namespace gips
