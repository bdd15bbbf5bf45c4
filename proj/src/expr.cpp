#include "gips/expr.hpp"

#include <algorithm>
#include <cmath>

#include "gips/errors.hpp"

namespace gips {

struct Expr::Node {
  Kind kind = Kind::Literal;
  SourceSpan span;
  Value value = std::int64_t{0};
  AttrRef ref;
  BinaryOp op = BinaryOp::Add;
  std::vector<Expr> children;
  std::string fn;
};

Expr::Expr() : node_(std::make_shared<const Node>()) {}
Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::literal(Value v, SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Literal;
  n->value = std::move(v);
  n->span = span;
  return Expr(std::move(n));
}

Expr Expr::attr(AttrRef ref, SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Attr;
  n->ref = std::move(ref);
  n->span = span;
  return Expr(std::move(n));
}

Expr Expr::neg(Expr operand, SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Neg;
  n->children.push_back(std::move(operand));
  n->span = span;
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs, SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->children.push_back(std::move(lhs));
  n->children.push_back(std::move(rhs));
  n->span = span;
  return Expr(std::move(n));
}

Expr Expr::call(std::string fn, std::vector<Expr> args, SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->fn = std::move(fn);
  n->children = std::move(args);
  n->span = span;
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
const SourceSpan& Expr::span() const { return node_->span; }
const Value& Expr::value() const { return node_->value; }
const AttrRef& Expr::ref() const { return node_->ref; }
BinaryOp Expr::op() const { return node_->op; }
const Expr& Expr::lhs() const { return node_->children.at(0); }
const Expr& Expr::rhs() const { return node_->children.at(1); }
const std::string& Expr::fn() const { return node_->fn; }
const std::vector<Expr>& Expr::args() const { return node_->children; }

void Expr::for_each_ref(
    const std::function<void(const AttrRef&, const SourceSpan&)>& visit) const {
  if (node_->kind == Kind::Attr) visit(node_->ref, node_->span);
  for (const auto& c : node_->children) c.for_each_ref(visit);
}

bool Expr::has_refs() const {
  bool found = false;
  for_each_ref([&](const AttrRef&, const SourceSpan&) { found = true; });
  return found;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expr::Kind::Literal: return x.value == y.value;
    case Expr::Kind::Attr: return x.ref == y.ref;
    case Expr::Kind::Neg: return x.children == y.children;
    case Expr::Kind::Binary: return x.op == y.op && x.children == y.children;
    case Expr::Kind::Call: return x.fn == y.fn && x.children == y.children;
  }
  return false;
}

std::string_view op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
  }
  return "?";
}

std::string_view op_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

std::string to_string(const AttrRef& ref) {
  return (ref.context ? "ctx." : "") + ref.var + "." + ref.attr;
}

namespace {

std::string literal_source(const Value& v) {
  switch (kind_of(v)) {
    case AttrKind::Int: return std::to_string(std::get<std::int64_t>(v));
    case AttrKind::Real: {
      std::string s = format_double(std::get<double>(v));
      if (s.find_first_of(".eni") == std::string::npos) s += ".0";
      return s;
    }
    case AttrKind::Bool: return std::get<bool>(v) ? "true" : "false";
    case AttrKind::String: {
      std::string out = "\"";
      for (char c : std::get<std::string>(v)) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
  }
  return {};
}

}  // namespace

std::string to_source(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Literal: return literal_source(e.value());
    case Expr::Kind::Attr: return to_string(e.ref());
    case Expr::Kind::Neg: return "-(" + to_source(e.lhs()) + ")";
    case Expr::Kind::Binary:
      return "(" + to_source(e.lhs()) + " " + std::string(op_symbol(e.op())) + " " +
             to_source(e.rhs()) + ")";
    case Expr::Kind::Call: {
      std::string out = e.fn() + "(";
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        if (i) out += ", ";
        out += to_source(e.args()[i]);
      }
      return out + ")";
    }
  }
  return {};
}

Value evaluate(const Expr& e, const AttrResolver& resolve) {
  switch (e.kind()) {
    case Expr::Kind::Literal: return e.value();
    case Expr::Kind::Attr: return resolve(e.ref());
    case Expr::Kind::Neg: {
      Value v = evaluate(e.lhs(), resolve);
      if (auto* i = std::get_if<std::int64_t>(&v)) return -*i;
      return -as_number(v);
    }
    case Expr::Kind::Binary: {
      const Value a = evaluate(e.lhs(), resolve);
      const Value b = evaluate(e.rhs(), resolve);
      const auto* ia = std::get_if<std::int64_t>(&a);
      const auto* ib = std::get_if<std::int64_t>(&b);
      if (ia && ib && e.op() != BinaryOp::Div) {
        switch (e.op()) {
          case BinaryOp::Add: return *ia + *ib;
          case BinaryOp::Sub: return *ia - *ib;
          case BinaryOp::Mul: return *ia * *ib;
          case BinaryOp::Div: break;
        }
      }
      const double x = as_number(a);
      const double y = as_number(b);
      switch (e.op()) {
        case BinaryOp::Add: return x + y;
        case BinaryOp::Sub: return x - y;
        case BinaryOp::Mul: return x * y;
        case BinaryOp::Div:
          if (y == 0.0) throw DivisionByZero("division by zero in " + to_source(e));
          return x / y;
      }
      break;
    }
    case Expr::Kind::Call: {
      const bool is_min = e.fn() == "min";
      if (!is_min && e.fn() != "max") throw TypeError("unknown function '" + e.fn() + "'");
      if (e.args().empty()) throw TypeError(e.fn() + "() needs arguments");
      Value best = evaluate(e.args().front(), resolve);
      bool all_int = kind_of(best) == AttrKind::Int;
      double best_num = as_number(best);
      for (std::size_t i = 1; i < e.args().size(); ++i) {
        Value v = evaluate(e.args()[i], resolve);
        const double n = as_number(v);
        all_int = all_int && kind_of(v) == AttrKind::Int;
        if (is_min ? n < best_num : n > best_num) {
          best_num = n;
          best = v;
        }
      }
      if (all_int) return best;
      return best_num;
    }
  }
  throw TypeError("malformed expression");
}

double evaluate_number(const Expr& e, const AttrResolver& resolve) {
  return as_number(evaluate(e, resolve));
}

bool compare(const Value& a, CmpOp op, const Value& b) {
  const AttrKind ka = kind_of(a);
  const AttrKind kb = kind_of(b);
  int cmp = 0;
  if (is_numeric(ka) && is_numeric(kb)) {
    const double x = as_number(a);
    const double y = as_number(b);
    cmp = x < y ? -1 : (x > y ? 1 : 0);
  } else if (ka == AttrKind::Bool && kb == AttrKind::Bool) {
    cmp = static_cast<int>(std::get<bool>(a)) - static_cast<int>(std::get<bool>(b));
  } else if (ka == AttrKind::String && kb == AttrKind::String) {
    const int c = std::get<std::string>(a).compare(std::get<std::string>(b));
    cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
  } else {
    throw TypeError("cannot compare " + std::string(kind_name(ka)) + " with " +
                    std::string(kind_name(kb)));
  }
  switch (op) {
    case CmpOp::Lt: return cmp < 0;
    case CmpOp::Le: return cmp <= 0;
    case CmpOp::Eq: return cmp == 0;
    case CmpOp::Ne: return cmp != 0;
    case CmpOp::Ge: return cmp >= 0;
    case CmpOp::Gt: return cmp > 0;
  }
  return false;
}

void check_comparable(AttrKind a, CmpOp op, AttrKind b) {
  if (is_numeric(a) && is_numeric(b)) return;
  if (a == b) return;
  throw TypeError("kind mismatch: cannot compare " + std::string(kind_name(a)) + " " +
                  std::string(op_symbol(op)) + " " + std::string(kind_name(b)));
}

AttrKind infer_kind(const Expr& e, const RefKindFn& ref_kind) {
  auto require_numeric = [&](AttrKind k, const Expr& where) {
    if (!is_numeric(k)) {
      throw TypeError("kind mismatch: " + std::string(kind_name(k)) +
                      " operand in arithmetic expression " + to_source(where));
    }
  };
  switch (e.kind()) {
    case Expr::Kind::Literal: return kind_of(e.value());
    case Expr::Kind::Attr: return ref_kind(e.ref(), e.span());
    case Expr::Kind::Neg: {
      const AttrKind k = infer_kind(e.lhs(), ref_kind);
      require_numeric(k, e);
      return k;
    }
    case Expr::Kind::Binary: {
      const AttrKind a = infer_kind(e.lhs(), ref_kind);
      const AttrKind b = infer_kind(e.rhs(), ref_kind);
      require_numeric(a, e);
      require_numeric(b, e);
      if (e.op() == BinaryOp::Div) return AttrKind::Real;
      return (a == AttrKind::Int && b == AttrKind::Int) ? AttrKind::Int : AttrKind::Real;
    }
    case Expr::Kind::Call: {
      if (e.fn() != "min" && e.fn() != "max") {
        throw TypeError("unknown function '" + e.fn() + "'");
      }
      if (e.args().empty()) throw TypeError(e.fn() + "() needs arguments");
      bool all_int = true;
      for (const auto& arg : e.args()) {
        const AttrKind k = infer_kind(arg, ref_kind);
        require_numeric(k, e);
        all_int = all_int && k == AttrKind::Int;
      }
      return all_int ? AttrKind::Int : AttrKind::Real;
    }
  }
  throw TypeError("malformed expression");
}

}  // namespace gips
