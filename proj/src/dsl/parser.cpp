#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "gips/dsl/spec.hpp"
#include "gips/errors.hpp"

namespace gips::dsl {

const match::Pattern* Spec::find_pattern(std::string_view name) const {
  for (const auto& p : patterns)
    if (p.name == name) return &p;
  return nullptr;
}

const RuleDecl* Spec::find_rule(std::string_view name) const {
  for (const auto& r : rules)
    if (r.rule.name == name) return &r;
  return nullptr;
}

const MappingDecl* Spec::find_mapping(std::string_view name) const {
  for (const auto& m : mappings)
    if (m.name == name) return &m;
  return nullptr;
}

const match::Pattern* Spec::target_pattern(std::string_view target) const {
  if (const auto* p = find_pattern(target)) return p;
  if (const auto* r = find_rule(target)) return &r->rule.lhs;
  return nullptr;
}

std::string format(const Diagnostic& d) {
  return std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " +
         (d.severity == Severity::Error ? "error: " : "warning: ") + d.message;
}

bool ParseResult::ok() const {
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

enum class T { Ident, Int, Real, String, Punct, End };

struct Token {
  T kind = T::End;
  std::string text;
  SourceSpan span;
  std::int64_t ival = 0;
  double rval = 0.0;
};

const std::set<std::string, std::less<>> kKeywords = {
    "metamodel", "pattern", "rule",   "lhs",    "do",    "mapping", "to",    "constraint",
    "forEach",   "minimize", "maximize", "require", "link", "from",    "create", "delete",
    "set",       "sum",     "where",  "and",    "ctx",   "true",    "false"};

const std::set<std::string, std::less<>> kTopLevel = {"metamodel", "pattern",  "rule",    "mapping",
                                                      "constraint", "minimize", "maximize"};

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view text, std::vector<Diagnostic>& diags) : s_(text), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.span = here();
      if (pos_ >= s_.size()) {
        t.kind = T::End;
        out.push_back(t);
        return out;
      }
      const char c = s_[pos_];
      if (is_ident_start(c)) {
        const std::size_t b = pos_;
        while (pos_ < s_.size() && (is_ident_start(s_[pos_]) || is_digit(s_[pos_]))) advance();
        t.kind = T::Ident;
        t.text = std::string(s_.substr(b, pos_ - b));
      } else if (is_digit(c)) {
        number(t);
      } else if (c == '"') {
        string(t);
        if (t.kind == T::End) continue;
      } else {
        static const char* two[] = {"->", ":=", "==", "!=", "<=", ">="};
        bool matched = false;
        for (const char* p : two) {
          if (s_.substr(pos_, 2) == p) {
            t.text = p;
            advance();
            advance();
            matched = true;
            break;
          }
        }
        if (!matched) {
          if (std::string_view("{}():;,.=<>+-*/").find(c) == std::string_view::npos) {
            t.span.length = 1;
            diags_.push_back({Severity::Error, t.span, std::string("unexpected character '") + c + "'"});
            advance();
            continue;
          }
          t.text = std::string(1, c);
          advance();
        }
        t.kind = T::Punct;
      }
      t.span.length = pos_ - t.span.offset;
      out.push_back(std::move(t));
    }
  }

 private:
  SourceSpan here() const { return {pos_, 0, line_, col_}; }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '/') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  void number(Token& t) {
    const std::size_t b = pos_;
    bool real = false;
    while (pos_ < s_.size() && is_digit(s_[pos_])) advance();
    if (pos_ + 1 < s_.size() && s_[pos_] == '.' && is_digit(s_[pos_ + 1])) {
      real = true;
      advance();
      while (pos_ < s_.size() && is_digit(s_[pos_])) advance();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
      if (k < s_.size() && is_digit(s_[k])) {
        real = true;
        while (pos_ < k) advance();
        while (pos_ < s_.size() && is_digit(s_[pos_])) advance();
      }
    }
    t.text = std::string(s_.substr(b, pos_ - b));
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    if (real) {
      t.kind = T::Real;
      auto r = std::from_chars(first, last, t.rval);
      if (r.ec != std::errc()) {
        diags_.push_back({Severity::Error, {b, t.text.size(), t.span.line, t.span.column},
                          "number out of range: " + t.text});
      }
    } else {
      t.kind = T::Int;
      auto r = std::from_chars(first, last, t.ival);
      if (r.ec != std::errc()) {
        diags_.push_back({Severity::Error, {b, t.text.size(), t.span.line, t.span.column},
                          "integer out of range: " + t.text});
      }
    }
  }

  void string(Token& t) {
    advance();
    std::string v;
    while (pos_ < s_.size() && s_[pos_] != '"' && s_[pos_] != '\n') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) advance();
      v += s_[pos_];
      advance();
    }
    if (pos_ >= s_.size() || s_[pos_] != '"') {
      t.span.length = pos_ - t.span.offset;
      diags_.push_back({Severity::Error, t.span, "unterminated string"});
      t.kind = T::End;
      return;
    }
    advance();
    t.kind = T::String;
    t.text = std::move(v);
  }

  std::string_view s_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

struct SyncError {};

using Terms = std::vector<LinearTerm>;

bool is_pure(const Terms& t) { return t.size() == 1 && !t[0].sum; }

bool is_one(const Expr& e) {
  return e.kind() == Expr::Kind::Literal && e.value() == Value{std::int64_t{1}};
}

// Joins two term lists; a trailing constant and a leading constant merge so
// that constants never sit next to each other (keeps printing canonical).
Terms concat(Terms a, Terms b, const SourceSpan& span) {
  if (!a.empty() && !b.empty() && !a.back().sum && !b.front().sum) {
    a.back().coeff = Expr::binary(BinaryOp::Add, a.back().coeff, b.front().coeff, span);
    b.erase(b.begin());
  }
  for (auto& t : b) a.push_back(std::move(t));
  return a;
}

Terms negate(Terms a, const SourceSpan& span) {
  for (auto& t : a) t.coeff = Expr::neg(t.coeff, span);
  return a;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags) : toks_(std::move(tokens)), diags_(diags) {}

  Spec run() {
    Spec spec;
    while (peek().kind != T::End) {
      const std::size_t start = pos_;
      try {
        declaration(spec);
      } catch (const SyncError&) {
        if (pos_ == start) ++pos_;
        while (peek().kind != T::End && !(peek().kind == T::Ident && kTopLevel.count(peek().text))) ++pos_;
      }
    }
    end_span_ = peek().span;
    return spec;
  }

  const SourceSpan& end_span() const { return end_span_; }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& take() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at_punct(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == T::Punct && peek(k).text == p;
  }
  bool at_kw(std::string_view kw) const { return peek().kind == T::Ident && peek().text == kw; }
  bool accept_punct(std::string_view p) {
    if (!at_punct(p)) return false;
    take();
    return true;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case T::End: return "end of input";
      case T::String: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg) {
    diags_.push_back({Severity::Error, at.span, msg});
    throw SyncError{};
  }

  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail(peek(), "expected '" + std::string(p) + "', found " + describe(peek()));
  }
  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail(peek(), "expected '" + std::string(kw) + "', found " + describe(peek()));
    take();
  }
  std::string expect_ident(const char* what) {
    const Token& t = peek();
    if (t.kind != T::Ident) fail(t, std::string("expected ") + what + ", found " + describe(t));
    if (kKeywords.count(t.text)) fail(t, std::string("expected ") + what + ", found keyword '" + t.text + "'");
    take();
    return t.text;
  }

  // Skips the rest of a broken body item; rethrows at a top-level keyword.
  void recover_item() {
    while (peek().kind != T::End) {
      if (at_punct(";")) {
        take();
        return;
      }
      if (at_punct("}")) return;
      if (peek().kind == T::Ident && kTopLevel.count(peek().text)) throw SyncError{};
      take();
    }
    throw SyncError{};
  }

  void declaration(Spec& spec) {
    const Token& head = peek();
    if (head.kind != T::Ident || !kTopLevel.count(head.text)) {
      fail(head, "expected a declaration (pattern, rule, mapping, constraint, minimize, maximize), found " +
                     describe(head));
    }
    const std::string kw = take().text;
    const SourceSpan span = head.span;
    if (kw == "metamodel") {
      if (peek().kind != T::String) fail(peek(), "expected metamodel name string, found " + describe(peek()));
      spec.metamodel = take().text;
    } else if (kw == "pattern") {
      match::Pattern p;
      p.span = span;
      p.name = expect_ident("pattern name");
      expect_punct("{");
      pattern_body(p);
      expect_punct("}");
      spec.patterns.push_back(std::move(p));
    } else if (kw == "rule") {
      spec.rules.push_back(rule_decl(span));
    } else if (kw == "mapping") {
      MappingDecl m;
      m.span = span;
      m.name = expect_ident("mapping name");
      expect_kw("to");
      m.target = expect_ident("rule or pattern name");
      spec.mappings.push_back(std::move(m));
    } else if (kw == "constraint") {
      ConstraintDecl c;
      c.span = span;
      if (at_kw("forEach")) {
        take();
        c.for_each = expect_ident("pattern or rule name");
      }
      expect_punct(":");
      c.lhs.terms = linear();
      const Token& rel = peek();
      if (at_punct("<=")) {
        c.relation = Relation::Le;
      } else if (at_punct(">=")) {
        c.relation = Relation::Ge;
      } else if (at_punct("=") || at_punct("==")) {
        c.relation = Relation::Eq;
      } else {
        fail(rel, "expected '<=', '>=' or '=', found " + describe(rel));
      }
      take();
      c.rhs.terms = linear();
      spec.constraints.push_back(std::move(c));
    } else {
      ObjectiveDecl o;
      o.span = span;
      o.maximize = kw == "maximize";
      expect_punct(":");
      o.expr.terms = linear();
      if (spec.objective) {
        diags_.push_back({Severity::Error, span, "more than one objective"});
      } else {
        spec.objective = std::move(o);
      }
    }
    accept_punct(";");
  }

  void pattern_body(match::Pattern& p) {
    while (!at_punct("}") && peek().kind != T::End) {
      try {
        pattern_item(p);
        accept_punct(";");
      } catch (const SyncError&) {
        recover_item();
      }
    }
  }

  void pattern_item(match::Pattern& p) {
    const SourceSpan span = peek().span;
    if (at_kw("link")) {
      take();
      std::string var = expect_ident("link variable");
      expect_punct(":");
      std::string type = expect_ident("link type");
      expect_kw("from");
      std::string from = expect_ident("variable");
      expect_kw("to");
      std::string to = expect_ident("variable");
      match::add_link(p, std::move(var), std::move(type), std::move(from), std::move(to), span);
    } else if (at_kw("require")) {
      take();
      Expr lhs = plain_expr();
      const CmpOp op = cmp_op();
      Expr rhs = plain_expr();
      p.conditions.push_back({std::move(lhs), op, std::move(rhs), span});
    } else {
      std::string var = expect_ident("variable, 'link' or 'require'");
      if (accept_punct(":")) {
        p.nodes.push_back({std::move(var), expect_ident("node type"), span});
      } else if (accept_punct("-")) {
        std::string type = expect_ident("edge type");
        expect_punct("->");
        p.edges.push_back({std::move(type), std::move(var), expect_ident("variable"), span});
      } else {
        fail(peek(), "expected ':' or '-' after '" + var + "', found " + describe(peek()));
      }
    }
  }

  CmpOp cmp_op() {
    const Token& t = peek();
    if (t.kind == T::Punct) {
      static const std::map<std::string, CmpOp, std::less<>> ops = {
          {"<", CmpOp::Lt}, {"<=", CmpOp::Le}, {"=", CmpOp::Eq}, {"==", CmpOp::Eq},
          {"!=", CmpOp::Ne}, {">=", CmpOp::Ge}, {">", CmpOp::Gt}};
      auto it = ops.find(t.text);
      if (it != ops.end()) {
        take();
        return it->second;
      }
    }
    fail(t, "expected a comparison operator, found " + describe(t));
  }

  RuleDecl rule_decl(const SourceSpan& span) {
    RuleDecl d;
    d.rule.span = span;
    d.rule.name = expect_ident("rule name");
    expect_punct("{");
    expect_kw("lhs");
    if (accept_punct("{")) {
      d.rule.lhs.name = d.rule.name;
      d.rule.lhs.span = span;
      pattern_body(d.rule.lhs);
      expect_punct("}");
    } else {
      d.lhs_pattern = expect_ident("pattern name or '{'");
    }
    accept_punct(";");
    expect_kw("do");
    expect_punct("{");
    while (!at_punct("}") && peek().kind != T::End) {
      try {
        action(d.rule.actions);
        accept_punct(";");
      } catch (const SyncError&) {
        recover_item();
      }
    }
    expect_punct("}");
    accept_punct(";");
    expect_punct("}");
    return d;
  }

  std::vector<rule::AttrInit> inits() {
    std::vector<rule::AttrInit> out;
    if (!accept_punct("{")) return out;
    if (accept_punct("}")) return out;
    do {
      std::string attr = expect_ident("attribute name");
      expect_punct("=");
      out.push_back({std::move(attr), plain_expr()});
    } while (accept_punct(","));
    expect_punct("}");
    return out;
  }

  void action(std::vector<rule::Action>& out) {
    const SourceSpan span = peek().span;
    if (at_kw("create")) {
      take();
      if (at_kw("link")) {
        take();
        std::string var = expect_ident("link variable");
        expect_punct(":");
        std::string type = expect_ident("link type");
        expect_kw("from");
        std::string from = expect_ident("variable");
        expect_kw("to");
        std::string to = expect_ident("variable");
        out.push_back(rule::action::CreateNode{var, std::move(type), inits(), span});
        out.push_back(rule::action::CreateEdge{"source", var, std::move(from), span});
        out.push_back(rule::action::CreateEdge{"target", var, std::move(to), span});
        return;
      }
      std::string var = expect_ident("variable or 'link'");
      if (accept_punct(":")) {
        std::string type = expect_ident("node type");
        out.push_back(rule::action::CreateNode{std::move(var), std::move(type), inits(), span});
      } else if (accept_punct("-")) {
        std::string type = expect_ident("edge type");
        expect_punct("->");
        out.push_back(rule::action::CreateEdge{std::move(type), std::move(var), expect_ident("variable"), span});
      } else {
        fail(peek(), "expected ':' or '-' after 'create " + var + "', found " + describe(peek()));
      }
    } else if (at_kw("delete")) {
      take();
      std::string var = expect_ident("variable");
      if (accept_punct("-")) {
        std::string type = expect_ident("edge type");
        expect_punct("->");
        out.push_back(rule::action::DeleteEdge{std::move(type), std::move(var), expect_ident("variable"), span});
      } else {
        out.push_back(rule::action::DeleteNode{std::move(var), span});
      }
    } else if (at_kw("set")) {
      take();
      std::string var = expect_ident("variable");
      expect_punct(".");
      std::string attr = expect_ident("attribute name");
      expect_punct(":=");
      out.push_back(rule::action::SetAttr{std::move(var), std::move(attr), plain_expr(), span});
    } else {
      fail(peek(), "expected 'create', 'delete' or 'set', found " + describe(peek()));
    }
  }

  // ---- expressions -------------------------------------------------------

  Expr plain_expr() {
    const Token& start = peek();
    allow_sum_ = false;
    Terms t = additive();
    if (!is_pure(t)) fail(start, "sum(...) is only allowed in constraints and objectives");
    return t.front().coeff;
  }

  Terms linear() {
    allow_sum_ = true;
    Terms t = additive();
    allow_sum_ = false;
    return t;
  }

  Terms additive() {
    Terms acc = multiplicative();
    while (at_punct("+") || at_punct("-")) {
      const Token& op = take();
      Terms rhs = multiplicative();
      if (is_pure(acc) && is_pure(rhs)) {
        acc.front().coeff = Expr::binary(op.text == "+" ? BinaryOp::Add : BinaryOp::Sub, acc.front().coeff,
                                         rhs.front().coeff, op.span);
      } else if (op.text == "+") {
        acc = concat(std::move(acc), std::move(rhs), op.span);
      } else {
        acc = concat(std::move(acc), negate(std::move(rhs), op.span), op.span);
      }
    }
    return acc;
  }

  Terms multiplicative() {
    Terms acc = unary();
    while (at_punct("*") || at_punct("/")) {
      const Token& op = take();
      Terms rhs = unary();
      const bool mul = op.text == "*";
      if (is_pure(acc) && is_pure(rhs)) {
        acc.front().coeff = Expr::binary(mul ? BinaryOp::Mul : BinaryOp::Div, acc.front().coeff,
                                         rhs.front().coeff, op.span);
      } else if (!is_pure(rhs)) {
        if (!mul) fail(op, "division by an expression containing sum(...) is not linear");
        if (!is_pure(acc)) fail(op, "product of two sums is not linear");
        const Expr& k = acc.front().coeff;
        for (auto& t : rhs) t.coeff = is_one(t.coeff) ? k : Expr::binary(BinaryOp::Mul, k, t.coeff, op.span);
        acc = std::move(rhs);
      } else {
        const Expr& k = rhs.front().coeff;
        for (auto& t : acc) {
          if (mul) {
            t.coeff = is_one(t.coeff) ? k : Expr::binary(BinaryOp::Mul, t.coeff, k, op.span);
          } else {
            t.coeff = Expr::binary(BinaryOp::Div, t.coeff, k, op.span);
          }
        }
      }
    }
    return acc;
  }

  Terms unary() {
    if (at_punct("-")) {
      const Token& op = take();
      Terms t = unary();
      if (is_pure(t)) {
        t.front().coeff = Expr::neg(t.front().coeff, op.span);
        return t;
      }
      return negate(std::move(t), op.span);
    }
    return primary();
  }

  static Terms pure(Expr e, const SourceSpan& span) { return {LinearTerm{std::move(e), std::nullopt, span}}; }

  Terms primary() {
    const Token& t = peek();
    switch (t.kind) {
      case T::Int: take(); return pure(Expr::literal(t.ival, t.span), t.span);
      case T::Real: take(); return pure(Expr::literal(t.rval, t.span), t.span);
      case T::String: take(); return pure(Expr::literal(t.text, t.span), t.span);
      case T::End: fail(t, "expected an expression, found end of input");
      case T::Punct:
        if (t.text == "(") {
          take();
          Terms inner = additive();
          expect_punct(")");
          return inner;
        }
        fail(t, "expected an expression, found " + describe(t));
      case T::Ident: break;
    }
    if (t.text == "true" || t.text == "false") {
      take();
      return pure(Expr::literal(t.text == "true", t.span), t.span);
    }
    if (t.text == "sum") return sum_term();
    if (t.text == "ctx") {
      take();
      expect_punct(".");
      std::string var = expect_ident("context variable");
      expect_punct(".");
      std::string attr = expect_ident("attribute name");
      return pure(Expr::attr({true, std::move(var), std::move(attr)}, t.span), t.span);
    }
    std::string name = expect_ident("expression");
    if (accept_punct("(")) {
      if (name != "min" && name != "max") fail(t, "unknown function '" + name + "'");
      std::vector<Expr> args;
      const bool saved = allow_sum_;
      do {
        const Token& at = peek();
        Terms a = additive();
        if (!is_pure(a)) fail(at, "sum(...) inside " + name + "() is not linear");
        args.push_back(a.front().coeff);
      } while (accept_punct(","));
      allow_sum_ = saved;
      expect_punct(")");
      if (args.size() < 2) fail(t, name + "() needs at least two arguments");
      return pure(Expr::call(name, std::move(args), t.span), t.span);
    }
    if (!accept_punct(".")) fail(peek(), "expected '.' after '" + name + "' (attribute reference var.attr)");
    std::string attr = expect_ident("attribute name");
    return pure(Expr::attr({false, std::move(name), std::move(attr)}, t.span), t.span);
  }

  Terms sum_term() {
    const Token& t = take();
    if (!allow_sum_) fail(t, "sum(...) is only allowed in constraints and objectives");
    expect_punct("(");
    SumRef ref;
    ref.span = t.span;
    ref.mapping = expect_ident("mapping name");
    if (at_kw("where")) {
      take();
      do {
        Filter f;
        f.span = peek().span;
        f.var = expect_ident("variable");
        if (!accept_punct("==") && !accept_punct("=")) fail(peek(), "expected '==' in filter, found " + describe(peek()));
        expect_kw("ctx");
        expect_punct(".");
        f.ctx_var = expect_ident("context variable");
        ref.filters.push_back(std::move(f));
      } while (at_kw("and") && (take(), true));
    }
    expect_punct(")");
    const SourceSpan& close = toks_[pos_ - 1].span;
    ref.span.length = close.offset + close.length - ref.span.offset;
    const SourceSpan span = ref.span;
    return {LinearTerm{Expr::literal(std::int64_t{1}, t.span), std::move(ref), span}};
  }

  std::vector<Token> toks_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  bool allow_sum_ = false;
  SourceSpan end_span_;
};

class Resolver {
 public:
  Resolver(Spec& spec, std::vector<Diagnostic>& diags) : spec_(spec), diags_(diags) {}

  void run(const SourceSpan& end) {
    std::map<std::string, SourceSpan> names;
    auto claim = [&](const std::string& name, const SourceSpan& span, const char* what) {
      if (!names.emplace(name, span).second) {
        error(span, std::string("duplicate ") + what + " name '" + name + "'");
      }
    };
    for (const auto& p : spec_.patterns) claim(p.name, p.span, "pattern");
    for (const auto& r : spec_.rules) claim(r.rule.name, r.rule.span, "rule");
    std::set<std::string> mapping_names;
    for (const auto& m : spec_.mappings) {
      if (!mapping_names.insert(m.name).second) error(m.span, "duplicate mapping name '" + m.name + "'");
    }

    for (auto& r : spec_.rules) {
      if (!r.lhs_pattern) continue;
      if (const auto* p = spec_.find_pattern(*r.lhs_pattern)) {
        r.rule.lhs = *p;
      } else {
        error(r.rule.span, "rule " + r.rule.name + ": unknown pattern '" + *r.lhs_pattern + "'");
      }
    }
    for (const auto& m : spec_.mappings) {
      if (!spec_.target_pattern(m.target)) {
        error(m.span, "mapping " + m.name + ": unknown rule or pattern '" + m.target + "'");
      }
    }
    for (const auto& c : spec_.constraints) {
      const match::Pattern* ctx = nullptr;
      if (c.for_each) {
        ctx = spec_.target_pattern(*c.for_each);
        if (!ctx) {
          error(c.span, "forEach: unknown rule or pattern '" + *c.for_each + "'");
          continue;
        }
      }
      linear(c.lhs, ctx);
      linear(c.rhs, ctx);
    }
    if (!spec_.objective) {
      error(end, "missing objective (minimize: ... or maximize: ...)");
    } else {
      linear(spec_.objective->expr, nullptr);
    }
  }

 private:
  void error(const SourceSpan& span, std::string msg) { diags_.push_back({Severity::Error, span, std::move(msg)}); }

  void linear(const LinearExpr& e, const match::Pattern* ctx) {
    for (const auto& t : e.terms) {
      const match::Pattern* summed = nullptr;
      if (t.sum) {
        const MappingDecl* m = spec_.find_mapping(t.sum->mapping);
        if (!m) {
          error(t.sum->span, "unknown mapping '" + t.sum->mapping + "'");
        } else {
          summed = spec_.target_pattern(m->target);
        }
        for (const auto& f : t.sum->filters) {
          if (summed && !summed->find_var(f.var)) {
            error(f.span, "mapping " + t.sum->mapping + " binds no variable '" + f.var + "'");
          }
          if (!ctx) {
            error(f.span, "ctx." + f.ctx_var + " used outside a forEach constraint");
          } else if (!ctx->find_var(f.ctx_var)) {
            error(f.span, "context binds no variable '" + f.ctx_var + "'");
          }
        }
      }
      t.coeff.for_each_ref([&](const AttrRef& ref, const SourceSpan& span) {
        if (ref.context) {
          if (!ctx) {
            error(span, to_string(ref) + " used outside a forEach constraint");
          } else if (!ctx->find_var(ref.var)) {
            error(span, "context binds no variable '" + ref.var + "'");
          }
        } else if (!t.sum) {
          error(span, to_string(ref) + ": constant terms may only read ctx attributes");
        } else if (summed && !summed->find_var(ref.var)) {
          error(span, "mapping " + t.sum->mapping + " binds no variable '" + ref.var + "'");
        }
      });
    }
  }

  Spec& spec_;
  std::vector<Diagnostic>& diags_;
};

}  // namespace

ParseResult parse(std::string_view text) {
  ParseResult out;
  auto tokens = Lexer(text, out.diagnostics).run();
  Parser parser(std::move(tokens), out.diagnostics);
  out.spec = parser.run();
  Resolver(out.spec, out.diagnostics).run(parser.end_span());
  return out;
}

Spec load_spec(std::string_view text, const graph::Metamodel& metamodel) {
  ParseResult r = parse(text);
  auto join = [](const std::vector<Diagnostic>& ds) {
    std::string s;
    for (const auto& d : ds) s += (s.empty() ? "" : "\n") + format(d);
    return s;
  };
  if (!r.ok()) throw ParseError(join(r.diagnostics));
  auto diags = typecheck(r.spec, metamodel);
  if (!diags.empty()) throw TypeError(join(diags));
  return std::move(r.spec);
}

}  // namespace gips::dsl
