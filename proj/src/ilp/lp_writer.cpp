#include <map>
#include <string>

#include "gips/errors.hpp"
#include "gips/ilp/problem.hpp"
#include "gips/value.hpp"

namespace gips::ilp {

std::string sanitize_lp_name(std::string_view id) {
  std::string out;
  out.reserve(id.size() + 1);
  for (char ch : id) {
    const bool ok = (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') ||
                    ch == '_' || ch == '.';
    out.push_back(ok ? ch : '_');
  }
  if (out.empty() || (out[0] >= '0' && out[0] <= '9') || out[0] == '.') out.insert(out.begin(), '_');
  return out;
}

namespace {

constexpr std::size_t kMaxLine = 200;

class LineWriter {
 public:
  explicit LineWriter(std::string& out) : out_(out) {}
  void start(std::string_view head) {
    out_ += head;
    width_ = head.size();
  }
  void piece(const std::string& s) {
    if (width_ + s.size() > kMaxLine && width_ > 0) {
      out_ += "\n ";
      width_ = 1;
      out_ += s.substr(1);
      width_ += s.size() - 1;
      return;
    }
    out_ += s;
    width_ += s.size();
  }
  void end() {
    out_ += '\n';
    width_ = 0;
  }

 private:
  std::string& out_;
  std::size_t width_ = 0;
};

// Each piece starts with a space so it can be moved to a continuation line.
std::string term_piece(double coeff, const std::string& name, bool first) {
  std::string s = " ";
  const bool neg = coeff < 0.0;
  const double mag = neg ? -coeff : coeff;
  if (neg) {
    s += "- ";
  } else if (!first) {
    s += "+ ";
  }
  if (mag != 1.0) s += format_double(mag) + " ";
  s += name;
  return s;
}

}  // namespace

std::string write_lp(const IlpProblem& problem) {
  std::vector<std::string> names;
  std::map<std::string, std::string> seen;
  for (const auto& id : problem.vars()) {
    std::string n = sanitize_lp_name(id);
    auto [it, fresh] = seen.emplace(n, id);
    if (!fresh) throw NameCollision("variables '" + it->second + "' and '" + id + "' both map to LP name '" + n + "'");
    names.push_back(std::move(n));
  }

  std::string out;
  LineWriter w(out);
  out += problem.sense() == Sense::Minimize ? "Minimize\n" : "Maximize\n";
  w.start(" obj:");
  bool first = true;
  for (std::size_t j = 0; j < names.size(); ++j) {
    const double c = problem.objective()[j];
    if (c == 0.0) continue;
    w.piece(term_piece(c, names[j], first));
    first = false;
  }
  const double offset = problem.objective_offset();
  if (offset != 0.0) {
    w.piece(std::string(first ? " " : (offset < 0 ? " - " : " + ")) +
            format_double(first ? offset : (offset < 0 ? -offset : offset)));
    first = false;
  }
  if (first) w.piece(" 0");
  w.end();

  out += "Subject To\n";
  std::size_t k = 0;
  for (const auto& c : problem.constraints()) {
    ++k;
    if (c.terms.empty() && names.empty()) continue;
    std::string label = c.name.empty() ? "c" + std::to_string(k) : sanitize_lp_name(c.name);
    w.start(" " + label + ":");
    bool f = true;
    for (const auto& t : c.terms) {
      w.piece(term_piece(t.coeff, names[t.var], f));
      f = false;
    }
    if (f) w.piece(" 0 " + names.front());
    w.piece(" " + std::string(to_string(c.relation)) + " " + format_double(c.rhs));
    w.end();
  }
  if (!names.empty()) {
    out += "Bounds\n";
    for (const auto& n : names) out += " 0 <= " + n + " <= 1\n";
    out += "Binaries\n";
    w.start("");
    for (const auto& n : names) w.piece(" " + n);
    w.end();
  }
  out += "End\n";
  return out;
}

}  // namespace gips::ilp
