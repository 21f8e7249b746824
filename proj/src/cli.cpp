#include "gradedcalc/cli.hpp"

#include "gradedcalc/elliptic.hpp"
#include "gradedcalc/spectral.hpp"
#include "gradedcalc/symbolrn.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <iomanip>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace gradedcalc {

namespace {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Expressions

struct Node {
  enum class Kind { Num, I, Atom, Add, Sub, Mul, Neg, Pow };
  Kind kind = Kind::Num;
  Rational num;
  std::string name;
  int index = 0;
  int exponent = 0;
  std::size_t pos = 0;
  std::shared_ptr<Node> a, b;
};
using NodePtr = std::shared_ptr<Node>;

NodePtr make(Node::Kind k, std::size_t pos, NodePtr a = {}, NodePtr b = {}) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->pos = pos;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class ExprParser {
public:
  ExprParser(const std::string& s, std::set<std::string> atoms, int line, int col0)
      : s_(s), atoms_(std::move(atoms)), line_(line), col0_(col0) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (p_ < s_.size()) fail(p_, std::string("unexpected '") + s_[p_] + "'");
    return e;
  }

  [[noreturn]] void fail(std::size_t pos, const std::string& msg) const {
    throw ParseError(line_, col0_ + static_cast<int>(pos), msg);
  }

private:
  void skip() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }
  bool accept(char c) {
    skip();
    if (p_ < s_.size() && s_[p_] == c) {
      ++p_;
      return true;
    }
    return false;
  }
  std::string digits() {
    std::size_t start = p_;
    while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
    return s_.substr(start, p_ - start);
  }

  NodePtr expr() {
    NodePtr left = term();
    for (;;) {
      skip();
      std::size_t at = p_;
      if (accept('+'))
        left = make(Node::Kind::Add, at, left, term());
      else if (accept('-'))
        left = make(Node::Kind::Sub, at, left, term());
      else
        return left;
    }
  }
  NodePtr term() {
    NodePtr left = unary();
    for (;;) {
      skip();
      std::size_t at = p_;
      if (!accept('*')) return left;
      left = make(Node::Kind::Mul, at, left, unary());
    }
  }
  NodePtr unary() {
    skip();
    std::size_t at = p_;
    if (accept('-')) return make(Node::Kind::Neg, at, unary());
    return power();
  }
  NodePtr power() {
    NodePtr base = atom();
    skip();
    std::size_t at = p_;
    if (!accept('^')) return base;
    skip();
    std::string e = digits();
    if (e.empty()) fail(at, "dangling '^': expected an integer exponent");
    NodePtr n = make(Node::Kind::Pow, at, base);
    n->exponent = std::stoi(e);
    return n;
  }
  NodePtr atom() {
    skip();
    std::size_t at = p_;
    if (p_ >= s_.size()) fail(p_, "unexpected end of expression");
    char c = s_[p_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num = digits();
      std::size_t save = p_;
      skip();
      if (p_ < s_.size() && s_[p_] == '/') {
        ++p_;
        skip();
        std::string den = digits();
        if (den.empty()) fail(p_, "expected an integer denominator after '/'");
        if (Rational(den) == 0) fail(p_ - den.size(), "zero denominator");
        num += "/" + den;
      } else {
        p_ = save;
      }
      NodePtr n = make(Node::Kind::Num, at);
      n->num = Rational(num);
      n->num.canonicalize();
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_')) ++p_;
      std::string name = s_.substr(at, p_ - at);
      skip();
      bool call = p_ < s_.size() && s_[p_] == '(';
      if (name == "i" && !call) return make(Node::Kind::I, at);
      if (!atoms_.count(name)) {
        std::string known;
        for (auto& k : atoms_) known += (known.empty() ? "" : ", ") + k + "(j)";
        fail(at, "unknown symbol '" + name + "' (expected " + known + ", i or a rational)");
      }
      if (!accept('(')) fail(p_, "expected '(' after " + name);
      skip();
      std::string idx = digits();
      if (idx.empty()) fail(p_, "expected a positive index");
      if (!accept(')')) fail(p_, "expected ')'");
      NodePtr n = make(Node::Kind::Atom, at);
      n->name = name;
      n->index = std::stoi(idx);
      if (n->index < 1) fail(at, "indices start at 1");
      return n;
    }
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail(p_, "expected ')'");
      return e;
    }
    fail(at, std::string("unexpected '") + c + "'");
  }

  const std::string& s_;
  std::set<std::string> atoms_;
  int line_, col0_;
  std::size_t p_ = 0;
};

int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Add:
    case Node::Kind::Sub: return 1;
    case Node::Kind::Mul: return 2;
    case Node::Kind::Neg: return 3;
    case Node::Kind::Pow: return 4;
    default: return 5;
  }
}

std::string print_node(const Node& n) {
  auto wrap = [](const Node& c, bool paren) { return paren ? "(" + print_node(c) + ")" : print_node(c); };
  switch (n.kind) {
    case Node::Kind::Num: return n.num.get_str();
    case Node::Kind::I: return "i";
    case Node::Kind::Atom: return n.name + "(" + std::to_string(n.index) + ")";
    case Node::Kind::Add: return print_node(*n.a) + " + " + wrap(*n.b, precedence(*n.b) <= 1);
    case Node::Kind::Sub: return print_node(*n.a) + " - " + wrap(*n.b, precedence(*n.b) <= 1);
    case Node::Kind::Mul: return wrap(*n.a, precedence(*n.a) < 2) + "*" + wrap(*n.b, precedence(*n.b) <= 2);
    case Node::Kind::Neg: return "-" + wrap(*n.a, precedence(*n.a) < 3);
    case Node::Kind::Pow: return wrap(*n.a, precedence(*n.a) < 5) + "^" + std::to_string(n.exponent);
  }
  return {};
}

void visit_atoms(const Node& n, const std::function<void(const Node&)>& f) {
  if (n.kind == Node::Kind::Atom) f(n);
  if (n.a) visit_atoms(*n.a, f);
  if (n.b) visit_atoms(*n.b, f);
}

template <class T>
T evaluate(const Node& n, const std::function<T(const Node&)>& atom, const std::function<T(const Gaussian&)>& scalar) {
  auto rec = [&](const Node& c) { return evaluate<T>(c, atom, scalar); };
  switch (n.kind) {
    case Node::Kind::Num: return scalar(Gaussian(n.num));
    case Node::Kind::I: return scalar(Gaussian::i());
    case Node::Kind::Atom: return atom(n);
    case Node::Kind::Add: return rec(*n.a) + rec(*n.b);
    case Node::Kind::Sub: return rec(*n.a) - rec(*n.b);
    case Node::Kind::Mul: return rec(*n.a) * rec(*n.b);
    case Node::Kind::Neg: return scalar(Gaussian(-1)) * rec(*n.a);
    case Node::Kind::Pow: {
      T base = rec(*n.a);
      T r = scalar(Gaussian(1));
      for (int k = 0; k < n.exponent; ++k) r = r * base;
      return r;
    }
  }
  return scalar(Gaussian(0));
}

// A ';'-separated list with the offset of each piece inside the value.
std::vector<std::pair<std::string, std::size_t>> split_list(const std::string& s) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == ';') {
      out.emplace_back(s.substr(start, i - start), start);
      start = i + 1;
    }
  if (out.size() > 1 && out.back().first.find_first_not_of(" \t") == std::string::npos) out.pop_back();
  return out;
}

// ---------------------------------------------------------------------------
// Documents

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> k{
      {"algebra", {"builtin", "n", "weights", "brackets", "name"}},
      {"action", {"builtin", "beta", "alpha", "d", "params", "theta", "name"}},
      {"operator", {"expr", "dim", "x_weights", "xi_weights"}},
      {"command",
       {"name", "truncation", "count", "order", "tolerance", "terms", "declared_order", "max_length", "margin",
        "method"}},
  };
  return k;
}

const std::set<std::string>& commands() {
  static const std::set<std::string> c{"verify-group", "deform",      "check-P",  "check-R",
                                       "symbol-group", "normal-form", "cocosymbol", "rockland",
                                       "spectrum",     "parametrix",  "symbol-estimates"};
  return c;
}

[[noreturn]] void fail_at(const Entry& e, const std::string& msg, std::size_t offset = 0) {
  throw ParseError(e.line, e.col + static_cast<int>(offset), msg);
}

long to_int(const Entry& e) {
  try {
    std::size_t used = 0;
    long v = std::stol(e.value, &used);
    if (used == e.value.size()) return v;
  } catch (const std::exception&) {
  }
  fail_at(e, "expected an integer for '" + e.key + "'");
}

double to_double(const Entry& e) {
  try {
    std::size_t used = 0;
    double v = std::stod(e.value, &used);
    if (used == e.value.size()) return v;
  } catch (const std::exception&) {
  }
  fail_at(e, "expected a number for '" + e.key + "'");
}

std::vector<int> to_ints(const Entry& e) {
  std::vector<int> out;
  std::string s = e.value;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      fail_at(e, "expected a list of integers for '" + e.key + "'");
    }
  }
  return out;
}

std::vector<int> positive_ints(const Entry& e, std::size_t expect = 0) {
  std::vector<int> v = to_ints(e);
  for (int x : v)
    if (x < 1) fail_at(e, "'" + e.key + "' entries must be positive");
  if (expect && v.size() != expect)
    fail_at(e, "'" + e.key + "' needs " + std::to_string(expect) + " entries, got " + std::to_string(v.size()));
  return v;
}

bool is_number(const std::string& s) {
  static const std::string chars = "0123456789+-./eE";
  return !s.empty() && s.find_first_not_of(chars) == std::string::npos &&
         std::isdigit(static_cast<unsigned char>(s.back()));
}

struct Dims {
  std::size_t algebra = 0;
  std::optional<std::size_t> space;
  bool has_action = false;
};

// Brackets "[i,j] = expr in X(k); ..." as structure constants.
std::vector<std::tuple<std::size_t, std::size_t, std::vector<Rational>>> parse_brackets(const Entry& e, std::size_t dim,
                                                                                          std::string* canon) {
  std::vector<std::tuple<std::size_t, std::size_t, std::vector<Rational>>> out;
  std::vector<std::string> pieces;
  for (auto& [piece, off] : split_list(e.value)) {
    std::size_t p = 0;
    auto skip = [&] {
      while (p < piece.size() && std::isspace(static_cast<unsigned char>(piece[p]))) ++p;
    };
    auto expect = [&](char c) {
      skip();
      if (p >= piece.size() || piece[p] != c) fail_at(e, std::string("expected '") + c + "' in bracket", off + p);
      ++p;
    };
    auto index = [&] {
      skip();
      std::size_t start = p;
      while (p < piece.size() && std::isdigit(static_cast<unsigned char>(piece[p]))) ++p;
      if (start == p) fail_at(e, "expected a basis index", off + p);
      std::size_t v = std::stoul(piece.substr(start, p - start));
      if (v < 1 || v > dim) fail_at(e, "basis index " + std::to_string(v) + " out of range 1.." + std::to_string(dim), off + start);
      return v - 1;
    };
    expect('[');
    std::size_t i = index();
    expect(',');
    std::size_t j = index();
    expect(']');
    expect('=');
    std::string rhs = piece.substr(p);
    NodePtr n = ExprParser(rhs, {"X"}, e.line, e.col + static_cast<int>(off + p)).parse();
    visit_atoms(*n, [&](const Node& a) {
      if (static_cast<std::size_t>(a.index) > dim)
        fail_at(e, "X(" + std::to_string(a.index) + ") out of range 1.." + std::to_string(dim), off + p + a.pos);
    });
    Polynomial lin = evaluate<Polynomial>(
        *n, [](const Node& a) { return Polynomial(vvar(a.index)); }, [](const Gaussian& c) { return Polynomial(c); });
    std::vector<Rational> coeffs(dim);
    for (auto& [m, c] : lin.terms()) {
      if (m.total_degree() != 1 || !c.is_real()) fail_at(e, "bracket values must be real linear combinations of X(k)", off + p);
      coeffs[static_cast<std::size_t>(std::stoi(m.factors()[0].first.name().substr(1))) - 1] = c.re();
    }
    out.emplace_back(i, j, coeffs);
    pieces.push_back("[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "] = " + print_node(*n));
  }
  if (canon) {
    canon->clear();
    for (auto& s : pieces) *canon += (canon->empty() ? "" : "; ") + s;
  }
  return out;
}

std::vector<NodePtr> parse_theta(const Entry& e, std::size_t alg_dim, std::string* canon) {
  auto pieces = split_list(e.value);
  std::vector<NodePtr> out;
  std::string text;
  for (auto& [piece, off] : pieces) {
    NodePtr n = ExprParser(piece, {"x", "v"}, e.line, e.col + static_cast<int>(off)).parse();
    visit_atoms(*n, [&](const Node& a) {
      std::size_t limit = a.name == "x" ? pieces.size() : alg_dim;
      if (static_cast<std::size_t>(a.index) > limit)
        fail_at(e, a.name + "(" + std::to_string(a.index) + ") out of range 1.." + std::to_string(limit), off + a.pos);
    });
    text += (text.empty() ? "" : "; ") + print_node(*n);
    out.push_back(n);
  }
  if (canon) *canon = text;
  return out;
}

std::size_t algebra_dim(const ProblemSpec& spec) {
  const Section* alg = spec.section("algebra");
  const Section* act = spec.section("action");
  if (!alg) {
    if (act && act->find("builtin") && act->find("builtin")->value == "grushin") return 3;
    return 0;
  }
  const Entry* b = alg->find("builtin");
  std::string kind = b ? b->value : "custom";
  if (kind == "heisenberg" || kind == "abelian") {
    const Entry* n = alg->find("n");
    if (!n) throw ParseError(alg->line, 1, "[algebra] " + kind + " needs 'n'");
    long v = to_int(*n);
    if (v < 1) fail_at(*n, "'n' must be positive");
    if (const Entry* w = alg->find("weights"); w && kind == "abelian") positive_ints(*w, static_cast<std::size_t>(v));
    return kind == "heisenberg" ? static_cast<std::size_t>(2 * v + 1) : static_cast<std::size_t>(v);
  }
  if (kind == "engel") return 4;
  if (kind != "custom") fail_at(*b, "unknown algebra '" + kind + "' (heisenberg, engel, abelian or custom)");
  const Entry* w = alg->find("weights");
  if (!w) throw ParseError(alg->line, 1, "[algebra] needs 'builtin' or 'weights'");
  return positive_ints(*w).size();
}

// Checks references and rewrites expressions into canonical form.
void resolve(ProblemSpec& spec) {
  Dims dims;
  dims.algebra = algebra_dim(spec);
  if (Section* alg = const_cast<Section*>(spec.section("algebra"))) {
    for (auto& e : alg->entries)
      if (e.key == "brackets") {
        std::string canon;
        parse_brackets(e, dims.algebra, &canon);
        e.value = canon;
      }
  }
  if (Section* act = const_cast<Section*>(spec.section("action"))) {
    dims.has_action = true;
    if (!spec.section("algebra") && dims.algebra == 0)
      throw ParseError(act->line, 1, "[action] needs an [algebra] section");
    const Entry* b = act->find("builtin");
    std::string kind = b ? b->value : "explicit";
    if (kind == "double-dilation" || kind == "representation") {
      dims.space = dims.algebra;
      if (const Entry* beta = act->find("beta")) positive_ints(*beta, dims.algebra);
    } else if (kind == "group-bundle") {
      const Entry* d = act->find("d");
      if (!d) throw ParseError(act->line, 1, "[action] group-bundle needs 'd'");
      long dv = to_int(*d);
      if (dv < 0) fail_at(*d, "'d' must be non-negative");
      dims.space = static_cast<std::size_t>(dv) + dims.algebra;
      if (const Entry* beta = act->find("beta")) positive_ints(*beta, static_cast<std::size_t>(dv));
    } else if (kind == "grushin") {
      const Entry* p = act->find("params");
      if (!p) throw ParseError(act->line, 1, "[action] grushin needs 'params' (k l p q)");
      positive_ints(*p, 4);
      dims.space = 2;
    } else if (kind == "explicit") {
      Entry* theta = nullptr;
      for (auto& e : act->entries)
        if (e.key == "theta") theta = &e;
      if (!theta) throw ParseError(act->line, 1, "[action] needs 'builtin' or 'theta'");
      std::string canon;
      dims.space = parse_theta(*theta, dims.algebra, &canon).size();
      theta->value = canon;
      const Entry* beta = act->find("beta");
      if (!beta) throw ParseError(act->line, 1, "[action] with 'theta' needs 'beta'");
      positive_ints(*beta, *dims.space);
      if (const Entry* alpha = act->find("alpha")) positive_ints(*alpha, dims.algebra);
    } else {
      fail_at(*b, "unknown action '" + kind + "' (double-dilation, representation, group-bundle, grushin)");
    }
  }
  if (Section* op = const_cast<Section*>(spec.section("operator"))) {
    std::optional<std::size_t> dim = dims.space;
    if (const Entry* d = op->find("dim")) {
      long v = to_int(*d);
      if (v < 1) fail_at(*d, "'dim' must be positive");
      if (dim && *dim != static_cast<std::size_t>(v))
        fail_at(*d, "'dim' disagrees with the action's space dimension " + std::to_string(*dim));
      dim = static_cast<std::size_t>(v);
    }
    Entry* expr = nullptr;
    for (auto& e : op->entries)
      if (e.key == "expr") expr = &e;
    if (!expr) throw ParseError(op->line, 1, "[operator] needs 'expr'");
    NodePtr n = ExprParser(expr->value, {"Xhat", "x", "d"}, expr->line, expr->col).parse();
    std::size_t inferred = 0;
    visit_atoms(*n, [&](const Node& a) {
      std::size_t idx = static_cast<std::size_t>(a.index);
      if (a.name == "Xhat") {
        if (!dims.has_action) fail_at(*expr, "Xhat(" + std::to_string(idx) + ") needs an [action] section", a.pos);
        if (idx > dims.algebra)
          fail_at(*expr, "Xhat(" + std::to_string(idx) + ") out of range 1.." + std::to_string(dims.algebra), a.pos);
      } else if (dim && idx > *dim) {
        fail_at(*expr, a.name + "(" + std::to_string(idx) + ") out of range 1.." + std::to_string(*dim), a.pos);
      }
      inferred = std::max(inferred, idx);
    });
    expr->value = print_node(*n);
    std::size_t d = dim.value_or(std::max<std::size_t>(inferred, 1));
    for (const char* key : {"x_weights", "xi_weights"})
      if (const Entry* w = op->find(key)) positive_ints(*w, d);
  }
  const Section* cmd = spec.section("command");
  if (!cmd) throw ParseError(1, 1, "missing [command] section");
  const Entry* name = cmd->find("name");
  if (!name) throw ParseError(cmd->line, 1, "[command] needs 'name'");
  if (!commands().count(name->value)) {
    std::string known;
    for (auto& c : commands()) known += (known.empty() ? "" : ", ") + c;
    fail_at(*name, "unknown command '" + name->value + "' (" + known + ")");
  }
  for (auto& e : cmd->entries) {
    if (e.key == "truncation") positive_ints(e);
    if (e.key == "tolerance" && to_double(e) <= 0) fail_at(e, "'tolerance' must be positive");
    if (e.key == "count" || e.key == "terms" || e.key == "max_length")
      if (to_int(e) < 1) fail_at(e, "'" + e.key + "' must be positive");
    if (e.key == "order" || e.key == "declared_order" || e.key == "margin") to_int(e);
    if (e.key == "method" && e.value != "auto" && e.value != "certificate" && e.value != "numeric")
      fail_at(e, "'method' must be auto, certificate or numeric");
  }
}

}  // namespace

const Entry* Section::find(const std::string& key) const {
  for (auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

const Section* ProblemSpec::section(const std::string& name) const {
  for (auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

std::optional<std::string> ProblemSpec::get(const std::string& section, const std::string& key) const {
  const Section* s = this->section(section);
  if (!s) return std::nullopt;
  const Entry* e = s->find(key);
  if (!e) return std::nullopt;
  return e->value;
}

ProblemSpec parse(const std::string& text) {
  ProblemSpec spec;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  Section* current = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t p = 0;
    auto col = [&](std::size_t at) { return static_cast<int>(at) + 1; };
    auto skip = [&] {
      while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    };
    for (;;) {
      skip();
      if (p >= line.size() || line[p] == '#') break;
      if (line[p] == '[') {
        std::size_t close = line.find(']', p);
        if (close == std::string::npos) throw ParseError(lineno, col(p), "unterminated section header");
        std::string name = line.substr(p + 1, close - p - 1);
        if (!allowed_keys().count(name))
          throw ParseError(lineno, col(p + 1), "unknown section '" + name + "' (algebra, action, operator, command)");
        if (spec.section(name)) throw ParseError(lineno, col(p), "duplicate section [" + name + "]");
        spec.sections.push_back({name, {}, lineno});
        current = &spec.sections.back();
        p = close + 1;
        continue;
      }
      std::size_t kstart = p;
      while (p < line.size() && (std::isalnum(static_cast<unsigned char>(line[p])) || line[p] == '_')) ++p;
      if (p == kstart) throw ParseError(lineno, col(p), std::string("unexpected '") + line[p] + "'");
      std::string key = line.substr(kstart, p - kstart);
      if (!current) throw ParseError(lineno, col(kstart), "'" + key + "' appears before any section");
      if (!allowed_keys().at(current->name).count(key)) {
        std::string known;
        for (auto& k : allowed_keys().at(current->name)) known += (known.empty() ? "" : ", ") + k;
        throw ParseError(lineno, col(kstart), "unknown key '" + key + "' in [" + current->name + "] (" + known + ")");
      }
      if (current->find(key)) throw ParseError(lineno, col(kstart), "duplicate key '" + key + "'");
      skip();
      if (p >= line.size() || line[p] != '=') throw ParseError(lineno, col(p), "expected '=' after '" + key + "'");
      ++p;
      skip();
      Entry e{key, "", lineno, 0};
      if (p < line.size() && line[p] == '"') {
        std::size_t close = line.find('"', p + 1);
        if (close == std::string::npos) throw ParseError(lineno, col(p), "unterminated string");
        e.value = line.substr(p + 1, close - p - 1);
        e.col = col(p + 1);
        p = close + 1;
      } else {
        std::size_t vstart = p;
        while (p < line.size() && !std::isspace(static_cast<unsigned char>(line[p])) && line[p] != '#') ++p;
        if (p == vstart) throw ParseError(lineno, col(p), "expected a value for '" + key + "'");
        e.value = line.substr(vstart, p - vstart);
        e.col = col(vstart);
      }
      current->entries.push_back(std::move(e));
    }
  }
  resolve(spec);
  return spec;
}

std::string print(const ProblemSpec& spec) {
  std::ostringstream os;
  bool first = true;
  for (auto& s : spec.sections) {
    if (!first) os << "\n";
    first = false;
    os << "[" << s.name << "]\n";
    for (auto& e : s.entries) {
      os << e.key << " = ";
      if (is_number(e.value))
        os << e.value;
      else
        os << '"' << e.value << '"';
      os << "\n";
    }
  }
  return os.str();
}

std::string canonical_expression(const std::string& expr) {
  return print_node(*ExprParser(expr, {"Xhat", "x", "d"}, 1, 1).parse());
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Problem {
  Problem(const ProblemSpec& s, const RunOptions& o) : spec(s), opt(o) {}

  const ProblemSpec& spec;
  const RunOptions& opt;
  json results = json::object();
  json artifacts = json::array();
  std::string verdict;
  int code = 0;

  std::optional<long> cmd_int(const std::string& key) const {
    const Section* c = spec.section("command");
    const Entry* e = c ? c->find(key) : nullptr;
    return e ? std::optional<long>(to_int(*e)) : std::nullopt;
  }
  std::optional<double> cmd_double(const std::string& key) const {
    const Section* c = spec.section("command");
    const Entry* e = c ? c->find(key) : nullptr;
    return e ? std::optional<double>(to_double(*e)) : std::nullopt;
  }
  std::optional<std::vector<int>> list(const std::string& section, const std::string& key) const {
    const Section* s = spec.section(section);
    const Entry* e = s ? s->find(key) : nullptr;
    return e ? std::optional<std::vector<int>>(to_ints(*e)) : std::nullopt;
  }
  double tolerance(double fallback) const {
    if (opt.tolerance) return *opt.tolerance;
    return cmd_double("tolerance").value_or(fallback);
  }
  void finish(int c, std::string v) {
    code = c;
    verdict = std::move(v);
  }
};

GradedLieAlgebra build_algebra(const Problem& pb) {
  const ProblemSpec& spec = pb.spec;
  const Section* alg = spec.section("algebra");
  if (!alg) {
    auto params = pb.list("action", "params");
    if (params) {
      const auto& v = *params;
      return grushin_action(v[0], v[1], v[2], v[3]).group.algebra;
    }
    throw UsageError("missing [algebra] section");
  }
  std::string kind = spec.get("algebra", "builtin").value_or("custom");
  std::optional<long> n;
  if (const Entry* e = alg->find("n")) n = to_int(*e);
  if (kind == "heisenberg") return heisenberg(static_cast<int>(*n));
  if (kind == "engel") return engel();
  if (kind == "abelian") return abelian(static_cast<int>(*n), pb.list("algebra", "weights").value_or(std::vector<int>{}));
  std::vector<int> w = *pb.list("algebra", "weights");
  GradedLieAlgebra g(spec.get("algebra", "name").value_or("custom"), w);
  if (const Entry* b = alg->find("brackets"))
    for (auto& [i, j, coeffs] : parse_brackets(*b, w.size(), nullptr)) g.set_bracket(i, j, coeffs);
  return g;
}

struct BuiltAction {
  PolynomialAction base;
  std::optional<DeformedAction> da;
  std::optional<NotShubin> not_shubin;
};

BuiltAction build_action(const Problem& pb, const GradedLieAlgebra& alg) {
  const ProblemSpec& spec = pb.spec;
  if (!spec.section("action")) throw UsageError("this command needs an [action] section");
  std::string kind = spec.get("action", "builtin").value_or("explicit");
  auto wrap = [](DeformedAction da) { return BuiltAction{da.base, da, std::nullopt}; };
  if (kind == "double-dilation") return wrap(double_dilation(alg, pb.list("action", "beta")));
  if (kind == "representation") return wrap(representation(alg));
  if (kind == "group-bundle")
    return wrap(group_bundle(static_cast<int>(to_int(*spec.section("action")->find("d"))), alg,
                             pb.list("action", "beta").value_or(std::vector<int>{})));
  if (kind == "grushin") {
    auto v = *pb.list("action", "params");
    BuiltAction out{grushin_action(v[0], v[1], v[2], v[3]), std::nullopt, std::nullopt};
    auto r = grushin(v[0], v[1], v[2], v[3]);
    if (auto* da = std::get_if<DeformedAction>(&r))
      out.da = *da;
    else
      out.not_shubin = std::get<NotShubin>(r);
    return out;
  }
  const Entry* theta = spec.section("action")->find("theta");
  std::vector<NodePtr> comps = parse_theta(*theta, alg.dim(), nullptr);
  PolyVec polys;
  for (auto& n : comps)
    polys.push_back(evaluate<Polynomial>(
        *n, [](const Node& a) { return Polynomial(a.name == "x" ? xvar(a.index) : vvar(a.index)); },
        [](const Gaussian& c) { return Polynomial(c); }));
  WeightVector beta(*pb.list("action", "beta"));
  WeightVector alpha(pb.list("action", "alpha").value_or(alg.weights().values()));
  PolynomialAction a = make_action(spec.get("action", "name").value_or("explicit"), bch_product(alg), beta, polys);
  Diagnostics d = validate_action(a);
  if (!d.ok()) throw std::domain_error("theta is not a right action:\n" + d.str());
  BuiltAction out{a, std::nullopt, std::nullopt};
  auto r = deform(a, alpha, beta);
  if (auto* da = std::get_if<DeformedAction>(&r))
    out.da = *da;
  else
    out.not_shubin = std::get<NotShubin>(r);
  return out;
}

std::size_t operator_dim(const Problem& pb, const std::optional<DeformedAction>& da) {
  if (da) return da->space_dim();
  if (auto d = pb.spec.get("operator", "dim")) return std::stoul(*d);
  std::size_t dim = 1;
  NodePtr n = ExprParser(*pb.spec.get("operator", "expr"), {"Xhat", "x", "d"}, 1, 1).parse();
  visit_atoms(*n, [&](const Node& a) { dim = std::max(dim, static_cast<std::size_t>(a.index)); });
  return dim;
}

PolyDiffOp build_operator(const Problem& pb, const std::optional<DeformedAction>& da) {
  if (!pb.spec.section("operator")) throw UsageError("this command needs an [operator] section");
  const std::size_t dim = operator_dim(pb, da);
  NodePtr n = ExprParser(*pb.spec.get("operator", "expr"), {"Xhat", "x", "d"}, 1, 1).parse();
  return evaluate<PolyDiffOp>(
      *n,
      [&](const Node& a) {
        const int j = a.index;
        if (a.name == "Xhat") return fundamental_operator(*da, static_cast<std::size_t>(j - 1));
        if (a.name == "x") return PolyDiffOp::multiplication(dim, Polynomial(xvar(j)));
        return PolyDiffOp::partial(dim, static_cast<std::size_t>(j - 1), 1);
      },
      [&](const Gaussian& c) { return PolyDiffOp::multiplication(dim, Polynomial(c)); });
}

SymbolWeights symbol_weights(const Problem& pb, std::size_t dim) {
  SymbolWeights w = SymbolWeights::isotropic(dim);
  if (auto x = pb.list("operator", "x_weights")) w.beta = WeightVector(*x);
  if (auto xi = pb.list("operator", "xi_weights")) w.alpha = WeightVector(*xi);
  return w;
}

json poly_list(const PolyMap& m) {
  json out = json::array();
  for (auto& c : m.components()) out.push_back(c.str());
  return out;
}

std::string word_str(const GradedLieAlgebra& s, const MultiIndex& a, const MultiIndex& b) {
  std::string out;
  auto add = [&](const std::string& base, int e) {
    if (!e) return;
    if (!out.empty()) out += "*";
    out += base + (e > 1 ? "^" + std::to_string(e) : "");
  };
  for (std::size_t j = 0; j < b.size(); ++j) add("x" + std::to_string(j + 1), b[j]);
  for (std::size_t j = 0; j < a.size(); ++j) add("Xhat" + std::to_string(j + 1), a[j]);
  (void)s;
  return out.empty() ? "1" : out;
}

json brackets_json(const GradedLieAlgebra& g) {
  json out = json::array();
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t j = i + 1; j < g.dim(); ++j) {
      Polynomial v;
      for (std::size_t k = 0; k < g.dim(); ++k)
        if (sgn(g.c(i, j, k)) != 0) v += Polynomial(Monomial::var(vvar(static_cast<int>(k + 1))), Gaussian(g.c(i, j, k)));
      if (v.is_zero()) continue;
      std::string rhs = v.str();
      for (std::size_t k = g.dim(); k-- > 0;) {
        std::string from = "v" + std::to_string(k + 1);
        for (std::size_t pos; (pos = rhs.find(from)) != std::string::npos;) rhs.replace(pos, from.size(), g.labels()[k]);
      }
      out.push_back("[" + g.labels()[i] + ", " + g.labels()[j] + "] = " + rhs);
    }
  return out;
}

void cmd_verify_group(Problem& pb) {
  GradedLieAlgebra g = build_algebra(pb);
  Diagnostics d = g.validate();
  pb.results["algebra"] = g.name();
  pb.results["weights"] = g.weights().values();
  if (!d.ok()) {
    json issues = json::array();
    for (auto& i : d.issues) issues.push_back(i.kind + ": " + i.witness);
    pb.results["issues"] = issues;
    return pb.finish(2, "not a graded Lie algebra: " + d.issues.front().kind + " " + d.issues.front().witness);
  }
  GroupLaw law = bch_product(g);
  Diagnostics lc = law.check();
  bool dil = dilation_automorphism_check(g);
  pb.results["product"] = poly_list(law.product);
  pb.results["nilpotency_class"] = g.nilpotency_class();
  pb.results["homogeneous_dimension"] = homogeneous_dimension(g);
  pb.results["group_axioms"] = lc.ok();
  pb.results["dilations_are_automorphisms"] = dil;
  if (!lc.ok()) return pb.finish(2, "group law check failed: " + lc.issues.front().kind);
  if (!dil) return pb.finish(2, "dilations are not automorphisms");
  pb.finish(0, "group law verified");
}

void not_shubin(Problem& pb, const NotShubin& ns) {
  pb.results["shubin"] = false;
  pb.results["witness"] = ns.witness;
  pb.results["component"] = ns.component + 1;
  pb.results["t_exponent"] = ns.exponent;
  pb.finish(2, "NotShubin: " + ns.witness);
}

void cmd_deform(Problem& pb) {
  BuiltAction b = build_action(pb, build_algebra(pb));
  if (b.not_shubin) return not_shubin(pb, *b.not_shubin);
  const DeformedAction& da = *b.da;
  PolynomialAction t0 = theta_zero(da);
  pb.results["shubin"] = true;
  pb.results["theta"] = poly_list(da.theta);
  pb.results["theta0"] = poly_list(t0.theta);
  pb.results["theta0_trivial"] = t0.theta.components() == coords(xvar, da.space_dim());
  Diagnostics d = check_deformed(da);
  pb.results["invariants"] = d.ok();
  pb.results["zoom"] = zoom_check(da);
  if (!d.ok()) return pb.finish(2, "deformation invariants fail: " + d.issues.front().kind);
  pb.finish(0, "Shubin action, theta0 = (" + [&] {
    std::string s;
    for (auto& c : t0.theta.components()) s += (s.empty() ? "" : ", ") + c.str();
    return s;
  }() + ")");
}

void cmd_check_P(Problem& pb) {
  BuiltAction b = build_action(pb, build_algebra(pb));
  auto r = check_property_P(b.base);
  if (auto* inv = std::get_if<PolyMap>(&r)) {
    pb.results["property_P"] = true;
    pb.results["inverse"] = poly_list(*inv);
    return pb.finish(0, "property (P) holds");
  }
  pb.results["property_P"] = "undetermined";
  pb.results["reason"] = std::get<PropertyPFailure>(r).reason;
  pb.finish(3, "property (P) undetermined: " + std::get<PropertyPFailure>(r).reason);
}

void cmd_check_R(Problem& pb) {
  BuiltAction b = build_action(pb, build_algebra(pb));
  if (b.not_shubin) return not_shubin(pb, *b.not_shubin);
  PropertyR r = check_property_R(*b.da);
  pb.results["property_R"] = r.holds;
  if (r.holds) return pb.finish(0, "property (R) holds");
  pb.results["component"] = r.component + 1;
  pb.results["witness"] = r.witness;
  pb.finish(2, "property (R) fails: " + r.witness);
}

void cmd_symbol_group(Problem& pb) {
  BuiltAction b = build_action(pb, build_algebra(pb));
  if (b.not_shubin) return not_shubin(pb, *b.not_shubin);
  PropertyR r = check_property_R(*b.da);
  if (!r.holds) {
    pb.results["witness"] = r.witness;
    return pb.finish(2, "property (R) fails: " + r.witness);
  }
  GradedLieAlgebra s = symbol_group(*b.da);
  pb.results["labels"] = s.labels();
  pb.results["weights"] = s.weights().values();
  pb.results["brackets"] = brackets_json(s);
  pb.finish(0, "symbol group of dimension " + std::to_string(s.dim()));
}

struct Calculus {
  BuiltAction built;
  std::unique_ptr<OperatorCalculus> oc;
  PolyDiffOp op;
  NormalForm nf;
  long order = 0;
};

std::optional<Calculus> calculus(Problem& pb) {
  Calculus c{build_action(pb, build_algebra(pb)), nullptr, PolyDiffOp(1), {}, 0};
  if (c.built.not_shubin) {
    not_shubin(pb, *c.built.not_shubin);
    return std::nullopt;
  }
  c.oc = std::make_unique<OperatorCalculus>(*c.built.da);
  c.op = build_operator(pb, c.built.da);
  try {
    c.nf = c.oc->normal_form(c.op);
  } catch (const PropertyPMissing& e) {
    pb.results["property_P"] = "undetermined";
    pb.finish(3, std::string("normal form undetermined: ") + e.what());
    return std::nullopt;
  }
  c.order = c.oc->order(c.nf).value_or(0);
  if (auto m = pb.cmd_int("order")) {
    if (*m < c.order) throw UsageError("declared order " + std::to_string(*m) + " is below the operator's order " + std::to_string(c.order));
    c.order = *m;
  }
  json terms = json::array();
  const GradedLieAlgebra& g = c.built.da->algebra();
  for (auto& [ab, coef] : c.nf.coeffs)
    terms.push_back({{"a", ab.first}, {"b", ab.second}, {"coefficient", coef.str()}, {"word", word_str(g, ab.first, ab.second)}});
  pb.results["operator"] = c.op.str();
  pb.results["normal_form"] = terms;
  pb.results["order"] = c.order;
  return c;
}

void cmd_normal_form(Problem& pb) {
  auto c = calculus(pb);
  if (!c) return;
  bool round = c->oc->reconstruct(c->nf) == c->op;
  pb.results["round_trip"] = round;
  if (!round) return pb.finish(2, "normal form does not reconstruct the operator");
  pb.finish(0, "normal form with " + std::to_string(c->nf.coeffs.size()) + " terms, order " + std::to_string(c->order));
}

void cmd_cocosymbol(Problem& pb) {
  auto c = calculus(pb);
  if (!c) return;
  if (!c->oc->has_property_R()) {
    pb.results["witness"] = check_property_R(*c->built.da).witness;
    return pb.finish(2, "property (R) fails; no cocosymbol");
  }
  EnvelopingElement s = c->oc->cocosymbol(c->nf, c->order);
  pb.results["cocosymbol"] = s.str();
  pb.results["adjoint"] = enveloping_adjoint(s).str();
  pb.finish(0, "cocosymbol of order " + std::to_string(c->order) + ": " + s.str());
}

void cmd_rockland(Problem& pb) {
  auto c = calculus(pb);
  if (!c) return;
  std::vector<std::string> notes;
  const std::string method = pb.spec.get("command", "method").value_or("auto");
  if (method != "numeric" && c->oc->has_property_R()) {
    EnvelopingElement s = c->oc->cocosymbol(c->nf, c->order);
    pb.results["cocosymbol"] = s.str();
    RocklandVerdict cert = rockland_certificate(s);
    notes = cert.notes;
    if (cert.status == RocklandVerdict::Status::CertifiedElliptic) {
      pb.results["status"] = to_string(cert.status);
      pb.results["notes"] = notes;
      return pb.finish(0, to_string(cert.status));
    }
  }
  if (method == "certificate") {
    pb.results["status"] = to_string(RocklandVerdict::Status::Inconclusive);
    pb.results["notes"] = notes;
    return pb.finish(3, "Inconclusive: no certificate");
  }
  RocklandConfig cfg;
  cfg.seed = pb.opt.seed;
  cfg.threads = pb.opt.threads;
  if (pb.opt.truncation)
    cfg.truncations = *pb.opt.truncation;
  else if (auto t = pb.list("command", "truncation"))
    cfg.truncations = *t;
  try {
    RocklandVerdict v = numeric_rockland(*c->oc, c->nf, c->order, cfg);
    json table = json::array();
    for (auto& r : v.table)
      table.push_back({{"branch", r.branch}, {"lambda", r.lambda}, {"x0", r.x0}, {"N", r.N},
                       {"sigma_min", r.sigma_min}, {"norm1", r.norm1}});
    notes.insert(notes.end(), v.notes.begin(), v.notes.end());
    pb.results["status"] = to_string(v.status);
    pb.results["table"] = table;
    pb.results["notes"] = notes;
    if (!v.witness.empty()) pb.results["witness"] = v.witness;
    int code = v.status == RocklandVerdict::Status::NumericFailure ? 2
               : v.status == RocklandVerdict::Status::Inconclusive ? 3
                                                                   : 0;
    pb.finish(code, to_string(v.status) + (v.witness.empty() ? "" : ": " + v.witness));
  } catch (const UnsupportedGroup& e) {
    notes.push_back(e.what());
    pb.results["status"] = to_string(RocklandVerdict::Status::Inconclusive);
    pb.results["notes"] = notes;
    pb.finish(3, std::string("Inconclusive: ") + e.what());
  }
}

std::optional<DeformedAction> optional_action(Problem& pb) {
  if (!pb.spec.section("action")) return std::nullopt;
  BuiltAction b = build_action(pb, build_algebra(pb));
  if (b.not_shubin) throw std::domain_error("action is not Shubin: " + b.not_shubin->witness);
  return b.da;
}

void cmd_spectrum(Problem& pb) {
  PolyDiffOp op = build_operator(pb, optional_action(pb));
  std::vector<int> truncations{16, 24, 32};
  if (pb.opt.truncation)
    truncations = *pb.opt.truncation;
  else if (auto t = pb.list("command", "truncation"))
    truncations = *t;
  std::size_t k = static_cast<std::size_t>(pb.cmd_int("count").value_or(6));
  StudyOptions so;
  so.rel_tol = pb.tolerance(so.rel_tol);
  so.margin = static_cast<int>(pb.cmd_int("margin").value_or(-1));
  so.threads = pb.opt.threads;
  so.eigen.seed = pb.opt.seed;
  SelfAdjointCheck sa = selfadjoint_check(op);
  SpectrumReport r = convergence_study(op, truncations, k, so);
  std::filesystem::path csv = pb.opt.out / "spectrum.csv";
  {
    std::ofstream f(csv);
    write_csv(r, f);
  }
  pb.artifacts.push_back(csv.string());
  pb.results["operator"] = op.str();
  pb.results["truncations"] = r.truncations;
  pb.results["margins"] = r.margins;
  pb.results["eigenvalues"] = r.eigenvalues;
  pb.results["gaps"] = r.gaps;
  pb.results["symbolic_selfadjoint"] = sa.symbolic;
  pb.results["hermitian"] = r.hermitian;
  pb.results["rel_tol"] = r.rel_tol;
  pb.results["abs_tol"] = r.abs_tol;
  pb.results["verdict"] = r.verdict;
  pb.results["reason"] = r.reason;
  if (std::find(r.hermitian.begin(), r.hermitian.end(), false) != r.hermitian.end())
    return pb.finish(2, "discretisation is not Hermitian");
  if (truncations.size() == 1) {
    pb.results["verdict"] = "Computed";
    std::ostringstream os;
    os << std::setprecision(12) << "lowest eigenvalue at N = " << truncations[0] << ": "
       << (r.eigenvalues[0].empty() ? 0.0 : r.eigenvalues[0][0]);
    return pb.finish(0, os.str());
  }
  pb.finish(r.discrete ? 0 : 3, r.verdict + ": " + r.reason);
}

RationalSymbol operator_symbol(Problem& pb) {
  PolyDiffOp op = build_operator(pb, optional_action(pb));
  pb.results["operator"] = op.str();
  RationalSymbol s = full_symbol(op, symbol_weights(pb, op.dim()));
  pb.results["symbol"] = s.str();
  return s;
}

void cmd_parametrix(Problem& pb) {
  RationalSymbol p = operator_symbol(pb);
  int terms = static_cast<int>(pb.cmd_int("terms").value_or(3));
  double tol = pb.tolerance(0.3);
  EstimateConfig cfg;
  cfg.seed = pb.opt.seed;
  Parametrix par;
  try {
    par = parametrix_expansion(p, terms);
  } catch (const NotElliptic& e) {
    pb.results["reason"] = e.what();
    return pb.finish(2, std::string("NotElliptic: ") + e.what());
  }
  json rows = json::array();
  bool ok = true;
  for (std::size_t k = 0; k < par.terms.size(); ++k) {
    auto order = par.residuals[k].order();
    double slope = decay_slope(par.residuals[k], cfg);
    bool row_ok = !order || (*order <= par.residual_declared[k] && std::abs(slope - static_cast<double>(*order)) <= tol);
    ok = ok && row_ok;
    rows.push_back({{"term", par.terms[k].str()},
                    {"term_declared_order", par.declared_orders[k]},
                    {"residual_order", order ? json(*order) : json(nullptr)},
                    {"residual_declared_order", par.residual_declared[k]},
                    {"residual_decay_slope", slope},
                    {"pass", row_ok}});
  }
  pb.results["order"] = par.order;
  pb.results["expansion"] = rows;
  pb.results["slope_tolerance"] = tol;
  pb.finish(ok ? 0 : 2, ok ? "parametrix residuals decay as declared" : "parametrix residual check failed");
}

void cmd_symbol_estimates(Problem& pb) {
  RationalSymbol s = operator_symbol(pb);
  long m = pb.cmd_int("declared_order").value_or(s.order().value_or(0));
  long len = pb.cmd_int("max_length").value_or(4);
  EstimateConfig cfg;
  cfg.seed = pb.opt.seed;
  cfg.slope_tol = pb.tolerance(cfg.slope_tol);
  EstimateReport r = symbol_estimate_check(s, m, derivative_set(s.weights(), len), cfg);
  json rows = json::array();
  for (auto& row : r.rows)
    rows.push_back({{"a", row.a}, {"b", row.b}, {"sup_constant", row.sup_constant}, {"slope", row.slope}, {"pass", row.pass}});
  pb.results["declared_order"] = m;
  pb.results["radii"] = r.radii;
  pb.results["rows"] = rows;
  pb.results["slope_tolerance"] = cfg.slope_tol;
  if (r.pass) return pb.finish(0, "estimates hold for order " + std::to_string(m));
  for (auto& row : r.rows)
    if (!row.pass) {
      std::ostringstream os;
      os << "estimates fail for order " << m << ": slope " << std::setprecision(3) << row.slope << " at a="
         << json(row.a).dump() << " b=" << json(row.b).dump();
      return pb.finish(2, os.str());
    }
}

void append_report(const std::filesystem::path& out, const json& entry) {
  std::filesystem::create_directories(out);
  std::filesystem::path file = out / "report.json";
  json all = json::array();
  if (std::filesystem::exists(file)) {
    std::ifstream in(file);
    try {
      in >> all;
    } catch (const json::exception&) {
      all = json::array();
    }
    if (!all.is_array()) all = json::array({all});
  }
  all.push_back(entry);
  std::ofstream os(file);
  os << all.dump(2) << "\n";
}

}  // namespace

RunResult run(const ProblemSpec& spec, const RunOptions& opt) {
  Problem pb(spec, opt);
  std::string name = spec.get("command", "name").value_or("");
  static const std::map<std::string, void (*)(Problem&)> table{
      {"verify-group", cmd_verify_group}, {"deform", cmd_deform},           {"check-P", cmd_check_P},
      {"check-R", cmd_check_R},           {"symbol-group", cmd_symbol_group}, {"normal-form", cmd_normal_form},
      {"cocosymbol", cmd_cocosymbol},     {"rockland", cmd_rockland},       {"spectrum", cmd_spectrum},
      {"parametrix", cmd_parametrix},     {"symbol-estimates", cmd_symbol_estimates}};
  std::filesystem::create_directories(opt.out);
  try {
    auto it = table.find(name);
    if (it == table.end()) throw UsageError("unknown command '" + name + "'");
    it->second(pb);
  } catch (const UsageError& e) {
    pb.finish(1, std::string("usage error: ") + e.what());
  } catch (const std::domain_error& e) {
    pb.finish(2, e.what());
  } catch (const std::exception& e) {
    pb.finish(1, std::string("error: ") + e.what());
  }
  json entry{{"schema", 1},
             {"command", name},
             {"input", opt.input},
             {"document", print(spec)},
             {"options",
              {{"seed", opt.seed},
               {"truncation", opt.truncation ? json(*opt.truncation) : json(nullptr)},
               {"tolerance", opt.tolerance ? json(*opt.tolerance) : json(nullptr)},
               {"threads", opt.threads}}},
             {"exit_code", pb.code},
             {"verdict", pb.verdict},
             {"results", pb.results},
             {"artifacts", pb.artifacts}};
  append_report(opt.out, entry);
  return {pb.code, pb.verdict, entry.dump()};
}

}  // namespace gradedcalc
