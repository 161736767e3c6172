#include "jetsym/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "jetsym/errors.hpp"

namespace jetsym {

namespace {

enum class Tok { Ident, Number, Prime, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int column = 0;  // 1-based
};

std::vector<Token> tokenize(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char ch = line[i];
    const int col = static_cast<int>(i) + 1;
    if (ch == '#') break;
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      std::size_t j = i + 1;
      while (j < line.size()) {
        const char c = line[j];
        if (std::isalnum(static_cast<unsigned char>(c))) {
          ++j;
        } else if (c == '_' && !(j + 1 < line.size() && line[j + 1] == '{')) {
          ++j;
        } else {
          break;
        }
      }
      out.push_back({Tok::Ident, std::string(line.substr(i, j - i)), col});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) ||
        (ch == '.' && i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
      std::size_t j = i;
      bool dot = false;
      while (j < line.size() &&
             (std::isdigit(static_cast<unsigned char>(line[j])) || (line[j] == '.' && !dot))) {
        if (line[j] == '.') dot = true;
        ++j;
      }
      out.push_back({Tok::Number, std::string(line.substr(i, j - i)), col});
      i = j;
      continue;
    }
    if (ch == '\'') {
      out.push_back({Tok::Prime, "'", col});
      ++i;
      continue;
    }
    if (ch == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      out.push_back({Tok::Symbol, "->", col});
      i += 2;
      continue;
    }
    if (std::string_view("+-*/^()[]{},;:_").find(ch) != std::string_view::npos) {
      out.push_back({Tok::Symbol, std::string(1, ch), col});
      ++i;
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + ch + "'", line_no, col);
  }
  out.push_back({Tok::End, "", static_cast<int>(line.size()) + 1});
  return out;
}

Rational parse_number(const std::string& text) {
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(text, 10);
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  if (digits.empty()) digits = "0";
  mpz_class num(digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, text.size() - dot - 1);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Names known at a given point in the file.
struct Scope {
  JetSpace space;
  std::set<std::string> params;

  int field_index(const std::string& name) const {
    auto it = std::find(space.field_names.begin(), space.field_names.end(), name);
    return it == space.field_names.end() ? -1
                                         : static_cast<int>(it - space.field_names.begin());
  }
  int base_index(const std::string& name) const {
    auto it = std::find(space.base_names.begin(), space.base_names.end(), name);
    return it == space.base_names.end() ? -1
                                        : static_cast<int>(it - space.base_names.begin());
  }
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Scope& scope, int line_no)
      : tokens_(std::move(tokens)), scope_(scope), line_(line_no) {}

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }
  bool at_end() const { return peek().kind == Tok::End; }

  bool accept(const std::string& symbol) {
    if (peek().kind == Tok::Symbol && peek().text == symbol) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(const std::string& symbol) {
    if (!accept(symbol)) fail("expected '" + symbol + "'");
  }

  std::string ident(const std::string& what) {
    if (peek().kind != Tok::Ident) fail("expected " + what);
    return next().text;
  }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, peek().column); }
  [[noreturn]] void fail_at(const std::string& msg, int column) const {
    throw SyntaxError(msg, line_, column);
  }

  Expression expression() {
    Expression e = term();
    for (;;) {
      if (accept("+")) {
        e += term();
      } else if (accept("-")) {
        e -= term();
      } else {
        return e;
      }
    }
  }

 private:
  Expression term() {
    Expression e = unary();
    for (;;) {
      if (accept("*")) {
        e *= unary();
      } else if (peek().kind == Tok::Symbol && peek().text == "/") {
        const int col = next().column;
        Expression d = unary();
        if (!d.is_constant() || d.is_zero()) {
          fail_at("division is only allowed by a nonzero number", col);
        }
        e = e.divided_by(d.constant_value());
      } else {
        return e;
      }
    }
  }

  Expression unary() {
    if (accept("-")) return -unary();
    if (accept("+")) return unary();
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (peek().kind == Tok::Symbol && peek().text == "^") {
      const int col = next().column;
      Expression ex = unary();
      if (!ex.is_constant()) fail_at("exponent must be a number", col);
      const Rational k = ex.constant_value();
      if (k.get_den() != 1 || k < 0 || k > 1024) {
        fail_at("exponent must be an integer between 0 and 1024", col);
      }
      return base.pow(static_cast<unsigned>(k.get_num().get_ui()));
    }
    return base;
  }

  Expression primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      return Expression(parse_number(t.text));
    }
    if (accept("(")) {
      Expression e = expression();
      expect(")");
      return e;
    }
    if (t.kind != Tok::Ident) fail(at_end() ? "unexpected end of expression" : "unexpected '" + t.text + "'");
    next();
    if (t.text == "D" && accept("[")) return derivative();
    return identifier(t);
  }

  Expression jet(int field, std::vector<int> multi_index, int column) {
    if (static_cast<int>(multi_index.size()) > kMaxParsedJetOrder) {
      fail_at("jet order exceeds " + std::to_string(kMaxParsedJetOrder), column);
    }
    std::sort(multi_index.begin(), multi_index.end());
    return Expression::jet(JetVariable(field, std::move(multi_index)));
  }

  Expression derivative() {
    const int col = peek().column;
    const std::string name = ident("field name");
    const int field = scope_.field_index(name);
    if (field < 0) fail_at("undeclared field '" + name + "'", col);
    std::vector<int> idx;
    while (accept(",")) {
      const Token& t = peek();
      if (t.kind == Tok::Number && scope_.space.is_mechanics()) {
        next();
        const Rational k = parse_number(t.text);
        if (k.get_den() != 1 || k > kMaxParsedJetOrder) {
          fail_at("jet order exceeds " + std::to_string(kMaxParsedJetOrder), t.column);
        }
        idx.insert(idx.end(), k.get_num().get_ui(), 0);
      } else if (t.kind == Tok::Ident) {
        next();
        const int mu = scope_.base_index(t.text);
        if (mu < 0) fail_at("undeclared base variable '" + t.text + "'", t.column);
        idx.push_back(mu);
      } else {
        fail("expected a base variable or an order");
      }
      if (static_cast<int>(idx.size()) > kMaxParsedJetOrder) {
        fail_at("jet order exceeds " + std::to_string(kMaxParsedJetOrder), t.column);
      }
    }
    expect("]");
    return jet(field, std::move(idx), col);
  }

  Expression identifier(const Token& t) {
    const int field = scope_.field_index(t.text);
    if (field >= 0) {
      std::vector<int> idx;
      if (peek().kind == Tok::Prime) {
        if (!scope_.space.is_mechanics()) fail("primes need a single base variable");
        while (peek().kind == Tok::Prime) {
          next();
          idx.push_back(0);
          if (static_cast<int>(idx.size()) > kMaxParsedJetOrder) {
            fail_at("jet order exceeds " + std::to_string(kMaxParsedJetOrder), t.column);
          }
        }
      } else if (accept("_")) {
        expect("{");
        idx = index_list();
        expect("}");
      }
      return jet(field, std::move(idx), t.column);
    }
    if (const int mu = scope_.base_index(t.text); mu >= 0) return Expression::base(mu);
    if (scope_.params.count(t.text)) return Expression::param(t.text);
    fail_at("undeclared identifier '" + t.text + "'", t.column);
  }

  // u_{12} or u_{1,2}: 1-based base indices.
  std::vector<int> index_list() {
    std::vector<int> idx;
    auto push = [&](int mu, int col) {
      if (mu < 0 || mu >= scope_.space.base_dim) fail_at("base index out of range", col);
      idx.push_back(mu);
      if (static_cast<int>(idx.size()) > kMaxParsedJetOrder) {
        fail_at("jet order exceeds " + std::to_string(kMaxParsedJetOrder), col);
      }
    };
    do {
      const Token& t = peek();
      if (t.kind != Tok::Number || t.text.find('.') != std::string::npos) fail("expected base indices");
      next();
      if (scope_.space.base_dim <= 9 && t.text.size() > 1) {
        for (char c : t.text) push(c - '1', t.column);
      } else {
        push(std::stoi(t.text) - 1, t.column);
      }
    } while (accept(","));
    return idx;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Scope& scope_;
  int line_;
};

bool valid_name(const std::string& s) {
  return !s.empty() && std::isalpha(static_cast<unsigned char>(s[0])) &&
         std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

const std::set<std::string> kOptionKeys{"depth", "steps", "s", "tol", "h", "t_end", "ic"};

class SpecReader {
 public:
  ProblemSpec read(std::string_view text) {
    int line_no = 0;
    std::size_t start = 0;
    bool any = false;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no;
      if (statement(line, line_no)) any = true;
      start = end + 1;
    }
    if (!any) throw SyntaxError("empty specification", 1, 1);
    if (!has_lagrangian_) throw SyntaxError("missing lagrangian", line_no, 1);
    freeze();
    spec_.params = declared_params_;
    return spec_;
  }

 private:
  void freeze() {
    if (frozen_) return;
    if (bases_.empty()) bases_.push_back("t");
    if (fields_.empty()) throw SyntaxError("no field declared", 1, 1);
    scope_.space = bases_.size() == 1 ? JetSpace::mechanics(fields_, bases_[0])
                                      : JetSpace::field_theory(bases_, fields_);
    spec_.space = scope_.space;
    frozen_ = true;
  }

  void declare(const std::string& name, int line_no, int col) {
    if (!valid_name(name) || name == "D") throw SyntaxError("invalid name '" + name + "'", line_no, col);
    if (!names_.insert(name).second) {
      throw SyntaxError("'" + name + "' is already declared", line_no, col);
    }
  }

  // Returns false for blank and comment-only lines.
  bool statement(std::string_view line, int line_no) {
    auto tokens = tokenize(line, line_no);
    if (tokens.front().kind == Tok::End) return false;
    const Token head = tokens.front();
    if (head.kind != Tok::Ident) throw SyntaxError("expected a statement", line_no, head.column);
    Parser p(tokens, scope_, line_no);
    p.next();

    if (head.text == "base" || head.text == "field" || head.text == "param") {
      const Token& t = p.peek();
      const std::string name = p.ident("a name");
      if (!p.at_end()) p.fail("unexpected text after declaration");
      if (head.text != "param" && frozen_) {
        throw SyntaxError("'" + head.text + "' must be declared before any expression", line_no,
                          head.column);
      }
      declare(name, line_no, t.column);
      if (head.text == "base") bases_.push_back(name);
      if (head.text == "field") fields_.push_back(name);
      if (head.text == "param") {
        scope_.params.insert(name);
        declared_params_.push_back(name);
      }
      return true;
    }

    if (head.text == "option") {
      const std::string key = p.ident("an option name");
      if (!kOptionKeys.count(key)) p.fail_at("unknown option '" + key + "'", head.column);
      const int col = p.peek().column;
      std::string value(line.substr(static_cast<std::size_t>(col - 1)));
      if (auto hash = value.find('#'); hash != std::string::npos) value.resize(hash);
      while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.pop_back();
      if (value.empty()) p.fail("missing option value");
      spec_.options[key] = value;
      return true;
    }

    freeze();
    if (head.text == "lagrangian") {
      p.expect(":");
      if (has_lagrangian_) throw SyntaxError("lagrangian declared twice", line_no, head.column);
      const int col = p.peek().column;
      Expression l = p.expression();
      if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "'");
      if (l.max_jet_order() > 1) throw SyntaxError("Lagrangian must be first order", line_no, col);
      spec_.lagrangian = std::move(l);
      has_lagrangian_ = true;
      return true;
    }

    if (head.text == "transform") {
      TransformSpec t;
      const int name_col = p.peek().column;
      t.name = p.ident("a transform name");
      declare(t.name, line_no, name_col);
      p.expect(":");
      t.base.assign(static_cast<std::size_t>(scope_.space.base_dim), Expression());
      t.fiber.assign(static_cast<std::size_t>(scope_.space.field_count), Expression());
      std::set<std::string> seen;
      do {
        const Token target = p.peek();
        const std::string who = p.ident("a field or base variable");
        if (!seen.insert(who).second) p.fail_at("component '" + who + "' given twice", target.column);
        p.expect("->");
        const int col = p.peek().column;
        Expression e = p.expression();
        if (int i = scope_.field_index(who); i >= 0) {
          t.fiber[static_cast<std::size_t>(i)] = std::move(e);
        } else if (int mu = scope_.base_index(who); mu >= 0) {
          if (e.depends_on_jets()) {
            throw SyntaxError("base components may not depend on jets", line_no, col);
          }
          t.base[static_cast<std::size_t>(mu)] = std::move(e);
        } else {
          p.fail_at("undeclared identifier '" + who + "'", target.column);
        }
      } while (p.accept(","));
      if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "'");
      spec_.transforms.push_back(std::move(t));
      return true;
    }

    if (head.text == "splitting") {
      SplittingSpec s;
      const int name_col = p.peek().column;
      s.name = p.ident("a splitting name");
      declare(s.name, line_no, name_col);
      p.expect(":");
      const Token f = p.peek();
      if (p.ident("'f'") != "f") p.fail_at("expected 'f'", f.column);
      p.expect(":");
      do {
        s.f.push_back(p.expression());
      } while (p.accept(","));
      if (static_cast<int>(s.f.size()) != scope_.space.base_dim) {
        p.fail("f needs one component per base variable");
      }
      p.expect(";");
      const Token c = p.peek();
      if (p.ident("'C'") != "C") p.fail_at("expected 'C'", c.column);
      p.expect(":");
      s.c = p.expression();
      if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "'");
      spec_.splittings.push_back(std::move(s));
      return true;
    }

    throw SyntaxError("unknown statement '" + head.text + "'", line_no, head.column);
  }

  ProblemSpec spec_;
  Scope scope_;
  std::vector<std::string> bases_;
  std::vector<std::string> fields_;
  std::vector<std::string> declared_params_;
  std::set<std::string> names_;
  bool frozen_ = false;
  bool has_lagrangian_ = false;
};

}  // namespace

LagrangianSystem ProblemSpec::system() const { return LagrangianSystem(space, lagrangian); }

const TransformSpec& ProblemSpec::transform(const std::string& name) const {
  for (const auto& t : transforms) {
    if (t.name == name) return t;
  }
  throw UsageError("unknown transform '" + name + "'");
}

const SplittingSpec& ProblemSpec::splitting(const std::string& name) const {
  for (const auto& s : splittings) {
    if (s.name == name) return s;
  }
  throw UsageError("unknown splitting '" + name + "'");
}

HigherOrderVectorField ProblemSpec::field(const std::string& name) const {
  const auto& t = transform(name);
  return HigherOrderVectorField(space, t.base, t.fiber);
}

SplittingData ProblemSpec::splitting_data(const std::string& name) const {
  const auto& s = splitting(name);
  return SplittingData{s.f, s.c};
}

ProblemSpec parse_spec(std::string_view text) { return SpecReader().read(text); }

Expression parse_expression(std::string_view text, const ProblemSpec& spec) {
  if (text.find('\n') != std::string_view::npos) throw SyntaxError("expected a single line", 1, 1);
  Scope scope{spec.space, {spec.params.begin(), spec.params.end()}};
  Parser p(tokenize(text, 1), scope, 1);
  if (p.at_end()) throw SyntaxError("empty expression", 1, 1);
  Expression e = p.expression();
  if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "'");
  return e;
}

std::string render_spec(const ProblemSpec& spec) {
  const JetSpace& sp = spec.space;
  std::ostringstream out;
  for (const auto& b : sp.base_names) out << "base " << b << '\n';
  for (const auto& f : sp.field_names) out << "field " << f << '\n';
  for (const auto& p : spec.params) out << "param " << p << '\n';
  for (const auto& [k, v] : spec.options) out << "option " << k << ' ' << v << '\n';
  out << "lagrangian: " << render(spec.lagrangian, sp) << '\n';
  for (const auto& t : spec.transforms) {
    std::vector<std::string> parts;
    for (int mu = 0; mu < sp.base_dim; ++mu) {
      const auto& e = t.base[static_cast<std::size_t>(mu)];
      if (!e.is_zero()) parts.push_back(sp.base_names[static_cast<std::size_t>(mu)] + " -> " + render(e, sp));
    }
    for (int i = 0; i < sp.field_count; ++i) {
      const auto& e = t.fiber[static_cast<std::size_t>(i)];
      if (!e.is_zero() || (parts.empty() && i + 1 == sp.field_count)) {
        parts.push_back(sp.field_names[static_cast<std::size_t>(i)] + " -> " + render(e, sp));
      }
    }
    out << "transform " << t.name << ": ";
    for (std::size_t k = 0; k < parts.size(); ++k) out << (k ? ", " : "") << parts[k];
    out << '\n';
  }
  for (const auto& s : spec.splittings) {
    out << "splitting " << s.name << ": f: ";
    for (std::size_t k = 0; k < s.f.size(); ++k) out << (k ? ", " : "") << render(s.f[k], sp);
    out << " ; C: " << render(s.c, sp) << '\n';
  }
  return out.str();
}

}  // namespace jetsym
