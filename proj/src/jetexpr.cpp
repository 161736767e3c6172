#include "jetsym/jetexpr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jetsym/errors.hpp"

namespace jetsym {

// ---------------------------------------------------------------------------
// JetSpace

JetSpace JetSpace::mechanics(std::vector<std::string> fields, std::string time) {
  JetSpace s;
  s.base_dim = 1;
  s.field_count = static_cast<int>(fields.size());
  s.base_names = {std::move(time)};
  s.field_names = std::move(fields);
  return s;
}

JetSpace JetSpace::field_theory(std::vector<std::string> bases,
                                std::vector<std::string> fields) {
  JetSpace s;
  s.base_dim = static_cast<int>(bases.size());
  s.field_count = static_cast<int>(fields.size());
  s.base_names = std::move(bases);
  s.field_names = std::move(fields);
  return s;
}

void JetSpace::check_base_index(int mu) const {
  if (mu < 0 || mu >= base_dim) {
    throw IndexError("base index " + std::to_string(mu) + " out of range [0, " +
                     std::to_string(base_dim) + ")");
  }
}

void JetSpace::check_field_index(int i) const {
  if (i < 0 || i >= field_count) {
    throw IndexError("field index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(field_count) + ")");
  }
}

// ---------------------------------------------------------------------------
// Atoms

JetVariable::JetVariable(int field, std::vector<int> multi_index)
    : field_(field), multi_index_(std::move(multi_index)) {
  std::sort(multi_index_.begin(), multi_index_.end());
}

JetVariable JetVariable::mechanics(int field, int order) {
  return JetVariable(field, std::vector<int>(static_cast<std::size_t>(order), 0));
}

JetVariable JetVariable::raised(int mu) const {
  std::vector<int> j = multi_index_;
  j.insert(std::upper_bound(j.begin(), j.end(), mu), mu);
  JetVariable out;
  out.field_ = field_;
  out.multi_index_ = std::move(j);
  return out;
}

JetVariable JetVariable::lowered(int mu) const {
  auto it = std::find(multi_index_.begin(), multi_index_.end(), mu);
  if (it == multi_index_.end()) {
    throw IndexError("multi-index does not contain base index " + std::to_string(mu));
  }
  JetVariable out = *this;
  out.multi_index_.erase(out.multi_index_.begin() + (it - multi_index_.begin()));
  return out;
}

std::strong_ordering operator<=>(const JetVariable& a, const JetVariable& b) {
  if (auto c = a.field_ <=> b.field_; c != 0) return c;
  if (auto c = a.order() <=> b.order(); c != 0) return c;
  return a.multi_index_ <=> b.multi_index_;
}

Atom base_atom(int mu) { return BaseVariable{mu}; }
Atom jet_atom(int field, int order) { return JetVariable::mechanics(field, order); }
Atom jet_atom(const JetVariable& jet) { return jet; }
Atom param_atom(std::string name) { return Parameter{std::move(name)}; }

const JetVariable* as_jet(const Atom& atom) { return std::get_if<JetVariable>(&atom); }

unsigned total_degree(const Monomial& m) {
  unsigned d = 0;
  for (const auto& [atom, e] : m) d += e;
  return d;
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  const unsigned da = total_degree(a);
  const unsigned db = total_degree(b);
  if (da != db) return da > db;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k].first != b[k].first) return a[k].first < b[k].first;
    if (a[k].second != b[k].second) return a[k].second > b[k].second;
  }
  return a.size() > b.size();
}

namespace {

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      out.push_back(a[i++]);
    } else if (b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  for (; j < b.size(); ++j) out.push_back(b[j]);
  return out;
}

// Monomial with exponent of factor k lowered by one.
Monomial lowered_at(const Monomial& m, std::size_t k) {
  Monomial out = m;
  if (out[k].second == 1) {
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(k));
  } else {
    --out[k].second;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Expression

Expression::Expression(long value) {
  if (value != 0) terms_.emplace(Monomial{}, Rational(value));
}

Expression::Expression(const Rational& value) {
  if (value != 0) terms_.emplace(Monomial{}, value);
}

Expression Expression::from_atom(const Atom& atom) {
  Expression e;
  e.terms_.emplace(Monomial{{atom, 1u}}, Rational(1));
  return e;
}

Expression Expression::base(int mu) { return from_atom(base_atom(mu)); }
Expression Expression::jet(const JetVariable& jet) { return from_atom(jet); }
Expression Expression::jet(int field, int order) { return from_atom(jet_atom(field, order)); }
Expression Expression::param(std::string name) { return from_atom(param_atom(std::move(name))); }

Expression Expression::term(const Monomial& m, const Rational& c) {
  Expression e;
  e.add_term(m, c);
  return e;
}

void Expression::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Expression::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Expression::constant_value() const {
  if (!is_constant()) throw MalformedExpressionError("expression is not a rational constant");
  return terms_.empty() ? Rational(0) : terms_.begin()->second;
}

int Expression::max_jet_order() const {
  int order = -1;
  for (const auto& [m, c] : terms_) {
    for (const auto& [atom, e] : m) {
      if (const auto* j = as_jet(atom)) order = std::max(order, j->order());
    }
  }
  return order;
}

std::set<Atom> Expression::atoms() const {
  std::set<Atom> out;
  for (const auto& [m, c] : terms_) {
    for (const auto& [atom, e] : m) out.insert(atom);
  }
  return out;
}

bool Expression::depends_on(const Atom& atom) const {
  for (const auto& [m, c] : terms_) {
    for (const auto& [a, e] : m) {
      if (a == atom) return true;
    }
  }
  return false;
}

Expression& Expression::operator+=(const Expression& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Expression& Expression::operator-=(const Expression& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Expression& Expression::operator*=(const Expression& other) {
  *this = *this * other;
  return *this;
}

Expression operator*(const Expression& a, const Expression& b) {
  Expression out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(multiply(ma, mb), ca * cb);
  }
  return out;
}

Expression operator-(const Expression& a) { return a.scaled(Rational(-1)); }

Expression Expression::scaled(const Rational& c) const {
  Expression out;
  if (c == 0) return out;
  out.terms_ = terms_;
  for (auto& [m, coeff] : out.terms_) coeff *= c;
  return out;
}

Expression Expression::divided_by(const Rational& c) const {
  if (c == 0) throw MalformedExpressionError("division by zero");
  return scaled(1 / c);
}

Expression Expression::pow(unsigned exponent) const {
  Expression result(1L);
  Expression base = *this;
  while (exponent > 0) {
    if (exponent & 1u) result *= base;
    exponent >>= 1u;
    if (exponent > 0) base *= base;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Calculus

Expression partial(const Expression& e, const Atom& atom) {
  Expression out;
  for (const auto& [m, c] : e.terms()) {
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k].first == atom) {
        out += Expression::term(lowered_at(m, k), c * m[k].second);
        break;
      }
    }
  }
  return out;
}

Expression total_derivative(const Expression& e, int mu, const JetSpace& space) {
  space.check_base_index(mu);
  Expression out;
  for (const auto& [m, c] : e.terms()) {
    for (std::size_t k = 0; k < m.size(); ++k) {
      const Atom& atom = m[k].first;
      Monomial rest = lowered_at(m, k);
      const Rational coeff = c * m[k].second;
      if (const auto* b = std::get_if<BaseVariable>(&atom)) {
        if (b->index == mu) out += Expression::term(rest, coeff);
      } else if (const auto* j = as_jet(atom)) {
        out += Expression::term(multiply(rest, Monomial{{j->raised(mu), 1u}}), coeff);
      }
    }
  }
  return out;
}

Expression total_derivative(const Expression& e, const std::vector<int>& multi_index,
                            const JetSpace& space) {
  Expression out = e;
  for (int mu : multi_index) out = total_derivative(out, mu, space);
  return out;
}

Expression substitute(const Expression& e, const std::map<Atom, Expression>& bindings) {
  Expression out;
  std::map<std::pair<Atom, unsigned>, Expression> power_cache;
  for (const auto& [m, c] : e.terms()) {
    Expression product(c);
    Monomial kept;
    for (const auto& factor : m) {
      auto it = bindings.find(factor.first);
      if (it == bindings.end()) {
        kept.push_back(factor);
        continue;
      }
      auto cached = power_cache.find(factor);
      if (cached == power_cache.end()) {
        cached = power_cache.emplace(factor, it->second.pow(factor.second)).first;
      }
      product *= cached->second;
    }
    out += product * Expression::term(kept, Rational(1));
  }
  return out;
}

Expression antiderivative(const Expression& e, const Atom& atom) {
  Expression out;
  for (const auto& [m, c] : e.terms()) {
    Monomial raised = m;
    unsigned new_exp = 1;
    auto it = std::find_if(raised.begin(), raised.end(),
                           [&](const auto& f) { return f.first == atom; });
    if (it != raised.end()) {
      new_exp = ++it->second;
    } else {
      raised = multiply(raised, Monomial{{atom, 1u}});
    }
    out += Expression::term(raised, c / new_exp);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

double to_double(const Number& n) {
  if (const auto* r = std::get_if<Rational>(&n)) return r->get_d();
  return std::get<double>(n);
}

Number evaluate(const Expression& e, const std::map<Atom, Number>& point) {
  bool exact = true;
  for (const auto& atom : e.atoms()) {
    auto it = point.find(atom);
    if (it == point.end()) {
      throw EvaluationError("unbound atom during evaluation");
    }
    if (std::holds_alternative<double>(it->second)) exact = false;
  }
  if (exact) {
    Rational sum = 0;
    for (const auto& [m, c] : e.terms()) {
      Rational prod = c;
      for (const auto& [atom, k] : m) {
        const Rational& v = std::get<Rational>(point.at(atom));
        for (unsigned p = 0; p < k; ++p) prod *= v;
      }
      sum += prod;
    }
    return sum;
  }
  double sum = 0.0;
  for (const auto& [m, c] : e.terms()) {
    double prod = c.get_d();
    for (const auto& [atom, k] : m) prod *= std::pow(to_double(point.at(atom)), k);
    sum += prod;
  }
  return sum;
}

NumericFunction::NumericFunction(const Expression& e, const std::vector<Atom>& slots) {
  for (const auto& [m, c] : e.terms()) {
    Term t{c.get_d(), {}};
    for (const auto& [atom, k] : m) {
      auto it = std::find(slots.begin(), slots.end(), atom);
      if (it == slots.end()) {
        if (const auto* p = std::get_if<Parameter>(&atom)) {
          throw EvaluationError("no value for parameter '" + p->name + "'");
        }
        throw EvaluationError("expression depends on a variable outside the evaluation chart");
      }
      t.powers.emplace_back(static_cast<std::size_t>(it - slots.begin()), k);
    }
    terms_.push_back(std::move(t));
  }
}

double NumericFunction::operator()(std::span<const double> values) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double prod = t.coefficient;
    for (const auto& [slot, k] : t.powers) {
      const double v = values[slot];
      for (unsigned p = 0; p < k; ++p) prod *= v;
    }
    sum += prod;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Raw trees

RawExpr RawExpr::number(const Rational& v) {
  RawExpr r;
  r.kind = Kind::Number;
  r.value = v;
  return r;
}

RawExpr RawExpr::leaf(const Atom& a) {
  RawExpr r;
  r.kind = Kind::Atom;
  r.atom = a;
  return r;
}

RawExpr RawExpr::unary(Kind k, RawExpr operand) {
  RawExpr r;
  r.kind = k;
  r.children.push_back(std::move(operand));
  return r;
}

RawExpr RawExpr::binary(Kind k, RawExpr lhs, RawExpr rhs) {
  RawExpr r;
  r.kind = k;
  r.children.push_back(std::move(lhs));
  r.children.push_back(std::move(rhs));
  return r;
}

Expression normalize(const RawExpr& raw) {
  using K = RawExpr::Kind;
  switch (raw.kind) {
    case K::Number:
      return Expression(raw.value);
    case K::Atom:
      return Expression::from_atom(raw.atom);
    case K::Neg:
      return -normalize(raw.children.at(0));
    case K::Add:
      return normalize(raw.children.at(0)) + normalize(raw.children.at(1));
    case K::Sub:
      return normalize(raw.children.at(0)) - normalize(raw.children.at(1));
    case K::Mul:
      return normalize(raw.children.at(0)) * normalize(raw.children.at(1));
    case K::Div: {
      Expression den = normalize(raw.children.at(1));
      if (!den.is_constant()) {
        throw MalformedExpressionError("division by a non-rational expression");
      }
      return normalize(raw.children.at(0)).divided_by(den.constant_value());
    }
    case K::Pow: {
      Expression ex = normalize(raw.children.at(1));
      if (!ex.is_constant()) throw MalformedExpressionError("non-constant exponent");
      Rational k = ex.constant_value();
      if (k.get_den() != 1 || k < 0) {
        throw MalformedExpressionError("exponent must be a nonnegative integer");
      }
      if (k > 1024) throw MalformedExpressionError("exponent too large");
      return normalize(raw.children.at(0)).pow(static_cast<unsigned>(k.get_num().get_ui()));
    }
  }
  throw MalformedExpressionError("unknown node");
}

RawExpr to_raw(const Expression& e) {
  using K = RawExpr::Kind;
  RawExpr sum = RawExpr::number(0);
  bool first = true;
  for (const auto& [m, c] : e.terms()) {
    RawExpr prod = RawExpr::number(c);
    for (const auto& [atom, k] : m) {
      RawExpr f = RawExpr::leaf(atom);
      if (k != 1) f = RawExpr::binary(K::Pow, f, RawExpr::number(k));
      prod = RawExpr::binary(K::Mul, prod, f);
    }
    sum = first ? prod : RawExpr::binary(K::Add, sum, prod);
    first = false;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render(const Rational& r) {
  return r.get_den() == 1 ? r.get_num().get_str() : r.get_str();
}

std::string render(const Atom& atom, const JetSpace& space) {
  if (const auto* b = std::get_if<BaseVariable>(&atom)) {
    return b->index < static_cast<int>(space.base_names.size())
               ? space.base_names[static_cast<std::size_t>(b->index)]
               : "x" + std::to_string(b->index + 1);
  }
  if (const auto* p = std::get_if<Parameter>(&atom)) return p->name;
  const auto& j = std::get<JetVariable>(atom);
  std::string name = j.field() < static_cast<int>(space.field_names.size())
                         ? space.field_names[static_cast<std::size_t>(j.field())]
                         : "y" + std::to_string(j.field() + 1);
  if (space.base_dim == 1) return name + std::string(static_cast<std::size_t>(j.order()), '\'');
  if (j.order() == 0) return name;
  std::string idx;
  for (std::size_t k = 0; k < j.multi_index().size(); ++k) {
    if (space.base_dim > 9 && k > 0) idx += ',';
    idx += std::to_string(j.multi_index()[k] + 1);
  }
  return name + "_{" + idx + "}";
}

std::string render(const Expression& e, const JetSpace& space) {
  if (e.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : e.terms()) {
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    if (first) {
      if (negative) out << '-';
    } else {
      out << (negative ? " - " : " + ");
    }
    first = false;

    // Parameters lead, matching the usual "lambda*v" reading.
    std::vector<std::string> factors;
    for (const auto& [atom, k] : m) {
      if (!std::holds_alternative<Parameter>(atom)) continue;
      factors.push_back(render(atom, space) + (k > 1 ? "^" + std::to_string(k) : ""));
    }
    for (const auto& [atom, k] : m) {
      if (std::holds_alternative<Parameter>(atom)) continue;
      factors.push_back(render(atom, space) + (k > 1 ? "^" + std::to_string(k) : ""));
    }
    if (factors.empty()) {
      out << render(mag);
      continue;
    }
    if (mag != 1) out << render(mag) << '*';
    for (std::size_t k = 0; k < factors.size(); ++k) {
      if (k > 0) out << '*';
      out << factors[k];
    }
  }
  return out.str();
}

}  // namespace jetsym
