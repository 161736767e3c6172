#pragma once

// Exact polynomial arithmetic over jet coordinates.
//
// Every scalar in the library is an Expression: a polynomial with rational
// coefficients in base variables x^mu, jet variables y^i_J and opaque
// parameters. Expressions are kept in a canonical expanded form, so equality
// is structural equality.
//
// Indices are 0-based throughout the C++ API (field i in [0, n), base index
// mu in [0, m)); names are only used for rendering and parsing.

#include <compare>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace jetsym {

using Rational = mpq_class;

/// Dimensions and display names of a configuration bundle.
struct JetSpace {
  int base_dim = 1;
  int field_count = 1;
  std::vector<std::string> base_names{"t"};
  std::vector<std::string> field_names{"q"};

  static JetSpace mechanics(std::vector<std::string> fields = {"q"},
                            std::string time = "t");
  static JetSpace field_theory(std::vector<std::string> bases,
                               std::vector<std::string> fields);

  bool is_mechanics() const { return base_dim == 1; }
  void check_base_index(int mu) const;
  void check_field_index(int i) const;

  friend bool operator==(const JetSpace&, const JetSpace&) = default;
};

/// y^i_J with J a sorted multiset of base indices.
class JetVariable {
 public:
  JetVariable() = default;
  JetVariable(int field, std::vector<int> multi_index);

  /// Mechanics shorthand: order k means J = (0, ..., 0) of size k.
  static JetVariable mechanics(int field, int order);

  int field() const { return field_; }
  const std::vector<int>& multi_index() const { return multi_index_; }
  int order() const { return static_cast<int>(multi_index_.size()); }

  /// y^i_{J+mu}
  JetVariable raised(int mu) const;
  /// Drops one occurrence of mu from J; J must contain it.
  JetVariable lowered(int mu) const;

  friend bool operator==(const JetVariable&, const JetVariable&) = default;
  friend std::strong_ordering operator<=>(const JetVariable& a,
                                          const JetVariable& b);

 private:
  int field_ = 0;
  std::vector<int> multi_index_;
};

struct BaseVariable {
  int index = 0;
  friend auto operator<=>(const BaseVariable&, const BaseVariable&) = default;
};

/// Formal symbol; commutes with every derivative operator.
struct Parameter {
  std::string name;
  friend auto operator<=>(const Parameter&, const Parameter&) = default;
};

/// Atom order: base variables < jet variables (field, |J|, J) < parameters.
using Atom = std::variant<BaseVariable, JetVariable, Parameter>;

Atom base_atom(int mu);
Atom jet_atom(int field, int order);  // mechanics
Atom jet_atom(const JetVariable& jet);
Atom param_atom(std::string name);

const JetVariable* as_jet(const Atom& atom);

/// Sorted (atom, exponent) pairs, exponents >= 1.
using Monomial = std::vector<std::pair<Atom, unsigned>>;

unsigned total_degree(const Monomial& m);

/// Graded order: higher total degree first, then lexicographic on factors.
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Expression {
 public:
  using TermMap = std::map<Monomial, Rational, MonomialOrder>;

  Expression() = default;
  Expression(long value);  // NOLINT(google-explicit-constructor)
  Expression(const Rational& value);  // NOLINT(google-explicit-constructor)

  static Expression from_atom(const Atom& atom);
  static Expression base(int mu);
  static Expression jet(const JetVariable& jet);
  static Expression jet(int field, int order);
  static Expression param(std::string name);
  static Expression term(const Monomial& m, const Rational& c);

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term if the expression is a constant, otherwise throws.
  Rational constant_value() const;

  /// Highest jet order present, -1 when no jet variable occurs.
  int max_jet_order() const;
  std::set<Atom> atoms() const;
  bool depends_on(const Atom& atom) const;
  bool depends_on_jets() const { return max_jet_order() >= 0; }

  Expression& operator+=(const Expression& other);
  Expression& operator-=(const Expression& other);
  Expression& operator*=(const Expression& other);

  friend Expression operator+(Expression a, const Expression& b) { return a += b; }
  friend Expression operator-(Expression a, const Expression& b) { return a -= b; }
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);

  Expression scaled(const Rational& c) const;
  /// Division by a nonzero rational; anything else is malformed.
  Expression divided_by(const Rational& c) const;
  Expression pow(unsigned exponent) const;

  friend bool operator==(const Expression& a, const Expression& b) {
    return a.terms_ == b.terms_;
  }

 private:
  void add_term(const Monomial& m, const Rational& c);
  TermMap terms_;
};

/// Formal partial derivative, all atoms independent.
Expression partial(const Expression& e, const Atom& atom);

/// d_mu e = de/dx^mu + sum_{i,J} y^i_{J+mu} de/dy^i_J.
Expression total_derivative(const Expression& e, int mu, const JetSpace& space);
/// Iterated total derivative d_J (order of J irrelevant).
Expression total_derivative(const Expression& e, const std::vector<int>& multi_index,
                            const JetSpace& space);

/// Simultaneous substitution of atoms.
Expression substitute(const Expression& e, const std::map<Atom, Expression>& bindings);

/// Polynomial antiderivative in one atom.
Expression antiderivative(const Expression& e, const Atom& atom);

using Number = std::variant<Rational, double>;

/// Exact when every bound value used is rational, floating point otherwise.
Number evaluate(const Expression& e, const std::map<Atom, Number>& point);
double to_double(const Number& n);

/// Expression compiled against a fixed slot layout for fast float evaluation.
class NumericFunction {
 public:
  NumericFunction() = default;
  NumericFunction(const Expression& e, const std::vector<Atom>& slots);

  double operator()(std::span<const double> values) const;

 private:
  struct Term {
    double coefficient;
    std::vector<std::pair<std::size_t, unsigned>> powers;
  };
  std::vector<Term> terms_;
};

// Raw expression trees, as produced by the parser before canonicalization.
struct RawExpr {
  enum class Kind { Number, Atom, Add, Sub, Mul, Div, Neg, Pow };

  Kind kind = Kind::Number;
  Rational value;
  Atom atom;
  std::vector<RawExpr> children;

  static RawExpr number(const Rational& v);
  static RawExpr leaf(const Atom& a);
  static RawExpr unary(Kind k, RawExpr operand);
  static RawExpr binary(Kind k, RawExpr lhs, RawExpr rhs);
};

/// Canonical form of a raw tree. Division is only allowed by nonzero
/// rationals and exponents must be nonnegative integers.
Expression normalize(const RawExpr& raw);
/// Sum-of-products tree of an already normal expression.
RawExpr to_raw(const Expression& e);

std::string render(const Atom& atom, const JetSpace& space);
std::string render(const Expression& e, const JetSpace& space);
std::string render(const Rational& r);

}  // namespace jetsym
