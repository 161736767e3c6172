#pragma once

// Exterior algebra on finite truncations of the infinite jet bundle, stored
// in the basis {dx^mu, omega^i_J} with omega^i_J = dy^i_J - y^i_{J+mu} dx^mu.
// Factors of a term are kept sorted (all dx first, then omega by jet order),
// so horizontal/contact projections are a matter of counting factors.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "jetsym/jetexpr.hpp"

namespace jetsym {

struct Dx {
  int mu = 0;
  friend auto operator<=>(const Dx&, const Dx&) = default;
};

struct Omega {
  JetVariable jet;
  friend auto operator<=>(const Omega&, const Omega&) = default;
};

using BasisOneForm = std::variant<Dx, Omega>;
using FactorList = std::vector<BasisOneForm>;

int contact_order(const FactorList& factors);

class Form {
 public:
  using TermMap = std::map<FactorList, Expression>;

  /// The zero form of the given degree.
  explicit Form(int degree = 0) : degree_(degree) {}

  static Form scalar(const Expression& f);
  static Form dx(int mu);
  static Form omega(const JetVariable& jet);
  /// dy^i_J = omega^i_J + y^i_{J+mu} dx^mu, the input-boundary conversion.
  static Form dy(const JetVariable& jet, const JetSpace& space);
  /// ds = dx^0 ^ ... ^ dx^{m-1}
  static Form volume(const JetSpace& space);
  /// ds_mu = d_mu _| ds
  static Form volume_minus(int mu, const JetSpace& space);
  /// Single term, factors in any order (sign of the sort is applied).
  static Form term(const Expression& coefficient, FactorList factors);

  int degree() const { return degree_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Coefficient of a canonical factor list (zero if absent).
  Expression coefficient(const FactorList& factors) const;
  int max_contact_order() const;
  /// Highest jet order appearing in coefficients or omega factors.
  int max_jet_order() const;

  Form& operator+=(const Form& other);
  Form& operator-=(const Form& other);
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator-(const Form& a);
  friend Form operator*(const Expression& f, const Form& a);

  friend bool operator==(const Form&, const Form&) = default;

 private:
  void add(const FactorList& canonical, const Expression& c);
  int degree_;
  TermMap terms_;
};

Form wedge(const Form& a, const Form& b);
Form exterior_d(const Form& alpha, const JetSpace& space);

/// Partition by number of omega factors; only nonzero parts are present.
std::map<int, Form> contact_split(const Form& alpha);
/// H(.)
Form horizontal(const Form& alpha);
/// K(.)
Form contact(const Form& alpha);
/// Part with exactly k omega factors.
Form contact_part(const Form& alpha, int k);

/// Vector field on the jet bundle: xi^mu d_mu + sum Xi^i_J d/dy^i_J.
///
/// Components beyond the explicit ones are either zero or, for fields built
/// from a characteristic Q^i, produced on demand by the prolongation rule
/// Xi^i_J = d_J Q^i + y^i_{J+mu} xi^mu.
class ProlongedVectorField {
 public:
  explicit ProlongedVectorField(const JetSpace& space);

  static ProlongedVectorField coordinate_base(int mu, const JetSpace& space);
  static ProlongedVectorField coordinate_jet(const JetVariable& jet, const JetSpace& space);
  /// Prolongation of a projectable field from its base components and
  /// characteristic, with components cached up to working_order.
  static ProlongedVectorField from_characteristic(std::vector<Expression> base,
                                                  std::vector<Expression> characteristic,
                                                  int working_order, const JetSpace& space);

  const JetSpace& space() const { return space_; }
  const Expression& base_component(int mu) const;
  Expression component(const JetVariable& jet) const;
  void set_base_component(int mu, Expression e);
  void set_component(const JetVariable& jet, Expression e);

  int working_order() const { return working_order_; }
  bool is_vertical() const;
  bool is_prolongation() const { return characteristic_.has_value(); }
  const std::vector<Expression>& characteristic() const { return *characteristic_; }
  /// Same field with explicit components up to the given order.
  ProlongedVectorField extended(int order) const;

  /// V(f) = xi^mu df/dx^mu + sum Xi^i_J df/dy^i_J
  Expression apply(const Expression& f) const;
  /// V _| omega^i_J = Xi^i_J - y^i_{J+mu} xi^mu
  Expression pairing(const BasisOneForm& b) const;

 private:
  JetSpace space_;
  std::vector<Expression> base_;
  std::map<JetVariable, Expression> components_;
  std::optional<std::vector<Expression>> characteristic_;
  int working_order_ = -1;
};

/// V _| alpha. Contracting a scalar is a DegreeError.
Form interior(const ProlongedVectorField& v, const Form& alpha);

std::string render(const BasisOneForm& b, const JetSpace& space);
/// e.g. "(lambda*q''' + 2*q'') dt∧ω + (lambda*q'') dt∧ω'"
std::string render(const Form& alpha, const JetSpace& space);

}  // namespace jetsym
