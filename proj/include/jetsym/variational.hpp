#pragma once

// Lagrangian-level constructions on top of the form algebra: the
// Poincaré-Cartan form of a first-order Lagrangian, Euler-Lagrange
// expressions, the Euler operator, prolongation of projectable higher-order
// vector fields, Lie derivatives and the splitting induced by Cartan's formula.

#include <string>
#include <vector>

#include "jetsym/forms.hpp"
#include "jetsym/jetexpr.hpp"

namespace jetsym {

class LagrangianSystem {
 public:
  /// Throws MalformedExpressionError unless the Lagrangian is first order.
  LagrangianSystem(JetSpace space, Expression lagrangian);

  const JetSpace& space() const { return space_; }
  const Expression& lagrangian() const { return lagrangian_; }

 private:
  JetSpace space_;
  Expression lagrangian_;
};

/// Projectable higher-order field xi^mu(x) d_mu + xi^i(jets) d_i.
class HigherOrderVectorField {
 public:
  HigherOrderVectorField() = default;
  /// Missing components are zero. Base components may only depend on base
  /// variables and parameters.
  HigherOrderVectorField(const JetSpace& space, std::vector<Expression> base,
                         std::vector<Expression> fiber);
  static HigherOrderVectorField vertical(const JetSpace& space, std::vector<Expression> fiber);

  const std::vector<Expression>& base() const { return base_; }
  const std::vector<Expression>& fiber() const { return fiber_; }
  int order() const;
  bool is_vertical() const;
  bool is_zero() const;

 private:
  std::vector<Expression> base_;
  std::vector<Expression> fiber_;
};

/// Q^i = xi^i - y^i_mu xi^mu, the variation delta y^i reported throughout.
std::vector<Expression> characteristic(const HigherOrderVectorField& xi, const JetSpace& space);

/// Components Xi^i_J = d_J Q^i + y^i_{J+mu} xi^mu up to target_order; further
/// components remain available on demand.
ProlongedVectorField prolong(const HigherOrderVectorField& xi, int target_order,
                             const JetSpace& space);

struct PCForm {
  Form theta;
  Expression lagrangian;
  /// momenta[i][mu] = dL/dy^i_mu
  std::vector<std::vector<Expression>> momenta;
};

/// Theta = L ds + p_i^mu omega^i ^ ds_mu
PCForm pc_form(const LagrangianSystem& sys);

struct PCAxiomReport {
  /// Theta lives on J^{2k-1}.
  bool domain = true;
  /// H(Theta) = L ds with L of order <= k.
  bool horizontal_order = true;
  bool pc1 = true;
  bool pc2 = true;
  bool pc3 = true;
  bool all() const { return domain && horizontal_order && pc1 && pc2 && pc3; }
};

/// Checks the axioms with generic vertical fields whose coefficients are
/// fresh parameters, so a single symbolic evaluation decides each axiom.
PCAxiomReport verify_pc_axioms(const Form& theta, int order, const JetSpace& space);

/// E_i = d_i L - d_mu d_i^mu L
std::vector<Expression> euler_lagrange(const LagrangianSystem& sys);

/// E_i(C) = sum_J (-1)^{|J|} d_J (dC/dy^i_J)
std::vector<Expression> euler_operator(const Expression& c, const JetSpace& space);

/// Cartan formula with the prolonged field.
Form lie_derivative(const HigherOrderVectorField& xi, const Form& alpha, const JetSpace& space);
Form lie_derivative(const ProlongedVectorField& v, const Form& alpha);

/// L_Xi Theta = d(alpha) + contact_form + C ds
struct NoetherSplitting {
  Form alpha;
  Form contact_form;
  Expression c;
};

Form reassemble(const NoetherSplitting& s, const JetSpace& space);

/// alpha = Xi _| Theta, contact_form = K(Xi _| dTheta), C ds = H(Xi _| dTheta).
NoetherSplitting trivial_splitting(const HigherOrderVectorField& xi, const LagrangianSystem& sys);

/// Horizontal m-form f ds -> f.
Expression volume_coefficient(const Form& horizontal_top, const JetSpace& space);

}  // namespace jetsym
