#pragma once

// On-shell reduction and the symmetry decision.
//
// For mechanics with non-degenerate equations the Euler-Lagrange system is
// solved for the accelerations, and every higher jet is eliminated through
// the chain obtained by differentiating the solved equations. A candidate
// generator is an on-shell symmetry iff the coefficients A_i of
// omega^i ^ ds in d(L_Xi Theta), after integrating the higher contact terms
// by parts, reduce to zero on that chain.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jetsym/forms.hpp"
#include "jetsym/jetexpr.hpp"
#include "jetsym/variational.hpp"

namespace jetsym {

/// Euler-Lagrange equations solved for the highest derivatives, plus a lazily
/// grown chain of substitutions for their prolongations. Copies share the
/// chain; extension is synchronized.
class NormalSystem {
 public:
  const JetSpace& space() const { return space_; }
  const std::vector<Expression>& source() const { return source_; }
  /// a^i = F^i(t, q, v)
  const std::vector<Expression>& accelerations() const { return accelerations_; }

  /// Replacement for y^i_order (order >= 2) in terms of order <= 1 jets.
  Expression substitution(int field, int order) const;
  Expression reduce(const Expression& e) const;

 private:
  friend NormalSystem normalize_equations(const std::vector<Expression>& equations,
                                          const JetSpace& space);
  struct Chain;

  JetSpace space_;
  std::vector<Expression> source_;
  std::vector<Expression> accelerations_;
  std::shared_ptr<Chain> chain_;
};

/// Mechanics only. The acceleration coefficients must form an invertible
/// matrix of rational constants.
NormalSystem normalize_equations(const std::vector<Expression>& equations, const JetSpace& space);
NormalSystem normalize_equations(const LagrangianSystem& sys);

Expression reduce_onshell(const Expression& e, const NormalSystem& system);

/// d(L_Xi Theta) = sum_i A_i omega^i ^ ds + d(exact_potential) + contact_two
struct CovarianceCertificate {
  Form differential;
  std::vector<Expression> a;
  Form contact_one;
  Form exact_potential;
  Form contact_two;
  /// -d(E_k d_i^mu xi^k omega^i ^ ds_mu); empty when computed from a bare form.
  Form canonical_exact_term;
  bool reassembly_ok = false;
};

CovarianceCertificate extract_a(const Form& differential, const JetSpace& space);
CovarianceCertificate extract_a(const HigherOrderVectorField& xi, const LagrangianSystem& sys);

/// Coefficients c^i_J of omega^i_J ^ ds in the contact-order-1 part.
std::map<JetVariable, Expression> contact_one_coefficients(const Form& top_plus_one,
                                                           const JetSpace& space);

/// User-supplied splitting: potential f^mu (alpha = f^mu ds_mu) and C.
struct SplittingData {
  std::vector<Expression> f;
  Expression c;
};

/// theta[i][k] is the coefficient of omega^i_k in the contact part.
struct ThetaCoefficients {
  std::vector<std::vector<Expression>> by_field;
  Form as_form(const JetSpace& space) const;
};

/// Back-substitution through the rows of the theta system, bottom row first.
/// Right-hand sides are the higher contact coefficients of d(L_Xi Theta),
/// which for first-order generators are E_k d_i^mu xi^k and zero. Mechanics
/// only.
ThetaCoefficients solve_theta(const Expression& c, const Form& differential,
                              const JetSpace& space);
ThetaCoefficients solve_theta(const Expression& c, const HigherOrderVectorField& xi,
                              const LagrangianSystem& sys);

/// E_k d(xi^k)/dy^i_mu for each i, mechanics (mu = t).
std::vector<Expression> canonical_theta_source(const HigherOrderVectorField& xi,
                                               const std::vector<Expression>& equations,
                                               const JetSpace& space);

struct SplittingValidation {
  Expression horizontal_variation;
  std::optional<Expression> c_onshell_residue;
  std::vector<Expression> a;
  std::vector<Expression> euler_c;
  bool euler_c_equals_a = false;
  ThetaCoefficients theta;
  Form contact_form;
  bool theta_matches_contact = false;
  bool valid() const;
};

/// Throws InvalidSplittingError when delta L != C + d_mu f^mu.
SplittingValidation validate_splitting(const HigherOrderVectorField& xi,
                                       const LagrangianSystem& sys, const SplittingData& s);

/// Mechanics: trivial splitting with every multiplier monomial m of Q^i whose
/// m E_i is a total derivative moved into f.
SplittingData reduced_splitting(const HigherOrderVectorField& xi, const LagrangianSystem& sys);

/// Mechanics: inverse of d_t on exact polynomials; throws if not exact.
Expression integrate_total_derivative(const Expression& p, const JetSpace& space);

struct NoetherCurrent {
  Expression current;
  Expression conservation_residue;
};

/// current = Xi _| Theta - f, i.e. p_i delta q^i - f for vertical fields.
NoetherCurrent noether_current(const HigherOrderVectorField& xi, const LagrangianSystem& sys,
                               const SplittingData& s, const NormalSystem& system);

struct TangencyLevel {
  int depth = 0;
  /// Xi applied to y^i_{2+depth} - (its on-shell value), reduced.
  std::vector<Expression> residues;
};

struct TangencyReport {
  std::vector<TangencyLevel> levels;
  bool tangent() const;
};

TangencyReport tangency_check(const HigherOrderVectorField& xi, const NormalSystem& system,
                              int depth);

/// A_i claimed to equal sum over terms of coefficient * d_J E_equation.
struct MultiplierTerm {
  int equation = 0;
  std::vector<int> multi_index;
  Expression coefficient;
};

struct SymmetryOptions {
  int depth = 2;
  std::optional<SplittingData> splitting;
  std::string splitting_name;
  std::vector<std::vector<MultiplierTerm>> multipliers;
};

enum class Verdict { Yes, No, Undecided };
std::string to_string(Verdict v);

struct SymmetryReport {
  Verdict verdict = Verdict::Undecided;
  /// "reduced", "trivial" or the user's splitting name.
  std::string splitting_source;
  std::vector<std::string> provenance;

  Form theta_pc;
  Form lie_derivative;
  CovarianceCertificate covariance;
  std::vector<Expression> equations;

  Expression c_trivial;
  SplittingData splitting;
  Form contact_form;
  bool exact_identity_ok = false;

  std::vector<Expression> euler_c;
  bool euler_c_equals_a = false;
  /// Higher contact coefficients of d(L_Xi Theta) match -d(E_k d_i^mu xi^k ...).
  bool canonical_exact_form = false;

  std::vector<Expression> a_onshell_residue;
  std::optional<Expression> c_onshell_residue;
  std::vector<Expression> euler_c_onshell_residue;

  std::optional<ThetaCoefficients> theta;
  bool theta_matches_contact = false;

  std::optional<NoetherCurrent> current;
  std::optional<TangencyReport> tangency;
  bool multipliers_verified = false;
};

SymmetryReport check_onshell_symmetry(const HigherOrderVectorField& xi,
                                      const LagrangianSystem& sys,
                                      const SymmetryOptions& options = {});

}  // namespace jetsym
