#include "jetsym/onshell.hpp"

#include <algorithm>
#include <mutex>

#include "jetsym/errors.hpp"

namespace jetsym {

// ---------------------------------------------------------------------------
// NormalSystem

struct NormalSystem::Chain {
  std::mutex mutex;
  // levels[l][i] replaces y^i_{2+l}
  std::vector<std::vector<Expression>> levels;
};

namespace {

Atom accel(int field) { return jet_atom(field, 2); }

}  // namespace

NormalSystem normalize_equations(const std::vector<Expression>& equations, const JetSpace& space) {
  if (!space.is_mechanics()) {
    throw UnsupportedBaseError("on-shell reduction needs a one-dimensional base");
  }
  const auto n = static_cast<std::size_t>(space.field_count);
  if (equations.size() != n) throw IndexError("expected one equation per field");

  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
  std::vector<Expression> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (equations[i].max_jet_order() > 2) {
      throw DegenerateSystemError("equation of order above two");
    }
    Expression rest = equations[i];
    for (std::size_t j = 0; j < n; ++j) {
      Expression coeff = partial(equations[i], accel(static_cast<int>(j)));
      if (!coeff.is_constant()) {
        throw DegenerateSystemError("acceleration coefficients must be rational constants");
      }
      m[i][j] = coeff.constant_value();
      rest -= coeff * Expression::from_atom(accel(static_cast<int>(j)));
    }
    if (rest.max_jet_order() > 1) {
      throw DegenerateSystemError("equation is not affine in the accelerations");
    }
    rhs[i] = -rest;
  }

  // Gauss-Jordan over the rationals: M a = rhs.
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) throw DegenerateSystemError("acceleration coefficient matrix is singular");
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    const Rational inv = 1 / m[col][col];
    for (auto& x : m[col]) x *= inv;
    rhs[col] = rhs[col].scaled(inv);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (std::size_t k = 0; k < n; ++k) m[r][k] -= f * m[col][k];
      rhs[r] -= rhs[col].scaled(f);
    }
  }

  NormalSystem out;
  out.space_ = space;
  out.source_ = equations;
  out.accelerations_ = rhs;
  out.chain_ = std::make_shared<NormalSystem::Chain>();
  out.chain_->levels.push_back(rhs);
  return out;
}

NormalSystem normalize_equations(const LagrangianSystem& sys) {
  return normalize_equations(euler_lagrange(sys), sys.space());
}

Expression NormalSystem::substitution(int field, int order) const {
  space_.check_field_index(field);
  if (order < 2) throw IndexError("substitutions exist for orders >= 2 only");
  const auto level = static_cast<std::size_t>(order - 2);
  std::lock_guard<std::mutex> lock(chain_->mutex);
  auto& levels = chain_->levels;
  std::map<Atom, Expression> to_lower;
  for (int i = 0; i < space_.field_count; ++i) {
    to_lower.emplace(accel(i), accelerations_[static_cast<std::size_t>(i)]);
  }
  while (levels.size() <= level) {
    std::vector<Expression> next;
    for (const auto& g : levels.back()) {
      next.push_back(substitute(total_derivative(g, 0, space_), to_lower));
    }
    levels.push_back(std::move(next));
  }
  return levels[level][static_cast<std::size_t>(field)];
}

Expression NormalSystem::reduce(const Expression& e) const {
  const int top = e.max_jet_order();
  if (top <= 1) return e;
  std::map<Atom, Expression> bindings;
  for (int order = 2; order <= top; ++order) {
    for (int i = 0; i < space_.field_count; ++i) {
      bindings.emplace(jet_atom(i, order), substitution(i, order));
    }
  }
  return substitute(e, bindings);
}

Expression reduce_onshell(const Expression& e, const NormalSystem& system) {
  return system.reduce(e);
}

// ---------------------------------------------------------------------------
// Covariance identity

namespace {

Form omega_wedge_volume(const JetVariable& jet, const JetSpace& space) {
  return wedge(Form::omega(jet), Form::volume(space));
}

}  // namespace

std::map<JetVariable, Expression> contact_one_coefficients(const Form& top_plus_one,
                                                           const JetSpace& space) {
  // Stored order is ds ^ omega = (-1)^m omega ^ ds.
  const bool flip = space.base_dim % 2 == 1;
  std::map<JetVariable, Expression> out;
  for (const auto& [factors, c] : top_plus_one.terms()) {
    if (contact_order(factors) != 1) continue;
    const auto& jet = std::get<Omega>(factors.back()).jet;
    out[jet] += flip ? -c : c;
  }
  return out;
}

CovarianceCertificate extract_a(const Form& differential, const JetSpace& space) {
  CovarianceCertificate cert;
  cert.differential = differential;
  cert.contact_one = contact_part(differential, 1);
  cert.exact_potential = Form(space.base_dim);
  cert.canonical_exact_term = Form(space.base_dim + 1);

  auto coeffs = contact_one_coefficients(differential, space);
  // c omega_{J+mu} ^ ds = -d(c omega_J ^ ds_mu) - d_mu c omega_J ^ ds + (contact >= 2)
  while (true) {
    auto top = std::max_element(coeffs.begin(), coeffs.end(), [](const auto& x, const auto& y) {
      return x.first.order() < y.first.order();
    });
    if (top == coeffs.end() || top->first.order() == 0) break;
    const JetVariable jet = top->first;
    const Expression c = top->second;
    coeffs.erase(top);
    if (c.is_zero()) continue;
    const int mu = jet.multi_index().back();
    const JetVariable lower = jet.lowered(mu);
    cert.exact_potential -= c * wedge(Form::omega(lower), Form::volume_minus(mu, space));
    coeffs[lower] -= total_derivative(c, mu, space);
  }

  cert.a.assign(static_cast<std::size_t>(space.field_count), Expression());
  Form rebuilt = exterior_d(cert.exact_potential, space);
  for (int i = 0; i < space.field_count; ++i) {
    auto it = coeffs.find(JetVariable(i, {}));
    if (it != coeffs.end()) cert.a[static_cast<std::size_t>(i)] = it->second;
    rebuilt += cert.a[static_cast<std::size_t>(i)] * omega_wedge_volume(JetVariable(i, {}), space);
  }
  cert.contact_two = differential - rebuilt;
  if (cert.contact_two.is_zero()) cert.contact_two = Form(space.base_dim + 1);
  cert.reassembly_ok = contact_part(cert.contact_two, 0).is_zero() &&
                       contact_part(cert.contact_two, 1).is_zero();
  return cert;
}

CovarianceCertificate extract_a(const HigherOrderVectorField& xi, const LagrangianSystem& sys) {
  const JetSpace& space = sys.space();
  const Form lie = lie_derivative(xi, pc_form(sys).theta, space);
  CovarianceCertificate cert = extract_a(exterior_d(lie, space), space);

  const auto equations = euler_lagrange(sys);
  Form inner(space.base_dim);
  for (int i = 0; i < space.field_count; ++i) {
    for (int mu = 0; mu < space.base_dim; ++mu) {
      Expression coeff;
      for (int k = 0; k < space.field_count; ++k) {
        coeff += equations[static_cast<std::size_t>(k)] *
                 partial(xi.fiber()[static_cast<std::size_t>(k)], jet_atom(JetVariable(i, {mu})));
      }
      inner += coeff * wedge(Form::omega(JetVariable(i, {})), Form::volume_minus(mu, space));
    }
  }
  cert.canonical_exact_term = -exterior_d(inner, space);
  if (cert.canonical_exact_term.is_zero()) cert.canonical_exact_term = Form(space.base_dim + 1);
  return cert;
}

// ---------------------------------------------------------------------------
// Theta system

Form ThetaCoefficients::as_form(const JetSpace& space) const {
  Form out(space.base_dim);
  for (std::size_t i = 0; i < by_field.size(); ++i) {
    for (std::size_t k = 0; k < by_field[i].size(); ++k) {
      out += by_field[i][k] * Form::omega(JetVariable::mechanics(static_cast<int>(i),
                                                                 static_cast<int>(k)));
    }
  }
  return out;
}

ThetaCoefficients solve_theta(const Expression& c, const Form& differential,
                              const JetSpace& space) {
  if (!space.is_mechanics()) {
    throw UnsupportedBaseError("theta back-substitution is implemented for mechanics");
  }
  const auto rhs = contact_one_coefficients(differential, space);
  ThetaCoefficients out;
  for (int i = 0; i < space.field_count; ++i) {
    int top = 0;
    for (const auto& atom : c.atoms()) {
      if (const auto* j = as_jet(atom); j && j->field() == i) top = std::max(top, j->order());
    }
    for (const auto& [jet, coeff] : rhs) {
      if (jet.field() == i && !coeff.is_zero()) top = std::max(top, jet.order());
    }
    // Row j: dC/dy_j - d_t T_j - T_{j-1} = c^j, with T_top = 0.
    std::vector<Expression> t(static_cast<std::size_t>(top));
    Expression above;
    for (int j = top; j >= 1; --j) {
      Expression row = partial(c, jet_atom(i, j)) - total_derivative(above, 0, space);
      if (auto it = rhs.find(JetVariable::mechanics(i, j)); it != rhs.end()) row -= it->second;
      t[static_cast<std::size_t>(j - 1)] = row;
      above = row;
    }
    out.by_field.push_back(std::move(t));
  }
  return out;
}

ThetaCoefficients solve_theta(const Expression& c, const HigherOrderVectorField& xi,
                              const LagrangianSystem& sys) {
  const JetSpace& space = sys.space();
  const Form lie = lie_derivative(xi, pc_form(sys).theta, space);
  return solve_theta(c, exterior_d(lie, space), space);
}

std::vector<Expression> canonical_theta_source(const HigherOrderVectorField& xi,
                                               const std::vector<Expression>& equations,
                                               const JetSpace& space) {
  std::vector<Expression> out;
  for (int i = 0; i < space.field_count; ++i) {
    Expression s;
    for (int k = 0; k < space.field_count; ++k) {
      s += equations[static_cast<std::size_t>(k)] *
           partial(xi.fiber()[static_cast<std::size_t>(k)], jet_atom(i, 1));
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splittings

namespace {

Form potential_form(const std::vector<Expression>& f, const JetSpace& space) {
  Form alpha(space.base_dim - 1);
  for (int mu = 0; mu < space.base_dim && mu < static_cast<int>(f.size()); ++mu) {
    alpha += f[static_cast<std::size_t>(mu)] * Form::volume_minus(mu, space);
  }
  return alpha;
}

Expression divergence(const std::vector<Expression>& f, const JetSpace& space) {
  Expression out;
  for (int mu = 0; mu < space.base_dim && mu < static_cast<int>(f.size()); ++mu) {
    out += total_derivative(f[static_cast<std::size_t>(mu)], mu, space);
  }
  return out;
}

bool all_zero(const std::vector<Expression>& v) {
  return std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_zero(); });
}

}  // namespace

bool SplittingValidation::valid() const {
  return c_onshell_residue && c_onshell_residue->is_zero() && euler_c_equals_a &&
         theta_matches_contact;
}

SplittingValidation validate_splitting(const HigherOrderVectorField& xi,
                                       const LagrangianSystem& sys, const SplittingData& s) {
  const JetSpace& space = sys.space();
  const Form lie = lie_derivative(xi, pc_form(sys).theta, space);

  SplittingValidation out;
  out.horizontal_variation = volume_coefficient(horizontal(lie), space);
  const Expression residual = out.horizontal_variation - s.c - divergence(s.f, space);
  if (!residual.is_zero()) {
    throw InvalidSplittingError("splitting identity fails, residual " + render(residual, space),
                                render(residual, space));
  }

  out.contact_form = contact(lie - exterior_d(potential_form(s.f, space), space));
  if (out.contact_form.is_zero()) out.contact_form = Form(space.base_dim);

  const Form differential = exterior_d(lie, space);
  out.a = extract_a(differential, space).a;
  out.euler_c = euler_operator(s.c, space);
  out.euler_c_equals_a = out.euler_c == out.a;

  if (space.is_mechanics()) {
    const NormalSystem normal = normalize_equations(sys);
    out.c_onshell_residue = normal.reduce(s.c);
    out.theta = solve_theta(s.c, differential, space);
    out.theta_matches_contact = out.theta.as_form(space) == out.contact_form;
  }
  return out;
}

Expression integrate_total_derivative(const Expression& p, const JetSpace& space) {
  if (!space.is_mechanics()) throw UnsupportedBaseError("total-derivative inversion needs m = 1");
  Expression rest = p;
  Expression potential;
  for (int guard = 0; guard < 4096; ++guard) {
    const int top = rest.max_jet_order();
    if (top <= 0) {
      if (top == 0) throw Error("expression is not a total derivative");
      Expression g = antiderivative(rest, base_atom(0));
      potential += g;
      rest -= total_derivative(g, 0, space);
      break;
    }
    for (int i = 0; i < space.field_count; ++i) {
      const Atom y_top = jet_atom(i, top);
      if (!rest.depends_on(y_top)) continue;
      Expression coeff = partial(rest, y_top);
      if (coeff.max_jet_order() >= top) throw Error("expression is not a total derivative");
      Expression g = antiderivative(coeff, jet_atom(i, top - 1));
      potential += g;
      rest -= total_derivative(g, 0, space);
      break;
    }
  }
  if (!rest.is_zero()) throw Error("expression is not a total derivative");
  return potential;
}

SplittingData reduced_splitting(const HigherOrderVectorField& xi, const LagrangianSystem& sys) {
  const JetSpace& space = sys.space();
  if (!space.is_mechanics()) throw UnsupportedBaseError("reduced splittings need m = 1");
  const NoetherSplitting trivial = trivial_splitting(xi, sys);
  SplittingData out{{trivial.alpha.coefficient({})}, trivial.c};

  const auto equations = euler_lagrange(sys);
  const auto q = characteristic(xi, space);
  Expression product;
  for (int i = 0; i < space.field_count; ++i) {
    product += q[static_cast<std::size_t>(i)] * equations[static_cast<std::size_t>(i)];
  }
  if (!(product == trivial.c)) return out;

  for (int i = 0; i < space.field_count; ++i) {
    for (const auto& [m, c] : q[static_cast<std::size_t>(i)].terms()) {
      const Expression piece = Expression::term(m, c) * equations[static_cast<std::size_t>(i)];
      if (piece.is_zero() || !all_zero(euler_operator(piece, space))) continue;
      out.c -= piece;
      out.f[0] += integrate_total_derivative(piece, space);
    }
  }
  return out;
}

NoetherCurrent noether_current(const HigherOrderVectorField& xi, const LagrangianSystem& sys,
                               const SplittingData& s, const NormalSystem& system) {
  const JetSpace& space = sys.space();
  if (!space.is_mechanics()) throw UnsupportedBaseError("Noether currents need m = 1");
  const Form contracted = interior(prolong(xi, xi.order(), space), pc_form(sys).theta);
  NoetherCurrent out;
  out.current = contracted.coefficient({}) - (s.f.empty() ? Expression() : s.f[0]);
  out.conservation_residue = system.reduce(total_derivative(out.current, 0, space));
  return out;
}

// ---------------------------------------------------------------------------
// Tangency

bool TangencyReport::tangent() const {
  return std::all_of(levels.begin(), levels.end(),
                     [](const auto& level) { return all_zero(level.residues); });
}

TangencyReport tangency_check(const HigherOrderVectorField& xi, const NormalSystem& system,
                              int depth) {
  const JetSpace& space = system.space();
  const ProlongedVectorField v = prolong(xi, xi.order(), space);
  TangencyReport report;
  for (int level = 0; level <= depth; ++level) {
    TangencyLevel row{level, {}};
    for (int i = 0; i < space.field_count; ++i) {
      const JetVariable target = JetVariable::mechanics(i, 2 + level);
      Expression r = v.component(target) - v.apply(system.substitution(i, 2 + level));
      row.residues.push_back(system.reduce(r));
    }
    report.levels.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Decision

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes:
      return "yes";
    case Verdict::No:
      return "no";
    case Verdict::Undecided:
      return "undecided";
  }
  return "undecided";
}

SymmetryReport check_onshell_symmetry(const HigherOrderVectorField& xi,
                                      const LagrangianSystem& sys,
                                      const SymmetryOptions& options) {
  const JetSpace& space = sys.space();
  SymmetryReport r;
  r.theta_pc = pc_form(sys).theta;
  r.lie_derivative = lie_derivative(xi, r.theta_pc, space);
  r.covariance = extract_a(xi, sys);
  r.equations = euler_lagrange(sys);
  r.provenance.push_back("A: Euler reduction of the contact-order-1 part of d(L_Xi Theta)");

  const NoetherSplitting trivial = trivial_splitting(xi, sys);
  r.c_trivial = trivial.c;

  if (options.splitting) {
    r.splitting = *options.splitting;
    r.splitting_source = options.splitting_name.empty() ? "user" : options.splitting_name;
    r.provenance.push_back("splitting: supplied by the user");
  } else if (space.is_mechanics()) {
    r.splitting = reduced_splitting(xi, sys);
    r.splitting_source = "reduced";
    r.provenance.push_back("splitting: trivial splitting with total-derivative multiplier terms"
                           " moved into the potential");
  } else {
    r.splitting = {{}, trivial.c};
    std::vector<Expression> f;
    for (int mu = 0; mu < space.base_dim; ++mu) {
      // alpha = f^mu ds_mu; recover f^mu from the coefficient of ds_mu.
      const Form ds_mu = Form::volume_minus(mu, space);
      const auto& [factors, sign] = *ds_mu.terms().begin();
      Expression coeff = trivial.alpha.coefficient(factors);
      f.push_back(sign == Expression(1L) ? coeff : -coeff);
    }
    r.splitting.f = std::move(f);
    r.splitting_source = "trivial";
    r.provenance.push_back("splitting: Cartan-formula (trivial) splitting");
  }

  // Throws InvalidSplittingError for a user splitting that does not add up.
  const SplittingValidation validation = validate_splitting(xi, sys, r.splitting);
  r.contact_form = validation.contact_form;
  r.euler_c = validation.euler_c;
  r.euler_c_equals_a = validation.euler_c_equals_a;
  {
    NoetherSplitting s{potential_form(r.splitting.f, space), r.contact_form, r.splitting.c};
    r.exact_identity_ok = reassemble(s, space) == r.lie_derivative;
  }

  if (space.is_mechanics()) {
    const auto source = canonical_theta_source(xi, r.equations, space);
    const auto rhs = contact_one_coefficients(r.covariance.differential, space);
    bool canonical = true;
    for (const auto& [jet, coeff] : rhs) {
      if (jet.order() == 0) continue;
      const Expression expected =
          jet.order() == 1 ? source[static_cast<std::size_t>(jet.field())] : Expression();
      if (!(coeff == expected)) canonical = false;
    }
    for (int i = 0; i < space.field_count; ++i) {
      auto it = rhs.find(JetVariable::mechanics(i, 1));
      if (it == rhs.end() && !source[static_cast<std::size_t>(i)].is_zero()) canonical = false;
    }
    r.canonical_exact_form = canonical;

    const NormalSystem normal = normalize_equations(r.equations, space);
    for (const auto& a : r.covariance.a) r.a_onshell_residue.push_back(normal.reduce(a));
    r.c_onshell_residue = normal.reduce(r.splitting.c);
    for (const auto& e : r.euler_c) r.euler_c_onshell_residue.push_back(normal.reduce(e));
    r.theta = validation.theta;
    r.theta_matches_contact = validation.theta_matches_contact;
    r.current = noether_current(xi, sys, r.splitting, normal);
    r.tangency = tangency_check(xi, normal, options.depth);
    r.verdict = all_zero(r.a_onshell_residue) ? Verdict::Yes : Verdict::No;
    r.provenance.push_back("verdict: A_i reduced on the normal-form substitution chain");
    return r;
  }

  if (all_zero(r.covariance.a)) {
    r.verdict = Verdict::Yes;
    r.provenance.push_back("verdict: A_i vanish identically");
  } else if (!options.multipliers.empty()) {
    bool ok = options.multipliers.size() == r.covariance.a.size();
    for (std::size_t i = 0; ok && i < r.covariance.a.size(); ++i) {
      Expression combo;
      for (const auto& term : options.multipliers[i]) {
        space.check_field_index(term.equation);
        combo += term.coefficient *
                 total_derivative(r.equations[static_cast<std::size_t>(term.equation)],
                                  term.multi_index, space);
      }
      ok = combo == r.covariance.a[i];
    }
    r.multipliers_verified = ok;
    r.verdict = ok ? Verdict::Yes : Verdict::Undecided;
    r.provenance.push_back(ok ? "verdict: A_i match the supplied multiplier combination exactly"
                              : "verdict: supplied multipliers do not reproduce A_i");
  } else {
    r.provenance.push_back("verdict: no on-shell decision procedure for m > 1 without multipliers");
  }
  return r;
}

}  // namespace jetsym
