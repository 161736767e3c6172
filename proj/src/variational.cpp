#include "jetsym/variational.hpp"

#include <algorithm>

#include "jetsym/errors.hpp"

namespace jetsym {

LagrangianSystem::LagrangianSystem(JetSpace space, Expression lagrangian)
    : space_(std::move(space)), lagrangian_(std::move(lagrangian)) {
  if (lagrangian_.max_jet_order() > 1) {
    throw MalformedExpressionError("Lagrangian must be first order");
  }
}

HigherOrderVectorField::HigherOrderVectorField(const JetSpace& space, std::vector<Expression> base,
                                               std::vector<Expression> fiber)
    : base_(std::move(base)), fiber_(std::move(fiber)) {
  base_.resize(static_cast<std::size_t>(space.base_dim));
  fiber_.resize(static_cast<std::size_t>(space.field_count));
  for (const auto& b : base_) {
    if (b.depends_on_jets()) {
      throw MalformedExpressionError("base components must depend on base variables only");
    }
  }
}

HigherOrderVectorField HigherOrderVectorField::vertical(const JetSpace& space,
                                                        std::vector<Expression> fiber) {
  return HigherOrderVectorField(space, {}, std::move(fiber));
}

int HigherOrderVectorField::order() const {
  int k = 0;
  for (const auto& f : fiber_) k = std::max(k, f.max_jet_order());
  return k;
}

bool HigherOrderVectorField::is_vertical() const {
  return std::all_of(base_.begin(), base_.end(), [](const auto& e) { return e.is_zero(); });
}

bool HigherOrderVectorField::is_zero() const {
  return is_vertical() &&
         std::all_of(fiber_.begin(), fiber_.end(), [](const auto& e) { return e.is_zero(); });
}

std::vector<Expression> characteristic(const HigherOrderVectorField& xi, const JetSpace& space) {
  std::vector<Expression> q = xi.fiber();
  q.resize(static_cast<std::size_t>(space.field_count));
  for (int i = 0; i < space.field_count; ++i) {
    for (int mu = 0; mu < space.base_dim && mu < static_cast<int>(xi.base().size()); ++mu) {
      q[static_cast<std::size_t>(i)] -=
          Expression::jet(JetVariable(i, {mu})) * xi.base()[static_cast<std::size_t>(mu)];
    }
  }
  return q;
}

ProlongedVectorField prolong(const HigherOrderVectorField& xi, int target_order,
                             const JetSpace& space) {
  if (target_order < xi.order()) {
    throw Error("prolongation order below the order of the field");
  }
  return ProlongedVectorField::from_characteristic(xi.base(), characteristic(xi, space),
                                                   target_order, space);
}

PCForm pc_form(const LagrangianSystem& sys) {
  const JetSpace& space = sys.space();
  PCForm out{Form(space.base_dim), sys.lagrangian(), {}};
  out.theta = sys.lagrangian() * Form::volume(space);
  for (int i = 0; i < space.field_count; ++i) {
    std::vector<Expression> p_i;
    for (int mu = 0; mu < space.base_dim; ++mu) {
      Expression p = partial(sys.lagrangian(), jet_atom(JetVariable(i, {mu})));
      out.theta += p * wedge(Form::omega(JetVariable(i, {})), Form::volume_minus(mu, space));
      p_i.push_back(std::move(p));
    }
    out.momenta.push_back(std::move(p_i));
  }
  return out;
}

namespace {

std::vector<JetVariable> jets_between(int lo, int hi, const JetSpace& space) {
  std::vector<JetVariable> out;
  // Enumerate sorted multi-indices by size.
  std::vector<std::vector<int>> level{{}};
  for (int k = 0; k <= hi; ++k) {
    if (k >= lo) {
      for (int i = 0; i < space.field_count; ++i) {
        for (const auto& j : level) out.emplace_back(i, j);
      }
    }
    std::vector<std::vector<int>> next;
    for (const auto& j : level) {
      const int start = j.empty() ? 0 : j.back();
      for (int mu = start; mu < space.base_dim; ++mu) {
        auto n = j;
        n.push_back(mu);
        next.push_back(std::move(n));
      }
    }
    level = std::move(next);
  }
  return out;
}

ProlongedVectorField generic_vertical(const std::string& tag, int lo, int hi,
                                      const JetSpace& space) {
  ProlongedVectorField v(space);
  for (const auto& jet : jets_between(lo, hi, space)) {
    std::string name = "_" + tag + std::to_string(jet.field());
    for (int mu : jet.multi_index()) name += "_" + std::to_string(mu);
    if (jet.order() == 0) name += "_";
    v.set_component(jet, Expression::param(name));
  }
  return v;
}

Form contract(const ProlongedVectorField& v, const Form& alpha) {
  if (alpha.degree() == 0 || alpha.is_zero()) return Form(std::max(alpha.degree() - 1, 0));
  return interior(v, alpha);
}

}  // namespace

PCAxiomReport verify_pc_axioms(const Form& theta, int order, const JetSpace& space) {
  PCAxiomReport report;
  const int top = 2 * order - 1;

  for (const auto& [factors, c] : theta.terms()) {
    if (c.max_jet_order() > top) report.domain = false;
    for (const auto& b : factors) {
      if (const auto* o = std::get_if<Omega>(&b); o && o->jet.order() + 1 > top) {
        report.domain = false;
      }
    }
  }

  Form h = horizontal(theta);
  for (const auto& [factors, c] : h.terms()) {
    if (static_cast<int>(factors.size()) != space.base_dim || c.max_jet_order() > order) {
      report.horizontal_order = false;
    }
  }

  // Generic fields reach one order past the form's own content, so terms
  // outside J^{2k-1} are seen rather than silently ignored.
  const int reach = std::max(top, theta.max_jet_order() + 1);
  auto x_all = generic_vertical("X", 0, reach, space);
  auto y_all = generic_vertical("Y", 0, reach, space);
  report.pc1 = contract(x_all, contract(y_all, theta)).is_zero();

  auto x_upper = generic_vertical("X", order, reach, space);
  report.pc2 = contract(x_upper, theta).is_zero();

  auto x_nonzero = generic_vertical("X", 1, reach, space);
  report.pc3 = horizontal(contract(x_nonzero, exterior_d(theta, space))).is_zero();
  return report;
}

std::vector<Expression> euler_lagrange(const LagrangianSystem& sys) {
  const JetSpace& space = sys.space();
  const Expression& l = sys.lagrangian();
  std::vector<Expression> out;
  for (int i = 0; i < space.field_count; ++i) {
    Expression e = partial(l, jet_atom(JetVariable(i, {})));
    for (int mu = 0; mu < space.base_dim; ++mu) {
      e -= total_derivative(partial(l, jet_atom(JetVariable(i, {mu}))), mu, space);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Expression> euler_operator(const Expression& c, const JetSpace& space) {
  std::vector<Expression> out(static_cast<std::size_t>(space.field_count));
  for (const auto& atom : c.atoms()) {
    const auto* jet = as_jet(atom);
    if (!jet) continue;
    Expression term = total_derivative(partial(c, atom), jet->multi_index(), space);
    auto& slot = out[static_cast<std::size_t>(jet->field())];
    if (jet->order() % 2 == 0) {
      slot += term;
    } else {
      slot -= term;
    }
  }
  return out;
}

Form lie_derivative(const ProlongedVectorField& v, const Form& alpha) {
  if (alpha.degree() == 0) {
    Form out(0);
    for (const auto& [factors, c] : alpha.terms()) out += Form::scalar(v.apply(c));
    return out;
  }
  return exterior_d(interior(v, alpha), v.space()) + interior(v, exterior_d(alpha, v.space()));
}

Form lie_derivative(const HigherOrderVectorField& xi, const Form& alpha, const JetSpace& space) {
  return lie_derivative(prolong(xi, xi.order(), space), alpha);
}

Form reassemble(const NoetherSplitting& s, const JetSpace& space) {
  Form out = exterior_d(s.alpha, space);
  out += s.contact_form;
  out += s.c * Form::volume(space);
  return out;
}

Expression volume_coefficient(const Form& horizontal_top, const JetSpace& space) {
  FactorList ds;
  for (int mu = 0; mu < space.base_dim; ++mu) ds.push_back(Dx{mu});
  for (const auto& [factors, c] : horizontal_top.terms()) {
    if (factors != ds) throw DegreeError("expected a horizontal form of top degree");
  }
  return horizontal_top.coefficient(ds);
}

NoetherSplitting trivial_splitting(const HigherOrderVectorField& xi, const LagrangianSystem& sys) {
  const JetSpace& space = sys.space();
  const PCForm theta = pc_form(sys);
  const ProlongedVectorField v = prolong(xi, xi.order(), space);
  NoetherSplitting s;
  s.alpha = contract(v, theta.theta);
  const Form inner = contract(v, exterior_d(theta.theta, space));
  s.contact_form = contact(inner);
  if (s.contact_form.is_zero()) s.contact_form = Form(space.base_dim);
  s.c = volume_coefficient(horizontal(inner), space);
  return s;
}

}  // namespace jetsym
