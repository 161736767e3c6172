#include "jetsym/forms.hpp"

#include <algorithm>
#include <sstream>

#include "jetsym/errors.hpp"

namespace jetsym {

int contact_order(const FactorList& factors) {
  return static_cast<int>(std::count_if(factors.begin(), factors.end(), [](const auto& b) {
    return std::holds_alternative<Omega>(b);
  }));
}

namespace {

// Sorts factors in place and returns the permutation sign, or 0 if a factor
// repeats.
int canonicalize(FactorList& factors) {
  int sign = 1;
  // Insertion sort keeps track of transpositions; lists are short.
  for (std::size_t i = 1; i < factors.size(); ++i) {
    for (std::size_t j = i; j > 0 && factors[j] < factors[j - 1]; --j) {
      std::swap(factors[j], factors[j - 1]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < factors.size(); ++i) {
    if (factors[i] == factors[i - 1]) return 0;
  }
  return sign;
}

}  // namespace

// ---------------------------------------------------------------------------
// Form

Form Form::scalar(const Expression& f) {
  Form out(0);
  out.add({}, f);
  return out;
}

Form Form::dx(int mu) { return term(Expression(1L), {Dx{mu}}); }

Form Form::omega(const JetVariable& jet) { return term(Expression(1L), {Omega{jet}}); }

Form Form::dy(const JetVariable& jet, const JetSpace& space) {
  Form out = omega(jet);
  for (int mu = 0; mu < space.base_dim; ++mu) {
    out += Expression::jet(jet.raised(mu)) * dx(mu);
  }
  return out;
}

Form Form::volume(const JetSpace& space) {
  FactorList f;
  for (int mu = 0; mu < space.base_dim; ++mu) f.push_back(Dx{mu});
  return term(Expression(1L), f);
}

Form Form::volume_minus(int mu, const JetSpace& space) {
  space.check_base_index(mu);
  FactorList f;
  for (int nu = 0; nu < space.base_dim; ++nu) {
    if (nu != mu) f.push_back(Dx{nu});
  }
  // d_mu _| (dx^0 ^ ... ^ dx^{m-1}) picks up (-1)^mu.
  return term(Expression(mu % 2 == 0 ? 1L : -1L), f);
}

Form Form::term(const Expression& coefficient, FactorList factors) {
  Form out(static_cast<int>(factors.size()));
  const int sign = canonicalize(factors);
  if (sign != 0) out.add(factors, sign > 0 ? coefficient : -coefficient);
  return out;
}

void Form::add(const FactorList& canonical, const Expression& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(canonical, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Expression Form::coefficient(const FactorList& factors) const {
  auto it = terms_.find(factors);
  return it == terms_.end() ? Expression() : it->second;
}

int Form::max_contact_order() const {
  int k = -1;
  for (const auto& [f, c] : terms_) k = std::max(k, contact_order(f));
  return k;
}

int Form::max_jet_order() const {
  int k = -1;
  for (const auto& [f, c] : terms_) {
    k = std::max(k, c.max_jet_order());
    for (const auto& b : f) {
      if (const auto* o = std::get_if<Omega>(&b)) k = std::max(k, o->jet.order());
    }
  }
  return k;
}

Form& Form::operator+=(const Form& other) {
  if (other.is_zero()) return *this;
  if (is_zero()) degree_ = other.degree_;
  if (degree_ != other.degree_) throw DegreeError("adding forms of different degree");
  for (const auto& [f, c] : other.terms_) add(f, c);
  return *this;
}

Form& Form::operator-=(const Form& other) { return *this += -other; }

Form operator-(const Form& a) {
  Form out(a.degree_);
  for (const auto& [f, c] : a.terms_) out.terms_.emplace(f, -c);
  return out;
}

Form operator*(const Expression& f, const Form& a) {
  Form out(a.degree_);
  for (const auto& [factors, c] : a.terms_) out.add(factors, f * c);
  return out;
}

Form wedge(const Form& a, const Form& b) {
  Form out(a.degree() + b.degree());
  for (const auto& [fa, ca] : a.terms()) {
    for (const auto& [fb, cb] : b.terms()) {
      FactorList joined = fa;
      joined.insert(joined.end(), fb.begin(), fb.end());
      out += Form::term(ca * cb, joined);
    }
  }
  return out;
}

namespace {

Form d_scalar(const Expression& f, const JetSpace& space) {
  Form out(1);
  for (int mu = 0; mu < space.base_dim; ++mu) {
    out += total_derivative(f, mu, space) * Form::dx(mu);
  }
  for (const auto& atom : f.atoms()) {
    if (const auto* j = as_jet(atom)) out += partial(f, atom) * Form::omega(*j);
  }
  return out;
}

Form d_basis(const BasisOneForm& b, const JetSpace& space) {
  Form out(2);
  if (const auto* o = std::get_if<Omega>(&b)) {
    for (int mu = 0; mu < space.base_dim; ++mu) {
      out += Form::term(Expression(1L), {Dx{mu}, Omega{o->jet.raised(mu)}});
    }
  }
  return out;
}

}  // namespace

Form exterior_d(const Form& alpha, const JetSpace& space) {
  Form out(alpha.degree() + 1);
  for (const auto& [factors, c] : alpha.terms()) {
    Form rest = Form::term(Expression(1L), factors);
    out += wedge(d_scalar(c, space), rest);
    for (std::size_t k = 0; k < factors.size(); ++k) {
      FactorList before(factors.begin(), factors.begin() + static_cast<std::ptrdiff_t>(k));
      FactorList after(factors.begin() + static_cast<std::ptrdiff_t>(k) + 1, factors.end());
      Form piece = wedge(wedge(Form::term(Expression(1L), before), d_basis(factors[k], space)),
                         Form::term(Expression(1L), after));
      out += (k % 2 == 0 ? c : -c) * piece;
    }
  }
  return out;
}

std::map<int, Form> contact_split(const Form& alpha) {
  std::map<int, Form> out;
  for (const auto& [f, c] : alpha.terms()) {
    auto [it, inserted] = out.try_emplace(contact_order(f), alpha.degree());
    it->second += Form::term(c, f);
  }
  return out;
}

Form contact_part(const Form& alpha, int k) {
  Form out(alpha.degree());
  for (const auto& [f, c] : alpha.terms()) {
    if (contact_order(f) == k) out += Form::term(c, f);
  }
  return out;
}

Form horizontal(const Form& alpha) { return contact_part(alpha, 0); }

Form contact(const Form& alpha) { return alpha - horizontal(alpha); }

// ---------------------------------------------------------------------------
// ProlongedVectorField

ProlongedVectorField::ProlongedVectorField(const JetSpace& space)
    : space_(space), base_(static_cast<std::size_t>(space.base_dim)) {}

ProlongedVectorField ProlongedVectorField::coordinate_base(int mu, const JetSpace& space) {
  ProlongedVectorField v(space);
  v.set_base_component(mu, Expression(1L));
  return v;
}

ProlongedVectorField ProlongedVectorField::coordinate_jet(const JetVariable& jet,
                                                          const JetSpace& space) {
  ProlongedVectorField v(space);
  v.set_component(jet, Expression(1L));
  return v;
}

ProlongedVectorField ProlongedVectorField::from_characteristic(
    std::vector<Expression> base, std::vector<Expression> characteristic, int working_order,
    const JetSpace& space) {
  ProlongedVectorField v(space);
  base.resize(static_cast<std::size_t>(space.base_dim));
  characteristic.resize(static_cast<std::size_t>(space.field_count));
  v.base_ = std::move(base);
  v.characteristic_ = std::move(characteristic);
  return v.extended(working_order);
}

const Expression& ProlongedVectorField::base_component(int mu) const {
  space_.check_base_index(mu);
  return base_[static_cast<std::size_t>(mu)];
}

void ProlongedVectorField::set_base_component(int mu, Expression e) {
  space_.check_base_index(mu);
  base_[static_cast<std::size_t>(mu)] = std::move(e);
}

void ProlongedVectorField::set_component(const JetVariable& jet, Expression e) {
  space_.check_field_index(jet.field());
  working_order_ = std::max(working_order_, jet.order());
  components_[jet] = std::move(e);
}

Expression ProlongedVectorField::component(const JetVariable& jet) const {
  if (auto it = components_.find(jet); it != components_.end()) return it->second;
  if (!characteristic_) return Expression();
  Expression out = total_derivative(
      (*characteristic_)[static_cast<std::size_t>(jet.field())], jet.multi_index(), space_);
  for (int mu = 0; mu < space_.base_dim; ++mu) {
    out += Expression::jet(jet.raised(mu)) * base_[static_cast<std::size_t>(mu)];
  }
  return out;
}

bool ProlongedVectorField::is_vertical() const {
  return std::all_of(base_.begin(), base_.end(), [](const auto& e) { return e.is_zero(); });
}

namespace {

// All multi-indices of a given size over m base indices, sorted.
void multi_indices(int m, int size, int start, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == size) {
    out.push_back(cur);
    return;
  }
  for (int mu = start; mu < m; ++mu) {
    cur.push_back(mu);
    multi_indices(m, size, mu, cur, out);
    cur.pop_back();
  }
}

}  // namespace

ProlongedVectorField ProlongedVectorField::extended(int order) const {
  ProlongedVectorField v = *this;
  for (int k = 0; k <= order; ++k) {
    std::vector<std::vector<int>> idx;
    std::vector<int> cur;
    multi_indices(space_.base_dim, k, 0, cur, idx);
    for (int i = 0; i < space_.field_count; ++i) {
      for (const auto& j : idx) {
        JetVariable jet(i, j);
        if (!v.components_.count(jet)) v.components_[jet] = component(jet);
      }
    }
  }
  v.working_order_ = std::max(working_order_, order);
  return v;
}

Expression ProlongedVectorField::apply(const Expression& f) const {
  Expression out;
  for (const auto& atom : f.atoms()) {
    if (const auto* b = std::get_if<BaseVariable>(&atom)) {
      out += base_[static_cast<std::size_t>(b->index)] * partial(f, atom);
    } else if (const auto* j = as_jet(atom)) {
      out += component(*j) * partial(f, atom);
    }
  }
  return out;
}

Expression ProlongedVectorField::pairing(const BasisOneForm& b) const {
  if (const auto* d = std::get_if<Dx>(&b)) return base_component(d->mu);
  const auto& jet = std::get<Omega>(b).jet;
  Expression out = component(jet);
  for (int mu = 0; mu < space_.base_dim; ++mu) {
    out -= Expression::jet(jet.raised(mu)) * base_[static_cast<std::size_t>(mu)];
  }
  return out;
}

Form interior(const ProlongedVectorField& v, const Form& alpha) {
  if (alpha.degree() == 0) throw DegreeError("cannot contract a scalar");
  Form out(alpha.degree() - 1);
  for (const auto& [factors, c] : alpha.terms()) {
    for (std::size_t k = 0; k < factors.size(); ++k) {
      Expression p = v.pairing(factors[k]);
      if (p.is_zero()) continue;
      FactorList rest = factors;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      out += Form::term(k % 2 == 0 ? c * p : -(c * p), rest);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render(const BasisOneForm& b, const JetSpace& space) {
  if (const auto* d = std::get_if<Dx>(&b)) return "d" + render(base_atom(d->mu), space);
  const auto& jet = std::get<Omega>(b).jet;
  if (space.base_dim == 1 && space.field_count == 1) {
    return "ω" + std::string(static_cast<std::size_t>(jet.order()), '\'');
  }
  return "ω(" + render(jet_atom(jet), space) + ")";
}

std::string render(const Form& alpha, const JetSpace& space) {
  if (alpha.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [factors, c] : alpha.terms()) {
    if (!first) out << " + ";
    first = false;
    if (factors.empty()) {
      out << render(c, space);
      continue;
    }
    out << '(' << render(c, space) << ") ";
    for (std::size_t k = 0; k < factors.size(); ++k) {
      if (k > 0) out << "∧";
      out << render(factors[k], space);
    }
  }
  return out.str();
}

}  // namespace jetsym
