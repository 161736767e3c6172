#include "jetsym/flowlab.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "jetsym/errors.hpp"

namespace jetsym {

EquationChart::EquationChart(const NormalSystem& system)
    : space_(system.space()), accelerations_(system.accelerations()) {}

std::vector<Atom> EquationChart::slots(const ParameterValues& params) const {
  std::vector<Atom> out{base_atom(0)};
  for (int i = 0; i < space_.field_count; ++i) out.push_back(jet_atom(i, 0));
  for (int i = 0; i < space_.field_count; ++i) out.push_back(jet_atom(i, 1));
  for (const auto& [name, value] : params) out.push_back(param_atom(name));
  return out;
}

std::vector<double> EquationChart::values(const ChartPoint& p,
                                          const ParameterValues& params) const {
  std::vector<double> out{p.t};
  out.insert(out.end(), p.q.begin(), p.q.end());
  out.insert(out.end(), p.v.begin(), p.v.end());
  for (const auto& [name, value] : params) out.push_back(value);
  return out;
}

RestrictedField restrict_field(const HigherOrderVectorField& xi, const NormalSystem& system,
                               int depth) {
  const JetSpace& space = system.space();
  const TangencyReport tangency = tangency_check(xi, system, depth);
  for (const auto& level : tangency.levels) {
    for (std::size_t i = 0; i < level.residues.size(); ++i) {
      if (level.residues[i].is_zero()) continue;
      const std::string residue = render(level.residues[i], space);
      throw NotTangentError("generator is not tangent to the equation manifold: residue " +
                                residue + " for " + space.field_names[i] + " at depth " +
                                std::to_string(level.depth),
                            residue);
    }
  }

  const ProlongedVectorField v = prolong(xi, xi.order(), space);
  RestrictedField out;
  out.space = space;
  out.time_component = xi.base().empty() ? Expression() : xi.base()[0];
  for (int i = 0; i < space.field_count; ++i) {
    out.q_components.push_back(system.reduce(v.component(JetVariable::mechanics(i, 0))));
    out.v_components.push_back(system.reduce(v.component(JetVariable::mechanics(i, 1))));
  }
  return out;
}

namespace {

using State = std::vector<double>;

class VectorFieldEvaluator {
 public:
  VectorFieldEvaluator(std::vector<Expression> components, const JetSpace& space,
                       const ParameterValues& params)
      : n_(space.field_count), params_(params) {
    std::vector<Atom> slots{base_atom(0)};
    for (int i = 0; i < n_; ++i) slots.push_back(jet_atom(i, 0));
    for (int i = 0; i < n_; ++i) slots.push_back(jet_atom(i, 1));
    for (const auto& [name, value] : params) slots.push_back(param_atom(name));
    for (const auto& c : components) functions_.emplace_back(c, slots);
    buffer_.resize(slots.size());
    std::size_t k = 1 + 2 * static_cast<std::size_t>(n_);
    for (const auto& [name, value] : params_) buffer_[k++] = value;
  }

  State operator()(double t, const State& y) {
    buffer_[0] = t;
    std::copy(y.begin(), y.end(), buffer_.begin() + 1);
    State out(functions_.size());
    for (std::size_t k = 0; k < functions_.size(); ++k) out[k] = functions_[k](buffer_);
    return out;
  }

 private:
  int n_;
  ParameterValues params_;
  std::vector<NumericFunction> functions_;
  std::vector<double> buffer_;
};

State axpy(const State& y, double a, const State& k) {
  State out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * k[i];
  return out;
}

template <typename F>
State rk4_step(F& f, double t, const State& y, double h, bool autonomous_in_t) {
  const double tm = autonomous_in_t ? t : t + h / 2;
  const double te = autonomous_in_t ? t : t + h;
  State k1 = f(t, y);
  State k2 = f(tm, axpy(y, h / 2, k1));
  State k3 = f(tm, axpy(y, h / 2, k2));
  State k4 = f(te, axpy(y, h, k3));
  State out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return out;
}

bool finite(const State& y) {
  for (double x : y) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

State pack(const ChartPoint& p) {
  State y = p.q;
  y.insert(y.end(), p.v.begin(), p.v.end());
  return y;
}

ChartPoint unpack(double t, const State& y, int n) {
  ChartPoint p;
  p.t = t;
  p.q.assign(y.begin(), y.begin() + n);
  p.v.assign(y.begin() + n, y.end());
  return p;
}

std::string describe(const ChartPoint& p) {
  std::ostringstream out;
  out << "t=" << p.t;
  for (std::size_t i = 0; i < p.q.size(); ++i) out << " q" << i << '=' << p.q[i];
  for (std::size_t i = 0; i < p.v.size(); ++i) out << " v" << i << '=' << p.v[i];
  return out.str();
}

}  // namespace

ChartPoint integrate_flow(const RestrictedField& field, const ChartPoint& start, double s,
                          int steps, const ParameterValues& params) {
  if (steps < 1) throw Error("flow needs at least one step");
  if (!field.time_component.is_zero()) {
    throw Error("only vertical generators are flowed numerically");
  }
  std::vector<Expression> components = field.q_components;
  components.insert(components.end(), field.v_components.begin(), field.v_components.end());
  VectorFieldEvaluator f(components, field.space, params);

  const int n = field.space.field_count;
  const double h = s / steps;
  State y = pack(start);
  for (int k = 0; k < steps; ++k) {
    State next = rk4_step(f, start.t, y, h, true);
    if (!finite(next)) {
      throw DivergenceError("flow diverged; last valid point " + describe(unpack(start.t, y, n)));
    }
    y = std::move(next);
  }
  return unpack(start.t, y, n);
}

NumericSolution sample_solution(const EquationChart& chart, const ChartPoint& start, double h,
                                int points, const ParameterValues& params) {
  const int n = chart.space().field_count;
  std::vector<Expression> components;
  for (int i = 0; i < n; ++i) components.push_back(Expression::jet(i, 1));
  for (const auto& a : chart.accelerations()) components.push_back(a);
  VectorFieldEvaluator f(components, chart.space(), params);

  NumericSolution out;
  out.h = h;
  State y = pack(start);
  double t = start.t;
  for (int k = 0; k < points; ++k) {
    out.samples.push_back(unpack(t, y, n));
    if (k + 1 == points) break;
    State next = rk4_step(f, t, y, h, false);
    if (!finite(next)) throw DivergenceError("solution diverged at " + describe(out.samples.back()));
    y = std::move(next);
    t = start.t + (k + 1) * h;
  }
  return out;
}

NumericSolution drag_solution(const RestrictedField& field, const NumericSolution& solution,
                              double s, int steps, const ParameterValues& params) {
  NumericSolution out;
  out.h = solution.h;
  out.samples.reserve(solution.samples.size());
  for (const auto& p : solution.samples) {
    out.samples.push_back(integrate_flow(field, p, s, steps, params));
  }
  return out;
}

ResidualNorms solution_residual(const NumericSolution& solution, const EquationChart& chart,
                                const ParameterValues& params) {
  if (solution.samples.size() < 5) throw Error("residual needs at least five grid points");
  const int n = chart.space().field_count;
  const auto slots = chart.slots(params);
  std::vector<NumericFunction> accel;
  for (const auto& a : chart.accelerations()) accel.emplace_back(a, slots);

  const double h = solution.h;
  const auto& s = solution.samples;
  ResidualNorms out;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const auto values = chart.values(s[k], params);
    for (int i = 0; i < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const double qdot = (s[k + 1].q[ii] - s[k - 1].q[ii]) / (2 * h);
      const double qddot = (s[k + 1].q[ii] - 2 * s[k].q[ii] + s[k - 1].q[ii]) / (h * h);
      out.holonomy = std::max(out.holonomy, std::abs(qdot - s[k].v[ii]));
      out.equation = std::max(out.equation, std::abs(qddot - accel[ii](values)));
    }
  }
  return out;
}

void write_csv(std::ostream& out, const NumericSolution& solution, const JetSpace& space) {
  out << render(base_atom(0), space);
  for (int i = 0; i < space.field_count; ++i) out << ',' << render(jet_atom(i, 0), space);
  for (int i = 0; i < space.field_count; ++i) out << ',' << render(jet_atom(i, 1), space);
  out << '\n';
  // Shortest text that reads back to the same double.
  const auto num = [](double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
  };
  for (const auto& p : solution.samples) {
    out << num(p.t);
    for (double x : p.q) out << ',' << num(x);
    for (double x : p.v) out << ',' << num(x);
    out << '\n';
  }
}

}  // namespace jetsym
