#pragma once

// Randomized property suites shared by the unit tests and the acceptance
// binary. Each suite returns the number of instances checked and the first
// counterexample, if any.

#include <optional>
#include <string>

#include "support.hpp"

namespace testing_support {

struct SuiteResult {
  int instances = 0;
  std::optional<std::string> failure;
  bool ok() const { return !failure; }
};

inline std::vector<LagrangianSystem> corpus_lagrangians() {
  return {free_particle(), oscillator(), quartic()};
}

inline Form random_form(RandomPolys& gen, int degree) {
  Form out(degree);
  const int terms = gen.integer(1, 3);
  for (int k = 0; k < terms; ++k) {
    if (degree == 0) {
      out += Form::scalar(gen.poly());
    } else if (degree == 1) {
      out += gen.integer(0, 1) ? gen.poly() * Form::dx(0) : gen.poly() * Form::omega(y(gen.integer(0, 2)));
    } else {
      out += gen.poly() * wedge(Form::dx(0), Form::omega(y(gen.integer(0, 2))));
      out += gen.poly() * wedge(Form::omega(y(0)), Form::omega(y(gen.integer(1, 2))));
    }
  }
  return out;
}

inline SuiteResult suite_dd_zero(unsigned seed, int n) {
  RandomPolys gen(seed);
  SuiteResult res;
  for (int k = 0; k < n; ++k, ++res.instances) {
    const Form f = random_form(gen, k % 3);
    if (!exterior_d(exterior_d(f, mech()), mech()).is_zero()) {
      res.failure = "d(d(" + render(f, mech()) + ")) != 0";
      return res;
    }
  }
  return res;
}

inline SuiteResult suite_euler_kills_total_derivatives(unsigned seed, int n) {
  RandomPolys gen(seed);
  SuiteResult res;
  for (int k = 0; k < n; ++k, ++res.instances) {
    const Expression f = gen.poly(3, 2, true);
    if (!euler_operator(total_derivative(f, 0, mech()), mech())[0].is_zero()) {
      res.failure = "E(d_t(" + render(f, mech()) + ")) != 0";
      return res;
    }
  }
  return res;
}

inline SuiteResult suite_trivial_reassembly(unsigned seed, int n) {
  RandomPolys gen(seed);
  SuiteResult res;
  const auto systems = corpus_lagrangians();
  for (int k = 0; k < n; ++k, ++res.instances) {
    const auto& sys = systems[static_cast<std::size_t>(k) % systems.size()];
    const auto xi = vertical(gen.poly(3, 2, true));
    const auto s = trivial_splitting(xi, sys);
    if (!(reassemble(s, mech()) == lie_derivative(xi, pc_form(sys).theta, mech()))) {
      res.failure = "reassembly fails for xi = " + render(xi.fiber()[0], mech());
      return res;
    }
  }
  return res;
}

inline SuiteResult suite_trivial_c_onshell(unsigned seed, int n) {
  RandomPolys gen(seed);
  SuiteResult res;
  const auto systems = corpus_lagrangians();
  std::vector<NormalSystem> normals;
  for (const auto& s : systems) normals.push_back(normalize_equations(s));
  for (int k = 0; k < n; ++k, ++res.instances) {
    const std::size_t which = static_cast<std::size_t>(k) % systems.size();
    const auto xi = vertical(gen.poly(3, 2, true));
    const Expression c = trivial_splitting(xi, systems[which]).c;
    if (!normals[which].reduce(c).is_zero()) {
      res.failure = "C_trivial not on-shell zero for xi = " + render(xi.fiber()[0], mech());
      return res;
    }
  }
  return res;
}

inline SuiteResult suite_extract_a_invariance(unsigned seed, int n) {
  RandomPolys gen(seed);
  SuiteResult res;
  const auto systems = corpus_lagrangians();
  for (int k = 0; k < n; ++k, ++res.instances) {
    const auto& sys = systems[static_cast<std::size_t>(k) % systems.size()];
    const auto xi = vertical(gen.poly(3, 2, true));
    const Form omega = exterior_d(lie_derivative(xi, pc_form(sys).theta, mech()), mech());
    const Form extra = exterior_d(gen.poly() * Form::omega(y(gen.integer(0, 2))), mech());
    const auto base = extract_a(omega, mech());
    const auto shifted = extract_a(omega + extra, mech());
    if (!(base.a == shifted.a) || !shifted.reassembly_ok) {
      res.failure = "A changed under an exact contact term for xi = " + render(xi.fiber()[0], mech());
      return res;
    }
  }
  return res;
}

inline SuiteResult suite_euler_c_equals_a(unsigned seed, int n) {
  RandomPolys gen(seed);
  SuiteResult res;
  const auto systems = corpus_lagrangians();
  for (int k = 0; k < n; ++k, ++res.instances) {
    const auto& sys = systems[static_cast<std::size_t>(k) % systems.size()];
    const auto xi = vertical(gen.poly(3, 2, true));
    const auto s = trivial_splitting(xi, sys);
    const auto cert = extract_a(xi, sys);
    if (!(euler_operator(s.c, mech()) == cert.a)) {
      res.failure = "E(C_trivial) != A for xi = " + render(xi.fiber()[0], mech());
      return res;
    }
  }
  return res;
}

}  // namespace testing_support
