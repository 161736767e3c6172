#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "jetsym/dsl.hpp"
#include "jetsym/forms.hpp"
#include "jetsym/jetexpr.hpp"
#include "jetsym/onshell.hpp"
#include "jetsym/variational.hpp"

namespace testing_support {

using namespace jetsym;

inline const JetSpace& mech() {
  static const JetSpace s = JetSpace::mechanics();
  return s;
}

// q, v, a, b, c as in the usual mechanics notation.
inline Expression t() { return Expression::base(0); }
inline Expression q() { return Expression::jet(0, 0); }
inline Expression v() { return Expression::jet(0, 1); }
inline Expression a() { return Expression::jet(0, 2); }
inline Expression b() { return Expression::jet(0, 3); }
inline Expression c4() { return Expression::jet(0, 4); }
inline Expression lam() { return Expression::param("lambda"); }
inline Expression r(long n, long d = 1) { return Expression(Rational(n, d)); }

inline JetVariable y(int order) { return JetVariable::mechanics(0, order); }

inline LagrangianSystem free_particle() { return LagrangianSystem(mech(), r(1, 2) * v() * v()); }
inline LagrangianSystem oscillator() {
  return LagrangianSystem(mech(), r(1, 2) * (v() * v() - q() * q()));
}
inline LagrangianSystem quartic() {
  return LagrangianSystem(mech(), r(1, 2) * v() * v() - q().pow(4));
}

inline HigherOrderVectorField vertical(const Expression& xi) {
  return HigherOrderVectorField::vertical(mech(), {xi});
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string data_path(const std::string& name) {
  return std::string(JETSYM_TEST_DATA) + "/" + name;
}

/// Random polynomial in t, q, v, a (and optionally lambda) of total degree
/// at most `degree`, small integer coefficients.
class RandomPolys {
 public:
  explicit RandomPolys(unsigned seed) : rng_(seed) {}

  Expression poly(int degree = 3, int max_order = 2, bool with_param = false) {
    std::uniform_int_distribution<int> nterms(1, 4);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> deg(0, degree);
    std::uniform_int_distribution<int> pick(with_param ? -2 : -1, max_order);
    Expression out;
    const int n = nterms(rng_);
    for (int k = 0; k < n; ++k) {
      Expression m(static_cast<long>(coef(rng_)));
      const int d = deg(rng_);
      for (int j = 0; j < d; ++j) {
        const int which = pick(rng_);
        if (which == -1) {
          m *= t();
        } else if (which == -2) {
          m *= lam();
        } else {
          m *= Expression::jet(0, which);
        }
      }
      out += m;
    }
    return out;
  }

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::mt19937& engine() { return rng_; }

 private:
  std::mt19937 rng_;
};

}  // namespace testing_support
