#include <gtest/gtest.h>

#include <thread>

#include "jetsym/errors.hpp"
#include "support.hpp"

using namespace testing_support;

namespace {
Form dt() { return Form::dx(0); }
Form om(int k) { return Form::omega(y(k)); }
}  // namespace

TEST(NormalizeEquations, Examples) {
  const auto fp = normalize_equations({-a()}, mech());
  EXPECT_TRUE(fp.accelerations()[0].is_zero());
  EXPECT_TRUE(fp.substitution(0, 3).is_zero());

  const auto ho = normalize_equations({-q() - a()}, mech());
  EXPECT_EQ(ho.accelerations()[0], -q());
  EXPECT_EQ(ho.substitution(0, 3), -v());
  EXPECT_EQ(ho.substitution(0, 4), q());

  EXPECT_THROW(normalize_equations({Expression()}, mech()), DegenerateSystemError);
}

TEST(NormalizeEquations, FieldTheoryUnsupported) {
  const JetSpace fs = JetSpace::field_theory({"x", "y"}, {"u"});
  EXPECT_THROW(normalize_equations({Expression::jet(JetVariable(0, {0, 0}))}, fs),
               UnsupportedBaseError);
}

TEST(NormalizeEquations, CoupledSystem) {
  // L = 1/2 (x'^2 + y'^2) + x' y' - x y: accelerations couple.
  const JetSpace sp = JetSpace::mechanics({"x", "y"});
  const Expression x = Expression::jet(0, 0), yv = Expression::jet(1, 0);
  const Expression xd = Expression::jet(0, 1), yd = Expression::jet(1, 1);
  const Expression xa = Expression::jet(0, 2), ya = Expression::jet(1, 2);
  const LagrangianSystem sys(sp, r(1, 2) * (xd * xd + r(3) * yd * yd) + xd * yd - x * yv);
  const auto n = normalize_equations(sys);
  for (const auto& e : euler_lagrange(sys)) EXPECT_TRUE(n.reduce(e).is_zero());
  EXPECT_FALSE(n.accelerations()[0].depends_on(jet_atom(0, 2)));
  EXPECT_FALSE(n.accelerations()[0].depends_on(jet_atom(1, 2)));
  (void)xa;
  (void)ya;
}

TEST(ReduceOnshell, Examples) {
  const auto fp = normalize_equations({-a()}, mech());
  EXPECT_TRUE(reduce_onshell(lam() * b() + a(), fp).is_zero());
  EXPECT_EQ(reduce_onshell(r(-2) * v() * v() - r(4) * q() * a(), fp), r(-2) * v() * v());
  const auto ho = normalize_equations({-q() - a()}, mech());
  EXPECT_EQ(reduce_onshell(q(), ho), q());
  EXPECT_EQ(reduce_onshell(v() * v() + q() * a(), ho), v() * v() - q() * q());
}

TEST(ReduceOnshell, IdempotentLinearAndAnnihilatesEquations) {
  RandomPolys gen(41);
  for (const auto& sys : {free_particle(), oscillator(), quartic()}) {
    const auto n = normalize_equations(sys);
    const Expression e = euler_lagrange(sys)[0];
    EXPECT_TRUE(n.reduce(e).is_zero());
    EXPECT_TRUE(n.reduce(total_derivative(e, 0, mech())).is_zero());
    EXPECT_TRUE(n.reduce(total_derivative(e, std::vector<int>{0, 0, 0}, mech())).is_zero());
    for (int k = 0; k < 20; ++k) {
      const Expression f = gen.poly(3, 4), g = gen.poly(3, 4);
      const Expression rf = n.reduce(f);
      EXPECT_LE(rf.max_jet_order(), 1);
      EXPECT_EQ(n.reduce(rf), rf);
      EXPECT_EQ(n.reduce(f + r(3) * g), rf + r(3) * n.reduce(g));
    }
  }
}

TEST(ReduceOnshell, ConcurrentReadersAgree) {
  const auto n = normalize_equations(quartic());
  const Expression target = Expression::jet(0, 9) * q();
  std::vector<Expression> results(8);
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < results.size(); ++k) {
    pool.emplace_back([&, k] { results[k] = n.reduce(target); });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : results) EXPECT_EQ(e, results.front());
  EXPECT_LE(results.front().max_jet_order(), 1);
}

TEST(ExtractA, FreeParticleGenerator) {
  const auto cert = extract_a(vertical(lam() * v() + q()), free_particle());
  ASSERT_EQ(cert.a.size(), 1u);
  EXPECT_EQ(cert.a[0], r(-2) * a());
  EXPECT_TRUE(cert.reassembly_ok);
  EXPECT_EQ(contact_part(cert.differential, 1),
            (lam() * b() + r(2) * a()) * wedge(dt(), om(0)) + lam() * a() * wedge(dt(), om(1)));
  // The exact potential is lambda*a*omega.
  EXPECT_EQ(cert.exact_potential, lam() * a() * om(0));
}

TEST(ExtractA, Counterexample) {
  const auto cert = extract_a(vertical(lam() * v() + q() * q()), free_particle());
  EXPECT_EQ(cert.a[0], r(-2) * v() * v() - r(4) * q() * a());
  EXPECT_TRUE(cert.reassembly_ok);
}

TEST(ExtractA, ZeroField) {
  const auto cert = extract_a(vertical(Expression()), free_particle());
  EXPECT_TRUE(cert.a[0].is_zero());
  EXPECT_TRUE(cert.exact_potential.is_zero());
  EXPECT_TRUE(cert.contact_two.is_zero());
}

TEST(ExtractA, InvariantUnderExactContactTerms) {
  RandomPolys gen(42);
  const Form omega = exterior_d(
      lie_derivative(vertical(lam() * v() + q()), pc_form(free_particle()).theta, mech()), mech());
  const auto base = extract_a(omega, mech());
  for (int k = 0; k < 20; ++k) {
    const Form extra = exterior_d(gen.poly() * om(gen.integer(0, 2)), mech());
    const auto shifted = extract_a(omega + extra, mech());
    EXPECT_EQ(shifted.a, base.a);
    EXPECT_TRUE(shifted.reassembly_ok);
  }
}

TEST(CheckSymmetry, FreeParticleIsSymmetry) {
  const auto rep = check_onshell_symmetry(vertical(lam() * v() + q()), free_particle());
  EXPECT_EQ(rep.verdict, Verdict::Yes);
  EXPECT_EQ(rep.covariance.a[0], r(-2) * a());
  EXPECT_EQ(rep.splitting.c, -a() * q());
  EXPECT_EQ(rep.splitting.f[0], v() * q() + r(1, 2) * lam() * v() * v());
  EXPECT_EQ(rep.euler_c[0], r(-2) * a());
  EXPECT_TRUE(rep.euler_c_equals_a);
  EXPECT_TRUE(rep.exact_identity_ok);
  ASSERT_TRUE(rep.theta.has_value());
  EXPECT_EQ(rep.theta->as_form(mech()), (lam() * a() + v()) * om(0) - q() * om(1));
  EXPECT_TRUE(rep.theta_matches_contact);
  EXPECT_EQ(rep.c_trivial, -a() * (lam() * v() + q()));
  ASSERT_TRUE(rep.tangency.has_value());
  EXPECT_TRUE(rep.tangency->tangent());
}

TEST(CheckSymmetry, CounterexampleIsNot) {
  const auto rep = check_onshell_symmetry(vertical(lam() * v() + q() * q()), free_particle());
  EXPECT_EQ(rep.verdict, Verdict::No);
  EXPECT_EQ(rep.splitting.c, -a() * q() * q());
  EXPECT_TRUE(rep.euler_c_equals_a);
  EXPECT_EQ(rep.a_onshell_residue[0], r(-2) * v() * v());
  EXPECT_EQ(rep.theta->as_form(mech()), (lam() * a() + r(2) * q() * v()) * om(0) - q() * q() * om(1));
  EXPECT_FALSE(rep.tangency->tangent());
}

TEST(CheckSymmetry, VelocityClassInstance) {
  const auto rep = check_onshell_symmetry(vertical(v() * v() + v() * q()), free_particle());
  EXPECT_EQ(rep.verdict, Verdict::Yes);
  EXPECT_TRUE(rep.tangency->tangent());
}

TEST(CheckSymmetry, FieldTheory) {
  const JetSpace fs = JetSpace::field_theory({"x", "y"}, {"u"});
  const Expression ux = Expression::jet(JetVariable(0, {0}));
  const Expression uy = Expression::jet(JetVariable(0, {1}));
  const LagrangianSystem lap(fs, r(1, 2) * (ux * ux + uy * uy));
  const auto yes = check_onshell_symmetry(HigherOrderVectorField::vertical(fs, {ux}), lap);
  EXPECT_EQ(yes.verdict, Verdict::Yes);
  const Expression u = Expression::jet(JetVariable(0, {}));
  const auto und = check_onshell_symmetry(HigherOrderVectorField::vertical(fs, {u * u}), lap);
  EXPECT_EQ(und.verdict, Verdict::Undecided);
  EXPECT_TRUE(und.euler_c_equals_a);
}

TEST(CheckSymmetry, FieldTheoryMultipliers) {
  // With a multiplier ansatz A = m E the verdict becomes exact.
  const JetSpace fs = JetSpace::field_theory({"x", "y"}, {"u"});
  const Expression ux = Expression::jet(JetVariable(0, {0}));
  const Expression uy = Expression::jet(JetVariable(0, {1}));
  const Expression u = Expression::jet(JetVariable(0, {}));
  const LagrangianSystem lap(fs, r(1, 2) * (ux * ux + uy * uy));
  const auto xi = HigherOrderVectorField::vertical(fs, {u});
  const auto plain = check_onshell_symmetry(xi, lap);
  const Expression e = euler_lagrange(lap)[0];
  // A is a rational multiple of E for the scaling field.
  SymmetryOptions opts;
  Rational factor = 0;
  for (const auto& [m, c] : plain.covariance.a[0].terms()) {
    factor = c / e.terms().at(m);
    break;
  }
  opts.multipliers = {{MultiplierTerm{0, {}, Expression(factor)}}};
  const auto rep = check_onshell_symmetry(xi, lap, opts);
  EXPECT_TRUE(rep.multipliers_verified);
  EXPECT_EQ(rep.verdict, Verdict::Yes);
}

TEST(ValidateSplitting, Examples) {
  const auto xi = vertical(lam() * v() + q());
  const auto s14 = validate_splitting(xi, free_particle(),
                                      {{v() * q() + r(1, 2) * lam() * v() * v()}, -a() * q()});
  EXPECT_TRUE(s14.valid());
  const auto s15 = validate_splitting(xi, free_particle(),
                                      {{lam() * v() * v() + q() * v()}, -a() * (lam() * v() + q())});
  EXPECT_TRUE(s15.valid());
  try {
    validate_splitting(xi, free_particle(), {{Expression()}, v() * v()});
    FAIL() << "expected InvalidSplittingError";
  } catch (const InvalidSplittingError& e) {
    EXPECT_FALSE(e.residual().empty());
  }
}

TEST(SolveTheta, Examples) {
  const auto fp = free_particle();
  auto th = solve_theta(-a() * q(), vertical(lam() * v() + q()), fp);
  EXPECT_EQ(th.as_form(mech()), (lam() * a() + v()) * om(0) - q() * om(1));
  auto zero = solve_theta(Expression(), vertical(Expression()), fp);
  EXPECT_TRUE(zero.as_form(mech()).is_zero());
  auto ce = solve_theta(-a() * q() * q(), vertical(lam() * v() + q() * q()), fp);
  EXPECT_EQ(ce.as_form(mech()), (lam() * a() + r(2) * q() * v()) * om(0) - q() * q() * om(1));
}

TEST(SolveTheta, SecondOrderGenerator) {
  // Generators of order two: theta must still match the contact part.
  const auto fp = free_particle();
  const auto xi = vertical(a());
  const auto v2 = validate_splitting(xi, fp, reduced_splitting(xi, fp));
  EXPECT_TRUE(v2.theta_matches_contact);
}

TEST(NoetherCurrent, Examples) {
  const auto fp = free_particle();
  const auto n = normalize_equations(fp);
  const auto xi = vertical(lam() * v() + q());
  const auto c14 = noether_current(xi, fp, {{v() * q() + r(1, 2) * lam() * v() * v()}, -a() * q()}, n);
  EXPECT_EQ(c14.current, r(1, 2) * lam() * v() * v());
  EXPECT_TRUE(c14.conservation_residue.is_zero());
  const auto c15 =
      noether_current(xi, fp, {{lam() * v() * v() + q() * v()}, -a() * (lam() * v() + q())}, n);
  EXPECT_TRUE(c15.current.is_zero());

  const auto ho = oscillator();
  const auto nh = normalize_equations(ho);
  const auto e = noether_current(vertical(v()), ho, {{ho.lagrangian()}, Expression()}, nh);
  EXPECT_EQ(e.current, r(1, 2) * (v() * v() + q() * q()));
  EXPECT_TRUE(e.conservation_residue.is_zero());
}

TEST(IntegrateTotalDerivative, InvertsTotalDerivative) {
  RandomPolys gen(43);
  for (int k = 0; k < 40; ++k) {
    const Expression f = gen.poly(3, 2);
    const Expression g = integrate_total_derivative(total_derivative(f, 0, mech()), mech());
    EXPECT_EQ(total_derivative(g, 0, mech()), total_derivative(f, 0, mech()));
  }
  EXPECT_THROW(integrate_total_derivative(v() * v(), mech()), Error);
}

TEST(Tangency, Examples) {
  const auto n = normalize_equations(free_particle());
  const auto ok = tangency_check(vertical(lam() * v() + q()), n, 4);
  EXPECT_EQ(ok.levels.size(), 5u);
  EXPECT_TRUE(ok.tangent());
  const auto bad = tangency_check(vertical(lam() * v() + q() * q()), n, 2);
  EXPECT_FALSE(bad.tangent());
  EXPECT_EQ(bad.levels[0].residues[0], r(2) * v() * v());
  EXPECT_TRUE(tangency_check(vertical(Expression()), n, 3).tangent());
}

TEST(Tangency, AgreesWithVerdictOnCorpus) {
  const std::vector<Expression> gens{lam() * v() + q(), lam() * v() + q() * q(), v() * v(),
                                     v() * q(), v() * v() + v() * q(), q() * q(), v(), r(1)};
  for (const auto& sys : {free_particle(), oscillator(), quartic()}) {
    for (const auto& g : gens) {
      const auto rep = check_onshell_symmetry(vertical(g), sys);
      EXPECT_EQ(rep.verdict == Verdict::Yes, rep.tangency->tangent())
          << render(g, mech()) << " for L = " << render(sys.lagrangian(), mech());
    }
  }
}
