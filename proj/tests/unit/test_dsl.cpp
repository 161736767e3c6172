#include <gtest/gtest.h>

#include "jetsym/errors.hpp"
#include "support.hpp"

using namespace testing_support;

namespace {

SyntaxError syntax_error(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const SyntaxError& e) {
    return e;
  }
  ADD_FAILURE() << "no syntax error for:\n" << text;
  return SyntaxError("", 0, 0);
}

}  // namespace

TEST(ParseSpec, FreeParticle) {
  const auto spec = parse_spec(
      "field q\nparam lambda\nlagrangian: (1/2)*q'^2\ntransform Xi: q -> lambda*q' + q\n");
  EXPECT_EQ(spec.space.field_count, 1);
  EXPECT_EQ(spec.space.base_names, std::vector<std::string>{"t"});
  EXPECT_EQ(spec.params, std::vector<std::string>{"lambda"});
  EXPECT_EQ(spec.lagrangian, r(1, 2) * v() * v());
  EXPECT_EQ(spec.transform("Xi").fiber[0], lam() * v() + q());
}

TEST(ParseSpec, Counterexample) {
  const auto spec = parse_spec(
      "field q\nparam lambda\nlagrangian: (1/2)*q'^2\ntransform T: q -> lambda*q' + q^2\n");
  EXPECT_EQ(spec.transform("T").fiber[0], lam() * v() + q() * q());
}

TEST(ParseSpec, EmptyInput) {
  EXPECT_THROW(parse_spec(""), SyntaxError);
  EXPECT_THROW(parse_spec("# only a comment\n\n"), SyntaxError);
}

TEST(ParseSpec, CorpusFiles) {
  for (const char* name : {"free_particle.jsym", "harmonic_oscillator.jsym", "quartic.jsym",
                           "plane_wave.jsym", "counterexample.jsym"}) {
    EXPECT_NO_THROW(parse_spec(read_file(data_path(name)))) << name;
  }
  const auto fp = parse_spec(read_file(data_path("free_particle.jsym")));
  EXPECT_EQ(fp.splitting("S1").c, -a() * q());
  EXPECT_EQ(fp.splitting("S2").f[0], lam() * v() * v() + q() * v());
}

TEST(ParseSpec, JetNotations) {
  const auto spec = parse_spec("field q\nlagrangian: q'^2\ntransform A: q -> D[q,3] + q'''\n");
  EXPECT_EQ(spec.transform("A").fiber[0], r(2) * b());

  const auto fs = parse_spec(
      "base x\nbase y\nfield u\nlagrangian: u_{1}^2 + u_{2}^2\n"
      "transform A: u -> D[u,x,y] - u_{21} + u_{12}\n");
  EXPECT_EQ(fs.transform("A").fiber[0], Expression::jet(JetVariable(0, {0, 1})));
}

TEST(ParseSpec, DecimalsAreExact) {
  const auto spec = parse_spec("field q\nlagrangian: 0.5*q'^2 - 0.25*q^2\n");
  EXPECT_EQ(spec.lagrangian, r(1, 2) * v() * v() - r(1, 4) * q() * q());
}

TEST(ParseSpec, BaseComponents) {
  const auto spec = parse_spec("field q\nlagrangian: q'^2\ntransform Tt: t -> 1\n");
  const auto xi = spec.field("Tt");
  EXPECT_EQ(xi.base()[0], r(1));
  EXPECT_EQ(characteristic(xi, spec.space)[0], -v());
  EXPECT_THROW(parse_spec("field q\nlagrangian: q'^2\ntransform B: t -> q\n"), SyntaxError);
}

TEST(ParseSpec, ErrorsCarryPositions) {
  auto e1 = syntax_error("field q\nlagrangian: q'^2 + z\n");
  EXPECT_EQ(e1.line(), 2);
  EXPECT_EQ(e1.column(), 20);
  auto e2 = syntax_error("field q\nlagrangian: q'^2 +\n");
  EXPECT_EQ(e2.line(), 2);
  auto e3 = syntax_error("field q\nlagrangian: q $ 2\n");
  EXPECT_EQ(e3.column(), 15);
  auto e4 = syntax_error("field q\nlagrangian: q''\n");
  EXPECT_NE(std::string(e4.what()).find("first order"), std::string::npos);
  auto e5 = syntax_error("field q\nlagrangian: q'\ntransform X: q -> D[q,17]\n");
  EXPECT_NE(std::string(e5.what()).find("jet order"), std::string::npos);
  auto e6 = syntax_error(std::string("field q\nlagrangian: q'\ntransform X: q -> q") +
                         std::string(17, '\'') + "\n");
  EXPECT_NE(std::string(e6.what()).find("jet order"), std::string::npos);
  auto e7 = syntax_error("field q\nfield q\nlagrangian: q'\n");
  EXPECT_EQ(e7.line(), 2);
  auto e8 = syntax_error("field q\nlagrangian: q'/q\n");
  EXPECT_NE(std::string(e8.what()).find("division"), std::string::npos);
  auto e9 = syntax_error("lagrangian: q'\nfield q\n");
  EXPECT_EQ(e9.line(), 1);
  auto e10 = syntax_error("field q\nlagrangian: q'\nbogus line\n");
  EXPECT_EQ(e10.line(), 3);
  auto e11 = syntax_error("field q\n");
  EXPECT_NE(std::string(e11.what()).find("lagrangian"), std::string::npos);
}

TEST(ParseSpec, UnknownNames) {
  const auto spec = parse_spec(read_file(data_path("free_particle.jsym")));
  EXPECT_THROW(spec.transform("Nope"), UsageError);
  EXPECT_THROW(spec.splitting("Nope"), UsageError);
}

TEST(RenderSpec, RoundTripCorpus) {
  for (const char* name : {"free_particle.jsym", "harmonic_oscillator.jsym", "quartic.jsym",
                           "plane_wave.jsym", "counterexample.jsym"}) {
    const auto spec = parse_spec(read_file(data_path(name)));
    const std::string text = render_spec(spec);
    EXPECT_EQ(parse_spec(text), spec) << text;
    EXPECT_EQ(render_spec(parse_spec(text)), text);
  }
}

TEST(RenderSpec, RoundTripRandomExpressions) {
  RandomPolys gen(51);
  const auto base = parse_spec(read_file(data_path("free_particle.jsym")));
  for (int k = 0; k < 100; ++k) {
    const Expression e = gen.poly(3, 2, true);
    EXPECT_EQ(parse_expression(render(e, mech()), base), e) << render(e, mech());
  }
}

TEST(ParseExpression, UsesDeclarations) {
  const auto spec = parse_spec(read_file(data_path("free_particle.jsym")));
  EXPECT_EQ(parse_expression("lambda*q'' + t", spec), lam() * a() + t());
  EXPECT_THROW(parse_expression("mu*q", spec), SyntaxError);
  EXPECT_THROW(parse_expression("", spec), SyntaxError);
  EXPECT_EQ(parse_expression("-q^2^1", spec), -q() * q());
}
