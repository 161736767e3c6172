#pragma once

// Line-oriented problem description language.
//
//   base t                      # optional in mechanics, defaults to t
//   field q
//   param lambda
//   lagrangian: (1/2)*q'^2
//   transform Xi: q -> lambda*q' + q
//   splitting S1: f: q*q' + lambda/2*q'^2 ; C: -q*q''
//   option depth 4
//
// Jets are written q, q', q'' or D[q,3] in mechanics, and D[u,x,y] or
// u_{12} (1-based base indices) with several base variables.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jetsym/jetexpr.hpp"
#include "jetsym/onshell.hpp"
#include "jetsym/variational.hpp"

namespace jetsym {

inline constexpr int kMaxParsedJetOrder = 16;

struct TransformSpec {
  std::string name;
  std::vector<Expression> base;   // xi^mu
  std::vector<Expression> fiber;  // xi^i
  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

struct SplittingSpec {
  std::string name;
  std::vector<Expression> f;
  Expression c;
  friend bool operator==(const SplittingSpec&, const SplittingSpec&) = default;
};

struct ProblemSpec {
  JetSpace space;
  std::vector<std::string> params;
  Expression lagrangian;
  std::vector<TransformSpec> transforms;
  std::vector<SplittingSpec> splittings;
  /// Raw option values keyed by name (depth, steps, s, tol, h, t_end, ic).
  std::map<std::string, std::string> options;

  LagrangianSystem system() const;
  /// Throws Error for unknown names.
  const TransformSpec& transform(const std::string& name) const;
  const SplittingSpec& splitting(const std::string& name) const;
  HigherOrderVectorField field(const std::string& name) const;
  SplittingData splitting_data(const std::string& name) const;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Throws SyntaxError (with 1-based line and column) on any problem,
/// including an empty input.
ProblemSpec parse_spec(std::string_view text);

/// Canonical text; parse_spec(render_spec(p)) == p.
std::string render_spec(const ProblemSpec& spec);

/// Parses a single expression against the declarations of a spec.
Expression parse_expression(std::string_view text, const ProblemSpec& spec);

}  // namespace jetsym
