#pragma once

// Numerical cross-check: restrict a generator to the equation manifold
// (t, q, v), integrate its flow with classical RK4 and drag sampled solutions.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "jetsym/jetexpr.hpp"
#include "jetsym/onshell.hpp"
#include "jetsym/variational.hpp"

namespace jetsym {

struct ChartPoint {
  double t = 0.0;
  std::vector<double> q;
  std::vector<double> v;
};

/// Numeric values for parameters, keyed by name.
using ParameterValues = std::map<std::string, double>;

class EquationChart {
 public:
  explicit EquationChart(const NormalSystem& system);

  const JetSpace& space() const { return space_; }
  const std::vector<Expression>& accelerations() const { return accelerations_; }
  int dimension() const { return 1 + 2 * space_.field_count; }

  /// Slot layout used for numeric evaluation: t, q^i, v^i, then parameters.
  std::vector<Atom> slots(const ParameterValues& params) const;
  std::vector<double> values(const ChartPoint& p, const ParameterValues& params) const;

 private:
  JetSpace space_;
  std::vector<Expression> accelerations_;
};

struct RestrictedField {
  JetSpace space;
  Expression time_component;
  std::vector<Expression> q_components;
  std::vector<Expression> v_components;
};

/// Throws NotTangentError if the tangency residues up to depth do not vanish.
RestrictedField restrict_field(const HigherOrderVectorField& xi, const NormalSystem& system,
                               int depth = 2);

/// Flow by parameter s with `steps` fixed RK4 steps. Vertical fields only.
ChartPoint integrate_flow(const RestrictedField& field, const ChartPoint& start, double s,
                          int steps, const ParameterValues& params = {});

struct NumericSolution {
  double h = 0.0;
  std::vector<ChartPoint> samples;
};

/// RK4 integration of the equations of motion on a uniform grid.
NumericSolution sample_solution(const EquationChart& chart, const ChartPoint& start, double h,
                                int points, const ParameterValues& params = {});

NumericSolution drag_solution(const RestrictedField& field, const NumericSolution& solution,
                              double s, int steps, const ParameterValues& params = {});

struct ResidualNorms {
  double holonomy = 0.0;
  double equation = 0.0;
};

/// Central differences on interior grid points; needs at least five samples.
ResidualNorms solution_residual(const NumericSolution& solution, const EquationChart& chart,
                                const ParameterValues& params = {});

/// Columns t, q_i..., v_i... with a header row.
void write_csv(std::ostream& out, const NumericSolution& solution, const JetSpace& space);

}  // namespace jetsym
