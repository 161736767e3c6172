#include "jetsym/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "jetsym/errors.hpp"
#include "jetsym/flowlab.hpp"
#include "jetsym/onshell.hpp"

namespace jetsym {

using nlohmann::json;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

InitialData parse_bindings(const std::string& text, const ProblemSpec& spec) {
  const JetSpace& sp = spec.space;
  if (!sp.is_mechanics()) throw UnsupportedBaseError("initial data needs a single base variable");
  InitialData out;
  out.q.assign(static_cast<std::size_t>(sp.field_count), 0.0);
  out.v.assign(static_cast<std::size_t>(sp.field_count), 0.0);
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("bad binding '" + item + "', expected name=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string name = trim(item.substr(0, eq));
    const std::string value_text = trim(item.substr(eq + 1));
    double value = 0.0;
    try {
      const Expression e = parse_expression(value_text, ProblemSpec{});
      if (!e.is_constant()) throw UsageError("");
      value = e.constant_value().get_d();
    } catch (const Error&) {
      throw UsageError("bad value for '" + name + "': '" + value_text + "'");
    }

    std::string stem = name;
    int primes = 0;
    while (!stem.empty() && stem.back() == '\'') {
      stem.pop_back();
      ++primes;
    }
    const auto& fields = sp.field_names;
    const auto it = std::find(fields.begin(), fields.end(), stem);
    if (it != fields.end() && primes <= 1) {
      const auto i = static_cast<std::size_t>(it - fields.begin());
      (primes == 0 ? out.q : out.v)[i] = value;
    } else if (primes == 0 && name == sp.base_names[0]) {
      out.t = value;
    } else if (primes == 0 &&
               std::find(spec.params.begin(), spec.params.end(), name) != spec.params.end()) {
      out.params[name] = value;
    } else {
      throw UsageError("unknown binding '" + name + "'");
    }
  }
  return out;
}

namespace {

struct Settings {
  int depth = 2;
  double s = 1.0;
  int steps = 1000;
  double tol = 1e-6;
  double h = 1e-3;
  double t_end = 1.0;
  std::optional<std::string> ic;
};

template <typename T>
T option_value(const ProblemSpec& spec, const std::string& key, T fallback) {
  auto it = spec.options.find(key);
  if (it == spec.options.end()) return fallback;
  try {
    std::size_t used = 0;
    T v;
    if constexpr (std::is_same_v<T, int>) {
      v = std::stoi(it->second, &used);
    } else {
      v = std::stod(it->second, &used);
    }
    if (used != it->second.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad value for option " + key + ": '" + it->second + "'");
  }
}

Settings settings(const ProblemSpec& spec, const RunFlags& flags) {
  Settings s;
  s.depth = flags.depth.value_or(option_value(spec, "depth", s.depth));
  s.s = flags.s.value_or(option_value(spec, "s", s.s));
  s.steps = flags.steps.value_or(option_value(spec, "steps", s.steps));
  s.tol = flags.tol.value_or(option_value(spec, "tol", s.tol));
  s.h = flags.h.value_or(option_value(spec, "h", s.h));
  s.t_end = flags.t_end.value_or(option_value(spec, "t_end", s.t_end));
  if (flags.ic) {
    s.ic = flags.ic;
  } else if (auto it = spec.options.find("ic"); it != spec.options.end()) {
    s.ic = it->second;
  }
  if (s.depth < 0) throw UsageError("depth must be nonnegative");
  if (s.steps < 1) throw UsageError("steps must be at least 1");
  if (!(s.h > 0) || !(s.t_end > 0)) throw UsageError("h and t_end must be positive");
  if (!(s.tol > 0)) throw UsageError("tol must be positive");
  return s;
}

void need_args(const std::string& command, const std::vector<std::string>& args, std::size_t n,
               const std::string& usage) {
  if (args.size() != n) throw UsageError(command + " expects: " + usage);
}

json rendered(const std::vector<Expression>& es, const JetSpace& sp) {
  json out = json::array();
  for (const auto& e : es) out.push_back(render(e, sp));
  return out;
}

std::string volume_name(const JetSpace& sp) { return sp.is_mechanics() ? "d" + sp.base_names[0] : "ds"; }

/// "q: expr" lines, one per field.
void field_lines(std::ostream& out, const std::string& label, const std::vector<Expression>& es,
                 const JetSpace& sp) {
  for (std::size_t i = 0; i < es.size(); ++i) {
    out << label << '[' << sp.field_names[i] << "] = " << render(es[i], sp) << '\n';
  }
}

json tangency_json(const TangencyReport& t, const JetSpace& sp) {
  json levels = json::array();
  for (const auto& l : t.levels) levels.push_back({{"depth", l.depth}, {"residues", rendered(l.residues, sp)}});
  return levels;
}

void tangency_text(std::ostream& out, const TangencyReport& t, const JetSpace& sp) {
  for (const auto& l : t.levels) {
    out << "tangency depth " << l.depth << ":";
    for (std::size_t i = 0; i < l.residues.size(); ++i) {
      out << ' ' << sp.field_names[i] << " -> " << render(l.residues[i], sp);
    }
    out << '\n';
  }
  out << "tangent: " << (t.tangent() ? "yes" : "no") << '\n';
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

void cmd_el(const ProblemSpec& spec, json& doc, std::ostream& text) {
  const auto sys = spec.system();
  const auto& sp = spec.space;
  const auto eqs = euler_lagrange(sys);
  doc["lagrangian"] = render(sys.lagrangian(), sp);
  doc["equations"] = rendered(eqs, sp);
  text << "L = " << render(sys.lagrangian(), sp) << '\n';
  field_lines(text, "E", eqs, sp);
  if (sp.is_mechanics()) {
    try {
      const auto n = normalize_equations(eqs, sp);
      doc["accelerations"] = rendered(n.accelerations(), sp);
      for (int i = 0; i < sp.field_count; ++i) {
        text << render(jet_atom(i, 2), sp) << " = " << render(n.accelerations()[static_cast<std::size_t>(i)], sp)
             << '\n';
      }
    } catch (const DegenerateSystemError& e) {
      doc["accelerations"] = nullptr;
      text << "equations are not normal: " << e.what() << '\n';
    }
  }
}

void cmd_check(const ProblemSpec& spec, const std::vector<std::string>& args, const RunFlags& flags,
               const Settings& cfg, json& doc, std::ostream& text) {
  need_args("check", args, 1, "check <transform> [--splitting <name>]");
  const auto sys = spec.system();
  const auto& sp = spec.space;
  const auto xi = spec.field(args[0]);

  SymmetryOptions opts;
  opts.depth = cfg.depth;
  if (flags.splitting) {
    opts.splitting = spec.splitting_data(*flags.splitting);
    opts.splitting_name = *flags.splitting;
  }
  const SymmetryReport r = check_onshell_symmetry(xi, sys, opts);
  const std::string ds = volume_name(sp);

  doc["transform"] = args[0];
  doc["variation"] = rendered(characteristic(xi, sp), sp);
  doc["theta_pc"] = render(r.theta_pc, sp);
  doc["lie_derivative"] = render(r.lie_derivative, sp);
  doc["splitting_source"] = r.splitting_source;
  doc["f"] = rendered(r.splitting.f, sp);
  doc["C"] = render(r.splitting.c, sp);
  doc["C_trivial"] = render(r.c_trivial, sp);
  doc["contact_form"] = render(r.contact_form, sp);
  doc["exact_identity_ok"] = r.exact_identity_ok;
  doc["dL"] = render(r.covariance.differential, sp);
  doc["dL_contact_one"] = render(r.covariance.contact_one, sp);
  doc["A"] = rendered(r.covariance.a, sp);
  doc["reassembly_ok"] = r.covariance.reassembly_ok;
  doc["canonical_exact_term"] = render(r.covariance.canonical_exact_term, sp);
  doc["canonical_exact_form"] = r.canonical_exact_form;
  doc["euler_C"] = rendered(r.euler_c, sp);
  doc["euler_C_equals_A"] = r.euler_c_equals_a;
  doc["equations"] = rendered(r.equations, sp);
  doc["provenance"] = r.provenance;
  doc["verdict"] = to_string(r.verdict);
  doc["A_onshell_residue"] = r.a_onshell_residue.empty() ? json(nullptr) : rendered(r.a_onshell_residue, sp);
  doc["C_onshell_residue"] = r.c_onshell_residue ? json(render(*r.c_onshell_residue, sp)) : json(nullptr);
  doc["euler_C_onshell_residue"] =
      r.euler_c_onshell_residue.empty() ? json(nullptr) : rendered(r.euler_c_onshell_residue, sp);
  doc["theta"] = r.theta ? json(render(r.theta->as_form(sp), sp)) : json(nullptr);
  doc["theta_matches_contact"] = r.theta_matches_contact;
  doc["current"] = r.current ? json(render(r.current->current, sp)) : json(nullptr);
  doc["conservation_residue"] =
      r.current ? json(render(r.current->conservation_residue, sp)) : json(nullptr);
  doc["tangency"] = r.tangency ? tangency_json(*r.tangency, sp) : json::array();
  doc["tangent"] = r.tangency ? json(r.tangency->tangent()) : json(nullptr);

  text << "transform " << args[0] << '\n';
  field_lines(text, "δ", characteristic(xi, sp), sp);
  text << "Θ = " << render(r.theta_pc, sp) << '\n';
  text << "ℒ_ΞΘ = " << render(r.lie_derivative, sp) << '\n';
  text << "ℒ_ΞΘ = d(f) + θ + C " << ds << "   [" << r.splitting_source << " splitting]\n";
  for (std::size_t mu = 0; mu < r.splitting.f.size(); ++mu) {
    text << "  f" << (sp.is_mechanics() ? "" : "^" + sp.base_names[mu]) << " = "
         << render(r.splitting.f[mu], sp) << '\n';
  }
  text << "  θ = " << render(r.contact_form, sp) << '\n';
  text << "  C = " << render(r.splitting.c, sp) << '\n';
  text << "  identity exact: " << yes_no(r.exact_identity_ok) << '\n';
  text << "dℒ_ΞΘ = " << render(r.covariance.differential, sp) << '\n';
  text << "  contact order 1: " << render(r.covariance.contact_one, sp) << '\n';
  text << "A (coefficient of ω∧" << ds << "):\n";
  field_lines(text, "  A", r.covariance.a, sp);
  if (!r.a_onshell_residue.empty()) field_lines(text, "  A on-shell", r.a_onshell_residue, sp);
  text << "C = " << render(r.splitting.c, sp);
  if (r.c_onshell_residue) text << "   on-shell: " << render(*r.c_onshell_residue, sp);
  text << '\n';
  field_lines(text, "𝔼(C)", r.euler_c, sp);
  text << "𝔼(C) = A: " << yes_no(r.euler_c_equals_a) << '\n';
  if (r.theta) {
    text << "θ = " << render(r.theta->as_form(sp), sp) << "   matches contact part: "
         << yes_no(r.theta_matches_contact) << '\n';
  }
  if (r.current) {
    text << "current = " << render(r.current->current, sp) << "   conservation residue "
         << render(r.current->conservation_residue, sp) << '\n';
  }
  if (r.tangency) tangency_text(text, *r.tangency, sp);
  text << "verdict: " << to_string(r.verdict) << '\n';
}

void cmd_validate(const ProblemSpec& spec, const std::vector<std::string>& args, json& doc,
                  std::ostream& text) {
  need_args("validate", args, 2, "validate <transform> <splitting>");
  const auto sys = spec.system();
  const auto& sp = spec.space;
  const auto xi = spec.field(args[0]);
  const auto s = spec.splitting_data(args[1]);
  doc["transform"] = args[0];
  doc["splitting"] = args[1];
  try {
    const SplittingValidation v = validate_splitting(xi, sys, s);
    doc["identity_ok"] = true;
    doc["valid"] = v.valid();
    doc["C_onshell_residue"] = v.c_onshell_residue ? json(render(*v.c_onshell_residue, sp)) : json(nullptr);
    doc["A"] = rendered(v.a, sp);
    doc["euler_C"] = rendered(v.euler_c, sp);
    doc["euler_C_equals_A"] = v.euler_c_equals_a;
    doc["theta"] = render(v.theta.as_form(sp), sp);
    doc["contact_form"] = render(v.contact_form, sp);
    doc["theta_matches_contact"] = v.theta_matches_contact;
    text << "δL = C + d(f): yes\n";
    if (v.c_onshell_residue) text << "C on-shell: " << render(*v.c_onshell_residue, sp) << '\n';
    field_lines(text, "A", v.a, sp);
    field_lines(text, "𝔼(C)", v.euler_c, sp);
    text << "𝔼(C) = A: " << yes_no(v.euler_c_equals_a) << '\n';
    text << "θ = " << render(v.theta.as_form(sp), sp) << '\n';
    text << "valid: " << yes_no(v.valid()) << '\n';
  } catch (const InvalidSplittingError& e) {
    doc["identity_ok"] = false;
    doc["valid"] = false;
    doc["residual"] = e.residual();
    text << "δL = C + d(f): no, residual " << e.residual() << '\n';
    text << "valid: no\n";
  }
}

void cmd_noether(const ProblemSpec& spec, const std::vector<std::string>& args, json& doc,
                 std::ostream& text) {
  need_args("noether", args, 2, "noether <transform> <splitting>");
  const auto sys = spec.system();
  const auto& sp = spec.space;
  const auto xi = spec.field(args[0]);
  const auto s = spec.splitting_data(args[1]);
  validate_splitting(xi, sys, s);
  const auto normal = normalize_equations(sys);
  const NoetherCurrent c = noether_current(xi, sys, s, normal);
  doc["transform"] = args[0];
  doc["splitting"] = args[1];
  doc["current"] = render(c.current, sp);
  doc["conservation_residue"] = render(c.conservation_residue, sp);
  doc["conserved"] = c.conservation_residue.is_zero();
  text << "current = " << render(c.current, sp) << '\n';
  text << "d_t current on-shell = " << render(c.conservation_residue, sp) << '\n';
  text << "conserved: " << yes_no(c.conservation_residue.is_zero()) << '\n';
}

json restricted_json(const RestrictedField& f, const JetSpace& sp) {
  return {{"time", render(f.time_component, sp)},
          {"q", rendered(f.q_components, sp)},
          {"v", rendered(f.v_components, sp)}};
}

void cmd_tangency(const ProblemSpec& spec, const std::vector<std::string>& args,
                  const Settings& cfg, json& doc, std::ostream& text) {
  need_args("tangency", args, 1, "tangency <transform>");
  const auto sys = spec.system();
  const auto& sp = spec.space;
  const auto xi = spec.field(args[0]);
  const auto normal = normalize_equations(sys);
  const TangencyReport t = tangency_check(xi, normal, cfg.depth);
  doc["transform"] = args[0];
  doc["depth"] = cfg.depth;
  doc["tangency"] = tangency_json(t, sp);
  doc["tangent"] = t.tangent();
  tangency_text(text, t, sp);
  if (t.tangent()) {
    const RestrictedField f = restrict_field(xi, normal, cfg.depth);
    doc["restricted"] = restricted_json(f, sp);
    text << "restricted field:";
    for (int i = 0; i < sp.field_count; ++i) {
      const auto k = static_cast<std::size_t>(i);
      text << " (" << render(f.q_components[k], sp) << ") ∂/∂" << render(jet_atom(i, 0), sp) << " + ("
           << render(f.v_components[k], sp) << ") ∂/∂" << render(jet_atom(i, 1), sp);
    }
    text << '\n';
  } else {
    doc["restricted"] = nullptr;
  }
}

json point_json(const ChartPoint& p) { return {{"t", p.t}, {"q", p.q}, {"v", p.v}}; }

void cmd_drag(const ProblemSpec& spec, const std::vector<std::string>& args, const RunFlags& flags,
              const Settings& cfg, json& doc, std::ostream& text) {
  need_args("drag", args, 1, "drag <transform> --ic <bindings>");
  const auto sys = spec.system();
  const auto& sp = spec.space;
  if (!sp.is_mechanics()) throw UnsupportedBaseError("numerical dragging needs a single base variable");
  if (!cfg.ic) throw UsageError("drag needs initial data, e.g. --ic \"q=0, q'=1\"");
  const InitialData init = parse_bindings(*cfg.ic, spec);
  const auto xi = spec.field(args[0]);
  const auto normal = normalize_equations(sys);
  const RestrictedField field = restrict_field(xi, normal, cfg.depth);

  const EquationChart chart(normal);
  const int points = static_cast<int>(std::llround(cfg.t_end / cfg.h)) + 1;
  if (points < 5) throw UsageError("t_end / h must give at least five grid points");
  const ChartPoint start{init.t, init.q, init.v};
  const NumericSolution sol = sample_solution(chart, start, cfg.h, points, init.params);
  const NumericSolution dragged = drag_solution(field, sol, cfg.s, cfg.steps, init.params);
  const ResidualNorms before = solution_residual(sol, chart, init.params);
  const ResidualNorms after = solution_residual(dragged, chart, init.params);
  const bool preserved = after.equation < cfg.tol && after.holonomy < cfg.tol;

  if (flags.csv) {
    std::ofstream out(*flags.csv);
    if (!out) throw UsageError("cannot write " + *flags.csv);
    write_csv(out, dragged, sp);
  }

  doc["transform"] = args[0];
  doc["restricted"] = restricted_json(field, sp);
  doc["s"] = cfg.s;
  doc["steps"] = cfg.steps;
  doc["h"] = cfg.h;
  doc["points"] = points;
  doc["tol"] = cfg.tol;
  doc["start"] = point_json(start);
  doc["dragged_start"] = point_json(dragged.samples.front());
  doc["dragged_end"] = point_json(dragged.samples.back());
  doc["residual_before"] = {{"holonomy", before.holonomy}, {"equation", before.equation}};
  doc["residual_after"] = {{"holonomy", after.holonomy}, {"equation", after.equation}};
  doc["preserved"] = preserved;
  if (flags.csv) doc["csv"] = *flags.csv;

  text << std::setprecision(10);
  text << "dragged " << points << " samples by s = " << cfg.s << " (" << cfg.steps << " steps)\n";
  text << "residual before: holonomy " << before.holonomy << ", equation " << before.equation << '\n';
  text << "residual after:  holonomy " << after.holonomy << ", equation " << after.equation << '\n';
  text << "solutions preserved (tol " << cfg.tol << "): " << yes_no(preserved) << '\n';
}

void cmd_reduce(const ProblemSpec& spec, const std::vector<std::string>& args, json& doc,
                std::ostream& text) {
  if (args.empty()) throw UsageError("reduce expects: reduce <expression>");
  std::string joined;
  for (const auto& a : args) joined += (joined.empty() ? "" : " ") + a;
  const Expression e = parse_expression(joined, spec);
  const auto normal = normalize_equations(spec.system());
  const Expression r = normal.reduce(e);
  doc["input"] = render(e, spec.space);
  doc["reduced"] = render(r, spec.space);
  text << render(e, spec.space) << " ≃ " << render(r, spec.space) << '\n';
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const SyntaxError*>(&e)) return "syntax";
  if (dynamic_cast<const UsageError*>(&e)) return "usage";
  if (dynamic_cast<const EvaluationError*>(&e)) return "evaluation";
  if (dynamic_cast<const MalformedExpressionError*>(&e)) return "malformed-expression";
  if (dynamic_cast<const InvalidSplittingError*>(&e)) return "invalid-splitting";
  if (dynamic_cast<const NotTangentError*>(&e)) return "not-tangent";
  if (dynamic_cast<const DegenerateSystemError*>(&e)) return "degenerate-system";
  if (dynamic_cast<const UnsupportedBaseError*>(&e)) return "unsupported-base";
  if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
  return "error";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SyntaxError*>(&e) || dynamic_cast<const UsageError*>(&e) ||
      dynamic_cast<const EvaluationError*>(&e) || dynamic_cast<const MalformedExpressionError*>(&e) ||
      dynamic_cast<const IndexError*>(&e)) {
    return kExitInputError;
  }
  return kExitProcessingError;
}

}  // namespace

RunResult run(const std::string& command, const std::vector<std::string>& args,
              const std::string& spec_text, const RunFlags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  json& doc = result.document;
  doc["schema_version"] = kSchemaVersion;
  doc["tool_version"] = kToolVersion;
  doc["command"] = command;
  doc["args"] = args;
  doc["input_digest"] = sha256_hex(spec_text);
  std::ostringstream text;

  try {
    const ProblemSpec spec = parse_spec(spec_text);
    const Settings cfg = settings(spec, flags);
    if (flags.splitting && command != "check") throw UsageError("--splitting only applies to check");
    if (command == "el") {
      need_args("el", args, 0, "el");
      cmd_el(spec, doc, text);
    } else if (command == "check") {
      cmd_check(spec, args, flags, cfg, doc, text);
    } else if (command == "validate") {
      cmd_validate(spec, args, doc, text);
    } else if (command == "noether") {
      cmd_noether(spec, args, doc, text);
    } else if (command == "tangency") {
      cmd_tangency(spec, args, cfg, doc, text);
    } else if (command == "drag") {
      cmd_drag(spec, args, flags, cfg, doc, text);
    } else if (command == "reduce") {
      cmd_reduce(spec, args, doc, text);
    } else {
      throw UsageError("unknown command '" + command + "'");
    }
    result.exit_code = kExitOk;
  } catch (const std::exception& e) {
    json err{{"kind", error_kind(e)}, {"message", e.what()}};
    if (const auto* s = dynamic_cast<const SyntaxError*>(&e)) {
      err["line"] = s->line();
      err["column"] = s->column();
    }
    if (const auto* n = dynamic_cast<const NotTangentError*>(&e)) err["residue"] = n->residue();
    if (const auto* i = dynamic_cast<const InvalidSplittingError*>(&e)) err["residual"] = i->residual();
    doc["error"] = err;
    result.exit_code = exit_code_for(e);
    text << "error: " << e.what() << '\n';
  }

  const auto t1 = std::chrono::steady_clock::now();
  doc["timing_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
  result.text = text.str();
  return result;
}

}  // namespace jetsym
