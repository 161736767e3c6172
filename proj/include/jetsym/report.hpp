#pragma once

// Command dispatch for the jetsym tool: each command produces one JSON
// document and a plain-text narrative.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jetsym/dsl.hpp"

namespace jetsym {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode { kExitOk = 0, kExitInputError = 1, kExitProcessingError = 2 };

/// Command-line flags; unset values fall back to spec options, then defaults.
struct RunFlags {
  std::optional<int> depth;
  std::optional<double> s;
  std::optional<int> steps;
  std::optional<std::string> ic;
  std::optional<double> tol;
  std::optional<double> h;
  std::optional<double> t_end;
  std::optional<std::string> csv;
  std::optional<std::string> splitting;
};

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::json document;
  std::string text;
};

/// Commands: el, check, validate, noether, tangency, drag, reduce.
/// Errors are reported inside the result, never thrown.
RunResult run(const std::string& command, const std::vector<std::string>& args,
              const std::string& spec_text, const RunFlags& flags = {});

/// Hex SHA-256.
std::string sha256_hex(const std::string& data);

/// "q=0, q'=1, lambda=1" -> initial point and parameter values.
struct InitialData {
  double t = 0.0;
  std::vector<double> q;
  std::vector<double> v;
  std::map<std::string, double> params;
};
InitialData parse_bindings(const std::string& text, const ProblemSpec& spec);

}  // namespace jetsym
