// jetsym: on-shell symmetry checks for Lagrangian systems.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "jetsym/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Check candidate transformations of a Lagrangian system for on-shell symmetry"};
  app.set_version_flag("--version", std::string(jetsym::kToolVersion));
  app.set_help_flag("--help", "Print this help message and exit");

  std::string spec_path;
  std::string command;
  std::vector<std::string> args;
  bool as_json = false;
  jetsym::RunFlags flags;

  app.add_option("spec", spec_path, "Problem specification file ('-' for stdin)")->required();
  app.add_option("command", command, "el | check | validate | noether | tangency | drag | reduce")
      ->required();
  app.add_option("args", args, "Command arguments (transform, splitting or expression names)");
  app.add_flag("--json", as_json, "Print the structured report instead of text");
  app.add_option("--depth", flags.depth, "Tangency depth (default 2)");
  app.add_option("--s", flags.s, "Flow parameter for drag (default 1)");
  app.add_option("--steps", flags.steps, "RK4 steps along the flow (default 1000)");
  app.add_option("--ic", flags.ic, "Initial data for drag, e.g. \"q=0, q'=1, lambda=1\"");
  app.add_option("--tol", flags.tol, "Residual tolerance for drag (default 1e-6)");
  app.add_option("--h", flags.h, "Time step of sampled solutions (default 1e-3)");
  app.add_option("--t-end", flags.t_end, "Length of sampled solutions (default 1)");
  app.add_option("--csv", flags.csv, "Write the dragged trajectory to this CSV file");
  app.add_option("--splitting", flags.splitting, "Use a named splitting in check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : jetsym::kExitInputError;
  }

  std::string text;
  if (spec_path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    text = buf.str();
  } else {
    std::ifstream in(spec_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read " << spec_path << '\n';
      return jetsym::kExitInputError;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }

  const jetsym::RunResult r = jetsym::run(command, args, text, flags);
  if (as_json) {
    std::cout << r.document.dump(2) << '\n';
  } else if (r.exit_code == jetsym::kExitOk) {
    std::cout << r.text;
  } else {
    std::cerr << r.text;
  }
  return r.exit_code;
}
