#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace weldnet::cli {

/// Runs one subcommand (`synth`, `analyze`, `train`, `evaluate`, `predict`).
/// `args` excludes the program name. Returns 0 on success, 1 on a pipeline
/// error and 2 on a usage error. Errors are printed to `err` as a single line
/// starting with `error[CODE]:`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weldnet::cli
