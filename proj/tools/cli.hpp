#ifndef POLYMG_CLI_HPP
#define POLYMG_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace polymg
{

/// Runs one command line (without the program name). Returns the exit code;
/// failures print a JSON error object on `err`.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace polymg

#endif
