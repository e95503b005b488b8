#pragma once

#include <string>
#include <vector>

namespace itreval::cli {

// Flat `key = value` file; '#' starts a comment. Keys mirror long flag names.
std::vector<std::string> config_tokens(const std::string& path);

// Returns argv with config-file tokens inserted right after the subcommand,
// so explicit flags parsed later take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace itreval::cli
