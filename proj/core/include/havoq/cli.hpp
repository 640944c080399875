// cli.hpp — command-line front end (simulate / fit / identify / sweep / reproduce).

#pragma once

#include <string>
#include <vector>

namespace havoq {

// Exit codes: 0 success, 1 partial or stage failure, 2 usage or config error.
int run_cli(const std::vector<std::string>& args);

} // namespace havoq
