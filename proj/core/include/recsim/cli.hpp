#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace recsim {

/// Runs one `recsim` command. `args` excludes the program name. Returns the
/// process exit status: 0 on success, 1 on a runtime failure, 2 on bad usage.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace recsim
