#pragma once

#include <string>
#include <vector>

namespace poseq::cli {

/// Runs one toolkit command. args excludes the program name. Returns the
/// process exit code: 0 success, 1 data error, 2 usage error.
int dispatch(std::vector<std::string> args);

}  // namespace poseq::cli
