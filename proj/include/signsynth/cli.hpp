#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace signsynth {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Subcommands: gen, filter, merge, postprocess, ingest, stitch, sample,
/// tokenize (train|encode|decode), eval, stats. `args[0]` is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace signsynth
