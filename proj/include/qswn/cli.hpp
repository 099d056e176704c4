#pragma once

namespace qswn::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kInvalidConfig = 2;
inline constexpr int kIncomplete = 3;
inline constexpr int kNoTransition = 4;

// Entry point for the `qswn` tool: sweep, lambda-sweep, analyze, profile, graph.
int run(int argc, char** argv);

}  // namespace qswn::cli
