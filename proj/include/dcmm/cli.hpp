#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dcmm {

inline constexpr const char* kVersion = "dcmm 0.1.0";

// Exit codes: 0 success, 1 validation error, 2 pipeline error, 64 usage error.
inline constexpr int kExitValidation = 1;
inline constexpr int kExitPipeline = 2;
inline constexpr int kExitUsage = 64;

// Runs one subcommand (generate, sample, estimate, experiment-p,
// experiment-theta, lowerbound-verify). args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace dcmm
