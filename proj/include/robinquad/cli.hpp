#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace robinquad::cli {

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kNumericalError = 3;

// One axis of a sweep: name=lo:hi:count, count >= 1 points spaced evenly (lo when count = 1).
struct GridAxis {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;
    double value(int k) const;
};
GridAxis parse_grid(const std::string& text);

// Runs one command line (without the program name). Results go to 'out' unless
// --output names a file; diagnostics go to 'err'.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace robinquad::cli
