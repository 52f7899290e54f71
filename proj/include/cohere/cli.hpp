#ifndef COHERE_CLI_HPP
#define COHERE_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cohere::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int usage = 2;
inline constexpr int numerical = 3;
}  // namespace exit_code

/// Runs one command. `args` excludes the program name. Machine-readable
/// output goes to `out`, human-readable summaries and errors to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

struct VerifyOptions {
    std::size_t max_n = 10;
    std::size_t trials = 10;
    std::uint64_t seed = 0;
};

/// Closed form against enumeration sweep; prints one line per failure to
/// `out` and returns the number of failures.
std::size_t run_verification(const VerifyOptions& options, std::ostream& out, std::size_t* checks = nullptr);

}  // namespace cohere::cli

#endif  // COHERE_CLI_HPP
