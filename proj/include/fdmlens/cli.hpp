#ifndef FDMLENS_CLI_HPP
#define FDMLENS_CLI_HPP

namespace fdmlens {

/// Parses argv, runs one subcommand (train | explain | pdp | gam | report),
/// and maps outcomes to the exit-code contract: 0 success, 2 data errors,
/// 3 config errors, 4 internal invariant failures.
int run_cli(int argc, char** argv);

} // namespace fdmlens

#endif
