#pragma once

namespace hyprec::cli {

// Entry point of the hyprec tool. Exit codes: 0 success, 2 input or validation
// error, 3 numerical failure, 1 anything else.
int run(int argc, char** argv);

}  // namespace hyprec::cli
