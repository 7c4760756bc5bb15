#pragma once

namespace hyprec {

// Thread count for OpenMP regions. n <= 0 restores the runtime default
// (HYPREC_THREADS if set, otherwise the OpenMP default).
void set_num_threads(int n);
int num_threads();

}  // namespace hyprec
