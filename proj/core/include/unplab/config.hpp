#pragma once

#include <cstddef>

namespace unplab {

inline constexpr std::size_t default_max_dimension = 256;

// Largest matrix side any dense operator may have. Reads UNPLAB_MAX_DIM on
// first use; set_max_dimension overrides it for the rest of the process.
std::size_t max_dimension();
void set_max_dimension(std::size_t dim);

// Throws CapacityError naming `what` when dim exceeds the cap.
void check_dimension(std::size_t dim, const char* what);

}  // namespace unplab
