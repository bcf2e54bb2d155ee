#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>

namespace relcert {

inline constexpr std::size_t kDefaultMaxCells = 2'000'000;

/// Cap on enumeration sizes (ball elements, coset vertices, LP cells).
/// Overridden by the RELCERT_MAX_CELLS environment variable.
inline std::size_t default_max_cells() {
  if (const char* env = std::getenv("RELCERT_MAX_CELLS")) {
    try {
      auto v = std::stoull(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return kDefaultMaxCells;
}

}  // namespace relcert
