#ifndef FDMLENS_COMMON_HPP
#define FDMLENS_COMMON_HPP

#include <array>
#include <cstddef>
#include <cstdint>

namespace fdmlens {

inline constexpr std::size_t kFeatureCount = 4;

/// One observation: the four process parameters in canonical order
/// (infill_pct, layer_height, print_speed, extrusion_temp).
using FeatureVector = std::array<double, kFeatureCount>;

/// Execution policy for the data-parallel kernels. `parallel` runs the
/// OpenMP path, `serial` the plain reference loop kept for testing and
/// benchmarking. Both produce bit-identical results: per-item work is the
/// same code with a fixed summation order.
enum class Execution { serial, parallel };

} // namespace fdmlens

#endif
