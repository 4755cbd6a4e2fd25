#pragma once

// Single-threaded reference versions of the parallel convolution paths.
// Arithmetic order matches the parallel code, so results agree bit for bit.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "rfilt/boundary.hpp"
#include "rfilt/convolution.hpp"
#include "rfilt/rotinv.hpp"

namespace rfilt::reference {

ResponseMap convolve_axis(const VolumeImage& image, std::span<const double> kernel, int axis,
                          const BoundaryMode& boundary);

ResponseMap convolve_separable(const VolumeImage& image, const SeparableKernel& kernel,
                               const BoundaryMode& boundary,
                               std::optional<std::array<int, 3>> pass_order = std::nullopt);

/// Direct dense convolution with per-tap boundary lookup.
ResponseMap convolve_full(const VolumeImage& image, const DenseKernel& kernel,
                          const BoundaryMode& boundary);

ResponseMap laws_energy(const ResponseMap& response, int delta, const BoundaryMode& boundary);

ResponseMap pooled_equivariant(const VolumeImage& image, const std::vector<SeparableKernel>& stages,
                               const BoundaryMode& boundary, PoolMode mode);

}  // namespace rfilt::reference
