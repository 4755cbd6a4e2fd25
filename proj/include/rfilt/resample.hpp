#pragma once

// Resampling to a new voxel spacing, intensity rounding and re-segmentation.
//
// Output grids are centred on the input grid: along each axis
//   n' = ceil(n s / s'),  x(k') = (k' - (n' - 1) / 2) s' / s + (n - 1) / 2
// where x is the input voxel coordinate sampled by output voxel k'.

#include <limits>
#include <string_view>

#include "rfilt/image.hpp"

namespace rfilt {

enum class InterpMethod { trilinear, tricubic };
InterpMethod parse_interp(std::string_view name);
std::string_view to_string(InterpMethod method);

Grid resampled_grid(const Grid& grid, const Spacing3& new_spacing);

/// Separable resampling over the axes below the rank. Axes whose spacing is
/// unchanged are copied. Trilinear clamps at the faces; tricubic uses cubic
/// B-spline coefficients computed under mirror (edge-including) extension.
VolumeImage resample_image(const VolumeImage& image, const Spacing3& new_spacing,
                           InterpMethod method);

/// Trilinear interpolation of the {0, 1} mask, kept where the value >= threshold.
RoiMask resample_mask(const RoiMask& mask, const Spacing3& new_spacing, double threshold = 0.5);

/// Round half away from zero.
VolumeImage round_intensities(const VolumeImage& image);

struct IntensityRange {
  double low = -std::numeric_limits<double>::infinity();
  double high = std::numeric_limits<double>::infinity();
};

/// Intensity mask: mask && low <= value <= high.
RoiMask resegment(const RoiMask& mask, const VolumeImage& image, const IntensityRange& range);

}  // namespace rfilt
