#pragma once

// Image extension (padding) used before spatial convolution.

#include <cstddef>
#include <string>
#include <string_view>

#include "rfilt/image.hpp"

namespace rfilt {

enum class BoundaryKind { constant, nearest, periodise, mirror };

struct BoundaryMode {
  BoundaryKind kind = BoundaryKind::mirror;
  double constant = 0.0;  // only meaningful for BoundaryKind::constant

  static BoundaryMode constant_value(double c) { return {BoundaryKind::constant, c}; }
  static BoundaryMode nearest() { return {BoundaryKind::nearest, 0.0}; }
  static BoundaryMode periodise() { return {BoundaryKind::periodise, 0.0}; }
  static BoundaryMode mirror() { return {BoundaryKind::mirror, 0.0}; }

  bool operator==(const BoundaryMode&) const = default;
};

std::string_view to_string(BoundaryKind kind);
BoundaryMode parse_boundary(std::string_view name, double constant = 0.0);

/// Returned by extended_index when the padded value is the constant C.
inline constexpr std::ptrdiff_t kUseConstant = -1;

/// Maps an arbitrary integer index onto [0, n) for the given extension rule.
/// Mirror follows the boundary-inclusive rule (the edge voxel is repeated):
///   k' = k mod n              if floor(k / n) is even
///   k' = n - (k mod n + 1)    otherwise
/// The map is total, so margins wider than the image are handled by folding
/// repeatedly.
std::ptrdiff_t extended_index(std::ptrdiff_t k, std::ptrdiff_t n, BoundaryKind kind);

/// Halo width used for a kernel of length m along one axis.
constexpr std::size_t kernel_margin(std::size_t m) { return m / 2; }

/// Output extents are dims + 2 * margin on every axis within the image rank;
/// the interior block is an exact copy of the input.
VolumeImage pad(const VolumeImage& image, const Index3& margin, const BoundaryMode& mode);

}  // namespace rfilt
