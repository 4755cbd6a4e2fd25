#pragma once

// Right-angle rotation equivariance for separable filters, orientation pooling,
// and slice-wise helpers.
//
// A group element stores, for every image axis i, which input 1-D kernel runs
// along it and whether that kernel is reversed (J). The element kernel is
// g'(k) = g(Q k) with Q[j][i] = +-1 when axis i carries (J)g_{j+1}.

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rfilt/boundary.hpp"
#include "rfilt/convolution.hpp"

namespace rfilt {

Kernel1D flip_1d(const Kernel1D& kernel);
/// Appends one trailing zero to even-length kernels.
Kernel1D oddify(const Kernel1D& kernel);

struct AxisAssignment {
  int source = 0;  // index of the input kernel
  bool flip = false;
};

struct RightAngleElement {
  std::string label;                  // "0", "pi/2", ... or "(0,pi/2,0)"
  std::array<double, 3> angles{};     // theta in 2-D; (alpha, beta, gamma) in 3-D
  int rank = 2;
  std::array<AxisAssignment, 3> axes{};

  /// Signed permutation Q, row j / column i.
  std::array<std::array<int, 3>, 3> matrix() const;
  /// Pass order that applies the pass carrying g1 first, then g2, then g3.
  std::array<int, 3> pass_order() const;
};

/// 4 elements for rank 2, 24 for rank 3, identity first.
const std::vector<RightAngleElement>& right_angle_group(int rank);

/// Oddifies every kernel, then permutes and flips them per the element.
SeparableKernel apply_element(const RightAngleElement& element, const SeparableKernel& kernel);

struct EquivariantSet {
  std::vector<RightAngleElement> elements;
  std::vector<SeparableKernel> kernels;
};

EquivariantSet equivariant_set_2d(const Kernel1D& g1, const Kernel1D& g2);
EquivariantSet equivariant_set_3d(const Kernel1D& g1, const Kernel1D& g2, const Kernel1D& g3);

enum class PoolMode { max, average };
PoolMode parse_pool(std::string_view name);

ResponseMap pool(const std::vector<ResponseMap>& responses, PoolMode mode);

/// Response to one element: every stage of the cascade transformed by the element.
ResponseMap element_response(const VolumeImage& image, const RightAngleElement& element,
                             const std::vector<SeparableKernel>& stages,
                             const BoundaryMode& boundary);

/// All element responses of a separable cascade.
std::vector<ResponseMap> equivariant_responses(const VolumeImage& image,
                                               const std::vector<SeparableKernel>& stages,
                                               const BoundaryMode& boundary);

/// Same as pool(equivariant_responses(...)) without keeping every map.
ResponseMap pooled_equivariant(const VolumeImage& image, const std::vector<SeparableKernel>& stages,
                               const BoundaryMode& boundary, PoolMode mode);

/// theta in {0, dtheta, 2 dtheta, ...} covering [0, span).
std::vector<double> gabor_orientation_set(double dtheta, double span = M_PI);

using SliceOp = std::function<VolumeImage(const VolumeImage&)>;

enum class Plane { k1k2, k1k3, k2k3 };

/// Applies a 2-D operation to every slice of a volume in the given plane.
VolumeImage apply_slicewise(const VolumeImage& volume, Plane plane, const SliceOp& op);

/// Mean of the slice-wise results over the three orthogonal planes.
VolumeImage orthogonal_plane_average(const VolumeImage& volume, const SliceOp& op);

}  // namespace rfilt
