#pragma once

// Riesz transforms (all-pass derivatives), Fourier derivatives, structure
// tensors and steering of order-2 Riesz responses.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "rfilt/boundary.hpp"
#include "rfilt/convolution.hpp"
#include "rfilt/wavelets.hpp"

namespace rfilt {

struct RieszIndex {
  std::array<int, 3> l{};
  int rank = 3;

  int order() const;
  /// sqrt(L! / (l1! ... lD!))
  double multinomial() const;
  std::string to_string() const;
  bool operator==(const RieszIndex&) const = default;
};

/// Parses "0,2,0" (or "0,2" for 2-D).
RieszIndex parse_riesz_index(std::string_view text);

/// All indices of order L in D dimensions, l1 descending first: (L+D-1 choose D-1) entries.
std::vector<RieszIndex> riesz_indices(int rank, int order);

/// (-j)^L sqrt(L!/prod l_i!) prod nu_i^l_i / |nu|^L, 0 at nu = 0.
TransferFunction riesz_transfer(const Grid& grid, const RieszIndex& index);

/// Riesz transform of a radial band-pass applied to an image.
ResponseMap riesz_filtered_map(const VolumeImage& image, const RadialProfile& profile,
                               const RieszIndex& index);

/// Real part of IDFT((j nu_axis)^order DFT(f)).
ResponseMap fourier_derivative(const VolumeImage& image, int axis, int order);

/// Symmetric per-voxel tensor, components stored upper-triangular row by row:
/// 2-D (11, 12, 22), 3-D (11, 12, 13, 22, 23, 33).
struct StructureTensorField {
  Grid grid;
  double sigma_mm = 1.0;
  std::vector<ResponseMap> components;

  int rank() const { return grid.rank; }
  double at(std::size_t voxel, int i, int j) const;
};

/// Gaussian-smoothed outer products of the first-order Riesz components of the
/// band-passed image. The Gaussian has sigma_mm / spacing voxels per axis.
StructureTensorField structure_tensor(const VolumeImage& image, const RadialProfile& profile,
                                      double sigma_mm,
                                      const BoundaryMode& boundary = BoundaryMode::periodise());

enum class AlignCriterion { largest, smallest };
AlignCriterion parse_align_criterion(std::string_view name);

/// Unit eigenvector for the largest (or smallest) eigenvalue of a symmetric
/// matrix. Degenerate eigenspaces resolve to the direction closest to k1, then
/// k2; the first nonzero component is made positive.
std::array<double, 3> principal_direction(const std::array<std::array<double, 3>, 3>& m, int rank,
                                          AlignCriterion criterion = AlignCriterion::largest);

struct RieszResponses {
  std::vector<RieszIndex> indices;
  std::vector<ResponseMap> maps;
};

/// Every order-L Riesz map of the radial band-pass, sharing one forward DFT.
RieszResponses riesz_bank(const VolumeImage& image, const RadialProfile& profile, int order);

/// Second directional derivative steered along the principal tensor direction u:
/// sum over |l| = 2 of sqrt(2!/prod l_i!) prod u_i^l_i h_l.
ResponseMap align_order2(const RieszResponses& responses, const StructureTensorField& tensors,
                         AlignCriterion criterion = AlignCriterion::largest);

/// Full aligned pipeline: band-pass, order-2 bank, tensor, steering.
ResponseMap aligned_riesz_map(const VolumeImage& image, const RadialProfile& profile,
                              double sigma_tensor_mm,
                              AlignCriterion criterion = AlignCriterion::largest);

}  // namespace rfilt
