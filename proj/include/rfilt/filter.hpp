#pragma once

// Declarative filter description covering every family, and its application
// to an image either volumetrically or slice by slice.

#include <string>
#include <string_view>
#include <vector>

#include "rfilt/boundary.hpp"
#include "rfilt/convolution.hpp"
#include "rfilt/riesz.hpp"
#include "rfilt/rotinv.hpp"

namespace rfilt {

enum class FilterFamily { none, mean, log, laws, gabor, wavelet, radial, riesz };
FilterFamily parse_family(std::string_view name);
std::string_view to_string(FilterFamily family);

enum class Invariance { none, right_angle, orientations };
Invariance parse_invariance(std::string_view name);
std::string_view to_string(Invariance invariance);

/// A length given either in millimetres or in voxels.
struct Length {
  double value = 1.0;
  bool mm = true;
  double voxels(double spacing_mm) const { return mm ? value / spacing_mm : value; }
};

struct FilterSpec {
  std::string test_id;
  FilterFamily family = FilterFamily::none;

  int support_vox = 5;  // mean
  Length sigma;         // LoG, Gabor
  double cutoff = 4.0;  // truncation in units of sigma (LoG, Gabor)

  std::string laws;           // e.g. "L5E5E5"
  int energy_delta_vox = -1;  // < 0: no energy map

  Length lambda;  // Gabor
  double gamma = 1.0;
  double theta = 0.0;   // single orientation (rad)
  double dtheta = 0.0;  // orientation step for pooling (rad)
  bool orthogonal_planes = false;

  std::string wavelet = "haar";  // haar|db1|db2|db3 or shannon|simoncelli
  int level = 1;
  std::string subband;  // e.g. "LLH"
  bool decimated = false;
  bool force_multilevel_invariance = false;

  RieszIndex riesz;
  bool align = false;
  Length sigma_tensor;
  AlignCriterion align_criterion = AlignCriterion::largest;

  Invariance invariance = Invariance::none;
  PoolMode pooling = PoolMode::max;
  ConvolutionVia via = ConvolutionVia::automatic;

  /// Rank of the filter itself (2 for slice-wise use, 3 for volumes).
  void validate(int rank) const;
};

/// Applies the filter. mode 2 filters every (k1, k2) slice independently (or
/// the image itself when it is 2-D); mode 3 filters the volume. Effective
/// voxel-unit parameters are appended to `log` when given.
ResponseMap apply_filter(const VolumeImage& image, const FilterSpec& spec,
                         const BoundaryMode& boundary, int mode,
                         std::vector<std::string>* log = nullptr);

}  // namespace rfilt
