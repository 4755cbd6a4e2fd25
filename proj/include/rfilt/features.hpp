#pragma once

// ROI aggregation of response maps: intensity statistics and diagnostics.

#include <iosfwd>
#include <string>
#include <vector>

#include "rfilt/image.hpp"

namespace rfilt {

struct FeatureValue {
  std::string id;  // permanent identifier, e.g. "Q4LE"; "diag.*" for diagnostics
  std::string name;
  double value = 0.0;
};

/// ROI mean; values are summed in sorted order so voxel enumeration order never matters.
double aggregate_mean(const ResponseMap& response, const RoiMask& mask);

/// Masked values in ascending order.
std::vector<double> masked_values(const VolumeImage& image, const RoiMask& mask);

/// Linear-interpolation percentile (p in [0, 1]) of ascending data:
/// h = (n - 1) p, x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h]).
double percentile_sorted(const std::vector<double>& sorted, double p);

/// The 18 intensity statistics, in reporting order.
std::vector<FeatureValue> intensity_statistics(const ResponseMap& response, const RoiMask& mask);
/// Same, from values already extracted from a mask.
std::vector<FeatureValue> intensity_statistics(std::vector<double> values);

struct Diagnostics {
  std::size_t voxels_before = 0;
  std::size_t voxels_after = 0;
  bool intensity_valid = false;  // false when the final mask is empty
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;

  std::vector<FeatureValue> as_features() const;
};

Diagnostics diagnostics(const RoiMask& mask_before, const RoiMask& mask_after,
                        const VolumeImage& image_after);

/// Value rounded to three significant digits, formatted compactly.
std::string three_significant(double value);

void write_features_csv(std::ostream& out, const std::string& test_id,
                        const std::vector<FeatureValue>& features, bool header = true);
std::string features_json(const std::string& test_id, const std::vector<FeatureValue>& features);

}  // namespace rfilt
