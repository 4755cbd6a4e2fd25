#pragma once

// Digital phantoms, response-map comparison and consensus analytics.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rfilt/image.hpp"

namespace rfilt {

enum class PhantomKind { empty, impulse, checkerboard, noise, sphere, pattern1, pattern2, pattern3, orientation };
PhantomKind parse_phantom(std::string_view name);
std::string_view to_string(PhantomKind kind);
const std::vector<PhantomKind>& all_phantoms();

/// Geometry defaults for the phantoms whose exact layout is only shown in
/// figures; official files take precedence when available.
struct PhantomOptions {
  std::size_t size = 64;
  double spacing_mm = 2.0;
  std::size_t checker_edge = 16;           // origin cube is 0
  std::vector<double> sphere_radii{8, 16, 24, 31};
  double noise_mean = 127.0;
  double noise_sd = 48.0;
  std::uint64_t seed = 0;
};

/// Intensities are integers in [0, 255]. The centre voxel is (size / 2) per axis.
/// Orientation: extents (32, 48, 64), intensity k1 + k2 + k3.
VolumeImage generate_phantom(PhantomKind kind, const PhantomOptions& options = {});
VolumeImage generate_phantom(PhantomKind kind, std::uint64_t seed);

struct MapComparison {
  VolumeImage diff;
  RoiMask passing;
  double pass_fraction = 0.0;
};

/// diff = |a - b|; a voxel passes when diff <= abs_tol + rel_tol |b|.
MapComparison compare_maps(const VolumeImage& candidate, const VolumeImage& reference,
                           double abs_tol, double rel_tol = 0.0);

struct ConsensusReport {
  VolumeImage centroid;
  std::vector<double> distances;  // Euclidean distance of each submission to the centroid
  std::vector<bool> outliers;     // distance beyond Q3 + 1.5 IQR (or below Q1 - 1.5 IQR)
  double q1 = 0.0, q3 = 0.0;
  std::vector<std::array<double, 2>> pca;  // coordinates on the first two components
  std::array<double, 2> explained_variance{};
};

/// Centroid, distances, boxplot outliers and a two-component PCA of the
/// mean-centred flattened maps. Component signs make the largest-magnitude
/// loading positive.
ConsensusReport consensus(const std::vector<VolumeImage>& submissions);

void write_consensus_csv(std::ostream& out, const ConsensusReport& report,
                         const std::vector<std::string>& labels);

enum class ConsensusLevel { weak, moderate, strong, very_strong };
std::string_view to_string(ConsensusLevel level);

struct ConsensusGrade {
  ConsensusLevel level = ConsensusLevel::weak;
  bool valid = false;
};

/// weak < 3 <= moderate <= 5 < strong <= 9 < very strong; valid when at least
/// moderate and matching / total > 0.5.
ConsensusGrade consensus_level(std::size_t matching, std::size_t total);

struct ReferenceValue {
  double value = 0.0;  // mode of the 3-significant-digit values
  std::size_t matching = 0;
  std::size_t total = 0;
  ConsensusGrade grade;
};

/// Tentative reference value across teams and its consensus grade. Ties in the
/// mode go to the smallest value.
ReferenceValue reference_value(const std::vector<double>& team_values, double tolerance);

}  // namespace rfilt
