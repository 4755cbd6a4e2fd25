#pragma once

// Volumetric image types shared by every filtering stage.
//
// Axis convention (image frame of reference):
//   k1 (x) left -> right, k2 (y) top -> bottom, k3 (z) front -> back,
//   each with increasing grid index.
// Storage is contiguous with k1 varying fastest:
//   offset(k1, k2, k3) = k1 + n1 * (k2 + n2 * k3)
// Images of rank 1 or 2 use the same layout with the unused extents set to 1.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rfilt {

using Index3 = std::array<std::size_t, 3>;
using Spacing3 = std::array<double, 3>;

/// Grid geometry: extents, voxel spacing in millimetres and rank (1..3).
struct Grid {
  Index3 dims{1, 1, 1};
  Spacing3 spacing{1.0, 1.0, 1.0};
  int rank = 3;

  std::size_t voxel_count() const { return dims[0] * dims[1] * dims[2]; }
  std::size_t offset(std::size_t k1, std::size_t k2, std::size_t k3) const {
    return k1 + dims[0] * (k2 + dims[1] * k3);
  }
  Index3 coordinates(std::size_t offset) const;
  std::size_t stride(int axis) const;

  bool same_dims(const Grid& other) const { return dims == other.dims && rank == other.rank; }
  bool isotropic(int axes, double rel_tol = 1e-6) const;

  /// Throws InvalidArgument unless extents are positive, spacing strictly positive,
  /// rank in 1..3 and unused axes have extent 1.
  void validate() const;
};

Grid make_grid(std::span<const std::size_t> dims, std::span<const double> spacing);

enum class ValueKind { real, complex_modulus };

/// Scalar D-dimensional volume; intensities held as 64-bit floats.
class VolumeImage {
 public:
  VolumeImage() = default;
  VolumeImage(Grid grid, std::vector<double> data, ValueKind kind = ValueKind::real);

  static VolumeImage zeros(const Grid& grid, ValueKind kind = ValueKind::real);

  const Grid& grid() const { return grid_; }
  int rank() const { return grid_.rank; }
  const Index3& dims() const { return grid_.dims; }
  const Spacing3& spacing() const { return grid_.spacing; }
  std::size_t size() const { return data_.size(); }
  ValueKind value_kind() const { return kind_; }
  void set_value_kind(ValueKind kind) { kind_ = kind; }
  void set_spacing(const Spacing3& spacing);

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double at(std::size_t k1, std::size_t k2 = 0, std::size_t k3 = 0) const {
    return data_[grid_.offset(k1, k2, k3)];
  }
  double& at(std::size_t k1, std::size_t k2 = 0, std::size_t k3 = 0) {
    return data_[grid_.offset(k1, k2, k3)];
  }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }
  std::vector<double> release() && { return std::move(data_); }

 private:
  Grid grid_{};
  std::vector<double> data_;
  ValueKind kind_ = ValueKind::real;
};

/// Response maps share the image representation.
using ResponseMap = VolumeImage;

/// Complex-valued companion used for Gabor and Fourier intermediates.
struct ComplexVolume {
  Grid grid;
  std::vector<std::complex<double>> data;

  static ComplexVolume zeros(const Grid& grid);
  static ComplexVolume from_real(const VolumeImage& image);
  VolumeImage real_part() const;
  VolumeImage modulus() const;
};

enum class MaskKind { morphological, intensity };

/// Boolean region of interest aligned with an image grid.
class RoiMask {
 public:
  RoiMask() = default;
  RoiMask(Grid grid, std::vector<std::uint8_t> membership, MaskKind kind = MaskKind::morphological);

  static RoiMask filled(const Grid& grid, bool value, MaskKind kind = MaskKind::morphological);

  const Grid& grid() const { return grid_; }
  MaskKind kind() const { return kind_; }
  void set_kind(MaskKind kind) { kind_ = kind; }
  std::size_t size() const { return member_.size(); }
  bool operator[](std::size_t i) const { return member_[i] != 0; }
  void set(std::size_t i, bool v) { member_[i] = v ? 1 : 0; }
  std::span<const std::uint8_t> membership() const { return member_; }
  std::size_t count() const;

  /// Throws InvalidArgument if the mask does not share the image extents.
  void require_matches(const Grid& image_grid) const;

 private:
  Grid grid_{};
  std::vector<std::uint8_t> member_;
  MaskKind kind_ = MaskKind::morphological;
};

VolumeImage create_image(std::span<const std::size_t> dims, std::span<const double> spacing,
                         std::vector<double> data);

/// Converts a physical length to voxel units: value_mm / spacing_mm.
double physical_to_voxel(double value_mm, double spacing_mm);
Spacing3 physical_to_voxel(double value_mm, const Grid& grid);

/// Mask that is true on voxels at least `margin` voxels away from every face.
RoiMask interior_region(const Grid& grid, const Index3& margin);

}  // namespace rfilt
