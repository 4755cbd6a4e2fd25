#pragma once

// NIfTI-1 single-file volumes (.nii, .nii.gz).

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "rfilt/image.hpp"

namespace rfilt {

enum class NiftiDatatype : std::int16_t { u8 = 2, i16 = 4, i32 = 8, f32 = 16, f64 = 64 };
NiftiDatatype parse_nifti_datatype(std::string_view name);
std::string_view to_string(NiftiDatatype type);

struct NiftiHeaderView {
  int rank = 3;
  Index3 dims{1, 1, 1};
  Spacing3 pixdim{1.0, 1.0, 1.0};
  NiftiDatatype datatype = NiftiDatatype::f32;
  double scl_slope = 0.0;
  double scl_inter = 0.0;

  // orientation fields, passed through unchanged
  std::int16_t qform_code = 0;
  std::int16_t sform_code = 0;
  float qfac = 1.0f;
  std::array<float, 3> quatern{};
  std::array<float, 3> qoffset{};
  std::array<std::array<float, 4>, 3> srow{};
  std::uint8_t dim_info = 0;
  std::uint8_t xyzt_units = 2;  // millimetres
};

struct NiftiReadOptions {
  bool round_intensities = false;
};

struct NiftiVolume {
  VolumeImage image;
  NiftiHeaderView header;
};

/// Values are promoted to double with scl_slope / scl_inter applied (slope 0 means none).
NiftiVolume read_nifti(const std::filesystem::path& path, const NiftiReadOptions& options = {});

/// Non-zero voxels are members.
RoiMask read_nifti_mask(const std::filesystem::path& path);

/// Gzip is used when the name ends in .gz. Integer types require values that
/// round into range. `orientation` supplies the passed-through fields.
void write_nifti(const VolumeImage& image, const std::filesystem::path& path,
                 NiftiDatatype datatype = NiftiDatatype::f32,
                 const NiftiHeaderView* orientation = nullptr);
void write_nifti(const RoiMask& mask, const std::filesystem::path& path,
                 const NiftiHeaderView* orientation = nullptr);

}  // namespace rfilt
