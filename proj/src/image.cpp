#include "rfilt/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfilt/error.hpp"

namespace rfilt {

Index3 Grid::coordinates(std::size_t off) const {
  Index3 k{};
  k[0] = off % dims[0];
  off /= dims[0];
  k[1] = off % dims[1];
  k[2] = off / dims[1];
  return k;
}

std::size_t Grid::stride(int axis) const {
  switch (axis) {
    case 0: return 1;
    case 1: return dims[0];
    case 2: return dims[0] * dims[1];
    default: throw InvalidArgument("axis out of range: " + std::to_string(axis));
  }
}

bool Grid::isotropic(int axes, double rel_tol) const {
  for (int a = 1; a < axes; ++a) {
    if (std::abs(spacing[a] - spacing[0]) > rel_tol * spacing[0]) return false;
  }
  return true;
}

void Grid::validate() const {
  if (rank < 1 || rank > 3) throw InvalidArgument("image rank must be 1, 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (dims[a] == 0) throw InvalidArgument("image extents must be positive");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw InvalidArgument("voxel spacing must be strictly positive");
    if (a >= rank && dims[a] != 1)
      throw InvalidArgument("extent beyond the image rank must be 1");
  }
}

Grid make_grid(std::span<const std::size_t> dims, std::span<const double> spacing) {
  if (dims.empty() || dims.size() > 3) throw InvalidArgument("image rank must be 1, 2 or 3");
  if (spacing.size() != dims.size()) throw InvalidArgument("spacing must have one entry per axis");
  Grid g;
  g.rank = static_cast<int>(dims.size());
  for (std::size_t a = 0; a < dims.size(); ++a) {
    g.dims[a] = dims[a];
    g.spacing[a] = spacing[a];
  }
  g.validate();
  return g;
}

VolumeImage::VolumeImage(Grid grid, std::vector<double> data, ValueKind kind)
    : grid_(grid), data_(std::move(data)), kind_(kind) {
  grid_.validate();
  if (data_.size() != grid_.voxel_count()) {
    throw InvalidArgument("data length " + std::to_string(data_.size()) +
                          " does not match product of dims " +
                          std::to_string(grid_.voxel_count()));
  }
}

VolumeImage VolumeImage::zeros(const Grid& grid, ValueKind kind) {
  return VolumeImage(grid, std::vector<double>(grid.voxel_count(), 0.0), kind);
}

void VolumeImage::set_spacing(const Spacing3& spacing) {
  Grid g = grid_;
  g.spacing = spacing;
  g.validate();
  grid_ = g;
}

ComplexVolume ComplexVolume::zeros(const Grid& grid) {
  return ComplexVolume{grid, std::vector<std::complex<double>>(grid.voxel_count())};
}

ComplexVolume ComplexVolume::from_real(const VolumeImage& image) {
  ComplexVolume out{image.grid(), {}};
  out.data.assign(image.values().begin(), image.values().end());
  return out;
}

VolumeImage ComplexVolume::real_part() const {
  std::vector<double> v(data.size());
  std::transform(data.begin(), data.end(), v.begin(), [](auto c) { return c.real(); });
  return VolumeImage(grid, std::move(v));
}

VolumeImage ComplexVolume::modulus() const {
  std::vector<double> v(data.size());
  std::transform(data.begin(), data.end(), v.begin(), [](auto c) { return std::abs(c); });
  return VolumeImage(grid, std::move(v), ValueKind::complex_modulus);
}

RoiMask::RoiMask(Grid grid, std::vector<std::uint8_t> membership, MaskKind kind)
    : grid_(grid), member_(std::move(membership)), kind_(kind) {
  grid_.validate();
  if (member_.size() != grid_.voxel_count())
    throw InvalidArgument("mask length does not match product of dims");
  for (auto& m : member_) m = m ? 1 : 0;
}

RoiMask RoiMask::filled(const Grid& grid, bool value, MaskKind kind) {
  return RoiMask(grid, std::vector<std::uint8_t>(grid.voxel_count(), value ? 1 : 0), kind);
}

std::size_t RoiMask::count() const {
  return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), std::uint8_t{1}));
}

void RoiMask::require_matches(const Grid& image_grid) const {
  if (grid_.dims != image_grid.dims)
    throw InvalidArgument("mask dimensions do not match the image");
}

VolumeImage create_image(std::span<const std::size_t> dims, std::span<const double> spacing,
                         std::vector<double> data) {
  return VolumeImage(make_grid(dims, spacing), std::move(data));
}

double physical_to_voxel(double value_mm, double spacing_mm) {
  if (!(spacing_mm > 0.0)) throw InvalidArgument("voxel spacing must be strictly positive");
  return value_mm / spacing_mm;
}

Spacing3 physical_to_voxel(double value_mm, const Grid& grid) {
  Spacing3 out{value_mm, value_mm, value_mm};
  for (int a = 0; a < grid.rank; ++a) out[a] = physical_to_voxel(value_mm, grid.spacing[a]);
  return out;
}

RoiMask interior_region(const Grid& grid, const Index3& margin) {
  for (int a = 0; a < grid.rank; ++a) {
    if (2 * margin[a] >= grid.dims[a])
      throw InvalidArgument("interior margin leaves no voxels along axis " + std::to_string(a));
  }
  RoiMask mask = RoiMask::filled(grid, false);
  for (std::size_t k3 = 0; k3 < grid.dims[2]; ++k3)
    for (std::size_t k2 = 0; k2 < grid.dims[1]; ++k2)
      for (std::size_t k1 = 0; k1 < grid.dims[0]; ++k1) {
        const Index3 k{k1, k2, k3};
        bool inside = true;
        for (int a = 0; a < grid.rank; ++a)
          inside = inside && k[a] >= margin[a] && k[a] < grid.dims[a] - margin[a];
        mask.set(grid.offset(k1, k2, k3), inside);
      }
  return mask;
}

}  // namespace rfilt
