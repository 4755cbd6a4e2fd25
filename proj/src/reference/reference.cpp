#include "rfilt/reference.hpp"

#include <algorithm>
#include <cmath>

#include "rfilt/error.hpp"

namespace rfilt::reference {

namespace {

double sample(const VolumeImage& image, std::ptrdiff_t k1, std::ptrdiff_t k2, std::ptrdiff_t k3,
              const BoundaryMode& b) {
  const auto& d = image.dims();
  const std::ptrdiff_t i1 = extended_index(k1, static_cast<std::ptrdiff_t>(d[0]), b.kind);
  const std::ptrdiff_t i2 = extended_index(k2, static_cast<std::ptrdiff_t>(d[1]), b.kind);
  const std::ptrdiff_t i3 = extended_index(k3, static_cast<std::ptrdiff_t>(d[2]), b.kind);
  if (i1 < 0 || i2 < 0 || i3 < 0) return b.constant;
  return image.at(static_cast<std::size_t>(i1), static_cast<std::size_t>(i2), static_cast<std::size_t>(i3));
}

double symmetric_sum(std::span<const double> k) {
  const std::size_t m = k.size();
  if (m % 2 == 0) {
    double s = 0.0;
    for (double t : k) s += t;
    return s;
  }
  const std::size_t c = m / 2;
  double s = k[c];
  for (std::size_t t = 1; t <= c; ++t) s += k[c - t] + k[c + t];
  return s;
}

SeparableKernel box(int width, int rank) {
  return {std::vector<Kernel1D>(rank, Kernel1D(width, 1.0 / width))};
}

}  // namespace

ResponseMap convolve_axis(const VolumeImage& image, std::span<const double> kernel, int axis,
                          const BoundaryMode& boundary) {
  const Grid& g = image.grid();
  if (axis < 0 || axis >= g.rank) throw InvalidArgument("convolution axis out of range");
  if (kernel.empty()) throw InvalidArgument("empty 1-D kernel");
  const auto m = static_cast<std::ptrdiff_t>(kernel.size());
  const std::ptrdiff_t c = m / 2;
  std::vector<double> out(g.voxel_count());
  for (std::size_t k3 = 0; k3 < g.dims[2]; ++k3)
    for (std::size_t k2 = 0; k2 < g.dims[1]; ++k2)
      for (std::size_t k1 = 0; k1 < g.dims[0]; ++k1) {
        std::array<std::ptrdiff_t, 3> p{std::ptrdiff_t(k1), std::ptrdiff_t(k2), std::ptrdiff_t(k3)};
        auto at = [&](std::ptrdiff_t shift) {
          auto q = p;
          q[axis] += shift;
          return sample(image, q[0], q[1], q[2], boundary);
        };
        double s;
        if (m % 2 == 1) {
          s = kernel[c] * at(0);
          for (std::ptrdiff_t t = 1; t <= c; ++t) s += kernel[c - t] * at(t) + kernel[c + t] * at(-t);
        } else {
          s = 0.0;
          for (std::ptrdiff_t k = 0; k < m; ++k) s += kernel[k] * at(c - k);
        }
        out[g.offset(k1, k2, k3)] = s;
      }
  return ResponseMap(g, std::move(out), image.value_kind());
}

ResponseMap convolve_separable(const VolumeImage& image, const SeparableKernel& kernel,
                               const BoundaryMode& boundary,
                               std::optional<std::array<int, 3>> pass_order) {
  const int rank = image.rank();
  if (static_cast<int>(kernel.axes.size()) != rank)
    throw InvalidArgument("separable kernel rank does not match the image");
  const auto order = pass_order.value_or(std::array<int, 3>{0, 1, 2});
  ResponseMap out = image;
  BoundaryMode mode = boundary;
  for (int i = 0; i < rank; ++i) {
    out = reference::convolve_axis(out, kernel.axes[order[i]], order[i], mode);
    mode.constant *= symmetric_sum(kernel.axes[order[i]]);
  }
  return out;
}

ResponseMap convolve_full(const VolumeImage& image, const DenseKernel& kernel,
                          const BoundaryMode& boundary) {
  const Grid& g = image.grid();
  if (kernel.rank != g.rank) throw InvalidArgument("kernel rank does not match the image");
  const auto& kd = kernel.dims;
  const std::array<std::ptrdiff_t, 3> c{std::ptrdiff_t(kd[0] / 2), std::ptrdiff_t(kd[1] / 2),
                                        std::ptrdiff_t(kd[2] / 2)};
  std::vector<double> out(g.voxel_count());
  for (std::size_t k3 = 0; k3 < g.dims[2]; ++k3)
    for (std::size_t k2 = 0; k2 < g.dims[1]; ++k2)
      for (std::size_t k1 = 0; k1 < g.dims[0]; ++k1) {
        double s = 0.0;
        for (std::size_t m3 = 0; m3 < kd[2]; ++m3)
          for (std::size_t m2 = 0; m2 < kd[1]; ++m2)
            for (std::size_t m1 = 0; m1 < kd[0]; ++m1)
              s += kernel.at(m1, m2, m3) *
                   sample(image, std::ptrdiff_t(k1) + c[0] - std::ptrdiff_t(m1),
                          std::ptrdiff_t(k2) + c[1] - std::ptrdiff_t(m2),
                          std::ptrdiff_t(k3) + c[2] - std::ptrdiff_t(m3), boundary);
        out[g.offset(k1, k2, k3)] = s;
      }
  return ResponseMap(g, std::move(out));
}

ResponseMap laws_energy(const ResponseMap& response, int delta, const BoundaryMode& boundary) {
  if (delta < 0) throw InvalidArgument("energy distance delta must be non-negative");
  std::vector<double> a(response.values().begin(), response.values().end());
  for (auto& v : a) v = std::abs(v);
  const VolumeImage mag(response.grid(), std::move(a));
  if (delta == 0) return mag;
  BoundaryMode mode = boundary;
  mode.constant = std::abs(mode.constant);
  return reference::convolve_separable(mag, box(2 * delta + 1, response.rank()), mode);
}

ResponseMap pooled_equivariant(const VolumeImage& image, const std::vector<SeparableKernel>& stages,
                               const BoundaryMode& boundary, PoolMode mode) {
  const auto& group = right_angle_group(image.rank());
  std::vector<double> acc;
  for (std::size_t k = 0; k < group.size(); ++k) {
    ResponseMap r = image;
    for (const auto& s : stages)
      r = reference::convolve_separable(r, apply_element(group[k], s), boundary, group[k].pass_order());
    if (k == 0) {
      acc.assign(r.values().begin(), r.values().end());
      continue;
    }
    for (std::size_t i = 0; i < acc.size(); ++i)
      acc[i] = mode == PoolMode::max ? std::max(acc[i], r[i]) : acc[i] + r[i];
  }
  if (mode == PoolMode::average)
    for (auto& x : acc) x /= static_cast<double>(group.size());
  return ResponseMap(image.grid(), std::move(acc));
}

}  // namespace rfilt::reference
