#include "rfilt/resample.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rfilt/boundary.hpp"
#include "rfilt/error.hpp"

namespace rfilt {

InterpMethod parse_interp(std::string_view name) {
  if (name == "trilinear" || name == "linear") return InterpMethod::trilinear;
  if (name == "tricubic" || name == "tricubic-spline" || name == "spline" || name == "cubic")
    return InterpMethod::tricubic;
  throw InvalidArgument("unknown interpolation method '" + std::string(name) + "'");
}

std::string_view to_string(InterpMethod method) {
  return method == InterpMethod::trilinear ? "trilinear" : "tricubic";
}

namespace {

bool same_spacing(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

double bspline3(double t) {
  t = std::abs(t);
  if (t < 1.0) return 2.0 / 3.0 - t * t + 0.5 * t * t * t;
  if (t < 2.0) {
    const double u = 2.0 - t;
    return u * u * u / 6.0;
  }
  return 0.0;
}

// Interpolation coefficients for cubic B-splines under edge-including mirror
// extension (c[-1] = c[0], c[n] = c[n-1]): tridiagonal solve.
void spline_coefficients(std::vector<double>& f) {
  const std::size_t n = f.size();
  if (n == 1) return;
  std::vector<double> diag(n, 4.0 / 6.0), sub(n, 1.0 / 6.0);
  diag.front() = diag.back() = 5.0 / 6.0;
  std::vector<double> cp(n);
  double d = diag[0];
  cp[0] = sub[0] / d;
  f[0] /= d;
  for (std::size_t i = 1; i < n; ++i) {
    d = diag[i] - sub[i] * cp[i - 1];
    cp[i] = sub[i] / d;
    f[i] = (f[i] - sub[i] * f[i - 1]) / d;
  }
  for (std::size_t i = n - 1; i-- > 0;) f[i] -= cp[i] * f[i + 1];
}

struct AxisMap {
  std::size_t n_in = 1, n_out = 1;
  double step = 1.0, offset = 0.0;  // x = k' * step + offset
  double at(std::size_t k) const { return static_cast<double>(k) * step + offset; }
};

AxisMap axis_map(std::size_t n, double s, double s_new) {
  AxisMap m;
  m.n_in = n;
  m.n_out = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * s / s_new - 1e-9));
  if (m.n_out == 0) m.n_out = 1;
  m.step = s_new / s;
  m.offset = -(static_cast<double>(m.n_out) - 1.0) / 2.0 * m.step + (static_cast<double>(n) - 1.0) / 2.0;
  return m;
}

void linear_line(const std::vector<double>& in, std::vector<double>& out, const AxisMap& m) {
  const auto last = static_cast<std::ptrdiff_t>(m.n_in) - 1;
  for (std::size_t k = 0; k < m.n_out; ++k) {
    const double x = m.at(k);
    const double fl = std::floor(x);
    const double t = x - fl;
    const auto i0 = static_cast<std::ptrdiff_t>(fl);
    const auto a = std::clamp<std::ptrdiff_t>(i0, 0, last);
    const auto b = std::clamp<std::ptrdiff_t>(i0 + 1, 0, last);
    out[k] = t == 0.0 ? in[a] : (1.0 - t) * in[a] + t * in[b];
  }
}

void cubic_line(std::vector<double>& in, std::vector<double>& out, const AxisMap& m) {
  spline_coefficients(in);
  const auto n = static_cast<std::ptrdiff_t>(m.n_in);
  for (std::size_t k = 0; k < m.n_out; ++k) {
    const double x = m.at(k);
    const auto i0 = static_cast<std::ptrdiff_t>(std::floor(x));
    double acc = 0.0;
    for (std::ptrdiff_t j = i0 - 1; j <= i0 + 2; ++j) {
      const double w = bspline3(x - static_cast<double>(j));
      if (w != 0.0) acc += w * in[extended_index(j, n, BoundaryKind::mirror)];
    }
    out[k] = acc;
  }
}

VolumeImage resample_axis(const VolumeImage& image, int axis, double s_new, bool cubic) {
  const Grid& g = image.grid();
  const AxisMap m = axis_map(g.dims[axis], g.spacing[axis], s_new);
  Grid h = g;
  h.dims[axis] = m.n_out;
  h.spacing[axis] = s_new;
  const std::size_t in_stride = g.stride(axis), out_stride = h.stride(axis);

  // lines enumerated by the coordinates of the other two axes
  const int o1 = axis == 0 ? 1 : 0, o2 = axis == 2 ? 1 : 2;
  const std::size_t lines = g.dims[o1] * g.dims[o2];
  std::vector<double> out(h.voxel_count());
#pragma omp parallel
  {
    std::vector<double> line(m.n_in), res(m.n_out);
#pragma omp for schedule(static)
    for (std::ptrdiff_t li = 0; li < static_cast<std::ptrdiff_t>(lines); ++li) {
      Index3 c{0, 0, 0};
      c[o1] = static_cast<std::size_t>(li) % g.dims[o1];
      c[o2] = static_cast<std::size_t>(li) / g.dims[o1];
      const std::size_t base_in = g.offset(c[0], c[1], c[2]);
      const std::size_t base_out = h.offset(c[0], c[1], c[2]);
      for (std::size_t i = 0; i < m.n_in; ++i) line[i] = image[base_in + i * in_stride];
      if (cubic) cubic_line(line, res, m);
      else linear_line(line, res, m);
      for (std::size_t i = 0; i < m.n_out; ++i) out[base_out + i * out_stride] = res[i];
    }
  }
  return VolumeImage(h, std::move(out), image.value_kind());
}

void check_spacing(const Spacing3& s, int rank) {
  for (int a = 0; a < rank; ++a)
    if (!(s[a] > 0.0) || !std::isfinite(s[a])) throw InvalidArgument("resampled spacing must be positive");
}

}  // namespace

Grid resampled_grid(const Grid& grid, const Spacing3& new_spacing) {
  check_spacing(new_spacing, grid.rank);
  Grid h = grid;
  for (int a = 0; a < grid.rank; ++a) {
    if (same_spacing(grid.spacing[a], new_spacing[a])) continue;
    const AxisMap m = axis_map(grid.dims[a], grid.spacing[a], new_spacing[a]);
    h.dims[a] = m.n_out;
    h.spacing[a] = new_spacing[a];
  }
  return h;
}

VolumeImage resample_image(const VolumeImage& image, const Spacing3& new_spacing,
                           InterpMethod method) {
  check_spacing(new_spacing, image.rank());
  VolumeImage out = image;
  for (int a = 0; a < image.rank(); ++a) {
    if (same_spacing(out.spacing()[a], new_spacing[a])) continue;
    out = resample_axis(out, a, new_spacing[a], method == InterpMethod::tricubic);
  }
  return out;
}

RoiMask resample_mask(const RoiMask& mask, const Spacing3& new_spacing, double threshold) {
  const Grid& g = mask.grid();
  std::vector<double> field(g.voxel_count());
  for (std::size_t i = 0; i < field.size(); ++i) field[i] = mask[i] ? 1.0 : 0.0;
  const auto r = resample_image(VolumeImage(g, std::move(field)), new_spacing, InterpMethod::trilinear);
  std::vector<std::uint8_t> m(r.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = r[i] >= threshold ? 1 : 0;
  return RoiMask(r.grid(), std::move(m), mask.kind());
}

VolumeImage round_intensities(const VolumeImage& image) {
  std::vector<double> v(image.values().begin(), image.values().end());
  for (auto& x : v) x = std::round(x);
  return VolumeImage(image.grid(), std::move(v), image.value_kind());
}

RoiMask resegment(const RoiMask& mask, const VolumeImage& image, const IntensityRange& range) {
  if (range.low > range.high) throw InvalidArgument("re-segmentation range is inverted");
  mask.require_matches(image.grid());
  std::vector<std::uint8_t> m(mask.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = mask[i] && image[i] >= range.low && image[i] <= range.high ? 1 : 0;
  return RoiMask(mask.grid(), std::move(m), MaskKind::intensity);
}

}  // namespace rfilt
