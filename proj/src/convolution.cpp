#include "rfilt/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfilt/error.hpp"
#include "rfilt/fft.hpp"

namespace rfilt {
namespace {

template <class T>
void check_kernel(const BasicDenseKernel<T>& kernel, const Grid& grid) {
  if (kernel.rank != grid.rank)
    throw InvalidArgument("kernel rank " + std::to_string(kernel.rank) +
                          " does not match image rank " + std::to_string(grid.rank));
  std::size_t n = 1;
  for (int a = 0; a < 3; ++a) {
    if (kernel.dims[a] == 0) throw InvalidArgument("kernel extents must be positive");
    if (a >= kernel.rank && kernel.dims[a] != 1)
      throw InvalidArgument("kernel extent beyond its rank must be 1");
    n *= kernel.dims[a];
  }
  if (kernel.taps.size() != n) throw InvalidArgument("kernel tap count does not match its extents");
  for (const auto& t : kernel.taps) {
    if (!std::isfinite(std::abs(t))) throw InvalidArgument("kernel contains non-finite taps");
  }
}

Index3 halo_of(const Index3& kdims) {
  return {kernel_margin(kdims[0]), kernel_margin(kdims[1]), kernel_margin(kdims[2])};
}

template <class T>
std::vector<T> full_spatial(const VolumeImage& image, const BasicDenseKernel<T>& kernel,
                            const BoundaryMode& boundary) {
  const Grid& g = image.grid();
  check_kernel(kernel, g);
  const Index3 c = halo_of(kernel.dims);
  const VolumeImage padded = pad(image, c, boundary);
  const Grid& pg = padded.grid();
  const auto src = padded.values();
  const Index3 kd = kernel.dims;
  std::vector<T> out(g.voxel_count());

  const auto lines = static_cast<std::ptrdiff_t>(g.dims[1] * g.dims[2]);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t line = 0; line < lines; ++line) {
    const std::size_t k2 = static_cast<std::size_t>(line) % g.dims[1];
    const std::size_t k3 = static_cast<std::size_t>(line) / g.dims[1];
    for (std::size_t k1 = 0; k1 < g.dims[0]; ++k1) {
      T s{};
      for (std::size_t m3 = 0; m3 < kd[2]; ++m3) {
        const std::size_t p3 = k3 + 2 * c[2] - m3;
        for (std::size_t m2 = 0; m2 < kd[1]; ++m2) {
          const std::size_t p2 = k2 + 2 * c[1] - m2;
          const double* row = src.data() + pg.offset(0, p2, p3);
          const T* taps = kernel.taps.data() + kernel.offset(0, m2, m3);
          for (std::size_t m1 = 0; m1 < kd[0]; ++m1) s += taps[m1] * row[k1 + 2 * c[0] - m1];
        }
      }
      out[g.offset(k1, k2, k3)] = s;
    }
  }
  return out;
}

// Same pairing as the odd-length pass, so a reversed kernel gives the same bits.
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

}  // namespace

DenseKernel outer_product(const SeparableKernel& kernel) {
  const auto& ax = kernel.axes;
  if (ax.empty() || ax.size() > 3) throw InvalidArgument("separable kernel needs 1 to 3 axes");
  DenseKernel out;
  out.rank = static_cast<int>(ax.size());
  for (std::size_t a = 0; a < ax.size(); ++a) {
    if (ax[a].empty()) throw InvalidArgument("empty 1-D kernel");
    out.dims[a] = ax[a].size();
  }
  out.taps.resize(out.dims[0] * out.dims[1] * out.dims[2]);
  for (std::size_t m3 = 0; m3 < out.dims[2]; ++m3)
    for (std::size_t m2 = 0; m2 < out.dims[1]; ++m2)
      for (std::size_t m1 = 0; m1 < out.dims[0]; ++m1) {
        double v = ax[0][m1];
        if (ax.size() > 1) v *= ax[1][m2];
        if (ax.size() > 2) v *= ax[2][m3];
        out.taps[out.offset(m1, m2, m3)] = v;
      }
  return out;
}

ComplexKernel to_complex(const DenseKernel& kernel) {
  ComplexKernel out{kernel.dims, kernel.rank, {}};
  out.taps.assign(kernel.taps.begin(), kernel.taps.end());
  return out;
}

TransferFunction TransferFunction::constant(const Grid& grid, std::complex<double> value) {
  return {grid, std::vector<std::complex<double>>(grid.voxel_count(), value)};
}

TransferFunction& TransferFunction::operator*=(const TransferFunction& other) {
  if (!grid.same_dims(other.grid)) throw InvalidArgument("transfer function grids differ");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] *= other.values[i];
  return *this;
}

bool TransferFunction::conjugate_symmetric(double tol) const {
  const Index3& d = grid.dims;
  double scale = 0.0;
  for (const auto& v : values) scale = std::max(scale, std::abs(v));
  const double lim = tol * std::max(scale, 1.0);
  for (std::size_t k3 = 0; k3 < d[2]; ++k3)
    for (std::size_t k2 = 0; k2 < d[1]; ++k2)
      for (std::size_t k1 = 0; k1 < d[0]; ++k1) {
        const std::size_t q1 = (d[0] - k1) % d[0], q2 = (d[1] - k2) % d[1], q3 = (d[2] - k3) % d[2];
        const auto a = values[grid.offset(k1, k2, k3)];
        const auto b = values[grid.offset(q1, q2, q3)];
        if (std::abs(a - std::conj(b)) > lim) return false;
      }
  return true;
}

double FourierGrid::norm(std::size_t n1, std::size_t n2, std::size_t n3) const {
  const double a = nu[0][n1], b = nu[1][n2], c = nu[2][n3];
  return std::sqrt(a * a + b * b + c * c);
}

std::vector<double> FourierGrid::radial_norm() const {
  std::vector<double> out(grid.voxel_count());
  for (std::size_t k3 = 0; k3 < grid.dims[2]; ++k3)
    for (std::size_t k2 = 0; k2 < grid.dims[1]; ++k2)
      for (std::size_t k1 = 0; k1 < grid.dims[0]; ++k1)
        out[grid.offset(k1, k2, k3)] = norm(k1, k2, k3);
  return out;
}

std::size_t FourierGrid::centred_to_dft(std::size_t centred, std::size_t n) {
  const auto f = static_cast<std::ptrdiff_t>(centred) - static_cast<std::ptrdiff_t>(n / 2);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((f % sn) + sn) % sn);
}

std::size_t FourierGrid::dft_to_centred(std::size_t dft, std::size_t n) {
  const std::size_t half = (n + 1) / 2;
  const auto f = dft < half ? static_cast<std::ptrdiff_t>(dft)
                            : static_cast<std::ptrdiff_t>(dft) - static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(f + static_cast<std::ptrdiff_t>(n / 2));
}

FourierGrid fourier_grid(const Grid& grid) {
  FourierGrid fg{grid, {}};
  for (int a = 0; a < 3; ++a) {
    const std::size_t n = grid.dims[a];
    const std::size_t half = (n + 1) / 2;
    fg.nu[a].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double k = i < half ? static_cast<double>(i)
                                : static_cast<double>(i) - static_cast<double>(n);
      fg.nu[a][i] = 2.0 * M_PI * k / static_cast<double>(n);
    }
  }
  return fg;
}

ResponseMap convolve_full(const VolumeImage& image, const DenseKernel& kernel,
                          const BoundaryMode& boundary) {
  return ResponseMap(image.grid(), full_spatial(image, kernel, boundary));
}

ComplexVolume convolve_full(const VolumeImage& image, const ComplexKernel& kernel,
                            const BoundaryMode& boundary) {
  return ComplexVolume{image.grid(), full_spatial(image, kernel, boundary)};
}

ResponseMap convolve_axis(const VolumeImage& image, std::span<const double> kernel, int axis,
                          const BoundaryMode& boundary) {
  const Grid& g = image.grid();
  if (axis < 0 || axis >= g.rank) throw InvalidArgument("convolution axis out of range");
  if (kernel.empty()) throw InvalidArgument("empty 1-D kernel");
  for (double t : kernel)
    if (!std::isfinite(t)) throw InvalidArgument("kernel contains non-finite taps");

  const std::size_t m = kernel.size();
  const std::size_t c = m / 2;
  const std::size_t left = m - 1 - c;  // equals c for odd m
  const std::size_t n = g.dims[axis];
  const std::size_t stride = g.stride(axis);
  const int oa = axis == 0 ? 1 : 0;
  const int ob = axis == 2 ? 1 : 2;
  const std::size_t na = g.dims[oa], nb = g.dims[ob];
  const std::size_t sa = g.stride(oa), sb = g.stride(ob);

  std::vector<std::ptrdiff_t> map(n + m - 1);
  for (std::size_t i = 0; i < map.size(); ++i)
    map[i] = extended_index(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(left),
                            static_cast<std::ptrdiff_t>(n), boundary.kind);

  const auto src = image.values();
  std::vector<double> out(g.voxel_count());
  const bool odd = (m % 2) == 1;
  const auto lines = static_cast<std::ptrdiff_t>(na * nb);

#pragma omp parallel
  {
    std::vector<double> ext(n + m - 1);
#pragma omp for schedule(static)
    for (std::ptrdiff_t line = 0; line < lines; ++line) {
      const std::size_t ia = static_cast<std::size_t>(line) % na;
      const std::size_t ib = static_cast<std::size_t>(line) / na;
      const std::size_t base = ia * sa + ib * sb;
      for (std::size_t i = 0; i < ext.size(); ++i)
        ext[i] = map[i] < 0 ? boundary.constant
                            : src[base + static_cast<std::size_t>(map[i]) * stride];
      for (std::size_t x = 0; x < n; ++x) {
        double s;
        if (odd) {
          const double* f = ext.data() + x + c;  // f[0] is the voxel itself
          s = kernel[c] * f[0];
          for (std::size_t t = 1; t <= c; ++t)
            s += kernel[c - t] * f[t] + kernel[c + t] * f[-static_cast<std::ptrdiff_t>(t)];
        } else {
          s = 0.0;
          for (std::size_t k = 0; k < m; ++k) s += kernel[k] * ext[x + m - 1 - k];
        }
        out[base + x * stride] = s;
      }
    }
  }
  return ResponseMap(g, std::move(out), image.value_kind());
}

ResponseMap convolve_separable(const VolumeImage& image, const SeparableKernel& kernel,
                               const BoundaryMode& boundary,
                               std::optional<std::array<int, 3>> pass_order) {
  const int rank = image.rank();
  if (static_cast<int>(kernel.axes.size()) != rank)
    throw InvalidArgument("separable kernel has " + std::to_string(kernel.axes.size()) +
                          " axes for a rank-" + std::to_string(rank) + " image");
  std::array<int, 3> order = pass_order.value_or(std::array<int, 3>{0, 1, 2});
  std::array<bool, 3> seen{};
  for (int i = 0; i < rank; ++i) {
    if (order[i] < 0 || order[i] >= rank || seen[order[i]])
      throw InvalidArgument("pass order must be a permutation of the image axes");
    seen[order[i]] = true;
  }
  ResponseMap out = image;
  BoundaryMode mode = boundary;
  for (int i = 0; i < rank; ++i) {
    const int a = order[i];
    out = convolve_axis(out, kernel.axes[a], a, mode);
    // the halo seen by later passes is the constant already filtered by this one
    mode.constant *= symmetric_sum(kernel.axes[a]);
  }
  return out;
}

TransferFunction kernel_transfer(const ComplexKernel& kernel, const Grid& grid) {
  check_kernel(kernel, grid);
  ComplexVolume buf = ComplexVolume::zeros(grid);
  const Index3 c = halo_of(kernel.dims);
  auto wrap = [](std::size_t m, std::size_t c, std::size_t n) {
    const auto sn = static_cast<std::ptrdiff_t>(n);
    const auto v = static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(c);
    return static_cast<std::size_t>(((v % sn) + sn) % sn);
  };
  for (std::size_t m3 = 0; m3 < kernel.dims[2]; ++m3)
    for (std::size_t m2 = 0; m2 < kernel.dims[1]; ++m2)
      for (std::size_t m1 = 0; m1 < kernel.dims[0]; ++m1)
        buf.data[grid.offset(wrap(m1, c[0], grid.dims[0]), wrap(m2, c[1], grid.dims[1]),
                             wrap(m3, c[2], grid.dims[2]))] += kernel.at(m1, m2, m3);
  fft::forward(buf);
  return {grid, std::move(buf.data)};
}

ComplexVolume convolve_fourier_complex(const VolumeImage& image, const TransferFunction& transfer) {
  if (!image.grid().same_dims(transfer.grid))
    throw InvalidArgument("transfer function does not match the image extents");
  ComplexVolume f = ComplexVolume::from_real(image);
  fft::forward(f);
  for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] *= transfer.values[i];
  fft::inverse(f);
  f.grid = image.grid();
  return f;
}

ResponseMap convolve_fourier(const VolumeImage& image, const TransferFunction& transfer) {
  const ComplexVolume r = convolve_fourier_complex(image, transfer);
  return transfer.conjugate_symmetric(1e-9) ? r.real_part() : r.modulus();
}

ConvolutionVia parse_via(std::string_view name) {
  if (name == "spatial") return ConvolutionVia::spatial;
  if (name == "fourier") return ConvolutionVia::fourier;
  if (name == "auto" || name == "automatic") return ConvolutionVia::automatic;
  throw InvalidArgument("unknown convolution route '" + std::string(name) + "'");
}

bool ViaHeuristic::prefer_fourier(std::size_t voxels, std::size_t taps,
                                  std::size_t padded_voxels) const {
  const double np = static_cast<double>(padded_voxels);
  const double fourier = np * (1.0 + 2.0 * std::log2(std::max(np, 2.0))) * crossover;
  return fourier < static_cast<double>(voxels) * static_cast<double>(taps);
}

std::vector<ComplexVolume> convolve_bank(const VolumeImage& image,
                                         std::span<const ComplexKernel> kernels,
                                         const BoundaryMode& boundary, ConvolutionVia via,
                                         ViaHeuristic heuristic) {
  const Grid& g = image.grid();
  std::vector<ComplexVolume> out;
  if (kernels.empty()) return out;
  for (const auto& k : kernels) check_kernel(k, g);

  const bool periodic = boundary.kind == BoundaryKind::periodise;
  Index3 margin{0, 0, 0};
  std::size_t taps = 0;
  for (const auto& k : kernels) {
    taps = std::max(taps, k.taps.size());
    if (!periodic)
      for (int a = 0; a < g.rank; ++a) margin[a] = std::max(margin[a], kernel_margin(k.dims[a]));
  }
  Grid pg = g;
  for (int a = 0; a < g.rank; ++a) pg.dims[a] += 2 * margin[a];

  bool fourier = via == ConvolutionVia::fourier;
  if (via == ConvolutionVia::automatic)
    fourier = heuristic.prefer_fourier(g.voxel_count(), taps, pg.voxel_count());

  out.reserve(kernels.size());
  if (!fourier) {
    for (const auto& k : kernels) out.push_back(convolve_full(image, k, boundary));
    return out;
  }

  const VolumeImage padded = pad(image, margin, boundary);
  ComplexVolume spectrum = ComplexVolume::from_real(padded);
  fft::forward(spectrum);
  for (const auto& k : kernels) {
    const TransferFunction h = kernel_transfer(k, pg);
    ComplexVolume r{pg, spectrum.data};
    for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] *= h.values[i];
    fft::inverse(r);
    ComplexVolume crop = ComplexVolume::zeros(g);
    for (std::size_t k3 = 0; k3 < g.dims[2]; ++k3)
      for (std::size_t k2 = 0; k2 < g.dims[1]; ++k2)
        for (std::size_t k1 = 0; k1 < g.dims[0]; ++k1)
          crop.data[g.offset(k1, k2, k3)] =
              r.data[pg.offset(k1 + margin[0], k2 + margin[1], k3 + margin[2])];
    out.push_back(std::move(crop));
  }
  return out;
}

ResponseMap convolve_dense(const VolumeImage& image, const DenseKernel& kernel,
                           const BoundaryMode& boundary, ConvolutionVia via) {
  if (via == ConvolutionVia::spatial) return convolve_full(image, kernel, boundary);
  const ComplexKernel ck = to_complex(kernel);
  auto r = convolve_bank(image, std::span<const ComplexKernel>(&ck, 1), boundary, via);
  return r.front().real_part();
}

}  // namespace rfilt
