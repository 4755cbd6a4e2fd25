#include "rfilt/wavelets.hpp"

#include <cmath>

#include "rfilt/error.hpp"

namespace rfilt {

WaveletFamily wavelet_from_lowpass(std::string name, Kernel1D low) {
  if (low.empty()) throw InvalidArgument("empty wavelet low-pass");
  const std::size_t n = low.size();
  Kernel1D high(n);
  for (std::size_t k = 0; k < n; ++k) high[k] = (k % 2 == 0 ? -1.0 : 1.0) * low[n - 1 - k];
  return {std::move(name), std::move(low), std::move(high)};
}

WaveletFamily wavelet_family(std::string_view name) {
  if (name == "haar" || name == "db1") {
    const double r = 1.0 / std::sqrt(2.0);
    return {"haar", {r, r}, {-r, r}};
  }
  if (name == "db2")
    return wavelet_from_lowpass(
        "db2", {-0.12940952255126037, 0.2241438680420134, 0.8365163037378079, 0.48296291314453416});
  if (name == "db3")
    return wavelet_from_lowpass("db3", {0.03522629188570953, -0.08544127388202666,
                                        -0.13501102001025458, 0.45987750211849154,
                                        0.8068915093110925, 0.33267055295008263});
  throw InvalidArgument("unknown wavelet '" + std::string(name) + "'");
}

Kernel1D atrous_upsample(const Kernel1D& kernel, int level) {
  if (level < 0) throw InvalidArgument("a trous level must be non-negative");
  const std::size_t step = std::size_t{1} << level;
  Kernel1D out(kernel.size() * step, 0.0);
  for (std::size_t i = 0; i < kernel.size(); ++i) out[i * step] = kernel[i];
  return out;
}

Subband parse_subband(std::string_view letters, int rank) {
  if (static_cast<int>(letters.size()) != rank)
    throw InvalidArgument("subband '" + std::string(letters) + "' needs " + std::to_string(rank) +
                          " letters");
  for (char c : letters)
    if (c != 'L' && c != 'H') throw InvalidArgument("subband letters must be L or H");
  return {std::string(letters)};
}

std::vector<Subband> all_subbands(int rank) {
  std::vector<Subband> out;
  for (int code = 0; code < (1 << rank); ++code) {
    std::string s(rank, 'L');
    for (int a = 0; a < rank; ++a)
      if (code & (1 << (rank - 1 - a))) s[a] = 'H';
    out.push_back({s});
  }
  return out;
}

std::vector<SeparableKernel> swt_cascade(const WaveletFamily& family, int level,
                                         const Subband& subband, int rank) {
  if (level < 1) throw InvalidArgument("wavelet level must be at least 1");
  parse_subband(subband.letters, rank);
  std::vector<SeparableKernel> stages;
  for (int j = 1; j < level; ++j)
    stages.push_back({std::vector<Kernel1D>(rank, atrous_upsample(family.low, j - 1))});
  SeparableKernel last;
  for (int a = 0; a < rank; ++a)
    last.axes.push_back(atrous_upsample(subband.is_low(a) ? family.low : family.high, level - 1));
  stages.push_back(std::move(last));
  return stages;
}

ResponseMap apply_cascade(const VolumeImage& image, const std::vector<SeparableKernel>& stages,
                          const BoundaryMode& boundary) {
  ResponseMap out = image;
  for (const auto& s : stages) out = convolve_separable(out, s, boundary);
  return out;
}

ResponseMap swt_undecimated(const VolumeImage& image, const WaveletFamily& family, int level,
                            const Subband& subband, const BoundaryMode& boundary) {
  return apply_cascade(image, swt_cascade(family, level, subband, image.rank()), boundary);
}

namespace {

Grid half_grid(const Grid& g) {
  Grid h = g;
  for (int a = 0; a < g.rank; ++a) {
    h.dims[a] = (g.dims[a] + 1) / 2;
    h.spacing[a] = g.spacing[a] * 2.0;
  }
  return h;
}

template <class Get, class Put>
void decimate_into(const Grid& g, const Grid& h, Get get, Put put) {
  for (std::size_t k3 = 0; k3 < h.dims[2]; ++k3)
    for (std::size_t k2 = 0; k2 < h.dims[1]; ++k2)
      for (std::size_t k1 = 0; k1 < h.dims[0]; ++k1) {
        const std::size_t s1 = g.rank > 0 ? 2 * k1 : k1;
        const std::size_t s2 = g.rank > 1 ? 2 * k2 : k2;
        const std::size_t s3 = g.rank > 2 ? 2 * k3 : k3;
        put(h.offset(k1, k2, k3), get(g.offset(s1, s2, s3)));
      }
}

}  // namespace

VolumeImage decimate(const VolumeImage& image) {
  const Grid h = half_grid(image.grid());
  std::vector<double> out(h.voxel_count());
  decimate_into(image.grid(), h, [&](std::size_t i) { return image[i]; },
                [&](std::size_t i, double v) { out[i] = v; });
  return VolumeImage(h, std::move(out), image.value_kind());
}

RoiMask decimate(const RoiMask& mask) {
  const Grid h = half_grid(mask.grid());
  std::vector<std::uint8_t> out(h.voxel_count());
  decimate_into(mask.grid(), h, [&](std::size_t i) { return mask[i]; },
                [&](std::size_t i, bool v) { out[i] = v ? 1 : 0; });
  return RoiMask(h, std::move(out), mask.kind());
}

std::vector<DwtLevel> dwt_decimated(const VolumeImage& image, const WaveletFamily& family,
                                    int levels, const BoundaryMode& boundary, const RoiMask* mask) {
  if (levels < 1) throw InvalidArgument("wavelet level must be at least 1");
  const Grid& g = image.grid();
  const std::size_t div = std::size_t{1} << levels;
  for (int a = 0; a < g.rank; ++a) {
    if (g.dims[a] % div != 0) {
      const std::size_t need = (div - g.dims[a] % div) % div;
      throw InvalidArgument("extent " + std::to_string(g.dims[a]) + " along axis " +
                            std::to_string(a) + " is not divisible by 2^" + std::to_string(levels) +
                            "; pad by " + std::to_string(need) + " voxels");
    }
  }
  if (mask) mask->require_matches(g);

  std::vector<DwtLevel> out;
  VolumeImage current = image;
  RoiMask current_mask = mask ? *mask : RoiMask::filled(g, true);
  const auto bands = all_subbands(g.rank);
  for (int j = 1; j <= levels; ++j) {
    DwtLevel lvl;
    lvl.level = j;
    for (const auto& sb : bands) {
      SeparableKernel k;
      for (int a = 0; a < g.rank; ++a) k.axes.push_back(sb.is_low(a) ? family.low : family.high);
      lvl.subbands.emplace(sb.letters, decimate(convolve_separable(current, k, boundary)));
    }
    current_mask = decimate(current_mask);
    lvl.mask = current_mask;
    current = lvl.subbands.at(bands.front().letters);
    out.push_back(std::move(lvl));
  }
  return out;
}

RadialKind parse_radial(std::string_view name) {
  if (name == "shannon") return RadialKind::shannon;
  if (name == "simoncelli") return RadialKind::simoncelli;
  throw InvalidArgument("unknown radial wavelet '" + std::string(name) + "'");
}

double RadialProfile::band_edge() const {
  if (level < 1) throw InvalidArgument("wavelet level must be at least 1");
  return M_PI / std::ldexp(1.0, level - 1);
}

double RadialProfile::operator()(double r) const {
  const double nb = band_edge();
  if (kind == RadialKind::shannon) return (r > nb / 2 && r <= nb) ? 1.0 : 0.0;
  if (r < nb / 4 || r > nb) return 0.0;
  return std::cos(M_PI / 2 * std::log2(2.0 * r / nb));
}

TransferFunction radial_transfer(const RadialProfile& profile, const Grid& grid) {
  const auto fg = fourier_grid(grid);
  const auto radius = fg.radial_norm();
  TransferFunction t{grid, std::vector<std::complex<double>>(radius.size())};
  bool any = false;
  for (std::size_t i = 0; i < radius.size(); ++i) {
    const double v = profile(radius[i]);
    t.values[i] = v;
    any = any || v != 0.0;
  }
  if (!any)
    throw InvalidArgument("wavelet level " + std::to_string(profile.level) +
                          " has an empty band on this grid");
  return t;
}

TransferFunction shannon_residual(int levels, const Grid& grid) {
  const double edge = M_PI / std::ldexp(1.0, levels);
  const auto radius = fourier_grid(grid).radial_norm();
  TransferFunction t{grid, std::vector<std::complex<double>>(radius.size())};
  for (std::size_t i = 0; i < radius.size(); ++i) t.values[i] = radius[i] <= edge ? 1.0 : 0.0;
  return t;
}

ResponseMap nonseparable_b_map(const VolumeImage& image, const RadialProfile& profile) {
  return convolve_fourier_complex(image, radial_transfer(profile, image.grid())).real_part();
}

}  // namespace rfilt
