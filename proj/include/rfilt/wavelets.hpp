#pragma once

// Separable wavelets (decimated and undecimated) and radial Fourier-domain
// wavelets (Shannon, Simoncelli).

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rfilt/boundary.hpp"
#include "rfilt/convolution.hpp"

namespace rfilt {

struct WaveletFamily {
  std::string name;
  Kernel1D low;
  Kernel1D high;
};

/// haar (= db1), db2, db3.
WaveletFamily wavelet_family(std::string_view name);
/// Family from a low-pass table; high-pass by g_H[k] = (-1)^(k+1) g_L[n-1-k].
WaveletFamily wavelet_from_lowpass(std::string name, Kernel1D low);

/// Inserts 2^j - 1 zeros after every tap; result length is len * 2^j.
Kernel1D atrous_upsample(const Kernel1D& kernel, int level);

/// Per-axis letters, L or H; letter i applies along axis k_i.
struct Subband {
  std::string letters;
  bool is_low(int axis) const { return letters.at(axis) == 'L'; }
};
Subband parse_subband(std::string_view letters, int rank);
/// All 2^rank subbands in lexicographic order (LL..L first).
std::vector<Subband> all_subbands(int rank);

/// Separable kernels applied in sequence to produce an undecimated level-j map:
/// all-low stages for levels 1..j-1, then the requested subband, each stage
/// using kernels upsampled by (stage level - 1).
std::vector<SeparableKernel> swt_cascade(const WaveletFamily& family, int level,
                                         const Subband& subband, int rank);

/// Applies a cascade of separable stages.
ResponseMap apply_cascade(const VolumeImage& image, const std::vector<SeparableKernel>& stages,
                          const BoundaryMode& boundary);

ResponseMap swt_undecimated(const VolumeImage& image, const WaveletFamily& family, int level,
                            const Subband& subband, const BoundaryMode& boundary);

/// Keeps even-indexed samples along every axis within the rank.
VolumeImage decimate(const VolumeImage& image);
RoiMask decimate(const RoiMask& mask);

struct DwtLevel {
  int level = 1;
  std::map<std::string, ResponseMap> subbands;  // keyed by letters
  RoiMask mask;                                 // ROI at this level's resolution
};

/// Decimated transform; the all-low map of each level feeds the next.
std::vector<DwtLevel> dwt_decimated(const VolumeImage& image, const WaveletFamily& family,
                                    int levels, const BoundaryMode& boundary,
                                    const RoiMask* mask = nullptr);

enum class RadialKind { shannon, simoncelli };
RadialKind parse_radial(std::string_view name);

struct RadialProfile {
  RadialKind kind = RadialKind::simoncelli;
  int level = 1;
  /// Upper band edge for this level: pi / 2^(level-1).
  double band_edge() const;
  /// Profile value at radial frequency |nu|.
  double operator()(double radius) const;
};

TransferFunction radial_transfer(const RadialProfile& profile, const Grid& grid);

/// 1 for |nu| <= pi / 2^levels, else 0: what remains below the last Shannon band.
TransferFunction shannon_residual(int levels, const Grid& grid);

/// Real response of the radial band-pass.
ResponseMap nonseparable_b_map(const VolumeImage& image, const RadialProfile& profile);

}  // namespace rfilt
