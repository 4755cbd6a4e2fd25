#pragma once

// Spatial (dense and separable) and Fourier-domain convolution.
//
// Kernel centre: index floor(M/2) along each axis, so that
//   h[x] = sum_m g[m] * f_ext[x + floor(M/2) - m]
// which is a true (flipped) convolution. Accumulation is sequential per output
// voxel; parallel loops only split the set of output voxels, so results do not
// depend on the thread count.

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rfilt/boundary.hpp"
#include "rfilt/image.hpp"

namespace rfilt {

using Kernel1D = std::vector<double>;

/// One 1-D kernel per image axis; kernel i is applied along axis k_i.
struct SeparableKernel {
  std::vector<Kernel1D> axes;
};

/// Dense N-D kernel, k1 fastest. T is double or std::complex<double>.
template <class T>
struct BasicDenseKernel {
  Index3 dims{1, 1, 1};
  int rank = 1;
  std::vector<T> taps;

  std::size_t offset(std::size_t m1, std::size_t m2, std::size_t m3) const {
    return m1 + dims[0] * (m2 + dims[1] * m3);
  }
  T at(std::size_t m1, std::size_t m2 = 0, std::size_t m3 = 0) const {
    return taps[offset(m1, m2, m3)];
  }
};

using DenseKernel = BasicDenseKernel<double>;
using ComplexKernel = BasicDenseKernel<std::complex<double>>;

/// Outer product g1 (x) g2 (x) ... as a dense kernel.
DenseKernel outer_product(const SeparableKernel& kernel);
ComplexKernel to_complex(const DenseKernel& kernel);

/// Complex transfer function on the DFT grid of an image (DFT index order).
struct TransferFunction {
  Grid grid;
  std::vector<std::complex<double>> values;

  static TransferFunction constant(const Grid& grid, std::complex<double> value);
  TransferFunction& operator*=(const TransferFunction& other);
  /// True when H[-v] == conj(H[v]) at every grid point (within tol).
  bool conjugate_symmetric(double tol = 1e-12) const;
};

/// Per-axis Fourier coordinates, step 2*pi/N, centred on 0, in DFT index order:
/// index n maps to 2*pi*n/N for n < ceil(N/2) and 2*pi*(n-N)/N otherwise, so the
/// Nyquist sample of an even axis is -pi.
struct FourierGrid {
  Grid grid;
  std::array<std::vector<double>, 3> nu;

  double norm(std::size_t n1, std::size_t n2, std::size_t n3) const;
  std::vector<double> radial_norm() const;

  /// DFT index of the sample that sits at position `centred` of the centred
  /// (ascending-frequency) ordering, and the inverse map.
  static std::size_t centred_to_dft(std::size_t centred, std::size_t n);
  static std::size_t dft_to_centred(std::size_t dft, std::size_t n);
};

FourierGrid fourier_grid(const Grid& grid);

ResponseMap convolve_full(const VolumeImage& image, const DenseKernel& kernel,
                          const BoundaryMode& boundary);
ComplexVolume convolve_full(const VolumeImage& image, const ComplexKernel& kernel,
                            const BoundaryMode& boundary);

/// Separable convolution. Passes run along the axes listed in `pass_order`
/// (default k1, k2, k3). Odd-length passes accumulate symmetric tap pairs
/// around the centre, which makes a pass with a reversed kernel on a reversed
/// line bit-identical to the original.
ResponseMap convolve_separable(const VolumeImage& image, const SeparableKernel& kernel,
                               const BoundaryMode& boundary,
                               std::optional<std::array<int, 3>> pass_order = std::nullopt);

/// One 1-D pass along `axis`.
ResponseMap convolve_axis(const VolumeImage& image, std::span<const double> kernel, int axis,
                          const BoundaryMode& boundary);

/// Transfer function of a spatial kernel on `grid`: the kernel is embedded at
/// the origin with its centre moved to index 0 (circular shift by -floor(M/2)),
/// taps that wrap onto the same sample are summed, then transformed.
TransferFunction kernel_transfer(const ComplexKernel& kernel, const Grid& grid);

/// IDFT(DFT(f) .* H). Periodic boundary is implicit.
ComplexVolume convolve_fourier_complex(const VolumeImage& image, const TransferFunction& transfer);
/// Real part for conjugate-symmetric transfers, complex modulus otherwise.
ResponseMap convolve_fourier(const VolumeImage& image, const TransferFunction& transfer);

enum class ConvolutionVia { spatial, fourier, automatic };
ConvolutionVia parse_via(std::string_view name);

/// Cost model used by ConvolutionVia::automatic: spatial cost voxels * taps
/// against padded_voxels * (1 + 2 log2(padded_voxels)) * crossover.
struct ViaHeuristic {
  double crossover = 1.0;
  bool prefer_fourier(std::size_t voxels, std::size_t taps, std::size_t padded_voxels) const;
};

/// Dense convolution of one image with a bank of kernels. The Fourier route
/// pads with the requested boundary by the kernel halo, convolves circularly
/// and crops, so both routes implement the same boundary handling.
std::vector<ComplexVolume> convolve_bank(const VolumeImage& image,
                                         std::span<const ComplexKernel> kernels,
                                         const BoundaryMode& boundary,
                                         ConvolutionVia via = ConvolutionVia::automatic,
                                         ViaHeuristic heuristic = {});

ResponseMap convolve_dense(const VolumeImage& image, const DenseKernel& kernel,
                           const BoundaryMode& boundary,
                           ConvolutionVia via = ConvolutionVia::automatic);

}  // namespace rfilt
