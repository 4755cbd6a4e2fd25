#pragma once

// Mean, Laplacian-of-Gaussian, Laws and Gabor filter builders.

#include <string>
#include <string_view>
#include <vector>

#include "rfilt/boundary.hpp"
#include "rfilt/convolution.hpp"

namespace rfilt {

/// M^D taps of 1/M^D. M must be odd and positive.
DenseKernel mean_kernel(int m, int rank);
SeparableKernel mean_separable(int m, int rank);

/// 1 + 2 floor(d * sigma + 0.5).
int truncated_support(double sigma_vox, double d);

/// Point-sampled LoG, sigma in voxels, cubic support of truncated_support(sigma, d).
DenseKernel log_kernel(double sigma_vox, int rank, double d = 4.0);

/// Gaussian with the same support rule, either raw samples or normalised to sum 1.
Kernel1D gaussian_1d(double sigma_vox, double d = 4.0, bool normalise = true);

enum class LawsName { L3, L5, E3, E5, S3, S5, W5, R5 };

LawsName parse_laws_name(std::string_view name);
std::string_view to_string(LawsName name);
Kernel1D laws_1d(LawsName name);
/// Splits "L5E5E5" into its per-axis names.
std::vector<LawsName> parse_laws_combination(std::string_view combo);
SeparableKernel laws_kernel(const std::vector<LawsName>& names);

ResponseMap laws_response(const VolumeImage& image, const std::vector<LawsName>& names,
                          const BoundaryMode& boundary);

/// Mean of |h| over the (2 delta + 1)^D Chebyshev neighbourhood.
ResponseMap laws_energy(const ResponseMap& response, int delta, const BoundaryMode& boundary);

struct GaborParams {
  double sigma = 1.0;   // voxels
  double lambda = 1.0;  // voxels
  double gamma = 1.0;
  double theta = 0.0;   // radians, clockwise in the (k1, k2) plane
  double d = 4.0;
  /// false: R = [[cos, sin], [sin, -cos]] (reflection, det -1).
  /// true: R = [[cos, sin], [-sin, cos]].
  bool proper_rotation = false;

  void validate() const;
};

int gabor_support(const GaborParams& p);
ComplexKernel gabor_kernel(const GaborParams& p);

/// sigma / lambda for a half-response bandwidth of fb octaves.
double gabor_sigma_over_lambda(double fb);
double gabor_bandwidth(double sigma_over_lambda);

/// |g * f| for a 2-D image.
ResponseMap gabor_response_modulus(const VolumeImage& slice, const GaborParams& p,
                                   const BoundaryMode& boundary,
                                   ConvolutionVia via = ConvolutionVia::automatic);

/// Modulus responses of one 2-D image to every orientation, sharing one FFT.
std::vector<ResponseMap> gabor_bank_modulus(const VolumeImage& slice, const GaborParams& p,
                                            const std::vector<double>& thetas,
                                            const BoundaryMode& boundary,
                                            ConvolutionVia via = ConvolutionVia::automatic);

}  // namespace rfilt
