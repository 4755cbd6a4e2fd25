#include "rfilt/kernels.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "rfilt/error.hpp"

namespace rfilt {

DenseKernel mean_kernel(int m, int rank) {
  if (m <= 0 || m % 2 == 0) throw InvalidArgument("mean filter support must be odd and positive");
  if (rank < 1 || rank > 3) throw InvalidArgument("mean filter rank must be 1, 2 or 3");
  DenseKernel k;
  k.rank = rank;
  std::size_t n = 1;
  for (int a = 0; a < rank; ++a) {
    k.dims[a] = static_cast<std::size_t>(m);
    n *= k.dims[a];
  }
  k.taps.assign(n, 1.0 / static_cast<double>(n));
  return k;
}

SeparableKernel mean_separable(int m, int rank) {
  if (m <= 0 || m % 2 == 0) throw InvalidArgument("mean filter support must be odd and positive");
  if (rank < 1 || rank > 3) throw InvalidArgument("mean filter rank must be 1, 2 or 3");
  SeparableKernel s;
  s.axes.assign(rank, Kernel1D(m, 1.0 / m));
  return s;
}

int truncated_support(double sigma_vox, double d) {
  return 1 + 2 * static_cast<int>(std::floor(d * sigma_vox + 0.5));
}

DenseKernel log_kernel(double sigma_vox, int rank, double d) {
  if (!(sigma_vox > 0.0)) throw InvalidArgument("LoG sigma must be positive");
  if (!(d > 0.0)) throw InvalidArgument("truncation parameter d must be positive");
  if (rank < 1 || rank > 3) throw InvalidArgument("LoG rank must be 1, 2 or 3");
  const int m = truncated_support(sigma_vox, d);
  const int c = m / 2;
  const double s2 = sigma_vox * sigma_vox;
  const double norm = std::pow(1.0 / (std::sqrt(2.0 * M_PI) * sigma_vox), rank);
  DenseKernel k;
  k.rank = rank;
  for (int a = 0; a < rank; ++a) k.dims[a] = static_cast<std::size_t>(m);
  k.taps.resize(k.dims[0] * k.dims[1] * k.dims[2]);
  for (std::size_t m3 = 0; m3 < k.dims[2]; ++m3)
    for (std::size_t m2 = 0; m2 < k.dims[1]; ++m2)
      for (std::size_t m1 = 0; m1 < k.dims[0]; ++m1) {
        double r2 = 0.0;
        const std::size_t idx[3] = {m1, m2, m3};
        for (int a = 0; a < rank; ++a) {
          const double x = static_cast<double>(idx[a]) - c;
          r2 += x * x;
        }
        k.taps[k.offset(m1, m2, m3)] =
            -(1.0 / s2) * norm * (rank - r2 / s2) * std::exp(-r2 / (2.0 * s2));
      }
  return k;
}

Kernel1D gaussian_1d(double sigma_vox, double d, bool normalise) {
  if (!(sigma_vox > 0.0)) throw InvalidArgument("Gaussian sigma must be positive");
  const int m = truncated_support(sigma_vox, d);
  const int c = m / 2;
  Kernel1D g(m);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = i - c;
    g[i] = std::exp(-x * x / (2.0 * sigma_vox * sigma_vox)) / (std::sqrt(2.0 * M_PI) * sigma_vox);
    sum += g[i];
  }
  if (normalise)
    for (auto& v : g) v /= sum;
  return g;
}

LawsName parse_laws_name(std::string_view name) {
  static constexpr std::pair<std::string_view, LawsName> table[] = {
      {"L3", LawsName::L3}, {"L5", LawsName::L5}, {"E3", LawsName::E3}, {"E5", LawsName::E5},
      {"S3", LawsName::S3}, {"S5", LawsName::S5}, {"W5", LawsName::W5}, {"R5", LawsName::R5}};
  for (const auto& [s, n] : table)
    if (s == name) return n;
  throw InvalidArgument("unknown Laws kernel '" + std::string(name) + "'");
}

std::string_view to_string(LawsName name) {
  switch (name) {
    case LawsName::L3: return "L3";
    case LawsName::L5: return "L5";
    case LawsName::E3: return "E3";
    case LawsName::E5: return "E5";
    case LawsName::S3: return "S3";
    case LawsName::S5: return "S5";
    case LawsName::W5: return "W5";
    case LawsName::R5: return "R5";
  }
  return "?";
}

Kernel1D laws_1d(LawsName name) {
  auto scaled = [](std::initializer_list<double> v, double n) {
    Kernel1D k(v);
    const double s = std::sqrt(n);
    for (auto& x : k) x /= s;
    return k;
  };
  switch (name) {
    case LawsName::L3: return scaled({1, 2, 1}, 6);
    case LawsName::L5: return scaled({1, 4, 6, 4, 1}, 70);
    case LawsName::E3: return scaled({-1, 0, 1}, 2);
    case LawsName::E5: return scaled({-1, -2, 0, 2, 1}, 10);
    case LawsName::S3: return scaled({-1, 2, -1}, 6);
    case LawsName::S5: return scaled({-1, 0, 2, 0, -1}, 6);
    case LawsName::W5: return scaled({-1, 2, 0, -2, 1}, 10);
    case LawsName::R5: return scaled({1, -4, 6, -4, 1}, 70);
  }
  throw InvalidArgument("unknown Laws kernel");
}

std::vector<LawsName> parse_laws_combination(std::string_view combo) {
  if (combo.empty() || combo.size() % 2 != 0 || combo.size() > 6)
    throw InvalidArgument("Laws combination must be 1 to 3 names such as L5E5");
  std::vector<LawsName> out;
  for (std::size_t i = 0; i < combo.size(); i += 2) out.push_back(parse_laws_name(combo.substr(i, 2)));
  return out;
}

SeparableKernel laws_kernel(const std::vector<LawsName>& names) {
  SeparableKernel s;
  for (auto n : names) s.axes.push_back(laws_1d(n));
  return s;
}

ResponseMap laws_response(const VolumeImage& image, const std::vector<LawsName>& names,
                          const BoundaryMode& boundary) {
  if (static_cast<int>(names.size()) != image.rank())
    throw InvalidArgument("need one Laws kernel per image axis");
  return convolve_separable(image, laws_kernel(names), boundary);
}

ResponseMap laws_energy(const ResponseMap& response, int delta, const BoundaryMode& boundary) {
  if (delta < 0) throw InvalidArgument("energy distance delta must be non-negative");
  std::vector<double> a(response.values().begin(), response.values().end());
  for (auto& v : a) v = std::abs(v);
  const VolumeImage mag(response.grid(), std::move(a));
  if (delta == 0) return mag;
  BoundaryMode mode = boundary;
  mode.constant = std::abs(mode.constant);
  return convolve_separable(mag, mean_separable(2 * delta + 1, response.rank()), mode);
}

void GaborParams::validate() const {
  if (!(sigma > 0.0)) throw InvalidArgument("Gabor sigma must be positive");
  if (!(lambda > 0.0)) throw InvalidArgument("Gabor lambda must be positive");
  if (!(gamma > 0.0)) throw InvalidArgument("Gabor gamma must be positive");
  if (!(d > 0.0)) throw InvalidArgument("truncation parameter d must be positive");
  if (!std::isfinite(theta)) throw InvalidArgument("Gabor theta must be finite");
}

int gabor_support(const GaborParams& p) {
  return truncated_support(p.gamma <= 1.0 ? p.sigma : p.gamma * p.sigma, p.d);
}

ComplexKernel gabor_kernel(const GaborParams& p) {
  p.validate();
  const int m = gabor_support(p);
  const int c = m / 2;
  const double ct = std::cos(p.theta), st = std::sin(p.theta);
  ComplexKernel k{{static_cast<std::size_t>(m), static_cast<std::size_t>(m), 1}, 2, {}};
  k.taps.resize(static_cast<std::size_t>(m) * m);
  const double s2 = 2.0 * p.sigma * p.sigma;
  const double g2 = p.gamma * p.gamma;
  for (int m2 = 0; m2 < m; ++m2)
    for (int m1 = 0; m1 < m; ++m1) {
      const double x1 = m1 - c, x2 = m2 - c;
      const double t1 = ct * x1 + st * x2;
      const double t2 = p.proper_rotation ? -st * x1 + ct * x2 : st * x1 - ct * x2;
      const double env = -(t1 * t1 + g2 * t2 * t2) / s2;
      k.taps[k.offset(m1, m2, 0)] = std::exp(std::complex<double>(env, 2.0 * M_PI * t1 / p.lambda));
    }
  return k;
}

double gabor_sigma_over_lambda(double fb) {
  if (!(fb > 0.0)) throw InvalidArgument("bandwidth must be positive");
  const double p = std::pow(2.0, fb);
  return std::sqrt(std::log(2.0) / 2.0) / M_PI * (p + 1.0) / (p - 1.0);
}

double gabor_bandwidth(double r) {
  const double a = std::sqrt(std::log(2.0) / 2.0);
  if (!(r * M_PI > a)) throw InvalidArgument("sigma/lambda too small for a finite bandwidth");
  return std::log2((r * M_PI + a) / (r * M_PI - a));
}

std::vector<ResponseMap> gabor_bank_modulus(const VolumeImage& slice, const GaborParams& p,
                                            const std::vector<double>& thetas,
                                            const BoundaryMode& boundary, ConvolutionVia via) {
  if (slice.rank() != 2) throw InvalidArgument("Gabor filtering needs a 2-D image");
  std::vector<ComplexKernel> bank;
  bank.reserve(thetas.size());
  for (double t : thetas) {
    GaborParams q = p;
    q.theta = t;
    bank.push_back(gabor_kernel(q));
  }
  auto responses = convolve_bank(slice, bank, boundary, via);
  std::vector<ResponseMap> out;
  out.reserve(responses.size());
  for (const auto& r : responses) out.push_back(r.modulus());
  return out;
}

ResponseMap gabor_response_modulus(const VolumeImage& slice, const GaborParams& p,
                                   const BoundaryMode& boundary, ConvolutionVia via) {
  return std::move(gabor_bank_modulus(slice, p, {p.theta}, boundary, via).front());
}

}  // namespace rfilt
