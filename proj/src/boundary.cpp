#include "rfilt/boundary.hpp"

#include <string>
#include <vector>

#include "rfilt/error.hpp"

namespace rfilt {

std::string_view to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::constant: return "constant";
    case BoundaryKind::nearest: return "nearest";
    case BoundaryKind::periodise: return "periodise";
    case BoundaryKind::mirror: return "mirror";
  }
  return "?";
}

BoundaryMode parse_boundary(std::string_view name, double constant) {
  if (name == "constant" || name == "zero") return BoundaryMode::constant_value(constant);
  if (name == "nearest" || name == "replicate") return BoundaryMode::nearest();
  if (name == "periodise" || name == "periodic" || name == "wrap") return BoundaryMode::periodise();
  if (name == "mirror" || name == "symmetric") return BoundaryMode::mirror();
  throw InvalidArgument("unknown boundary mode '" + std::string(name) + "'");
}

namespace {

// Floored division and modulo.
std::ptrdiff_t floor_div(std::ptrdiff_t a, std::ptrdiff_t b) {
  std::ptrdiff_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::ptrdiff_t floor_mod(std::ptrdiff_t a, std::ptrdiff_t b) {
  std::ptrdiff_t r = a % b;
  return r < 0 ? r + b : r;
}

}  // namespace

std::ptrdiff_t extended_index(std::ptrdiff_t k, std::ptrdiff_t n, BoundaryKind kind) {
  if (k >= 0 && k < n) return k;
  switch (kind) {
    case BoundaryKind::constant: return kUseConstant;
    case BoundaryKind::nearest: return k < 0 ? 0 : n - 1;
    case BoundaryKind::periodise: return floor_mod(k, n);
    case BoundaryKind::mirror: {
      const std::ptrdiff_t m = floor_mod(k, n);
      return floor_mod(floor_div(k, n), 2) == 0 ? m : n - (m + 1);
    }
  }
  return kUseConstant;
}

VolumeImage pad(const VolumeImage& image, const Index3& margin, const BoundaryMode& mode) {
  const Grid& in = image.grid();
  Grid out = in;
  for (int a = 0; a < in.rank; ++a) out.dims[a] = in.dims[a] + 2 * margin[a];
  if (out.dims == in.dims) return image;

  std::vector<std::ptrdiff_t> map[3];
  for (int a = 0; a < 3; ++a) {
    const std::ptrdiff_t m = a < in.rank ? static_cast<std::ptrdiff_t>(margin[a]) : 0;
    map[a].resize(out.dims[a]);
    for (std::size_t i = 0; i < out.dims[a]; ++i)
      map[a][i] = extended_index(static_cast<std::ptrdiff_t>(i) - m,
                                 static_cast<std::ptrdiff_t>(in.dims[a]), mode.kind);
  }

  std::vector<double> data(out.voxel_count());
  const auto src = image.values();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k3 = 0; k3 < static_cast<std::ptrdiff_t>(out.dims[2]); ++k3) {
    for (std::size_t k2 = 0; k2 < out.dims[1]; ++k2) {
      const std::ptrdiff_t s3 = map[2][k3], s2 = map[1][k2];
      double* dst = data.data() + out.offset(0, k2, static_cast<std::size_t>(k3));
      for (std::size_t k1 = 0; k1 < out.dims[0]; ++k1) {
        const std::ptrdiff_t s1 = map[0][k1];
        dst[k1] = (s1 < 0 || s2 < 0 || s3 < 0)
                      ? mode.constant
                      : src[in.offset(static_cast<std::size_t>(s1), static_cast<std::size_t>(s2),
                                      static_cast<std::size_t>(s3))];
      }
    }
  }
  return VolumeImage(out, std::move(data), image.value_kind());
}

}  // namespace rfilt
