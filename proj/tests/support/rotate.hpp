#pragma once

// Image rotation about the grid centre by a signed permutation matrix Q:
// out[y] = in[Q^T (y - c) + c], c = (N - 1) / 2. Requires equal extents on the
// permuted axes.

#include <array>

#include "rfilt/image.hpp"

namespace oracle {

using Mat3 = std::array<std::array<int, 3>, 3>;

inline Mat3 transpose(const Mat3& q) {
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = q[j][i];
  return t;
}

// out[y] = in[M (y - c) + c]
inline rfilt::VolumeImage remap(const rfilt::VolumeImage& in, const Mat3& m) {
  const auto& d = in.dims();
  auto out = rfilt::VolumeImage::zeros(in.grid());
  for (std::size_t z = 0; z < d[2]; ++z)
    for (std::size_t y = 0; y < d[1]; ++y)
      for (std::size_t x = 0; x < d[0]; ++x) {
        const double v[3] = {x - (d[0] - 1) / 2.0, y - (d[1] - 1) / 2.0, z - (d[2] - 1) / 2.0};
        std::size_t s[3];
        for (int i = 0; i < 3; ++i) {
          double w = 0;
          for (int j = 0; j < 3; ++j) w += m[i][j] * v[j];
          s[i] = static_cast<std::size_t>(w + (d[i] - 1) / 2.0);
        }
        out.at(x, y, z) = in.at(s[0], s[1], s[2]);
      }
  return out;
}

inline rfilt::VolumeImage rotate(const rfilt::VolumeImage& in, const Mat3& q) {
  return remap(in, transpose(q));
}
inline rfilt::VolumeImage unrotate(const rfilt::VolumeImage& in, const Mat3& q) {
  return remap(in, q);
}

}  // namespace oracle
