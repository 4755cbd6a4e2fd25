#include <doctest.h>

#include <array>

#include "oracle.hpp"
#include "rfilt/boundary.hpp"

using namespace rfilt;

namespace {

std::vector<double> pad1(const BoundaryMode& mode) {
  const std::array<std::size_t, 1> d{3};
  const std::array<double, 1> s{1};
  auto img = create_image(d, s, {1, 2, 3});
  auto p = pad(img, {2, 0, 0}, mode);
  return {p.values().begin(), p.values().end()};
}

}  // namespace

TEST_CASE("pad 1-D signal [1,2,3] by 2") {
  CHECK(pad1(BoundaryMode::constant_value(0)) == std::vector<double>{0, 0, 1, 2, 3, 0, 0});
  CHECK(pad1(BoundaryMode::nearest()) == std::vector<double>{1, 1, 1, 2, 3, 3, 3});
  CHECK(pad1(BoundaryMode::periodise()) == std::vector<double>{2, 3, 1, 2, 3, 1, 2});
  // edge sample repeated
  CHECK(pad1(BoundaryMode::mirror()) == std::vector<double>{2, 1, 1, 2, 3, 3, 2});
  CHECK(pad1(BoundaryMode::constant_value(-4)) == std::vector<double>{-4, -4, 1, 2, 3, -4, -4});
}

TEST_CASE("extended_index") {
  CHECK(extended_index(-1, 3, BoundaryKind::mirror) == 0);
  CHECK(extended_index(-2, 3, BoundaryKind::mirror) == 1);
  CHECK(extended_index(3, 3, BoundaryKind::mirror) == 2);
  CHECK(extended_index(3, 3, BoundaryKind::periodise) == 0);
  CHECK(extended_index(5, 3, BoundaryKind::nearest) == 2);
  CHECK(extended_index(-7, 3, BoundaryKind::constant) == kUseConstant);
  for (long n = 1; n <= 6; ++n)
    for (long k = -20; k <= 20; ++k)
      for (int mode = 1; mode <= 3; ++mode) {
        const BoundaryKind kinds[] = {BoundaryKind::constant, BoundaryKind::nearest,
                                      BoundaryKind::periodise, BoundaryKind::mirror};
        CHECK(extended_index(k, n, kinds[mode]) == oracle::fold(k, n, mode));
      }
}

TEST_CASE("pad invariants") {
  const auto img = oracle::random_image({5, 4, 3}, 3, 11);
  const BoundaryMode modes[] = {BoundaryMode::constant_value(0.5), BoundaryMode::nearest(),
                                BoundaryMode::periodise(), BoundaryMode::mirror()};
  for (const auto& mode : modes) {
    for (std::size_t m : {0u, 1u, 3u, 7u}) {
      const Index3 margin{m, m, m};
      const auto p = pad(img, margin, mode);
      const auto& pd = p.dims();
      CHECK(pd[0] == 5 + 2 * m);
      CHECK(pd[2] == 3 + 2 * m);
      for (std::size_t z = 0; z < 3; ++z)
        for (std::size_t y = 0; y < 4; ++y)
          for (std::size_t x = 0; x < 5; ++x) CHECK(p.at(x + m, y + m, z + m) == img.at(x, y, z));
      if (m == 0) CHECK(std::equal(p.values().begin(), p.values().end(), img.values().begin()));
      if (mode.kind == BoundaryKind::periodise) {
        for (std::size_t x = 0; x + 5 < pd[0]; ++x) CHECK(p.at(x, m, m) == p.at(x + 5, m, m));
      }
      if (mode.kind == BoundaryKind::mirror && m > 0) {
        // palindromic about the k1 faces, edge voxel included
        for (std::size_t t = 0; t < std::min<std::size_t>(m, 5); ++t) {
          CHECK(p.at(m - 1 - t, m, m) == p.at(m + t, m, m));
          CHECK(p.at(m + 5 + t, m, m) == p.at(m + 4 - t, m, m));
        }
      }
    }
  }
}

TEST_CASE("parse_boundary") {
  CHECK(parse_boundary("mirror").kind == BoundaryKind::mirror);
  CHECK(parse_boundary("constant", 3.0).constant == 3.0);
  CHECK(parse_boundary("periodise").kind == BoundaryKind::periodise);
  CHECK_THROWS(parse_boundary("reflect101"));
}
