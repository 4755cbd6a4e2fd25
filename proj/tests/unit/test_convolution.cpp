#include <doctest.h>

#include <array>
#include <cmath>

#include "oracle.hpp"
#include "rfilt/convolution.hpp"
#include "rfilt/error.hpp"

using namespace rfilt;

namespace {

DenseKernel random_dense(Index3 m, int rank, std::uint64_t seed) {
  DenseKernel k{m, rank, oracle::random_vector(m[0] * m[1] * m[2], seed)};
  return k;
}

const BoundaryMode kModes[] = {BoundaryMode::constant_value(0.25), BoundaryMode::nearest(),
                               BoundaryMode::periodise(), BoundaryMode::mirror()};
int oracle_mode(BoundaryKind k) { return static_cast<int>(k); }

}  // namespace

TEST_CASE("convolve_full matches brute force") {
  const auto img = oracle::random_image({16, 16, 16}, 3, 1);
  const auto k = random_dense({3, 3, 3}, 3, 2);
  for (const auto& mode : kModes) {
    const auto r = convolve_full(img, k, mode);
    const auto ref = oracle::convolve(img, k.taps, k.dims, oracle_mode(mode.kind), mode.constant);
    CHECK(oracle::max_abs_diff(r.values(), ref) <= 1e-12 * oracle::max_abs(ref));
  }
  // even and oversized kernels on a tiny image
  const auto small = oracle::random_image({4, 3, 1}, 2, 3);
  const auto ke = random_dense({6, 4, 1}, 2, 4);
  for (const auto& mode : kModes) {
    const auto r = convolve_full(small, ke, mode);
    const auto ref = oracle::convolve(small, ke.taps, ke.dims, oracle_mode(mode.kind), mode.constant);
    CHECK(oracle::max_abs_diff(r.values(), ref) <= 1e-12);
  }
}

TEST_CASE("impulse reproduces the kernel") {
  Grid g;
  g.dims = {9, 9, 9};
  auto img = VolumeImage::zeros(g);
  img.at(4, 4, 4) = 255;
  const auto k = random_dense({3, 5, 3}, 3, 5);
  const auto r = convolve_full(img, k, BoundaryMode::constant_value(0));
  for (std::size_t m3 = 0; m3 < 3; ++m3)
    for (std::size_t m2 = 0; m2 < 5; ++m2)
      for (std::size_t m1 = 0; m1 < 3; ++m1)
        CHECK(r.at(4 + m1 - 1, 4 + m2 - 2, 4 + m3 - 1) == doctest::Approx(255 * k.at(m1, m2, m3)));
}

TEST_CASE("constant image with mean kernel stays constant") {
  Grid g;
  g.dims = {7, 6, 5};
  VolumeImage img(g, std::vector<double>(g.voxel_count(), 3.5));
  DenseKernel k{{3, 3, 3}, 3, std::vector<double>(27, 1.0 / 27)};
  const auto r = convolve_full(img, k, BoundaryMode::nearest());
  for (double v : r.values()) CHECK(v == doctest::Approx(3.5).epsilon(1e-14));
}

TEST_CASE("non-finite kernel taps are rejected") {
  const auto img = oracle::random_image({4, 4, 1}, 2, 1);
  DenseKernel k{{3, 3, 1}, 2, std::vector<double>(9, 0.0)};
  k.taps[4] = std::nan("");
  CHECK_THROWS_AS(convolve_full(img, k, BoundaryMode::mirror()), InvalidArgument);
}

TEST_CASE("separable smoother equals its dense outer product") {
  const double a = 1.0 / std::sqrt(6.0);
  SeparableKernel s{{{a, 2 * a, a}, {a, 2 * a, a}}};
  const auto d = outer_product(s);
  const double expect[9] = {1, 2, 1, 2, 4, 2, 1, 2, 1};
  for (int i = 0; i < 9; ++i) CHECK(d.taps[i] == doctest::Approx(expect[i] / 6.0).epsilon(1e-15));

  const auto img = oracle::random_image({16, 16, 1}, 2, 7);
  for (const auto& mode : kModes) {
    const auto r1 = convolve_separable(img, s, mode);
    const auto r2 = convolve_full(img, d, mode);
    CHECK(oracle::max_abs_diff(r1.values(), r2.values()) < 1e-10);
  }
}

TEST_CASE("separable equals full for random outer products, any pass order") {
  const auto img = oracle::random_image({9, 8, 7}, 3, 8);
  SeparableKernel s{{oracle::random_vector(5, 1), oracle::random_vector(4, 2),
                     oracle::random_vector(3, 3)}};
  const auto d = outer_product(s);
  for (const auto& mode : kModes) {
    const auto ref = convolve_full(img, d, mode);
    for (auto order : {std::array<int, 3>{0, 1, 2}, std::array<int, 3>{1, 0, 2},
                       std::array<int, 3>{2, 1, 0}}) {
      const auto r = convolve_separable(img, s, mode, order);
      CHECK(oracle::max_abs_diff(r.values(), ref.values()) < 1e-10);
    }
  }
}

TEST_CASE("separable identity and errors") {
  const auto img = oracle::random_image({5, 5, 1}, 2, 9);
  const auto r = convolve_separable(img, SeparableKernel{{{1.0}, {1.0}}}, BoundaryMode::mirror());
  CHECK(std::equal(r.values().begin(), r.values().end(), img.values().begin()));
  CHECK_THROWS_AS(convolve_separable(img, SeparableKernel{{{1.0}}}, BoundaryMode::mirror()),
                  InvalidArgument);
  CHECK_THROWS_AS(convolve_separable(img, SeparableKernel{{{1.0}, {1.0}}}, BoundaryMode::mirror(),
                                     std::array<int, 3>{0, 0, 2}),
                  InvalidArgument);
}

TEST_CASE("odd pass with flipped kernel on flipped line is bit-identical") {
  const auto f = oracle::random_vector(11, 21);
  const auto g = oracle::random_vector(7, 22);
  std::vector<double> fr(f.rbegin(), f.rend()), gr(g.rbegin(), g.rend());
  Grid grid;
  grid.rank = 1;
  grid.dims = {11, 1, 1};
  for (const auto& mode : kModes) {
    const auto a = convolve_axis(VolumeImage(grid, f), g, 0, mode);
    const auto b = convolve_axis(VolumeImage(grid, fr), gr, 0, mode);
    for (std::size_t i = 0; i < 11; ++i) CHECK(a[i] == b[10 - i]);
  }
}

TEST_CASE("linearity and periodic translation equivariance") {
  const auto f = oracle::random_image({10, 9, 8}, 3, 31);
  const auto h = oracle::random_image({10, 9, 8}, 3, 32);
  const auto k = random_dense({3, 5, 3}, 3, 33);
  const double al = 0.7, be = -1.3;
  std::vector<double> mix(f.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = al * f[i] + be * h[i];
  for (const auto& mode : kModes) {
    const auto rm = convolve_full(VolumeImage(f.grid(), mix), k, mode);
    const auto rf = convolve_full(f, k, mode);
    const auto rh = convolve_full(h, k, mode);
    // constant padding is affine, not linear, unless C = 0
    const double cterm = mode.kind == BoundaryKind::constant ? 1.0 : 0.0;
    if (cterm != 0.0) continue;
    std::vector<double> lin(f.size());
    for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = al * rf[i] + be * rh[i];
    CHECK(oracle::max_abs_diff(rm.values(), lin) <= 1e-10 * oracle::max_abs(lin));
  }
  const Grid& g = f.grid();
  auto shift = [&](const VolumeImage& v) {
    auto out = VolumeImage::zeros(g);
    for (std::size_t z = 0; z < 8; ++z)
      for (std::size_t y = 0; y < 9; ++y)
        for (std::size_t x = 0; x < 10; ++x) out.at((x + 3) % 10, (y + 2) % 9, (z + 5) % 8) = v.at(x, y, z);
    return out;
  };
  const auto a = shift(convolve_full(f, k, BoundaryMode::periodise()));
  const auto b = convolve_full(shift(f), k, BoundaryMode::periodise());
  CHECK(oracle::max_abs_diff(a.values(), b.values()) <= 1e-10);
}

TEST_CASE("fourier convolution") {
  const auto img = oracle::random_image({32, 32, 32}, 3, 41);
  SUBCASE("all-pass and zero transfers") {
    const auto one = convolve_fourier(img, TransferFunction::constant(img.grid(), 1.0));
    CHECK(oracle::max_abs_diff(one.values(), img.values()) < 1e-10);
    const auto zero = convolve_fourier(img, TransferFunction::constant(img.grid(), 0.0));
    CHECK(oracle::max_abs(zero.values()) == 0.0);
  }
  SUBCASE("matches spatial periodise") {
    for (Index3 m : {Index3{3, 3, 3}, Index3{5, 4, 7}}) {
      const auto k = random_dense(m, 3, 42);
      const auto sp = convolve_full(img, k, BoundaryMode::periodise());
      const auto h = kernel_transfer(to_complex(k), img.grid());
      CHECK(h.conjugate_symmetric(1e-9));
      const auto fr = convolve_fourier(img, h);
      CHECK(oracle::max_abs_diff(sp.values(), fr.values()) < 1e-8);
    }
  }
  SUBCASE("dimension mismatch") {
    Grid g = img.grid();
    g.dims = {32, 32, 16};
    CHECK_THROWS_AS(convolve_fourier(img, TransferFunction::constant(g, 1.0)), InvalidArgument);
  }
}

TEST_CASE("kernel_transfer matches a direct DFT") {
  Grid g;
  g.rank = 2;
  g.dims = {6, 5, 1};
  ComplexKernel k{{3, 2, 1}, 2, {}};
  for (double v : oracle::random_vector(6, 51)) k.taps.emplace_back(v, -0.5 * v);
  std::vector<std::complex<double>> emb(g.voxel_count());
  for (std::size_t m2 = 0; m2 < 2; ++m2)
    for (std::size_t m1 = 0; m1 < 3; ++m1)
      emb[((m1 + 6 - 1) % 6) + 6 * ((m2 + 5 - 1) % 5)] += k.at(m1, m2);
  const auto ref = oracle::dft(emb, g.dims);
  const auto h = kernel_transfer(k, g);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(ref[i] - h.values[i]) < 1e-12);
  CHECK_FALSE(h.conjugate_symmetric());
}

TEST_CASE("bank routes agree for every boundary") {
  const auto img = oracle::random_image({12, 11, 1}, 2, 61);
  std::vector<ComplexKernel> bank;
  for (int i = 0; i < 3; ++i) {
    ComplexKernel k{{5, 7, 1}, 2, {}};
    const auto re = oracle::random_vector(35, 70 + i), im = oracle::random_vector(35, 80 + i);
    for (std::size_t j = 0; j < 35; ++j) k.taps.emplace_back(re[j], im[j]);
    bank.push_back(k);
  }
  for (const auto& mode : kModes) {
    const auto a = convolve_bank(img, bank, mode, ConvolutionVia::spatial);
    const auto b = convolve_bank(img, bank, mode, ConvolutionVia::fourier);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < img.size(); ++j) CHECK(std::abs(a[i].data[j] - b[i].data[j]) < 1e-10);
  }
  const auto k = random_dense({5, 5, 1}, 2, 90);
  const auto d1 = convolve_dense(img, k, BoundaryMode::mirror(), ConvolutionVia::fourier);
  const auto d2 = convolve_dense(img, k, BoundaryMode::mirror(), ConvolutionVia::spatial);
  CHECK(oracle::max_abs_diff(d1.values(), d2.values()) < 1e-10);
}

TEST_CASE("via heuristic") {
  ViaHeuristic h;
  CHECK_FALSE(h.prefer_fourier(64 * 64, 9, 66 * 66));
  CHECK(h.prefer_fourier(512 * 512, 61 * 61, 572 * 572));
  CHECK(parse_via("auto") == ConvolutionVia::automatic);
  CHECK_THROWS(parse_via("gpu"));
}

TEST_CASE("fourier grid") {
  Grid g;
  g.rank = 2;
  g.dims = {8, 8, 1};
  const auto fg = fourier_grid(g);
  std::vector<double> centred(8);
  for (std::size_t c = 0; c < 8; ++c) centred[c] = fg.nu[0][FourierGrid::centred_to_dft(c, 8)];
  for (std::size_t c = 0; c < 8; ++c) CHECK(centred[c] == doctest::Approx(-M_PI + M_PI / 4 * double(c)));
  CHECK(fg.nu[0][0] == 0.0);
  for (std::size_t n : {1u, 2u, 5u, 8u})
    for (std::size_t i = 0; i < n; ++i)
      CHECK(FourierGrid::dft_to_centred(FourierGrid::centred_to_dft(i, n), n) == i);
  CHECK(fg.norm(4, 4, 0) == doctest::Approx(M_PI * std::sqrt(2.0)));
  CHECK(fg.norm(4, 4, 0) > M_PI);

  Grid one;
  one.rank = 1;
  one.dims = {1, 1, 1};
  const auto f1 = fourier_grid(one);
  CHECK(f1.nu[0].size() == 1);
  CHECK(f1.nu[0][0] == 0.0);
}
