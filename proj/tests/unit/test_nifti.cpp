#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "oracle.hpp"
#include "rfilt/benchmark.hpp"
#include "rfilt/error.hpp"
#include "rfilt/nifti.hpp"
#include "tempdir.hpp"

using namespace rfilt;

namespace {

std::vector<char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void dump(const std::filesystem::path& p, const std::vector<char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

template <class T>
T field(const std::vector<char>& b, std::size_t off) {
  T v;
  std::memcpy(&v, b.data() + off, sizeof v);
  return v;
}

template <class T>
void set_field(std::vector<char>& b, std::size_t off, T v) {
  std::memcpy(b.data() + off, &v, sizeof v);
}

bool identical(const VolumeImage& a, const VolumeImage& b) {
  return a.grid().same_dims(b.grid()) && a.spacing() == b.spacing() &&
         std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

}  // namespace

TEST_CASE("f32 round trip is voxel identical") {
  oracle::TempDir dir;
  auto img = oracle::random_image({16, 16, 16}, 3, 1);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<float>(img[i]);
  img.set_spacing({0.5, 0.75, 1.25});
  for (const char* name : {"a.nii", "a.nii.gz"}) {
    write_nifti(img, dir / name);
    const auto back = read_nifti(dir / name);
    CHECK(identical(back.image, img));
    CHECK(back.header.datatype == NiftiDatatype::f32);
  }
}

TEST_CASE("f64 round trip is lossless") {
  oracle::TempDir dir;
  auto img = oracle::random_image({7, 5, 3}, 3, 2);
  img.set_spacing({2.0, 2.0, 2.0});
  write_nifti(img, dir / "b.nii.gz", NiftiDatatype::f64);
  const auto back = read_nifti(dir / "b.nii.gz");
  CHECK(identical(back.image, img));
  CHECK(back.header.datatype == NiftiDatatype::f64);
}

TEST_CASE("header layout") {
  oracle::TempDir dir;
  const auto ph = generate_phantom(PhantomKind::impulse);
  write_nifti(ph, dir / "p.nii");
  const auto b = slurp(dir / "p.nii");
  REQUIRE(b.size() == 352 + 64 * 64 * 64 * 4);
  CHECK(field<std::int32_t>(b, 0) == 348);
  CHECK(field<std::int16_t>(b, 40) == 3);
  CHECK(field<std::int16_t>(b, 42) == 64);
  CHECK(field<std::int16_t>(b, 44) == 64);
  CHECK(field<std::int16_t>(b, 46) == 64);
  CHECK(field<std::int16_t>(b, 70) == 16);
  CHECK(field<std::int16_t>(b, 72) == 32);
  CHECK(field<float>(b, 80) == 2.0f);
  CHECK(field<float>(b, 84) == 2.0f);
  CHECK(field<float>(b, 88) == 2.0f);
  CHECK(field<float>(b, 108) == 352.0f);
  CHECK(std::memcmp(b.data() + 344, "n+1\0", 4) == 0);
  const std::size_t centre = 32 + 64 * (32 + 64 * 32);
  CHECK(field<float>(b, 352 + 4 * centre) == 255.0f);
}

TEST_CASE("integer datatypes") {
  oracle::TempDir dir;
  const auto ph = generate_phantom(PhantomKind::noise, 9);
  write_nifti(ph, dir / "u8.nii", NiftiDatatype::u8);
  const auto b = slurp(dir / "u8.nii");
  CHECK(b.size() == 352 + ph.size());
  const auto back = read_nifti(dir / "u8.nii");
  CHECK(identical(back.image, ph));
  CHECK(back.header.datatype == NiftiDatatype::u8);

  auto ct = oracle::random_image({6, 6, 6}, 3, 3, -1024, 3000);
  for (std::size_t i = 0; i < ct.size(); ++i) ct[i] = std::round(ct[i]);
  for (auto t : {NiftiDatatype::i16, NiftiDatatype::i32}) {
    write_nifti(ct, dir / "i.nii", t);
    CHECK(identical(read_nifti(dir / "i.nii").image, ct));
  }
  CHECK_THROWS_AS(write_nifti(ct, dir / "x.nii", NiftiDatatype::u8), InvalidArgument);
  CHECK(parse_nifti_datatype("float64") == NiftiDatatype::f64);
  CHECK_THROWS_AS(parse_nifti_datatype("c64"), InvalidArgument);
}

TEST_CASE("scaling and rounding on load") {
  oracle::TempDir dir;
  Grid g;
  g.dims = {4, 1, 1};
  g.rank = 1;
  write_nifti(VolumeImage(g, {0, 1, 2, 3}), dir / "s.nii", NiftiDatatype::i16);
  auto b = slurp(dir / "s.nii");
  set_field<float>(b, 112, 0.5f);
  set_field<float>(b, 116, -1.0f);
  dump(dir / "s.nii", b);
  const auto v = read_nifti(dir / "s.nii");
  CHECK(v.image[0] == -1.0);
  CHECK(v.image[1] == -0.5);
  CHECK(v.image[3] == 0.5);
  CHECK(v.header.scl_slope == 0.5);
  const auto r = read_nifti(dir / "s.nii", {.round_intensities = true});
  CHECK(r.image[1] == -1.0);  // half away from zero
  CHECK(r.image[2] == 0.0);
  CHECK(r.image[3] == 1.0);
}

TEST_CASE("big-endian files are read") {
  oracle::TempDir dir;
  Grid g;
  g.dims = {3, 2, 1};
  g.rank = 2;
  g.spacing = {1.5, 2.5, 1.0};
  const VolumeImage img(g, {1, -2, 3, 4.5, 5, 6});
  write_nifti(img, dir / "le.nii");
  auto b = slurp(dir / "le.nii");
  auto swap = [&](std::size_t off, std::size_t n) { std::reverse(b.begin() + off, b.begin() + off + n); };
  swap(0, 4);
  for (std::size_t i = 0; i < 8; ++i) swap(40 + 2 * i, 2);
  swap(70, 2);
  swap(72, 2);
  for (std::size_t i = 0; i < 8; ++i) swap(76 + 4 * i, 4);
  for (std::size_t off : {108, 112, 116, 124, 128}) swap(off, 4);
  for (std::size_t i = 0; i < img.size(); ++i) swap(352 + 4 * i, 4);
  dump(dir / "be.nii", b);
  const auto back = read_nifti(dir / "be.nii");
  CHECK(back.image.rank() == 2);
  CHECK(identical(back.image, img));
}

TEST_CASE("orientation fields pass through") {
  oracle::TempDir dir;
  NiftiHeaderView h;
  h.qform_code = 1;
  h.sform_code = 2;
  h.qfac = -1.0f;
  h.quatern = {0.1f, 0.2f, 0.3f};
  h.qoffset = {-10.f, 20.f, 30.f};
  h.srow = {{{1, 0, 0, -10}, {0, 1, 0, 20}, {0, 0, 1, 30}}};
  const auto img = oracle::random_image({3, 3, 3}, 3, 4);
  write_nifti(img, dir / "o.nii", NiftiDatatype::f64, &h);
  const auto back = read_nifti(dir / "o.nii").header;
  CHECK(back.qform_code == 1);
  CHECK(back.sform_code == 2);
  CHECK(back.qfac == -1.0f);
  CHECK(back.quatern == h.quatern);
  CHECK(back.qoffset == h.qoffset);
  CHECK(back.srow == h.srow);
}

TEST_CASE("masks") {
  oracle::TempDir dir;
  Grid g;
  g.dims = {3, 3, 1};
  g.rank = 2;
  const RoiMask m(g, {0, 1, 0, 1, 1, 1, 0, 0, 1});
  write_nifti(m, dir / "m.nii.gz");
  const auto back = read_nifti_mask(dir / "m.nii.gz");
  CHECK(std::equal(back.membership().begin(), back.membership().end(), m.membership().begin()));
  CHECK(read_nifti(dir / "m.nii.gz").header.datatype == NiftiDatatype::u8);
}

TEST_CASE("gzip output is deterministic") {
  oracle::TempDir dir;
  const auto img = generate_phantom(PhantomKind::sphere);
  write_nifti(img, dir / "a.nii.gz");
  write_nifti(img, dir / "b.nii.gz");
  const auto a = slurp(dir / "a.nii.gz");
  CHECK(a == slurp(dir / "b.nii.gz"));
  CHECK(static_cast<unsigned char>(a[0]) == 0x1f);
  CHECK(static_cast<unsigned char>(a[1]) == 0x8b);
  CHECK(a.size() < 64 * 64 * 64);
}

TEST_CASE("read errors") {
  oracle::TempDir dir;
  CHECK_THROWS_AS(read_nifti(dir / "missing.nii"), IoError);
  try {
    read_nifti(dir / "missing.nii");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("not found") != std::string::npos);
  }

  const auto img = oracle::random_image({8, 8, 8}, 3, 5);
  write_nifti(img, dir / "ok.nii");
  const auto good = slurp(dir / "ok.nii");

  auto bad = good;
  std::memcpy(bad.data() + 344, "xyz\0", 4);
  dump(dir / "magic.nii", bad);
  CHECK_THROWS_AS(read_nifti(dir / "magic.nii"), BadMagicError);

  bad = good;
  set_field<std::int32_t>(bad, 0, 540);
  dump(dir / "n2.nii", bad);
  try {
    read_nifti(dir / "n2.nii");
    FAIL("accepted NIfTI-2");
  } catch (const BadMagicError& e) {
    CHECK(std::string(e.what()).find("NIfTI-2") != std::string::npos);
  }

  bad = good;
  set_field<std::int16_t>(bad, 70, 32);  // complex64
  dump(dir / "dtype.nii", bad);
  CHECK_THROWS_AS(read_nifti(dir / "dtype.nii"), UnsupportedDatatypeError);

  bad.assign(good.begin(), good.end() - 10);
  dump(dir / "trunc.nii", bad);
  CHECK_THROWS_AS(read_nifti(dir / "trunc.nii"), TruncatedFileError);

  bad.assign(good.begin(), good.begin() + 200);
  dump(dir / "hdr.nii", bad);
  CHECK_THROWS_AS(read_nifti(dir / "hdr.nii"), TruncatedFileError);

  bad = good;
  set_field<std::int16_t>(bad, 42, 4);  // dims smaller than the payload
  dump(dir / "dims.nii", bad);
  CHECK_THROWS_AS(read_nifti(dir / "dims.nii"), FormatError);

  bad = good;
  set_field<std::int16_t>(bad, 40, 4);
  set_field<std::int16_t>(bad, 48, 2);
  dump(dir / "4d.nii", bad);
  CHECK_THROWS_AS(read_nifti(dir / "4d.nii"), FormatError);

  write_nifti(img, dir / "ok.nii.gz");
  auto gz = slurp(dir / "ok.nii.gz");
  gz.resize(gz.size() / 2);
  dump(dir / "trunc.nii.gz", gz);
  CHECK_THROWS_AS(read_nifti(dir / "trunc.nii.gz"), TruncatedFileError);
}

TEST_CASE("unwritable path") {
  const auto img = oracle::random_image({2, 2, 2}, 3, 6);
  CHECK_THROWS_AS(write_nifti(img, "/nonexistent-dir/x/out.nii"), IoError);
}
