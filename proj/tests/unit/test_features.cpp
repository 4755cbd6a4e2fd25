#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <map>
#include <sstream>

#include "feature_oracle.hpp"
#include "oracle.hpp"
#include "rfilt/error.hpp"
#include "rfilt/features.hpp"

using namespace rfilt;

namespace {

double feature(const std::vector<FeatureValue>& f, const std::string& id) {
  for (const auto& v : f)
    if (v.id == id) return v.value;
  FAIL("missing feature " << id);
  return 0;
}

VolumeImage from_values(std::vector<double> v) {
  Grid g;
  g.rank = 1;
  g.dims = {v.size(), 1, 1};
  return VolumeImage(g, std::move(v));
}

}  // namespace

TEST_CASE("aggregate mean") {
  const auto img = from_values({1, 2, 3, 100});
  RoiMask m(img.grid(), {1, 1, 1, 0});
  CHECK(aggregate_mean(img, m) == 2.0);
  CHECK_THROWS_AS(aggregate_mean(img, RoiMask::filled(img.grid(), false)), InvalidArgument);
  const auto c = from_values(std::vector<double>(10, 4.25));
  CHECK(aggregate_mean(c, RoiMask::filled(c.grid(), true)) == 4.25);
}

TEST_CASE("intensity statistics fixtures") {
  const auto f = intensity_statistics({1, 2, 3, 4});
  REQUIRE(f.size() == 18);
  CHECK(feature(f, "Q4LE") == 2.5);
  CHECK(feature(f, "ECT3") == 1.25);
  CHECK(feature(f, "Y12H") == 2.5);
  CHECK(feature(f, "2OJQ") == 3.0);
  CHECK(feature(f, "N8CA") == 30.0);
  CHECK(feature(f, "5ZWQ") == doctest::Approx(std::sqrt(7.5)).epsilon(1e-15));
  CHECK(feature(f, "KE2A") == doctest::Approx(0.0));
  CHECK(feature(f, "1GSF") == 1.0);
  CHECK(feature(f, "84IY") == 4.0);

  const auto c = intensity_statistics(std::vector<double>(7, -3.0));
  CHECK(feature(c, "Q4LE") == -3.0);
  CHECK(feature(c, "ECT3") == 0.0);
  CHECK(feature(c, "KE2A") == 0.0);
  CHECK(feature(c, "IPH6") == 0.0);
  CHECK(feature(c, "2OJQ") == 0.0);
  CHECK(feature(c, "N8CA") == 63.0);
  CHECK(feature(c, "5ZWQ") == 3.0);

  std::vector<double> tens;
  for (int i = 1; i <= 10; ++i) tens.push_back(10.0 * i);
  const auto t = intensity_statistics(tens);
  CHECK(feature(t, "QG58") == doctest::Approx(19.0));
  CHECK(feature(t, "8DWT") == doctest::Approx(91.0));
  CHECK_THROWS_AS(intensity_statistics(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("percentiles match a sort-based oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + rng() % 40);
    for (auto& x : v) x = u(rng);
    std::sort(v.begin(), v.end());
    for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
      // rank-based definition: position p (n - 1) between order statistics
      const double pos = p * (v.size() - 1);
      const std::size_t below = static_cast<std::size_t>(pos);
      const double frac = pos - below;
      const double expect = below + 1 < v.size() ? (1 - frac) * v[below] + frac * v[below + 1] : v[below];
      CHECK(percentile_sorted(v, p) == doctest::Approx(expect).epsilon(1e-14));
    }
  }
}

TEST_CASE("scale equivariance") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(3, 2);
  std::vector<double> v(301);
  for (auto& x : v) x = n(rng);
  const auto a = intensity_statistics(v);
  const double alpha = 2.5;
  for (auto& x : v) x *= alpha;
  const auto b = intensity_statistics(v);
  const std::map<std::string, int> degree = {
      {"Q4LE", 1}, {"ECT3", 2}, {"KE2A", 0}, {"IPH6", 0}, {"Y12H", 1}, {"1GSF", 1},
      {"QG58", 1}, {"8DWT", 1}, {"84IY", 1}, {"SALO", 1}, {"2OJQ", 1}, {"4FUA", 1},
      {"1128", 1}, {"N72L", 1}, {"7TET", 0}, {"9S40", 0}, {"N8CA", 2}, {"5ZWQ", 1}};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double expect = a[i].value * std::pow(alpha, degree.at(a[i].id));
    CHECK_MESSAGE(std::abs(b[i].value - expect) <= 1e-10 * std::max(1.0, std::abs(expect)), a[i].id);
  }
  CHECK(feature(b, "N8CA") == doctest::Approx(v.size() * std::pow(feature(b, "5ZWQ"), 2)).epsilon(1e-10));
}

TEST_CASE("mask enumeration order does not change features") {
  const auto img = oracle::random_image({9, 8, 7}, 3, 61);
  std::vector<double> v(img.values().begin(), img.values().end());
  const auto a = intensity_statistics(v);
  std::mt19937_64 rng(62);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(v.begin(), v.end(), rng);
    const auto b = intensity_statistics(v);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].value == b[i].value);
  }
}

TEST_CASE("diagnostics") {
  Grid g;
  g.dims = {64, 64, 64};
  const auto all = RoiMask::filled(g, true);
  auto img = VolumeImage::zeros(g);
  img[5] = 7;
  img[6] = -2;
  const auto d = diagnostics(all, all, img);
  CHECK(d.voxels_before == 262144);
  CHECK(d.voxels_after == 262144);
  CHECK(d.max == 7);
  CHECK(d.min == -2);
  const auto e = diagnostics(all, RoiMask::filled(g, false), img);
  CHECK(e.voxels_after == 0);
  CHECK_FALSE(e.intensity_valid);
  CHECK(std::isnan(e.as_features()[2].value));
}

TEST_CASE("feature export") {
  CHECK(three_significant(123456.0) == "1.23e+05");
  CHECK(three_significant(0.0012345) == "0.00123");
  CHECK(three_significant(2.5) == "2.5");
  std::ostringstream os;
  write_features_csv(os, "1.A", {{"Q4LE", "mean", 2.5}});
  CHECK(os.str() == "test_id,feature_id,name,value,value_3sig\n1.A,Q4LE,mean,2.5,2.5\n");
  const auto j = features_json("1.A", {{"Q4LE", "mean", 2.5}});
  CHECK(j.find("\"feature_id\": \"Q4LE\"") != std::string::npos);
}

TEST_CASE("all statistics match the brute-force oracle") {
  std::mt19937_64 rng(404);
  std::exponential_distribution<double> ex(0.05);
  for (int t = 0; t < 20; ++t) {
    auto img = oracle::random_image({7, 6, 5}, 3, 500 + t);
    std::vector<std::uint8_t> m(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
      img[i] = 10.0 + ex(rng);
      m[i] = (rng() % 3) != 0;
    }
    m[0] = 1;
    const RoiMask mask(img.grid(), m);
    const auto f = intensity_statistics(img, mask);
    const auto ref = oracle::intensity_features(masked_values(img, mask));
    REQUIRE(f.size() == 18);
    for (const auto& v : f) {
      CAPTURE(v.id);
      CHECK(std::abs(v.value - ref.at(v.id)) <= 1e-9 * std::abs(ref.at(v.id)));
    }
  }
}
