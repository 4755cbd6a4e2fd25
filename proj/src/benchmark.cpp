#include "rfilt/benchmark.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>

#include "rfilt/error.hpp"

namespace rfilt {

namespace {

const std::vector<std::pair<PhantomKind, std::string_view>> kNames = {
    {PhantomKind::empty, "empty"},
    {PhantomKind::impulse, "impulse"},
    {PhantomKind::checkerboard, "checkerboard"},
    {PhantomKind::noise, "noise"},
    {PhantomKind::sphere, "sphere"},
    {PhantomKind::pattern1, "pattern1"},
    {PhantomKind::pattern2, "pattern2"},
    {PhantomKind::pattern3, "pattern3"},
    {PhantomKind::orientation, "orientation"},
};

// Box-Muller on a fixed engine: portable across standard libraries.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do u1 = uniform();
    while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

double type7(const std::vector<double>& s, double p) {
  const double h = (static_cast<double>(s.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= s.size()) return s.back();
  return s[lo] + (h - static_cast<double>(lo)) * (s[lo + 1] - s[lo]);
}

double round3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace

PhantomKind parse_phantom(std::string_view name) {
  if (name == "impulse_response") return PhantomKind::impulse;
  if (name == "pattern_1") return PhantomKind::pattern1;
  if (name == "pattern_2") return PhantomKind::pattern2;
  if (name == "pattern_3") return PhantomKind::pattern3;
  for (const auto& [k, n] : kNames)
    if (n == name) return k;
  throw InvalidArgument("unknown phantom '" + std::string(name) + "'");
}

std::string_view to_string(PhantomKind kind) {
  for (const auto& [k, n] : kNames)
    if (k == kind) return n;
  return "unknown";
}

const std::vector<PhantomKind>& all_phantoms() {
  static const std::vector<PhantomKind> all = [] {
    std::vector<PhantomKind> v;
    for (const auto& [k, n] : kNames) v.push_back(k);
    return v;
  }();
  return all;
}

VolumeImage generate_phantom(PhantomKind kind, std::uint64_t seed) {
  PhantomOptions o;
  o.seed = seed;
  return generate_phantom(kind, o);
}

VolumeImage generate_phantom(PhantomKind kind, const PhantomOptions& o) {
  Grid g;
  g.rank = 3;
  g.dims = {o.size, o.size, o.size};
  if (kind == PhantomKind::orientation) g.dims = {32, 48, 64};
  g.spacing = {o.spacing_mm, o.spacing_mm, o.spacing_mm};
  g.validate();
  auto img = VolumeImage::zeros(g);
  const auto c = static_cast<std::ptrdiff_t>(o.size / 2);
  const std::size_t n = o.size;

  auto line = [&](int axis, std::size_t a, std::size_t b) {
    for (std::size_t t = 0; t < g.dims[axis]; ++t) {
      Index3 p{};
      p[axis] = t;
      p[(axis + 1) % 3] = a;
      p[(axis + 2) % 3] = b;
      img.at(p[0], p[1], p[2]) = 255.0;
    }
  };

  switch (kind) {
    case PhantomKind::empty: break;
    case PhantomKind::impulse: img.at(c, c, c) = 255.0; break;
    case PhantomKind::checkerboard: {
      if (o.checker_edge == 0) throw InvalidArgument("checkerboard edge must be positive");
      const std::size_t e = o.checker_edge;
      for (std::size_t z = 0; z < n; ++z)
        for (std::size_t y = 0; y < n; ++y)
          for (std::size_t x = 0; x < n; ++x)
            img.at(x, y, z) = ((x / e + y / e + z / e) % 2 == 1) ? 255.0 : 0.0;
      break;
    }
    case PhantomKind::noise: {
      Gaussian gauss(o.seed);
      for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = std::clamp(std::round(o.noise_mean + o.noise_sd * gauss.next()), 0.0, 255.0);
      break;
    }
    case PhantomKind::sphere:
      for (std::size_t z = 0; z < n; ++z)
        for (std::size_t y = 0; y < n; ++y)
          for (std::size_t x = 0; x < n; ++x) {
            const double r = std::sqrt(double((x - c) * (x - c) + (y - c) * (y - c) + (z - c) * (z - c)));
            for (double radius : o.sphere_radii)
              if (std::abs(r - radius) < 0.5) img.at(x, y, z) = 255.0;
          }
      break;
    case PhantomKind::pattern1:
      line(0, c, c);
      line(1, c, c);
      line(2, c, c);
      break;
    case PhantomKind::pattern2:
      // along k1 at k2 = c - n/4, c, c + n/4 in the k3 = c plane
      line(0, c - n / 4, c);
      line(0, c, c);
      line(0, c + n / 4, c);
      break;
    case PhantomKind::pattern3:
      line(0, c - n / 4, c);
      line(0, c + n / 4, c);
      line(1, c, c);
      break;
    case PhantomKind::orientation:
      for (std::size_t z = 0; z < g.dims[2]; ++z)
        for (std::size_t y = 0; y < g.dims[1]; ++y)
          for (std::size_t x = 0; x < g.dims[0]; ++x) img.at(x, y, z) = double(x + y + z);
      break;
  }
  return img;
}

MapComparison compare_maps(const VolumeImage& a, const VolumeImage& b, double abs_tol, double rel_tol) {
  if (!a.grid().same_dims(b.grid())) throw InvalidArgument("compared maps differ in extents");
  if (abs_tol < 0 || rel_tol < 0) throw InvalidArgument("tolerances must be non-negative");
  MapComparison r;
  std::vector<double> d(a.size());
  std::vector<std::uint8_t> pass(a.size());
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = std::abs(a[i] - b[i]);
    pass[i] = d[i] <= abs_tol + rel_tol * std::abs(b[i]);
    ok += pass[i];
  }
  r.diff = VolumeImage(a.grid(), std::move(d));
  r.passing = RoiMask(a.grid(), std::move(pass));
  r.pass_fraction = a.size() ? static_cast<double>(ok) / static_cast<double>(a.size()) : 1.0;
  return r;
}

ConsensusReport consensus(const std::vector<VolumeImage>& subs) {
  if (subs.empty()) throw InvalidArgument("consensus needs at least one submission");
  const Grid& g = subs.front().grid();
  for (const auto& s : subs)
    if (!s.grid().same_dims(g)) throw InvalidArgument("submissions differ in extents");
  const std::size_t m = subs.size(), p = g.voxel_count();

  ConsensusReport r;
  std::vector<double> centroid(p, 0.0);
  for (std::size_t v = 0; v < p; ++v) {
    double s = 0.0;
    for (const auto& sub : subs) s += sub[v];
    centroid[v] = s / static_cast<double>(m);
  }
  for (const auto& sub : subs) {
    double s = 0.0;
    for (std::size_t v = 0; v < p; ++v) s += (sub[v] - centroid[v]) * (sub[v] - centroid[v]);
    r.distances.push_back(std::sqrt(s));
  }
  std::vector<double> sorted = r.distances;
  std::sort(sorted.begin(), sorted.end());
  r.q1 = type7(sorted, 0.25);
  r.q3 = type7(sorted, 0.75);
  const double iqr = r.q3 - r.q1;
  for (double d : r.distances) r.outliers.push_back(d > r.q3 + 1.5 * iqr || d < r.q1 - 1.5 * iqr);

  // PCA through the m x m Gram matrix of centred maps
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      double s = 0.0;
      for (std::size_t v = 0; v < p; ++v) s += (subs[i][v] - centroid[v]) * (subs[j][v] - centroid[v]);
      gram(i, j) = gram(j, i) = s;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  r.pca.assign(m, {0.0, 0.0});
  const double scale = std::max(gram.cwiseAbs().maxCoeff(), 1e-300);
  for (int k = 0; k < 2 && k < static_cast<int>(m); ++k) {
    const int col = static_cast<int>(m) - 1 - k;
    const double lambda = es.eigenvalues()(col);
    if (lambda <= 1e-12 * scale) continue;
    const Eigen::VectorXd a = es.eigenvectors().col(col);
    // loading of voxel v is sum_i a_i x_i[v] / sqrt(lambda); fix the sign on the largest one
    double best = 0.0, best_val = 0.0;
    for (std::size_t v = 0; v < p; ++v) {
      double l = 0.0;
      for (std::size_t i = 0; i < m; ++i) l += a(i) * (subs[i][v] - centroid[v]);
      if (std::abs(l) > best) {
        best = std::abs(l);
        best_val = l;
      }
    }
    const double sign = best_val < 0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < m; ++i) r.pca[i][k] = sign * a(i) * std::sqrt(lambda);
    r.explained_variance[k] = m > 1 ? lambda / static_cast<double>(m - 1) : 0.0;
  }
  r.centroid = VolumeImage(g, std::move(centroid));
  return r;
}

void write_consensus_csv(std::ostream& out, const ConsensusReport& r, const std::vector<std::string>& labels) {
  out << "submission,distance,outlier,pc1,pc2\n";
  char buf[160];
  for (std::size_t i = 0; i < r.distances.size(); ++i) {
    const std::string label = i < labels.size() ? labels[i] : std::to_string(i);
    std::snprintf(buf, sizeof buf, ",%.17g,%d,%.17g,%.17g\n", r.distances[i], int(r.outliers[i]),
                  r.pca[i][0], r.pca[i][1]);
    out << label << buf;
  }
}

std::string_view to_string(ConsensusLevel level) {
  switch (level) {
    case ConsensusLevel::weak: return "weak";
    case ConsensusLevel::moderate: return "moderate";
    case ConsensusLevel::strong: return "strong";
    case ConsensusLevel::very_strong: return "very strong";
  }
  return "weak";
}

ConsensusGrade consensus_level(std::size_t matching, std::size_t total) {
  if (total == 0) throw InvalidArgument("consensus needs at least one team");
  if (matching > total) throw InvalidArgument("matching teams exceed the total");
  ConsensusGrade g;
  if (matching < 3) g.level = ConsensusLevel::weak;
  else if (matching <= 5) g.level = ConsensusLevel::moderate;
  else if (matching <= 9) g.level = ConsensusLevel::strong;
  else g.level = ConsensusLevel::very_strong;
  g.valid = g.level != ConsensusLevel::weak && 2 * matching > total;
  return g;
}

ReferenceValue reference_value(const std::vector<double>& values, double tolerance) {
  if (values.empty()) throw InvalidArgument("no submitted values");
  std::map<double, std::size_t> counts;
  for (double v : values) ++counts[round3(v)];
  ReferenceValue r;
  std::size_t best = 0;
  for (const auto& [v, n] : counts)
    if (n > best) {
      best = n;
      r.value = v;
    }
  r.total = values.size();
  for (double v : values)
    if (std::abs(round3(v) - r.value) <= tolerance) ++r.matching;
  r.grade = consensus_level(r.matching, r.total);
  return r;
}

}  // namespace rfilt
