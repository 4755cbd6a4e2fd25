#include "rfilt/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>

#include "rfilt/error.hpp"

namespace rfilt {

namespace {

// Neumaier summation
struct Sum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) c += (s - t) + x;
    else c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

double mean_of(const std::vector<double>& v) {
  Sum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

double mean_abs_dev(const std::vector<double>& v, double centre) {
  std::vector<double> d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) d[i] = std::abs(v[i] - centre);
  std::sort(d.begin(), d.end());
  return mean_of(d);
}

std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

std::vector<double> masked_values(const VolumeImage& image, const RoiMask& mask) {
  mask.require_matches(image.grid());
  std::vector<double> v;
  v.reserve(mask.count());
  for (std::size_t i = 0; i < image.size(); ++i)
    if (mask[i]) v.push_back(image[i]);
  std::sort(v.begin(), v.end());
  return v;
}

double aggregate_mean(const ResponseMap& response, const RoiMask& mask) {
  const auto v = masked_values(response, mask);
  if (v.empty()) throw InvalidArgument("empty ROI");
  return mean_of(v);
}

double percentile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("percentile of an empty set");
  if (p < 0.0 || p > 1.0) throw InvalidArgument("percentile fraction must lie in [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<FeatureValue> intensity_statistics(const ResponseMap& response, const RoiMask& mask) {
  return intensity_statistics(masked_values(response, mask));
}

std::vector<FeatureValue> intensity_statistics(std::vector<double> x) {
  if (x.empty()) throw InvalidArgument("empty ROI");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double mu = mean_of(x);

  // central moments over deviations sorted by value for an order-free sum
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = x[i] - mu;
  Sum m2, m3, m4, e;
  for (double d : dev) {
    m2.add(d * d);
    m3.add(d * d * d);
    m4.add(d * d * d * d);
  }
  for (double v : x) e.add(v * v);
  const double var = m2.value() / n;
  const double skew = var > 0.0 ? (m3.value() / n) / std::pow(var, 1.5) : 0.0;
  const double kurt = var > 0.0 ? (m4.value() / n) / (var * var) - 3.0 : 0.0;

  const double med = percentile_sorted(x, 0.5);
  const double p10 = percentile_sorted(x, 0.1), p90 = percentile_sorted(x, 0.9);
  const double p25 = percentile_sorted(x, 0.25), p75 = percentile_sorted(x, 0.75);

  std::vector<double> mid;
  for (double v : x)
    if (v >= p10 && v <= p90) mid.push_back(v);
  const double rmad = mid.empty() ? 0.0 : mean_abs_dev(mid, mean_of(mid));

  const double sd = std::sqrt(var);
  const double cov = sd == 0.0 ? 0.0 : sd / mu;
  const double qden = p75 + p25, qnum = p75 - p25;
  const double qcod = qnum == 0.0 ? 0.0 : qnum / qden;
  const double energy = e.value();

  return {
      {"Q4LE", "mean", mu},
      {"ECT3", "variance", var},
      {"KE2A", "skewness", skew},
      {"IPH6", "kurtosis", kurt},
      {"Y12H", "median", med},
      {"1GSF", "minimum", x.front()},
      {"QG58", "p10", p10},
      {"8DWT", "p90", p90},
      {"84IY", "maximum", x.back()},
      {"SALO", "interquartile_range", p75 - p25},
      {"2OJQ", "range", x.back() - x.front()},
      {"4FUA", "mean_absolute_deviation", mean_abs_dev(x, mu)},
      {"1128", "robust_mean_absolute_deviation", rmad},
      {"N72L", "median_absolute_deviation", mean_abs_dev(x, med)},
      {"7TET", "coefficient_of_variation", cov},
      {"9S40", "quartile_coefficient_of_dispersion", qcod},
      {"N8CA", "energy", energy},
      {"5ZWQ", "root_mean_square", std::sqrt(energy / n)},
  };
}

std::vector<FeatureValue> Diagnostics::as_features() const {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {
      {"diag.n_before", "voxels_before_interpolation", static_cast<double>(voxels_before)},
      {"diag.n_after", "voxels_after_resegmentation", static_cast<double>(voxels_after)},
      {"diag.mean", "mean_intensity_after_resegmentation", intensity_valid ? mean : nan},
      {"diag.max", "max_intensity_after_resegmentation", intensity_valid ? max : nan},
      {"diag.min", "min_intensity_after_resegmentation", intensity_valid ? min : nan},
  };
}

Diagnostics diagnostics(const RoiMask& mask_before, const RoiMask& mask_after,
                        const VolumeImage& image_after) {
  Diagnostics d;
  d.voxels_before = mask_before.count();
  const auto v = masked_values(image_after, mask_after);
  d.voxels_after = v.size();
  if (!v.empty()) {
    d.intensity_valid = true;
    d.mean = mean_of(v);
    d.min = v.front();
    d.max = v.back();
  }
  return d;
}

std::string three_significant(double value) {
  if (!std::isfinite(value)) return format_g(value, 3);
  return format_g(std::stod(format_g(value, 3)), 3);
}

void write_features_csv(std::ostream& out, const std::string& test_id,
                        const std::vector<FeatureValue>& features, bool header) {
  if (header) out << "test_id,feature_id,name,value,value_3sig\n";
  for (const auto& f : features)
    out << test_id << ',' << f.id << ',' << f.name << ',' << format_g(f.value, 17) << ','
        << three_significant(f.value) << '\n';
}

std::string features_json(const std::string& test_id, const std::vector<FeatureValue>& features) {
  nlohmann::ordered_json j;
  j["test_id"] = test_id;
  auto& arr = j["features"] = nlohmann::ordered_json::array();
  for (const auto& f : features) {
    nlohmann::ordered_json e;
    e["feature_id"] = f.id;
    e["name"] = f.name;
    if (std::isfinite(f.value)) e["value"] = f.value;
    else e["value"] = nullptr;
    e["value_3sig"] = three_significant(f.value);
    arr.push_back(e);
  }
  return j.dump(2);
}

}  // namespace rfilt
