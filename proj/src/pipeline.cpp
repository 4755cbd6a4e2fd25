#include "rfilt/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "rfilt/error.hpp"
#include "rfilt/wavelets.hpp"

namespace rfilt {

using nlohmann::json;

ProcessingConfig ProcessingConfig::configuration_a() {
  ProcessingConfig c;
  c.name = "A";
  c.mode = 2;
  c.reseg = IntensityRange{-1000.0, 400.0};
  return c;
}

ProcessingConfig ProcessingConfig::configuration_b() {
  ProcessingConfig c;
  c.name = "B";
  c.mode = 3;
  c.resample_spacing = Spacing3{1.0, 1.0, 1.0};
  c.image_interp = InterpMethod::tricubic;
  c.round_intensities = true;
  c.reseg = IntensityRange{-1000.0, 400.0};
  return c;
}

namespace {

const std::set<std::string> kRefused = {"bin_size", "bin_width", "discretisation", "discretization",
                                        "fixed_bin_size"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (kRefused.count(k))
      throw InvalidArgument("'" + k + "': fixed-bin-size discretisation is not supported");
    if (!allowed.count(k)) throw InvalidArgument("unknown key '" + k + "' in " + where);
  }
}

// Reads name_mm / name_vox; both at once is an error.
std::optional<Length> read_length(const json& j, const std::string& name) {
  const bool mm = j.contains(name + "_mm"), vox = j.contains(name + "_vox");
  if (mm && vox) throw InvalidArgument("'" + name + "' given in both mm and voxels");
  if (mm) return Length{j.at(name + "_mm").get<double>(), true};
  if (vox) return Length{j.at(name + "_vox").get<double>(), false};
  return std::nullopt;
}

RieszIndex riesz_from_json(const json& j) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3)
    throw InvalidArgument("riesz_l must list 2 or 3 integers");
  RieszIndex r;
  r.rank = static_cast<int>(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) r.l[i] = j[i].get<int>();
  return r;
}

FilterSpec filter_from(const json& j) {
  check_keys(j,
             {"test_id", "family", "support_vox", "sigma_mm", "sigma_vox", "cutoff", "kernel",
              "energy_delta_vox", "lambda_mm", "lambda_vox", "gamma", "theta_rad", "dtheta_rad",
              "orthogonal_planes", "wavelet", "level", "subband", "decimated",
              "force_multilevel_invariance", "riesz_l", "align", "align_criterion",
              "sigma_tensor_mm", "sigma_tensor_vox", "invariance", "pooling", "via"},
             "filter");
  FilterSpec f;
  f.test_id = j.value("test_id", "");
  f.family = parse_family(j.value("family", "none"));
  f.support_vox = j.value("support_vox", f.support_vox);
  f.cutoff = j.value("cutoff", f.cutoff);
  f.laws = j.value("kernel", "");
  f.energy_delta_vox = j.value("energy_delta_vox", -1);
  f.gamma = j.value("gamma", f.gamma);
  f.theta = j.value("theta_rad", 0.0);
  f.dtheta = j.value("dtheta_rad", 0.0);
  f.orthogonal_planes = j.value("orthogonal_planes", false);
  f.wavelet = j.value("wavelet", f.family == FilterFamily::wavelet ? "haar" : "simoncelli");
  f.level = j.value("level", 1);
  f.subband = j.value("subband", "");
  f.decimated = j.value("decimated", false);
  f.force_multilevel_invariance = j.value("force_multilevel_invariance", false);
  f.align = j.value("align", false);
  f.align_criterion = parse_align_criterion(j.value("align_criterion", "largest"));
  f.invariance = parse_invariance(j.value("invariance", "none"));
  f.pooling = parse_pool(j.value("pooling", "max"));
  f.via = parse_via(j.value("via", "auto"));
  if (j.contains("riesz_l")) f.riesz = riesz_from_json(j.at("riesz_l"));

  const auto sigma = read_length(j, "sigma");
  const auto lambda = read_length(j, "lambda");
  const auto tensor = read_length(j, "sigma_tensor");
  std::optional<bool> unit;
  for (const auto& l : {sigma, lambda, tensor}) {
    if (!l) continue;
    if (unit && *unit != l->mm) throw InvalidArgument("filter mixes mm and voxel lengths");
    unit = l->mm;
  }
  if (sigma) f.sigma = *sigma;
  if (lambda) f.lambda = *lambda;
  if (tensor) f.sigma_tensor = *tensor;
  return f;
}

json length_json(json& j, const std::string& name, const Length& l) {
  j[name + (l.mm ? "_mm" : "_vox")] = l.value;
  return j;
}

json filter_to(const FilterSpec& f) {
  json j;
  if (!f.test_id.empty()) j["test_id"] = f.test_id;
  j["family"] = std::string(to_string(f.family));
  switch (f.family) {
    case FilterFamily::none: break;
    case FilterFamily::mean: j["support_vox"] = f.support_vox; break;
    case FilterFamily::log:
      length_json(j, "sigma", f.sigma);
      j["cutoff"] = f.cutoff;
      break;
    case FilterFamily::laws:
      j["kernel"] = f.laws;
      if (f.energy_delta_vox >= 0) j["energy_delta_vox"] = f.energy_delta_vox;
      break;
    case FilterFamily::gabor:
      length_json(j, "sigma", f.sigma);
      length_json(j, "lambda", f.lambda);
      j["gamma"] = f.gamma;
      j["cutoff"] = f.cutoff;
      if (f.invariance == Invariance::orientations) j["dtheta_rad"] = f.dtheta;
      else j["theta_rad"] = f.theta;
      if (f.orthogonal_planes) j["orthogonal_planes"] = true;
      break;
    case FilterFamily::wavelet:
      j["wavelet"] = f.wavelet;
      j["level"] = f.level;
      j["subband"] = f.subband;
      if (f.decimated) j["decimated"] = true;
      if (f.force_multilevel_invariance) j["force_multilevel_invariance"] = true;
      break;
    case FilterFamily::radial:
      j["wavelet"] = f.wavelet;
      j["level"] = f.level;
      break;
    case FilterFamily::riesz: {
      j["wavelet"] = f.wavelet;
      j["level"] = f.level;
      json l = json::array();
      for (int i = 0; i < f.riesz.rank; ++i) l.push_back(f.riesz.l[i]);
      j["riesz_l"] = l;
      if (f.align) {
        j["align"] = true;
        length_json(j, "sigma_tensor", f.sigma_tensor);
      }
      break;
    }
  }
  if (f.invariance != Invariance::none) {
    j["invariance"] = std::string(to_string(f.invariance));
    j["pooling"] = f.pooling == PoolMode::max ? "max" : "average";
  }
  return j;
}

}  // namespace

FilterSpec parse_filter_json(std::string_view text) {
  try {
    return filter_from(json::parse(text));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("filter JSON: ") + e.what());
  }
}

ProcessingConfig parse_config(std::string_view text) {
  try {
    const json j = json::parse(text);
    check_keys(j,
               {"test_id", "configuration", "mode", "resample_spacing_mm", "image_interpolation",
                "mask_interpolation", "mask_threshold", "rounding", "resegmentation_range",
                "boundary", "boundary_constant", "filter", "description"},
               "configuration");
    ProcessingConfig c;
    const std::string preset = j.value("configuration", "");
    if (preset == "A") c = ProcessingConfig::configuration_a();
    else if (preset == "B") c = ProcessingConfig::configuration_b();
    else if (!preset.empty()) throw InvalidArgument("unknown configuration preset '" + preset + "'");

    if (j.contains("mode")) {
      const std::string m = j.at("mode");
      if (m == "2D") c.mode = 2;
      else if (m == "3D") c.mode = 3;
      else throw InvalidArgument("mode must be 2D or 3D");
    }
    if (j.contains("resample_spacing_mm")) {
      const auto& s = j.at("resample_spacing_mm");
      if (s.is_null()) c.resample_spacing.reset();
      else {
        if (!s.is_array() || s.size() != 3) throw InvalidArgument("resample_spacing_mm needs 3 values");
        c.resample_spacing = Spacing3{s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
      }
    }
    if (j.contains("image_interpolation")) c.image_interp = parse_interp(j.at("image_interpolation").get<std::string>());
    if (j.contains("mask_interpolation") && j.at("mask_interpolation") != "trilinear")
      throw InvalidArgument("mask interpolation is trilinear");
    c.mask_threshold = j.value("mask_threshold", c.mask_threshold);
    if (j.contains("rounding")) {
      const std::string r = j.at("rounding");
      if (r == "nearest" || r == "nearest-integer") c.round_intensities = true;
      else if (r == "none") c.round_intensities = false;
      else throw InvalidArgument("rounding must be nearest or none");
    }
    if (j.contains("resegmentation_range")) {
      const auto& r = j.at("resegmentation_range");
      if (r.is_null()) c.reseg.reset();
      else {
        if (!r.is_array() || r.size() != 2) throw InvalidArgument("resegmentation_range needs [low, high]");
        IntensityRange range;
        if (!r[0].is_null()) range.low = r[0].get<double>();
        if (!r[1].is_null()) range.high = r[1].get<double>();
        if (range.low > range.high) throw InvalidArgument("re-segmentation range is inverted");
        c.reseg = range;
      }
    }
    if (j.contains("boundary"))
      c.boundary = parse_boundary(j.at("boundary").get<std::string>(), j.value("boundary_constant", 0.0));
    if (j.contains("filter")) c.filter = filter_from(j.at("filter"));
    if (j.contains("test_id")) c.filter.test_id = j.at("test_id").get<std::string>();
    c.filter.validate(c.mode);
    return c;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("configuration JSON: ") + e.what());
  }
}

ProcessingConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("configuration not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ProcessingConfig& c) {
  json j;
  if (!c.filter.test_id.empty()) j["test_id"] = c.filter.test_id;
  if (c.name == "A" || c.name == "B") j["configuration"] = c.name;
  j["mode"] = c.mode == 2 ? "2D" : "3D";
  if (c.resample_spacing) {
    const auto& s = *c.resample_spacing;
    j["resample_spacing_mm"] = {s[0], s[1], s[2]};
    j["image_interpolation"] = std::string(to_string(c.image_interp));
    j["mask_interpolation"] = "trilinear";
    j["mask_threshold"] = c.mask_threshold;
  } else {
    j["resample_spacing_mm"] = nullptr;
  }
  j["rounding"] = c.round_intensities ? "nearest" : "none";
  if (c.reseg) {
    json r = json::array();
    r.push_back(std::isfinite(c.reseg->low) ? json(c.reseg->low) : json(nullptr));
    r.push_back(std::isfinite(c.reseg->high) ? json(c.reseg->high) : json(nullptr));
    j["resegmentation_range"] = r;
  } else {
    j["resegmentation_range"] = nullptr;
  }
  j["boundary"] = std::string(to_string(c.boundary.kind));
  if (c.boundary.kind == BoundaryKind::constant) j["boundary_constant"] = c.boundary.constant;
  auto f = filter_to(c.filter);
  f.erase("test_id");
  j["filter"] = f;
  return j.dump(2) + "\n";
}

RunResult run_configuration(const VolumeImage& image, const RoiMask& mask, const ProcessingConfig& c) {
  mask.require_matches(image.grid());
  c.filter.validate(c.mode);
  if (c.mode == 3 && image.rank() != 3) throw InvalidArgument("configuration mode 3D needs a volume");

  RunResult r;
  VolumeImage img = image;
  RoiMask morph = mask;
  if (c.resample_spacing) {
    img = resample_image(img, *c.resample_spacing, c.image_interp);
    morph = resample_mask(mask, *c.resample_spacing, c.mask_threshold);
    r.log.push_back("resampled to " + std::to_string(img.dims()[0]) + "x" +
                    std::to_string(img.dims()[1]) + "x" + std::to_string(img.dims()[2]) + " (" +
                    std::string(to_string(c.image_interp)) + ")");
  }
  if (c.round_intensities) img = round_intensities(img);
  RoiMask inten = c.reseg ? resegment(morph, img, *c.reseg) : morph;
  if (!c.reseg) inten.set_kind(MaskKind::intensity);
  if (inten.count() == 0) throw InvalidArgument("empty ROI");

  r.response = apply_filter(img, c.filter, c.boundary, c.mode, &r.log);
  RoiMask feature_mask = inten;
  if (c.filter.family == FilterFamily::wavelet && c.filter.decimated)
    for (int l = 0; l < c.filter.level; ++l) feature_mask = decimate(feature_mask);
  if (feature_mask.count() == 0) throw InvalidArgument("empty ROI");
  r.features = intensity_statistics(r.response, feature_mask);
  r.diagnostics = diagnostics(mask, inten, img);
  r.image = std::move(img);
  r.morphological = std::move(morph);
  r.intensity = std::move(inten);
  return r;
}

}  // namespace rfilt
