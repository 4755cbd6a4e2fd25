#include "rfilt/filter.hpp"

#include <cmath>
#include <cstdio>

#include "rfilt/error.hpp"
#include "rfilt/kernels.hpp"
#include "rfilt/wavelets.hpp"

namespace rfilt {

FilterFamily parse_family(std::string_view name) {
  if (name == "none") return FilterFamily::none;
  if (name == "mean") return FilterFamily::mean;
  if (name == "log" || name == "LoG") return FilterFamily::log;
  if (name == "laws") return FilterFamily::laws;
  if (name == "gabor") return FilterFamily::gabor;
  if (name == "wavelet") return FilterFamily::wavelet;
  if (name == "radial" || name == "simoncelli" || name == "shannon") return FilterFamily::radial;
  if (name == "riesz") return FilterFamily::riesz;
  throw InvalidArgument("unknown filter family '" + std::string(name) + "'");
}

std::string_view to_string(FilterFamily family) {
  switch (family) {
    case FilterFamily::none: return "none";
    case FilterFamily::mean: return "mean";
    case FilterFamily::log: return "log";
    case FilterFamily::laws: return "laws";
    case FilterFamily::gabor: return "gabor";
    case FilterFamily::wavelet: return "wavelet";
    case FilterFamily::radial: return "radial";
    case FilterFamily::riesz: return "riesz";
  }
  return "none";
}

Invariance parse_invariance(std::string_view name) {
  if (name == "none") return Invariance::none;
  if (name == "right_angle" || name == "right-angle") return Invariance::right_angle;
  if (name == "orientations") return Invariance::orientations;
  throw InvalidArgument("unknown invariance scheme '" + std::string(name) + "'");
}

std::string_view to_string(Invariance invariance) {
  switch (invariance) {
    case Invariance::none: return "none";
    case Invariance::right_angle: return "right_angle";
    case Invariance::orientations: return "orientations";
  }
  return "none";
}

namespace {

bool is_radial_name(const std::string& w) { return w == "shannon" || w == "simoncelli"; }

RadialProfile radial_profile(const FilterSpec& s) {
  return {parse_radial(s.wavelet), s.level};
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

}  // namespace

void FilterSpec::validate(int rank) const {
  if (rank != 2 && rank != 3) throw InvalidArgument("filters run in 2-D or 3-D");
  auto lengths_positive = [](const Length& l, const char* what) {
    if (!(l.value > 0.0)) throw InvalidArgument(std::string(what) + " must be positive");
  };
  switch (family) {
    case FilterFamily::none: break;
    case FilterFamily::mean:
      if (support_vox < 1 || support_vox % 2 == 0)
        throw InvalidArgument("mean filter support must be a positive odd number of voxels");
      break;
    case FilterFamily::log:
      lengths_positive(sigma, "LoG sigma");
      break;
    case FilterFamily::laws: {
      const auto names = parse_laws_combination(laws);
      if (static_cast<int>(names.size()) != rank)
        throw InvalidArgument("Laws combination '" + laws + "' does not match the " +
                              std::to_string(rank) + "-D filter mode");
      if (invariance == Invariance::orientations)
        throw InvalidArgument("Laws filters use right-angle invariance");
      break;
    }
    case FilterFamily::gabor:
      lengths_positive(sigma, "Gabor sigma");
      lengths_positive(lambda, "Gabor lambda");
      if (!(gamma > 0.0)) throw InvalidArgument("Gabor gamma must be positive");
      if (rank == 3 && !orthogonal_planes)
        throw InvalidArgument("Gabor is a 2-D filter; use 2-D mode or orthogonal planes");
      if (invariance == Invariance::right_angle)
        throw InvalidArgument("Gabor filters use orientation sampling for invariance");
      if (invariance == Invariance::orientations) gabor_orientation_set(dtheta);
      break;
    case FilterFamily::wavelet:
      if (is_radial_name(wavelet)) throw InvalidArgument("use the radial family for " + wavelet);
      wavelet_family(wavelet);
      if (level < 1) throw InvalidArgument("wavelet level must be at least 1");
      parse_subband(subband, rank);
      if (decimated && invariance != Invariance::none)
        throw InvalidArgument("rotation invariance needs the undecimated transform");
      if (invariance == Invariance::orientations)
        throw InvalidArgument("separable wavelets use right-angle invariance");
      break;
    case FilterFamily::radial:
      parse_radial(wavelet);
      if (level < 1) throw InvalidArgument("wavelet level must be at least 1");
      break;
    case FilterFamily::riesz:
      parse_radial(wavelet);
      if (level < 1) throw InvalidArgument("wavelet level must be at least 1");
      if (riesz.rank != rank)
        throw InvalidArgument("Riesz index " + riesz.to_string() + " does not match the " +
                              std::to_string(rank) + "-D filter mode");
      if (riesz.order() < 1) throw InvalidArgument("Riesz index must have order at least 1");
      if (align) {
        if (riesz.order() != 2) throw InvalidArgument("alignment is implemented for order 2");
        lengths_positive(sigma_tensor, "tensor sigma");
      }
      break;
  }
  if (family != FilterFamily::gabor && orthogonal_planes)
    throw InvalidArgument("orthogonal-plane averaging applies to Gabor filters");
}

namespace {

double isotropic_spacing(const Grid& g, int axes) {
  if (!g.isotropic(axes))
    throw InvalidArgument("filtering needs isotropic voxel spacing; resample first");
  return g.spacing[0];
}

GaborParams gabor_params(const FilterSpec& s, double spacing) {
  GaborParams p;
  p.sigma = s.sigma.voxels(spacing);
  p.lambda = s.lambda.voxels(spacing);
  p.gamma = s.gamma;
  p.theta = s.theta;
  p.d = s.cutoff;
  return p;
}

double tensor_sigma_mm(const FilterSpec& s, const Grid& g) {
  return s.sigma_tensor.mm ? s.sigma_tensor.value
                           : s.sigma_tensor.value * isotropic_spacing(g, g.rank);
}

ResponseMap filter_rank(const VolumeImage& img, const FilterSpec& s, const BoundaryMode& b) {
  const int r = img.rank();
  switch (s.family) {
    case FilterFamily::none: return img;
    case FilterFamily::mean: return convolve_separable(img, mean_separable(s.support_vox, r), b);
    case FilterFamily::log: {
      const double sv = s.sigma.voxels(isotropic_spacing(img.grid(), r));
      return convolve_dense(img, log_kernel(sv, r, s.cutoff), b, s.via);
    }
    case FilterFamily::laws: {
      const auto names = parse_laws_combination(s.laws);
      ResponseMap h = s.invariance == Invariance::right_angle
                          ? pooled_equivariant(img, {laws_kernel(names)}, b, s.pooling)
                          : laws_response(img, names, b);
      if (s.energy_delta_vox >= 0) h = laws_energy(h, s.energy_delta_vox, b);
      return h;
    }
    case FilterFamily::gabor: {
      const auto p = gabor_params(s, isotropic_spacing(img.grid(), 2));
      if (s.invariance == Invariance::orientations)
        return pool(gabor_bank_modulus(img, p, gabor_orientation_set(s.dtheta), b, s.via), s.pooling);
      return gabor_response_modulus(img, p, b, s.via);
    }
    case FilterFamily::wavelet: {
      const auto fam = wavelet_family(s.wavelet);
      const auto sb = parse_subband(s.subband, r);
      if (s.decimated) return dwt_decimated(img, fam, s.level, b).back().subbands.at(sb.letters);
      const auto stages = swt_cascade(fam, s.level, sb, r);
      const bool pooled = s.invariance == Invariance::right_angle &&
                          (s.level == 1 || s.force_multilevel_invariance);
      return pooled ? pooled_equivariant(img, stages, b, s.pooling) : apply_cascade(img, stages, b);
    }
    case FilterFamily::radial: return nonseparable_b_map(img, radial_profile(s));
    case FilterFamily::riesz:
      if (s.align)
        return aligned_riesz_map(img, radial_profile(s), tensor_sigma_mm(s, img.grid()),
                                 s.align_criterion);
      return riesz_filtered_map(img, radial_profile(s), s.riesz);
  }
  throw InvalidArgument("unhandled filter family");
}

// Effective voxel-unit parameters on a grid of the filter's rank.
std::vector<std::string> describe(const FilterSpec& s, const Grid& g) {
  const int r = g.rank;
  const char* pool_name = s.pooling == PoolMode::max ? "max" : "average";
  std::vector<std::string> out;
  switch (s.family) {
    case FilterFamily::none: out.push_back("filter: none"); break;
    case FilterFamily::mean: out.push_back("mean: M=" + std::to_string(s.support_vox) + " vox"); break;
    case FilterFamily::log: {
      const double sv = s.sigma.voxels(isotropic_spacing(g, r));
      out.push_back(fmt("log: sigma=%.6g vox", sv) + ", M=" +
                    std::to_string(truncated_support(sv, s.cutoff)));
      break;
    }
    case FilterFamily::laws:
      out.push_back("laws: " + s.laws + ", kernel length 5");
      if (s.invariance == Invariance::right_angle)
        out.push_back(std::string("laws: ") + pool_name + " pooling over " +
                      std::to_string(right_angle_group(r).size()) + " orientations");
      if (s.energy_delta_vox >= 0)
        out.push_back("laws energy: delta=" + std::to_string(s.energy_delta_vox) + " vox");
      break;
    case FilterFamily::gabor: {
      const auto p = gabor_params(s, isotropic_spacing(g, 2));
      out.push_back(fmt("gabor: sigma=%.6g vox", p.sigma) + fmt(", lambda=%.6g vox", p.lambda) +
                    ", M=" + std::to_string(gabor_support(p)));
      if (s.invariance == Invariance::orientations)
        out.push_back("gabor: " + std::string(pool_name) + " pooling over " +
                      std::to_string(gabor_orientation_set(s.dtheta).size()) + " orientations");
      break;
    }
    case FilterFamily::wavelet: {
      const auto stages = swt_cascade(wavelet_family(s.wavelet), s.level, parse_subband(s.subband, r), r);
      out.push_back(std::string("wavelet: ") + (s.decimated ? "decimated " : "undecimated ") +
                    s.wavelet + " " + s.subband + " level " + std::to_string(s.level) +
                    ", kernel length " + std::to_string(stages.back().axes[0].size()));
      if (s.invariance == Invariance::right_angle) {
        if (s.level > 1 && !s.force_multilevel_invariance)
          out.push_back("wavelet: pooling skipped above level 1");
        else
          out.push_back(std::string("wavelet: ") + pool_name + " pooling over " +
                        std::to_string(right_angle_group(r).size()) + " orientations");
      }
      break;
    }
    case FilterFamily::radial:
      out.push_back("radial: " + s.wavelet + " level " + std::to_string(s.level) +
                    " (Fourier domain, periodic)");
      break;
    case FilterFamily::riesz:
      out.push_back("riesz: " + s.riesz.to_string() + " on " + s.wavelet + " level " +
                    std::to_string(s.level) + " (Fourier domain, periodic)");
      if (s.align)
        out.push_back(fmt("riesz: aligned, sigma_tensor=%.6g vox", tensor_sigma_mm(s, g) / g.spacing[0]));
      break;
  }
  return out;
}

Grid slice_grid(const Grid& g) {
  Grid sg;
  sg.rank = 2;
  sg.dims = {g.dims[0], g.dims[1], 1};
  sg.spacing = {g.spacing[0], g.spacing[1], 1.0};
  return sg;
}

}  // namespace

ResponseMap apply_filter(const VolumeImage& image, const FilterSpec& spec,
                         const BoundaryMode& boundary, int mode, std::vector<std::string>* log) {
  if (mode != 2 && mode != 3) throw InvalidArgument("filter mode must be 2D or 3D");
  if (mode == 3 && image.rank() != 3) throw InvalidArgument("3-D filtering needs a volume");
  if (image.rank() < 2) throw InvalidArgument("filtering needs a 2-D or 3-D image");
  spec.validate(mode);
  if (mode == 2 && image.rank() == 3 && spec.decimated)
    throw InvalidArgument("decimated wavelets are not available slice-wise");

  const bool planar = spec.family == FilterFamily::gabor || (mode == 2 && image.rank() == 3);
  if (log) {
    auto lines = describe(spec, planar ? slice_grid(image.grid()) : image.grid());
    if (spec.family == FilterFamily::gabor && mode == 3)
      lines.push_back("gabor: averaged over three orthogonal planes");
    log->insert(log->end(), lines.begin(), lines.end());
  }

  if (spec.family == FilterFamily::gabor && mode == 3) {
    return orthogonal_plane_average(
        image, [&](const VolumeImage& s) { return filter_rank(s, spec, boundary); });
  }
  if (mode == 2 && image.rank() == 3) {
    return apply_slicewise(image, Plane::k1k2,
                           [&](const VolumeImage& s) { return filter_rank(s, spec, boundary); });
  }
  return filter_rank(image, spec, boundary);
}

}  // namespace rfilt
