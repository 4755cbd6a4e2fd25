// rfilt: phantom | filter | run | features | compare | consensus

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rfilt/benchmark.hpp"
#include "rfilt/error.hpp"
#include "rfilt/features.hpp"
#include "rfilt/filter.hpp"
#include "rfilt/nifti.hpp"
#include "rfilt/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rfilt;

namespace {

void summary(const VolumeImage& img) {
  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  for (double v : img.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  std::printf("dims=%zux%zux%zu spacing=%.6gx%.6gx%.6g\n", img.dims()[0], img.dims()[1], img.dims()[2],
              img.spacing()[0], img.spacing()[1], img.spacing()[2]);
  std::printf("min=%.9g max=%.9g mean=%.9g\n", lo, hi, sum / static_cast<double>(img.size()));
}

void print_log(const std::vector<std::string>& log) {
  for (const auto& l : log) std::printf("%s\n", l.c_str());
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text(const fs::path& p, const std::string& text) {
  ensure_parent(p);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
}

int threads_from_env() {
  if (const char* env = std::getenv("RFILT_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw InvalidArgument("RFILT_THREADS must be a positive integer");
    return static_cast<int>(n);
  }
  return 0;
}

// Flags of the filter subcommand, forwarded as a filter block.
struct FilterFlags {
  std::string family;
  std::optional<int> support_vox;
  std::optional<double> sigma_mm, sigma_vox, lambda_mm, lambda_vox, tensor_mm, tensor_vox;
  std::optional<double> cutoff, gamma, theta_rad, dtheta_rad;
  std::optional<std::string> kernel, wavelet, subband, riesz_l, invariance, pooling, via, align_criterion;
  std::optional<int> energy_delta_vox, level;
  bool orthogonal_planes = false, decimated = false, force_multilevel = false, align = false;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["family"] = family;
    auto opt = [&](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    opt("support_vox", support_vox);
    opt("sigma_mm", sigma_mm);
    opt("sigma_vox", sigma_vox);
    opt("lambda_mm", lambda_mm);
    opt("lambda_vox", lambda_vox);
    opt("sigma_tensor_mm", tensor_mm);
    opt("sigma_tensor_vox", tensor_vox);
    opt("cutoff", cutoff);
    opt("gamma", gamma);
    opt("theta_rad", theta_rad);
    opt("dtheta_rad", dtheta_rad);
    opt("kernel", kernel);
    opt("wavelet", wavelet);
    opt("subband", subband);
    opt("invariance", invariance);
    opt("pooling", pooling);
    opt("via", via);
    opt("align_criterion", align_criterion);
    opt("energy_delta_vox", energy_delta_vox);
    opt("level", level);
    if (riesz_l) {
      const RieszIndex r = parse_riesz_index(*riesz_l);
      nlohmann::json l = nlohmann::json::array();
      for (int i = 0; i < r.rank; ++i) l.push_back(r.l[i]);
      j["riesz_l"] = l;
    }
    if (orthogonal_planes) j["orthogonal_planes"] = true;
    if (decimated) j["decimated"] = true;
    if (force_multilevel) j["force_multilevel_invariance"] = true;
    if (align) j["align"] = true;
    return j;
  }
};

NiftiDatatype datatype_or_default(const std::string& name) {
  return parse_nifti_datatype(name.empty() ? "f32" : name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convolutional filters for radiomics: phantoms, filtering, feature export, comparison"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: RFILT_THREADS or all cores)")->check(CLI::PositiveNumber);

  // phantom
  auto* ph = app.add_subcommand("phantom", "Generate a digital phantom");
  std::string ph_kind, ph_out, ph_type = "f32";
  std::uint64_t ph_seed = 0;
  ph->add_option("--kind", ph_kind, "empty|impulse|checkerboard|noise|sphere|pattern1|pattern2|pattern3|orientation")->required();
  ph->add_option("--out", ph_out, "Output .nii or .nii.gz")->required();
  ph->add_option("--seed", ph_seed, "Seed for the noise phantom");
  ph->add_option("--datatype", ph_type, "u8|i16|i32|f32|f64");

  // filter
  auto* fl = app.add_subcommand("filter", "Filter one image");
  std::string fl_image, fl_out, fl_boundary = "mirror", fl_mode = "3D", fl_type = "f32", fl_filter_json;
  double fl_constant = 0.0;
  FilterFlags ff;
  fl->add_option("--image", fl_image, "Input NIfTI")->required();
  fl->add_option("--out", fl_out, "Response map NIfTI")->required();
  fl->add_option("--filter", ff.family, "none|mean|log|laws|gabor|wavelet|radial|riesz");
  fl->add_option("--filter-json", fl_filter_json, "Filter block as a JSON file");
  fl->add_option("--support-vox,--M", ff.support_vox, "Mean filter support in voxels");
  auto* s_mm = fl->add_option("--sigma-mm", ff.sigma_mm);
  auto* s_vox = fl->add_option("--sigma-vox", ff.sigma_vox);
  auto* l_mm = fl->add_option("--lambda-mm", ff.lambda_mm);
  auto* l_vox = fl->add_option("--lambda-vox", ff.lambda_vox);
  auto* t_mm = fl->add_option("--sigma-tensor-mm", ff.tensor_mm);
  auto* t_vox = fl->add_option("--sigma-tensor-vox", ff.tensor_vox);
  s_mm->excludes(s_vox)->excludes(l_vox)->excludes(t_vox);
  l_mm->excludes(s_vox)->excludes(l_vox)->excludes(t_vox);
  t_mm->excludes(s_vox)->excludes(l_vox)->excludes(t_vox);
  fl->add_option("--cutoff", ff.cutoff, "Truncation in units of sigma");
  fl->add_option("--kernel", ff.kernel, "Laws combination, e.g. L5E5E5");
  fl->add_option("--energy-delta-vox", ff.energy_delta_vox, "Laws energy distance");
  fl->add_option("--gamma", ff.gamma);
  fl->add_option("--theta-rad", ff.theta_rad);
  fl->add_option("--dtheta-rad", ff.dtheta_rad);
  fl->add_flag("--orthogonal-planes", ff.orthogonal_planes);
  fl->add_option("--wavelet", ff.wavelet, "haar|db2|db3|shannon|simoncelli");
  fl->add_option("--level", ff.level);
  fl->add_option("--subband", ff.subband, "e.g. LLH");
  fl->add_flag("--decimated", ff.decimated);
  fl->add_flag("--force-multilevel-invariance", ff.force_multilevel);
  fl->add_option("--riesz-l", ff.riesz_l, "e.g. 0,2,0");
  fl->add_flag("--align", ff.align);
  fl->add_option("--align-criterion", ff.align_criterion, "largest|smallest");
  fl->add_option("--invariance", ff.invariance, "none|right_angle|orientations");
  fl->add_option("--pooling", ff.pooling, "max|average");
  fl->add_option("--via", ff.via, "spatial|fourier|auto");
  fl->add_option("--boundary", fl_boundary, "constant|nearest|periodise|mirror");
  fl->add_option("--boundary-constant", fl_constant);
  fl->add_option("--mode", fl_mode, "2D (slice-wise) or 3D");
  fl->add_option("--datatype", fl_type, "f32|f64");

  // run
  auto* rn = app.add_subcommand("run", "Run a processing configuration");
  std::string rn_config, rn_image, rn_mask, rn_out, rn_type = "f32";
  rn->add_option("--config", rn_config)->required();
  rn->add_option("--image", rn_image)->required();
  rn->add_option("--mask", rn_mask)->required();
  rn->add_option("--out", rn_out, "Output directory")->required();
  rn->add_option("--datatype", rn_type, "f32|f64");

  // features
  auto* ft = app.add_subcommand("features", "Intensity statistics of a map inside a mask");
  std::string ft_image, ft_mask, ft_out, ft_id = "";
  ft->add_option("--image", ft_image)->required();
  ft->add_option("--mask", ft_mask, "Mask NIfTI (default: whole image)");
  ft->add_option("--test-id", ft_id);
  ft->add_option("--out", ft_out, "CSV (.csv) or JSON (.json); default stdout CSV");

  // compare
  auto* cp = app.add_subcommand("compare", "Voxel-wise comparison against a reference map");
  std::string cp_cand, cp_ref, cp_diff;
  double cp_abs = 0.0, cp_rel = 0.0;
  bool cp_strict = false;
  cp->add_option("--candidate", cp_cand)->required();
  cp->add_option("--reference", cp_ref)->required();
  cp->add_option("--abs-tol", cp_abs);
  cp->add_option("--rel-tol", cp_rel);
  cp->add_option("--diff", cp_diff, "Write |candidate - reference| here");
  cp->add_flag("--strict", cp_strict, "Exit with status 2 unless every voxel passes");

  // consensus
  auto* cs = app.add_subcommand("consensus", "Consensus across submitted maps or team counts");
  std::vector<std::string> cs_maps, cs_labels;
  std::string cs_out, cs_centroid;
  std::optional<std::size_t> cs_matching, cs_total;
  cs->add_option("--maps", cs_maps, "Submitted response maps");
  cs->add_option("--labels", cs_labels, "Labels for the maps");
  cs->add_option("--out", cs_out, "CSV with distances, outliers and PCA coordinates");
  cs->add_option("--centroid", cs_centroid, "Write the centroid map here");
  cs->add_option("--matching", cs_matching, "Number of matching teams");
  cs->add_option("--total", cs_total, "Number of teams");

  CLI11_PARSE(app, argc, argv);

  try {
    const int t = threads > 0 ? threads : threads_from_env();
    if (t > 0) omp_set_num_threads(t);

    if (*ph) {
      const auto img = generate_phantom(parse_phantom(ph_kind), ph_seed);
      ensure_parent(ph_out);
      write_nifti(img, ph_out, datatype_or_default(ph_type));
      summary(img);
    } else if (*fl) {
      FilterSpec spec;
      if (!fl_filter_json.empty()) {
        std::ifstream in(fl_filter_json);
        if (!in) throw IoError("filter file not found: " + fl_filter_json);
        spec = parse_filter_json(std::string(std::istreambuf_iterator<char>(in), {}));
      } else {
        if (ff.family.empty()) throw InvalidArgument("--filter or --filter-json is required");
        spec = parse_filter_json(ff.to_json().dump());
      }
      int mode;
      if (fl_mode == "2D") mode = 2;
      else if (fl_mode == "3D") mode = 3;
      else throw InvalidArgument("--mode must be 2D or 3D");
      const auto img = read_nifti(fl_image).image;
      std::vector<std::string> log;
      const auto r = apply_filter(img, spec, parse_boundary(fl_boundary, fl_constant), mode, &log);
      print_log(log);
      ensure_parent(fl_out);
      write_nifti(r, fl_out, datatype_or_default(fl_type));
      summary(r);
    } else if (*rn) {
      const auto cfg = load_config(rn_config);
      const auto img = read_nifti(rn_image).image;
      const auto mask = read_nifti_mask(rn_mask);
      const auto r = run_configuration(img, mask, cfg);
      print_log(r.log);
      const fs::path dir(rn_out);
      fs::create_directories(dir);
      const std::string id = cfg.filter.test_id.empty() ? "run" : cfg.filter.test_id;
      write_nifti(r.response, dir / (id + "_response.nii.gz"), datatype_or_default(rn_type));
      std::ostringstream csv;
      auto all = r.features;
      const auto diag = r.diagnostics.as_features();
      all.insert(all.end(), diag.begin(), diag.end());
      write_features_csv(csv, id, all);
      write_text(dir / (id + "_features.csv"), csv.str());
      write_text(dir / (id + "_features.json"), features_json(id, all));
      write_text(dir / (id + "_config.json"), config_to_json(cfg));
      summary(r.response);
    } else if (*ft) {
      const auto img = read_nifti(ft_image).image;
      const auto mask = ft_mask.empty() ? RoiMask::filled(img.grid(), true) : read_nifti_mask(ft_mask);
      const auto f = intensity_statistics(img, mask);
      if (ft_out.empty()) {
        write_features_csv(std::cout, ft_id, f);
      } else if (fs::path(ft_out).extension() == ".json") {
        write_text(ft_out, features_json(ft_id, f));
      } else {
        std::ostringstream csv;
        write_features_csv(csv, ft_id, f);
        write_text(ft_out, csv.str());
      }
    } else if (*cp) {
      const auto c = read_nifti(cp_cand).image;
      const auto r = read_nifti(cp_ref).image;
      const auto m = compare_maps(c, r, cp_abs, cp_rel);
      double worst = 0.0;
      for (double d : m.diff.values()) worst = std::max(worst, d);
      std::printf("voxels=%zu passing=%zu fraction=%.9g max_abs_diff=%.9g\n", m.diff.size(), m.passing.count(),
                  m.pass_fraction, worst);
      if (!cp_diff.empty()) {
        ensure_parent(cp_diff);
        write_nifti(m.diff, cp_diff, NiftiDatatype::f64);
      }
      if (cp_strict && m.pass_fraction < 1.0) return 2;
    } else if (*cs) {
      if (cs_matching || cs_total) {
        if (!cs_matching || !cs_total) throw InvalidArgument("--matching and --total go together");
        const auto g = consensus_level(*cs_matching, *cs_total);
        std::printf("level=%s valid=%s\n", std::string(to_string(g.level)).c_str(), g.valid ? "yes" : "no");
      }
      if (!cs_maps.empty()) {
        std::vector<VolumeImage> maps;
        for (const auto& p : cs_maps) maps.push_back(read_nifti(p).image);
        std::vector<std::string> labels = cs_labels;
        if (labels.empty())
          for (const auto& p : cs_maps) labels.push_back(fs::path(p).filename().string());
        const auto rep = consensus(maps);
        std::ostringstream csv;
        write_consensus_csv(csv, rep, labels);
        if (cs_out.empty()) std::cout << csv.str();
        else write_text(cs_out, csv.str());
        if (!cs_centroid.empty()) {
          ensure_parent(cs_centroid);
          write_nifti(rep.centroid, cs_centroid, NiftiDatatype::f64);
        }
        std::size_t n_out = 0;
        for (bool o : rep.outliers) n_out += o;
        std::printf("submissions=%zu outliers=%zu\n", maps.size(), n_out);
      } else if (!cs_matching) {
        throw InvalidArgument("give --maps or --matching/--total");
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
