#include "rfilt/riesz.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "rfilt/error.hpp"
#include "rfilt/fft.hpp"
#include "rfilt/kernels.hpp"

namespace rfilt {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::complex<double> minus_j_pow(int n) {
  static const std::complex<double> table[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  return table[n % 4];
}

ComplexVolume spectrum(const VolumeImage& image) {
  ComplexVolume f = ComplexVolume::from_real(image);
  fft::forward(f);
  return f;
}

VolumeImage filter_spectrum(const ComplexVolume& spec, const TransferFunction& t) {
  ComplexVolume f = spec;
  for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] *= t.values[i];
  fft::inverse(f);
  return f.real_part();
}

}  // namespace

int RieszIndex::order() const {
  int s = 0;
  for (int i = 0; i < rank; ++i) s += l[i];
  return s;
}

double RieszIndex::multinomial() const {
  double d = 1.0;
  for (int i = 0; i < rank; ++i) d *= factorial(l[i]);
  return std::sqrt(factorial(order()) / d);
}

std::string RieszIndex::to_string() const {
  std::string s = "(";
  for (int i = 0; i < rank; ++i) s += (i ? "," : "") + std::to_string(l[i]);
  return s + ")";
}

RieszIndex parse_riesz_index(std::string_view text) {
  RieszIndex idx;
  int n = 0;
  std::string cur;
  auto flush = [&] {
    if (cur.empty() || n >= 3) throw InvalidArgument("malformed Riesz index '" + std::string(text) + "'");
    for (char c : cur)
      if (c < '0' || c > '9') throw InvalidArgument("malformed Riesz index '" + std::string(text) + "'");
    idx.l[n++] = std::stoi(cur);
    cur.clear();
  };
  for (char c : text) {
    if (c == '(' || c == ')' || c == ' ') continue;
    if (c == ',') flush();
    else cur += c;
  }
  flush();
  if (n < 2) throw InvalidArgument("Riesz index needs 2 or 3 components");
  idx.rank = n;
  if (idx.order() < 1) throw InvalidArgument("Riesz index must have order at least 1");
  return idx;
}

std::vector<RieszIndex> riesz_indices(int rank, int order) {
  if (rank < 1 || rank > 3) throw InvalidArgument("rank must be 1, 2 or 3");
  if (order < 1) throw InvalidArgument("Riesz order must be at least 1");
  std::vector<RieszIndex> out;
  RieszIndex idx;
  idx.rank = rank;
  auto rec = [&](auto&& self, int axis, int left) -> void {
    if (axis == rank - 1) {
      idx.l[axis] = left;
      out.push_back(idx);
      return;
    }
    for (int v = left; v >= 0; --v) {
      idx.l[axis] = v;
      self(self, axis + 1, left - v);
    }
  };
  rec(rec, 0, order);
  return out;
}

TransferFunction riesz_transfer(const Grid& grid, const RieszIndex& index) {
  if (index.rank != grid.rank) throw InvalidArgument("Riesz index rank does not match the grid");
  const int L = index.order();
  if (L < 1) throw InvalidArgument("Riesz index must have order at least 1");
  for (int i = 0; i < index.rank; ++i)
    if (index.l[i] < 0) throw InvalidArgument("Riesz index components must be non-negative");
  const auto fg = fourier_grid(grid);
  const std::complex<double> coef = minus_j_pow(L) * index.multinomial();
  TransferFunction t{grid, std::vector<std::complex<double>>(grid.voxel_count())};
  for (std::size_t n3 = 0; n3 < grid.dims[2]; ++n3)
    for (std::size_t n2 = 0; n2 < grid.dims[1]; ++n2)
      for (std::size_t n1 = 0; n1 < grid.dims[0]; ++n1) {
        const double nu[3] = {fg.nu[0][n1], fg.nu[1][n2], fg.nu[2][n3]};
        const double r = fg.norm(n1, n2, n3);
        if (r == 0.0) continue;
        double p = 1.0;
        for (int i = 0; i < index.rank; ++i) p *= std::pow(nu[i] / r, index.l[i]);
        t.values[grid.offset(n1, n2, n3)] = coef * p;
      }
  return t;
}

ResponseMap riesz_filtered_map(const VolumeImage& image, const RadialProfile& profile,
                               const RieszIndex& index) {
  TransferFunction t = riesz_transfer(image.grid(), index);
  t *= radial_transfer(profile, image.grid());
  return convolve_fourier(image, t);
}

ResponseMap fourier_derivative(const VolumeImage& image, int axis, int order) {
  if (axis < 0 || axis >= image.rank()) throw InvalidArgument("derivative axis out of range");
  if (order < 1) throw InvalidArgument("derivative order must be at least 1");
  const Grid& g = image.grid();
  const auto fg = fourier_grid(g);
  const std::complex<double> jpow = std::pow(std::complex<double>(0, 1), order);
  TransferFunction t{g, std::vector<std::complex<double>>(g.voxel_count())};
  for (std::size_t n3 = 0; n3 < g.dims[2]; ++n3)
    for (std::size_t n2 = 0; n2 < g.dims[1]; ++n2)
      for (std::size_t n1 = 0; n1 < g.dims[0]; ++n1) {
        const std::size_t n[3] = {n1, n2, n3};
        t.values[g.offset(n1, n2, n3)] = jpow * std::pow(fg.nu[axis][n[axis]], order);
      }
  return filter_spectrum(spectrum(image), t);
}

double StructureTensorField::at(std::size_t voxel, int i, int j) const {
  if (i > j) std::swap(i, j);
  const int d = grid.rank;
  const int slot = i * d - i * (i - 1) / 2 + (j - i);
  return components[slot][voxel];
}

StructureTensorField structure_tensor(const VolumeImage& image, const RadialProfile& profile,
                                      double sigma_mm, const BoundaryMode& boundary) {
  if (!(sigma_mm > 0.0)) throw InvalidArgument("tensor sigma must be positive");
  const Grid& g = image.grid();
  const int d = g.rank;
  const auto spec = spectrum(image);
  const auto band = radial_transfer(profile, g);
  std::vector<VolumeImage> r;
  for (const auto& idx : riesz_indices(d, 1)) {
    TransferFunction t = riesz_transfer(g, idx);
    t *= band;
    r.push_back(filter_spectrum(spec, t));
  }
  SeparableKernel smooth;
  for (int a = 0; a < d; ++a) smooth.axes.push_back(gaussian_1d(sigma_mm / g.spacing[a], 4.0, true));

  StructureTensorField field{g, sigma_mm, {}};
  const std::size_t n = g.voxel_count();
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      std::vector<double> prod(n);
      for (std::size_t v = 0; v < n; ++v) prod[v] = r[i][v] * r[j][v];
      field.components.push_back(convolve_separable(VolumeImage(g, std::move(prod)), smooth, boundary));
    }
  return field;
}

AlignCriterion parse_align_criterion(std::string_view name) {
  if (name == "largest" || name == "max") return AlignCriterion::largest;
  if (name == "smallest" || name == "min") return AlignCriterion::smallest;
  throw InvalidArgument("unknown alignment criterion '" + std::string(name) + "'");
}

namespace {

constexpr double kTieTolerance = 1e-10;

template <int D>
std::array<double, 3> principal_direction_impl(const std::array<std::array<double, 3>, 3>& m,
                                               AlignCriterion criterion) {
  using Mat = Eigen::Matrix<double, D, D>;
  using Vec = Eigen::Matrix<double, D, 1>;
  Mat a;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) a(i, j) = m[i][j];
  Eigen::SelfAdjointEigenSolver<Mat> es;
  es.computeDirect(a);
  const Vec lam = es.eigenvalues();  // ascending
  const Mat vec = es.eigenvectors();
  const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  const bool largest = criterion == AlignCriterion::largest;
  const int pick = largest ? D - 1 : 0;

  // Eigenspace of the selected eigenvalue, up to the tie tolerance.
  std::vector<int> others;
  for (int k = 0; k < D; ++k)
    if (std::abs(lam(k) - lam(pick)) > kTieTolerance * scale) others.push_back(k);

  Vec u;
  if (static_cast<int>(others.size()) == D - 1) {
    u = vec.col(pick);
  } else {
    // Project the coordinate axes onto the eigenspace (orthogonal complement of
    // the separated eigenvectors) and keep the first that survives.
    u.setZero();
    for (int axis = 0; axis < D; ++axis) {
      Vec e = Vec::Zero();
      e(axis) = 1.0;
      for (int k : others) e -= vec.col(k).dot(e) * vec.col(k);
      if (e.norm() > 1e-6) {
        u = e.normalized();
        break;
      }
    }
  }
  for (int i = 0; i < D; ++i) {
    if (std::abs(u(i)) > 1e-12) {
      if (u(i) < 0) u = -u;
      break;
    }
  }
  std::array<double, 3> out{};
  for (int i = 0; i < D; ++i) out[i] = u(i);
  return out;
}

}  // namespace

std::array<double, 3> principal_direction(const std::array<std::array<double, 3>, 3>& m, int rank,
                                          AlignCriterion criterion) {
  if (rank == 2) return principal_direction_impl<2>(m, criterion);
  if (rank == 3) return principal_direction_impl<3>(m, criterion);
  throw InvalidArgument("principal direction needs rank 2 or 3");
}

RieszResponses riesz_bank(const VolumeImage& image, const RadialProfile& profile, int order) {
  const Grid& g = image.grid();
  const auto spec = spectrum(image);
  const auto band = radial_transfer(profile, g);
  RieszResponses out;
  out.indices = riesz_indices(g.rank, order);
  for (const auto& idx : out.indices) {
    TransferFunction t = riesz_transfer(g, idx);
    t *= band;
    out.maps.push_back(filter_spectrum(spec, t));
  }
  return out;
}

ResponseMap align_order2(const RieszResponses& responses, const StructureTensorField& tensors,
                         AlignCriterion criterion) {
  const Grid& g = tensors.grid;
  const int d = g.rank;
  if (d < 2) throw InvalidArgument("alignment needs a 2-D or 3-D grid");
  const auto expected = riesz_indices(d, 2);
  if (responses.indices.size() != responses.maps.size())
    throw InvalidArgument("Riesz responses and indices differ in count");
  std::vector<const ResponseMap*> maps(expected.size(), nullptr);
  for (std::size_t k = 0; k < responses.indices.size(); ++k) {
    for (std::size_t e = 0; e < expected.size(); ++e)
      if (responses.indices[k] == expected[e]) maps[e] = &responses.maps[k];
  }
  for (std::size_t e = 0; e < expected.size(); ++e) {
    if (!maps[e])
      throw InvalidArgument("incomplete order-2 Riesz set: missing " + expected[e].to_string());
    if (!maps[e]->grid().same_dims(g)) throw InvalidArgument("Riesz maps do not match the tensor grid");
  }
  std::vector<double> weight(expected.size());
  for (std::size_t e = 0; e < expected.size(); ++e) weight[e] = expected[e].multinomial();

  const std::size_t n = g.voxel_count();
  std::vector<double> out(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t vi = 0; vi < static_cast<std::ptrdiff_t>(n); ++vi) {
    const std::size_t v = static_cast<std::size_t>(vi);
    std::array<std::array<double, 3>, 3> m{};
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m[i][j] = tensors.at(v, i, j);
    const auto u = principal_direction(m, d, criterion);
    double acc = 0.0;
    for (std::size_t e = 0; e < expected.size(); ++e) {
      double p = weight[e];
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < expected[e].l[i]; ++k) p *= u[i];
      acc += p * (*maps[e])[v];
    }
    out[v] = acc;
  }
  return ResponseMap(g, std::move(out));
}

ResponseMap aligned_riesz_map(const VolumeImage& image, const RadialProfile& profile,
                              double sigma_tensor_mm, AlignCriterion criterion) {
  const auto bank = riesz_bank(image, profile, 2);
  const auto tensors = structure_tensor(image, profile, sigma_tensor_mm);
  return align_order2(bank, tensors, criterion);
}

}  // namespace rfilt
