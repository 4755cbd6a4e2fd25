#include "rfilt/rotinv.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "rfilt/error.hpp"

namespace rfilt {

Kernel1D flip_1d(const Kernel1D& kernel) { return {kernel.rbegin(), kernel.rend()}; }

Kernel1D oddify(const Kernel1D& kernel) {
  Kernel1D out = kernel;
  if (out.size() % 2 == 0) out.push_back(0.0);
  return out;
}

std::array<std::array<int, 3>, 3> RightAngleElement::matrix() const {
  std::array<std::array<int, 3>, 3> q{};
  for (int i = 0; i < rank; ++i) q[axes[i].source][i] = axes[i].flip ? -1 : 1;
  for (int i = rank; i < 3; ++i) q[i][i] = 1;
  return q;
}

std::array<int, 3> RightAngleElement::pass_order() const {
  std::array<int, 3> order{0, 1, 2};
  for (int i = 0; i < rank; ++i) order[axes[i].source] = i;
  return order;
}

namespace {

// "Jg3 g2 g1" -> axis assignments
std::array<AxisAssignment, 3> parse_axes(std::string_view spec) {
  std::array<AxisAssignment, 3> out{};
  std::istringstream in{std::string(spec)};
  std::string tok;
  int i = 0;
  while (in >> tok) {
    const bool j = tok[0] == 'J';
    out[i++] = {tok.back() - '1', j};
  }
  return out;
}

struct Row {
  const char* label;
  double a, b, c;
  const char* axes;
};

std::vector<RightAngleElement> build(int rank) {
  const double h = M_PI / 2, p = M_PI, t = 3 * M_PI / 2;
  std::vector<Row> rows;
  if (rank == 2) {
    rows = {{"0", 0, 0, 0, "g1 g2"},
            {"pi/2", h, 0, 0, "Jg2 g1"},
            {"pi", p, 0, 0, "Jg1 Jg2"},
            {"3pi/2", t, 0, 0, "g2 Jg1"}};
  } else {
    rows = {{"(0,0,0)", 0, 0, 0, "g1 g2 g3"},
            {"(0,pi/2,0)", 0, h, 0, "Jg3 g2 g1"},
            {"(0,pi,0)", 0, p, 0, "Jg1 g2 Jg3"},
            {"(0,3pi/2,0)", 0, t, 0, "g3 g2 Jg1"},
            {"(pi/2,0,pi/2)", h, 0, h, "g2 g3 g1"},
            {"(pi/2,0,3pi/2)", h, 0, t, "g2 Jg3 Jg1"},
            {"(pi/2,0,0)", h, 0, 0, "g2 Jg1 g3"},
            {"(pi,0,0)", p, 0, 0, "Jg1 Jg2 g3"},
            {"(3pi/2,0,0)", t, 0, 0, "Jg2 g1 g3"},
            {"(0,pi/2,3pi/2)", 0, h, t, "Jg3 Jg1 g2"},
            {"(0,pi/2,pi)", 0, h, p, "Jg3 Jg2 Jg1"},
            {"(0,pi/2,pi/2)", 0, h, h, "Jg3 g1 Jg2"},
            {"(pi/2,pi,0)", h, p, 0, "Jg2 Jg1 Jg3"},
            {"(pi,pi,0)", p, p, 0, "g1 Jg2 Jg3"},
            {"(3pi/2,pi,0)", t, p, 0, "g2 g1 Jg3"},
            {"(0,3pi/2,pi/2)", 0, t, h, "g3 Jg1 Jg2"},
            {"(0,3pi/2,pi)", 0, t, p, "g3 Jg2 g1"},
            {"(0,3pi/2,3pi/2)", 0, t, t, "g3 g1 g2"},
            {"(pi,0,pi/2)", p, 0, h, "Jg1 g3 g2"},
            {"(3pi/2,0,pi/2)", t, 0, h, "Jg2 g3 Jg1"},
            {"(0,0,pi/2)", 0, 0, h, "g1 g3 Jg2"},
            {"(pi,0,3pi/2)", p, 0, t, "Jg1 Jg3 Jg2"},
            {"(3pi/2,0,3pi/2)", t, 0, t, "Jg2 Jg3 g1"},
            {"(0,0,3pi/2)", 0, 0, t, "g1 Jg3 g2"}};
  }
  std::vector<RightAngleElement> out;
  for (const auto& r : rows) {
    RightAngleElement e;
    e.label = r.label;
    e.angles = {r.a, r.b, r.c};
    e.rank = rank;
    e.axes = parse_axes(r.axes);
    for (int i = rank; i < 3; ++i) e.axes[i] = {i, false};
    out.push_back(e);
  }
  return out;
}

}  // namespace

const std::vector<RightAngleElement>& right_angle_group(int rank) {
  static const std::vector<RightAngleElement> g2 = build(2);
  static const std::vector<RightAngleElement> g3 = build(3);
  if (rank == 2) return g2;
  if (rank == 3) return g3;
  throw InvalidArgument("right-angle groups exist for rank 2 and 3 only");
}

SeparableKernel apply_element(const RightAngleElement& element, const SeparableKernel& kernel) {
  if (static_cast<int>(kernel.axes.size()) != element.rank)
    throw InvalidArgument("kernel axis count does not match the rotation group");
  SeparableKernel out;
  for (int i = 0; i < element.rank; ++i) {
    const auto& a = element.axes[i];
    const Kernel1D g = oddify(kernel.axes[a.source]);
    out.axes.push_back(a.flip ? flip_1d(g) : g);
  }
  return out;
}

namespace {

EquivariantSet make_set(const SeparableKernel& base) {
  const int rank = static_cast<int>(base.axes.size());
  EquivariantSet s;
  s.elements = right_angle_group(rank);
  for (const auto& e : s.elements) s.kernels.push_back(apply_element(e, base));
  return s;
}

}  // namespace

EquivariantSet equivariant_set_2d(const Kernel1D& g1, const Kernel1D& g2) {
  return make_set({{g1, g2}});
}

EquivariantSet equivariant_set_3d(const Kernel1D& g1, const Kernel1D& g2, const Kernel1D& g3) {
  return make_set({{g1, g2, g3}});
}

PoolMode parse_pool(std::string_view name) {
  if (name == "max") return PoolMode::max;
  if (name == "avg" || name == "average" || name == "mean") return PoolMode::average;
  throw InvalidArgument("unknown pooling '" + std::string(name) + "'");
}

namespace {

void accumulate(std::vector<double>& acc, const ResponseMap& r, PoolMode mode) {
  const auto v = r.values();
  if (mode == PoolMode::max) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = std::max(acc[i], v[i]);
  } else {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
}

}  // namespace

ResponseMap pool(const std::vector<ResponseMap>& responses, PoolMode mode) {
  if (responses.empty()) throw InvalidArgument("cannot pool an empty response set");
  const Grid& g = responses.front().grid();
  for (const auto& r : responses)
    if (!r.grid().same_dims(g)) throw InvalidArgument("pooled responses must share extents");
  std::vector<double> acc(responses.front().values().begin(), responses.front().values().end());
  for (std::size_t k = 1; k < responses.size(); ++k) accumulate(acc, responses[k], mode);
  if (mode == PoolMode::average)
    for (auto& x : acc) x /= static_cast<double>(responses.size());
  return ResponseMap(g, std::move(acc), responses.front().value_kind());
}

ResponseMap element_response(const VolumeImage& image, const RightAngleElement& element,
                             const std::vector<SeparableKernel>& stages,
                             const BoundaryMode& boundary) {
  if (image.rank() != element.rank) throw InvalidArgument("image rank does not match the group");
  ResponseMap out = image;
  for (const auto& s : stages)
    out = convolve_separable(out, apply_element(element, s), boundary, element.pass_order());
  return out;
}

std::vector<ResponseMap> equivariant_responses(const VolumeImage& image,
                                               const std::vector<SeparableKernel>& stages,
                                               const BoundaryMode& boundary) {
  std::vector<ResponseMap> out;
  for (const auto& e : right_angle_group(image.rank()))
    out.push_back(element_response(image, e, stages, boundary));
  return out;
}

ResponseMap pooled_equivariant(const VolumeImage& image, const std::vector<SeparableKernel>& stages,
                               const BoundaryMode& boundary, PoolMode mode) {
  const auto& group = right_angle_group(image.rank());
  ResponseMap first = element_response(image, group.front(), stages, boundary);
  std::vector<double> acc(first.values().begin(), first.values().end());
  for (std::size_t k = 1; k < group.size(); ++k)
    accumulate(acc, element_response(image, group[k], stages, boundary), mode);
  if (mode == PoolMode::average)
    for (auto& x : acc) x /= static_cast<double>(group.size());
  return ResponseMap(image.grid(), std::move(acc));
}

std::vector<double> gabor_orientation_set(double dtheta, double span) {
  if (!(dtheta > 0.0) || !(span > 0.0)) throw InvalidArgument("orientation step must be positive");
  const double n = span / dtheta;
  const double rn = std::round(n);
  if (rn < 1.0 || std::abs(n - rn) > 1e-9 * std::max(1.0, n))
    throw InvalidArgument("orientation step must divide the angular span evenly");
  std::vector<double> out;
  for (int i = 0; i < static_cast<int>(rn); ++i) out.push_back(i * dtheta);
  return out;
}

namespace {

struct PlaneAxes {
  int a, b, c;  // in-plane axes (a fastest) and the stacking axis
};

PlaneAxes plane_axes(Plane p) {
  switch (p) {
    case Plane::k1k2: return {0, 1, 2};
    case Plane::k1k3: return {0, 2, 1};
    case Plane::k2k3: return {1, 2, 0};
  }
  return {0, 1, 2};
}

}  // namespace

VolumeImage apply_slicewise(const VolumeImage& volume, Plane plane, const SliceOp& op) {
  const Grid& g = volume.grid();
  if (g.rank != 3) throw InvalidArgument("slice-wise filtering needs a 3-D volume");
  const auto [a, b, c] = plane_axes(plane);
  Grid sg;
  sg.rank = 2;
  sg.dims = {g.dims[a], g.dims[b], 1};
  sg.spacing = {g.spacing[a], g.spacing[b], 1.0};
  const std::size_t sa = g.stride(a), sb = g.stride(b), sc = g.stride(c);

  std::vector<double> out(g.voxel_count());
  ValueKind kind = ValueKind::real;
  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(g.dims[c]);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    try {
      std::vector<double> buf(sg.voxel_count());
      for (std::size_t j = 0; j < sg.dims[1]; ++j)
        for (std::size_t i = 0; i < sg.dims[0]; ++i)
          buf[i + sg.dims[0] * j] = volume[i * sa + j * sb + static_cast<std::size_t>(s) * sc];
      const VolumeImage r = op(VolumeImage(sg, std::move(buf)));
      if (!r.grid().same_dims(sg)) throw InvalidArgument("slice operation changed the slice extents");
      if (s == 0) kind = r.value_kind();
      for (std::size_t j = 0; j < sg.dims[1]; ++j)
        for (std::size_t i = 0; i < sg.dims[0]; ++i)
          out[i * sa + j * sb + static_cast<std::size_t>(s) * sc] = r[i + sg.dims[0] * j];
    } catch (...) {
#pragma omp critical(rfilt_slice_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return VolumeImage(g, std::move(out), kind);
}

VolumeImage orthogonal_plane_average(const VolumeImage& volume, const SliceOp& op) {
  if (volume.rank() != 3) throw InvalidArgument("orthogonal-plane averaging needs a 3-D volume");
  const auto r1 = apply_slicewise(volume, Plane::k1k2, op);
  const auto r2 = apply_slicewise(volume, Plane::k1k3, op);
  const auto r3 = apply_slicewise(volume, Plane::k2k3, op);
  std::vector<double> out(volume.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (r1[i] + r2[i] + r3[i]) / 3.0;
  return VolumeImage(volume.grid(), std::move(out), r1.value_kind());
}

}  // namespace rfilt
