#include "rfilt/nifti.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "rfilt/error.hpp"

namespace rfilt {

namespace {

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kDataOffset = 352;

using Bytes = std::vector<std::uint8_t>;

std::size_t bytes_per_voxel(NiftiDatatype t) {
  switch (t) {
    case NiftiDatatype::u8: return 1;
    case NiftiDatatype::i16: return 2;
    case NiftiDatatype::i32: return 4;
    case NiftiDatatype::f32: return 4;
    case NiftiDatatype::f64: return 8;
  }
  return 0;
}

bool known_datatype(std::int16_t code) {
  return code == 2 || code == 4 || code == 8 || code == 16 || code == 64;
}

class Reader {
 public:
  Reader(const Bytes& b, bool swap) : b_(b), swap_(swap) {}
  template <class T>
  T get(std::size_t off) const {
    T v;
    std::array<std::uint8_t, sizeof(T)> raw;
    std::memcpy(raw.data(), b_.data() + off, sizeof(T));
    if (swap_) std::reverse(raw.begin(), raw.end());
    std::memcpy(&v, raw.data(), sizeof(T));
    return v;
  }

 private:
  const Bytes& b_;
  bool swap_;
};

template <class T>
void put(Bytes& b, std::size_t off, T v) {
  std::memcpy(b.data() + off, &v, sizeof(T));
}

Bytes read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw IoError("file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

Bytes gunzip(const Bytes& src, const std::string& name) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw IoError("zlib initialisation failed");
  Bytes out;
  std::array<std::uint8_t, 1 << 16> chunk;
  zs.next_in = const_cast<Bytef*>(src.data());
  zs.avail_in = static_cast<uInt>(src.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk.data();
    zs.avail_out = chunk.size();
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc == Z_STREAM_END && zs.avail_in > 0) {
      // concatenated gzip members
      out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
      inflateReset(&zs);
      rc = Z_OK;
      continue;
    }
    if (rc == Z_BUF_ERROR || (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0)) {
      inflateEnd(&zs);
      throw TruncatedFileError(name + ": compressed stream ends early");
    }
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw FormatError(name + ": corrupt gzip stream");
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
  }
  inflateEnd(&zs);
  return out;
}

Bytes gzip(const Bytes& src) {
  z_stream zs{};
  // default gzip header: no name, mtime 0, so output is reproducible
  if (deflateInit2(&zs, 6, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw IoError("zlib initialisation failed");
  Bytes out(deflateBound(&zs, src.size()) + 32);
  zs.next_in = const_cast<Bytef*>(src.data());
  zs.avail_in = static_cast<uInt>(src.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw IoError("gzip compression failed");
  out.resize(zs.total_out);
  return out;
}

bool ends_with_gz(const std::filesystem::path& p) {
  const auto s = p.string();
  return s.size() >= 3 && s.compare(s.size() - 3, 3, ".gz") == 0;
}

double integral_value(double v, double lo, double hi, const std::string& type) {
  if (!std::isfinite(v)) throw InvalidArgument("non-finite value cannot be stored as " + type);
  const double r = std::round(v);
  if (r < lo || r > hi) throw InvalidArgument("value " + std::to_string(v) + " out of range for " + type);
  return r;
}

}  // namespace

NiftiDatatype parse_nifti_datatype(std::string_view name) {
  if (name == "u8" || name == "uint8") return NiftiDatatype::u8;
  if (name == "i16" || name == "int16") return NiftiDatatype::i16;
  if (name == "i32" || name == "int32") return NiftiDatatype::i32;
  if (name == "f32" || name == "float32") return NiftiDatatype::f32;
  if (name == "f64" || name == "float64") return NiftiDatatype::f64;
  throw InvalidArgument("unsupported datatype '" + std::string(name) + "'");
}

std::string_view to_string(NiftiDatatype t) {
  switch (t) {
    case NiftiDatatype::u8: return "u8";
    case NiftiDatatype::i16: return "i16";
    case NiftiDatatype::i32: return "i32";
    case NiftiDatatype::f32: return "f32";
    case NiftiDatatype::f64: return "f64";
  }
  return "?";
}

NiftiVolume read_nifti(const std::filesystem::path& path, const NiftiReadOptions& options) {
  const std::string name = path.string();
  Bytes bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) bytes = gunzip(bytes, name);
  if (bytes.size() < 4) throw TruncatedFileError(name + ": file shorter than a NIfTI header");

  std::int32_t sizeof_hdr;
  std::memcpy(&sizeof_hdr, bytes.data(), 4);
  bool swap = false;
  if (sizeof_hdr != static_cast<std::int32_t>(kHeaderSize)) {
    const auto swapped = static_cast<std::int32_t>(__builtin_bswap32(static_cast<std::uint32_t>(sizeof_hdr)));
    if (swapped == static_cast<std::int32_t>(kHeaderSize)) swap = true;
    else if (sizeof_hdr == 540 || swapped == 540) throw BadMagicError(name + ": NIfTI-2 files are not supported");
    else throw BadMagicError(name + ": not a NIfTI-1 file (sizeof_hdr " + std::to_string(sizeof_hdr) + ")");
  }
  if (bytes.size() < kHeaderSize) throw TruncatedFileError(name + ": header is truncated");
  if (std::memcmp(bytes.data() + 344, "n+1\0", 4) != 0) {
    if (std::memcmp(bytes.data() + 344, "ni1\0", 4) == 0)
      throw BadMagicError(name + ": paired .hdr/.img files are not supported");
    throw BadMagicError(name + ": bad NIfTI magic");
  }

  const Reader r(bytes, swap);
  NiftiVolume out;
  NiftiHeaderView& h = out.header;
  const auto ndim = r.get<std::int16_t>(40);
  if (ndim < 1 || ndim > 7) throw FormatError(name + ": invalid dim[0] " + std::to_string(ndim));
  for (int a = 4; a <= ndim; ++a)
    if (r.get<std::int16_t>(40 + 2 * a) > 1) throw FormatError(name + ": only 1 to 3 dimensional volumes are supported");
  h.rank = std::min<int>(ndim, 3);
  for (int a = 0; a < 3; ++a) {
    const auto d = a < h.rank ? r.get<std::int16_t>(42 + 2 * a) : std::int16_t{1};
    if (d < 1) throw FormatError(name + ": non-positive extent along axis " + std::to_string(a));
    h.dims[a] = static_cast<std::size_t>(d);
    const float p = a < h.rank ? r.get<float>(80 + 4 * a) : 1.0f;
    h.pixdim[a] = (std::isfinite(p) && p > 0) ? p : 1.0;
  }
  const auto code = r.get<std::int16_t>(70);
  if (!known_datatype(code))
    throw UnsupportedDatatypeError(name + ": unsupported datatype code " + std::to_string(code));
  h.datatype = static_cast<NiftiDatatype>(code);
  h.scl_slope = r.get<float>(112);
  h.scl_inter = r.get<float>(116);
  h.qfac = r.get<float>(76);
  h.dim_info = bytes[39];
  h.xyzt_units = bytes[123];
  h.qform_code = r.get<std::int16_t>(252);
  h.sform_code = r.get<std::int16_t>(254);
  for (int i = 0; i < 3; ++i) {
    h.quatern[i] = r.get<float>(256 + 4 * i);
    h.qoffset[i] = r.get<float>(268 + 4 * i);
    for (int j = 0; j < 4; ++j) h.srow[i][j] = r.get<float>(280 + 16 * i + 4 * j);
  }

  const float vox_offset = r.get<float>(108);
  if (!(vox_offset >= static_cast<float>(kHeaderSize)) || vox_offset != std::floor(vox_offset))
    throw FormatError(name + ": invalid vox_offset");
  const auto start = static_cast<std::size_t>(vox_offset);
  const std::size_t n = h.dims[0] * h.dims[1] * h.dims[2];
  const std::size_t bpv = bytes_per_voxel(h.datatype);
  const std::size_t need = start + n * bpv;
  if (bytes.size() < need)
    throw TruncatedFileError(name + ": payload has " + std::to_string(bytes.size() - std::min(bytes.size(), start)) +
                             " bytes, dims require " + std::to_string(n * bpv));
  if (bytes.size() > need)
    throw FormatError(name + ": payload larger than dims imply (" + std::to_string(bytes.size() - start) +
                      " vs " + std::to_string(n * bpv) + " bytes)");

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t off = start + i * bpv;
    switch (h.datatype) {
      case NiftiDatatype::u8: values[i] = bytes[off]; break;
      case NiftiDatatype::i16: values[i] = r.get<std::int16_t>(off); break;
      case NiftiDatatype::i32: values[i] = r.get<std::int32_t>(off); break;
      case NiftiDatatype::f32: values[i] = r.get<float>(off); break;
      case NiftiDatatype::f64: values[i] = r.get<double>(off); break;
    }
  }
  if (h.scl_slope != 0.0 && std::isfinite(h.scl_slope) && std::isfinite(h.scl_inter) &&
      !(h.scl_slope == 1.0 && h.scl_inter == 0.0))
    for (double& v : values) v = v * h.scl_slope + h.scl_inter;
  if (options.round_intensities)
    for (double& v : values) v = std::round(v);

  Grid g;
  g.rank = h.rank;
  g.dims = h.dims;
  g.spacing = h.pixdim;
  g.validate();
  out.image = VolumeImage(g, std::move(values));
  return out;
}

RoiMask read_nifti_mask(const std::filesystem::path& path) {
  const auto v = read_nifti(path);
  std::vector<std::uint8_t> m(v.image.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = v.image[i] != 0.0;
  return RoiMask(v.image.grid(), std::move(m));
}

void write_nifti(const VolumeImage& image, const std::filesystem::path& path, NiftiDatatype type,
                 const NiftiHeaderView* orientation) {
  const Grid& g = image.grid();
  for (int a = 0; a < 3; ++a)
    if (g.dims[a] > static_cast<std::size_t>(std::numeric_limits<std::int16_t>::max()))
      throw InvalidArgument("extent too large for NIfTI-1");
  const std::size_t n = image.size();
  const std::size_t bpv = bytes_per_voxel(type);
  Bytes b(kDataOffset + n * bpv, 0);

  put<std::int32_t>(b, 0, static_cast<std::int32_t>(kHeaderSize));
  b[38] = 'r';
  put<std::int16_t>(b, 40, static_cast<std::int16_t>(g.rank));
  for (int a = 0; a < 7; ++a)
    put<std::int16_t>(b, 42 + 2 * a, a < 3 ? static_cast<std::int16_t>(g.dims[a]) : std::int16_t{1});
  put<std::int16_t>(b, 70, static_cast<std::int16_t>(type));
  put<std::int16_t>(b, 72, static_cast<std::int16_t>(8 * bpv));
  put<float>(b, 76, orientation ? orientation->qfac : 1.0f);
  for (int a = 0; a < 7; ++a) put<float>(b, 80 + 4 * a, a < 3 ? static_cast<float>(g.spacing[a]) : 1.0f);
  put<float>(b, 108, static_cast<float>(kDataOffset));
  put<float>(b, 112, 1.0f);
  put<float>(b, 116, 0.0f);
  b[123] = orientation ? orientation->xyzt_units : 2;
  if (orientation) {
    b[39] = orientation->dim_info;
    put<std::int16_t>(b, 252, orientation->qform_code);
    put<std::int16_t>(b, 254, orientation->sform_code);
    for (int i = 0; i < 3; ++i) {
      put<float>(b, 256 + 4 * i, orientation->quatern[i]);
      put<float>(b, 268 + 4 * i, orientation->qoffset[i]);
      for (int j = 0; j < 4; ++j) put<float>(b, 280 + 16 * i + 4 * j, orientation->srow[i][j]);
    }
  }
  std::memcpy(b.data() + 344, "n+1\0", 4);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = image[i];
    const std::size_t off = kDataOffset + i * bpv;
    switch (type) {
      case NiftiDatatype::u8: b[off] = static_cast<std::uint8_t>(integral_value(v, 0, 255, "u8")); break;
      case NiftiDatatype::i16: put<std::int16_t>(b, off, static_cast<std::int16_t>(integral_value(v, -32768, 32767, "i16"))); break;
      case NiftiDatatype::i32: put<std::int32_t>(b, off, static_cast<std::int32_t>(integral_value(v, -2147483648.0, 2147483647.0, "i32"))); break;
      case NiftiDatatype::f32: put<float>(b, off, static_cast<float>(v)); break;
      case NiftiDatatype::f64: put<double>(b, off, v); break;
    }
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo <= hi) {
    put<float>(b, 124, static_cast<float>(hi));
    put<float>(b, 128, static_cast<float>(lo));
  }

  const Bytes& payload = ends_with_gz(path) ? gzip(b) : b;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_nifti(const RoiMask& mask, const std::filesystem::path& path, const NiftiHeaderView* orientation) {
  std::vector<double> v(mask.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask[i] ? 1.0 : 0.0;
  write_nifti(VolumeImage(mask.grid(), std::move(v)), path, NiftiDatatype::u8, orientation);
}

}  // namespace rfilt
