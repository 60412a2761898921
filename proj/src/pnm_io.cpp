#include "pnm_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>

namespace stereo {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path);
  return bytes;
}

// Cursor over an in-memory file; keeps exact byte offsets for error reports.
struct Cursor {
  const std::string& bytes;
  std::size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }
  char peek() const { return bytes[pos]; }

  // Skips whitespace and '#' comments (PNM header syntax).
  void skip_separators() {
    while (!eof()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (!eof() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        ++pos;
      } else {
        break;
      }
    }
  }

  long parse_uint(const char* what) {
    skip_separators();
    if (eof() || bytes[pos] < '0' || bytes[pos] > '9')
      throw ParseError(std::string("expected ") + what, static_cast<long long>(pos));
    long value = 0;
    while (!eof() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1 << 30) throw ParseError(std::string(what) + " out of range", static_cast<long long>(pos));
      ++pos;
    }
    return value;
  }

  double parse_real(const char* what) {
    skip_separators();
    const char* start = bytes.data() + pos;
    char* end = nullptr;
    const double value = std::strtod(start, &end);
    if (end == start) throw ParseError(std::string("expected ") + what, static_cast<long long>(pos));
    pos += static_cast<std::size_t>(end - start);
    return value;
  }
};

float swap_float(float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  u = ((u & 0xff000000u) >> 24) | ((u & 0x00ff0000u) >> 8) | ((u & 0x0000ff00u) << 8) |
      ((u & 0x000000ffu) << 24);
  std::memcpy(&v, &u, 4);
  return v;
}

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
constexpr bool kHostLittle = std::endian::native == std::endian::little;

}  // namespace

Image read_pgm(const std::string& path) {
  const std::string bytes = slurp(path);
  Cursor cur{bytes};
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw ParseError("not a PGM file (want magic P2 or P5)", 0);
  const bool binary = bytes[1] == '5';
  cur.pos = 2;

  const long w = cur.parse_uint("width");
  const long h = cur.parse_uint("height");
  const long maxval = cur.parse_uint("maxval");
  if (w < 1 || h < 1) throw ParseError("image dimensions must be >= 1", static_cast<long long>(cur.pos));
  if (maxval < 1 || maxval > 65535)
    throw ParseError("maxval must be in [1, 65535]", static_cast<long long>(cur.pos));

  Image img(static_cast<int>(h), static_cast<int>(w), 1, 0.0);
  const double scale = 1.0 / static_cast<double>(maxval);
  const std::size_t n = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);

  if (binary) {
    // Exactly one whitespace byte separates the header from raster data.
    if (cur.eof()) throw ParseError("truncated before raster data", static_cast<long long>(cur.pos));
    ++cur.pos;
    const int bytes_per_sample = maxval > 255 ? 2 : 1;
    if (bytes.size() - cur.pos < n * bytes_per_sample)
      throw ParseError("truncated raster data", static_cast<long long>(bytes.size()));
    const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + cur.pos);
    for (std::size_t i = 0; i < n; ++i) {
      long sample;
      if (bytes_per_sample == 2)
        sample = (static_cast<long>(raw[2 * i]) << 8) | raw[2 * i + 1];  // big-endian per PNM
      else
        sample = raw[i];
      if (sample > maxval)
        throw ParseError("sample exceeds maxval",
                         static_cast<long long>(cur.pos + i * bytes_per_sample));
      img.v[i] = sample * scale;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const long sample = cur.parse_uint("sample");
      if (sample > maxval) throw ParseError("sample exceeds maxval", static_cast<long long>(cur.pos));
      img.v[i] = sample * scale;
    }
  }
  return img;
}

void write_pgm(const Image& img, const std::string& path) {
  if (img.channels != 1) throw ConfigError("PGM writer expects a grayscale image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "P5\n" << img.w << " " << img.h << "\n255\n";
  for (double v : img.v) {
    const double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    out.put(static_cast<char>(std::lround(clamped * 255.0)));
  }
  if (!out) throw IoError("write failure on " + path);
}

DisparityMap read_pfm(const std::string& path) {
  const std::string bytes = slurp(path);
  if (bytes.size() < 2 || bytes[0] != 'P')
    throw ParseError("not a PFM file", 0);
  if (bytes[1] == 'F') throw ParseError("color PFM is not supported (want grayscale Pf)", 1);
  if (bytes[1] != 'f') throw ParseError("not a PFM file (want magic Pf)", 1);
  Cursor cur{bytes};
  cur.pos = 2;
  const long w = cur.parse_uint("width");
  const long h = cur.parse_uint("height");
  const double scale = cur.parse_real("scale");
  if (w < 1 || h < 1) throw ParseError("image dimensions must be >= 1", static_cast<long long>(cur.pos));
  if (scale == 0.0) throw ParseError("scale must be nonzero", static_cast<long long>(cur.pos));
  if (cur.eof()) throw ParseError("truncated before raster data", static_cast<long long>(cur.pos));
  ++cur.pos;  // single separator byte

  const std::size_t n = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  if (bytes.size() - cur.pos < n * 4)
    throw ParseError("truncated raster data", static_cast<long long>(bytes.size()));

  const bool file_little = scale < 0.0;
  DisparityMap map(static_cast<int>(h), static_cast<int>(w), 0.0, true);
  const char* raw = bytes.data() + cur.pos;
  for (long row = 0; row < h; ++row) {
    const long y = h - 1 - row;  // PFM rows run bottom-to-top
    for (long x = 0; x < w; ++x) {
      float sample;
      std::memcpy(&sample, raw + (static_cast<std::size_t>(row) * w + x) * 4, 4);
      if (file_little != kHostLittle) sample = swap_float(sample);
      if (sample == std::numeric_limits<float>::infinity()) {
        map.set_valid(static_cast<int>(y), static_cast<int>(x), false);
        map.at(static_cast<int>(y), static_cast<int>(x)) = 0.0;
      } else if (!std::isfinite(sample)) {
        throw ParseError("non-finite sample that is not the +inf mask sentinel",
                         static_cast<long long>(cur.pos + (static_cast<std::size_t>(row) * w + x) * 4));
      } else {
        map.at(static_cast<int>(y), static_cast<int>(x)) = sample;
      }
    }
  }
  return map;
}

void write_pfm(const DisparityMap& map, const std::string& path) {
  for (std::size_t i = 0; i < map.v.size(); ++i)
    if (map.mask[i] && !std::isfinite(map.v[i]))
      throw NumericError("cannot write non-finite disparity value");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "Pf\n" << map.w << " " << map.h << "\n-1.0\n";
  for (int row = 0; row < map.h; ++row) {
    const int y = map.h - 1 - row;
    for (int x = 0; x < map.w; ++x) {
      float sample = map.valid(y, x) ? static_cast<float>(map.at(y, x))
                                     : std::numeric_limits<float>::infinity();
      if constexpr (!kHostLittle) sample = swap_float(sample);
      out.write(reinterpret_cast<const char*>(&sample), 4);
    }
  }
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace stereo
