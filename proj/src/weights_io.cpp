#include "weights_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace stereo {

namespace {

constexpr char kMagic[4] = {'S', 'A', 'G', 'W'};
constexpr std::uint16_t kVersion = 1;
constexpr int kLgaKernel = 5;

static_assert(std::endian::native == std::endian::little,
              "weight files are little-endian; add byte swapping for this host");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

void save_params(const LearnedParams& params, const std::string& path) {
  if (params.h < 1 || params.w < 1) throw ConfigError("params need a valid shape");
  if (params.sga.size() > 0xffff) throw ConfigError("too many layers");
  for (const auto& field : params.sga)
    if (field.h != params.h || field.w != params.w || field.f != 1)
      throw ConfigError("SGA logit shape mismatch (F=1 required for persistence)");
  if (params.lga &&
      (params.lga->h != params.h || params.lga->w != params.w || params.lga->f != 1 ||
       params.lga->k != kLgaKernel))
    throw ConfigError("LGA logit shape mismatch (F=1, K=5 required for persistence)");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, static_cast<std::uint16_t>(params.sga.size()));
  put(out, static_cast<std::uint32_t>(params.h));
  put(out, static_cast<std::uint32_t>(params.w));
  for (const auto& field : params.sga)
    for (const auto& grid : field.dir)
      out.write(reinterpret_cast<const char*>(grid.data()),
                static_cast<std::streamsize>(grid.size() * sizeof(double)));
  if (params.lga)
    out.write(reinterpret_cast<const char*>(params.lga->data.data()),
              static_cast<std::streamsize>(params.lga->data.size() * sizeof(double)));
  if (!out) throw IoError("write failure on " + path);
}

LearnedParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16) throw ParseError("weight file shorter than its header", static_cast<long long>(bytes.size()));
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ParseError("bad weight file magic", 0);

  std::uint16_t version, layers;
  std::uint32_t h, w;
  std::memcpy(&version, bytes.data() + 4, 2);
  std::memcpy(&layers, bytes.data() + 6, 2);
  std::memcpy(&h, bytes.data() + 8, 4);
  std::memcpy(&w, bytes.data() + 12, 4);
  if (version != kVersion) throw ParseError("unsupported weight file version", 4);
  if (h < 1 || w < 1) throw ParseError("bad weight file shape", 8);

  LearnedParams params;
  params.h = static_cast<int>(h);
  params.w = static_cast<int>(w);

  const std::size_t per_dir = static_cast<std::size_t>(h) * w * 5;
  const std::size_t sga_bytes = static_cast<std::size_t>(layers) * 4 * per_dir * sizeof(double);
  const std::size_t lga_doubles = static_cast<std::size_t>(h) * w * 3 * kLgaKernel * kLgaKernel;
  const std::size_t payload = bytes.size() - 16;
  const bool has_lga = payload == sga_bytes + lga_doubles * sizeof(double);
  if (!has_lga && payload != sga_bytes)
    throw ParseError("weight file payload size does not match its header",
                     static_cast<long long>(bytes.size()));

  const char* p = bytes.data() + 16;
  for (int layer = 0; layer < layers; ++layer) {
    SgaLogits field = SgaField::zeros(params.h, params.w, 1);
    for (auto& grid : field.dir) {
      std::memcpy(grid.data(), p, per_dir * sizeof(double));
      p += per_dir * sizeof(double);
    }
    params.sga.push_back(std::move(field));
  }
  if (has_lga) {
    LgaLogits field = LgaField::zeros(params.h, params.w, 1, kLgaKernel);
    std::memcpy(field.data.data(), p, lga_doubles * sizeof(double));
    params.lga = std::move(field);
  }
  return params;
}

}  // namespace stereo
