#pragma once

#include <string>

#include "grid.hpp"

namespace stereo {

// Binary (P5) and ASCII (P2) PGM, maxval up to 65535. Intensities come out
// scaled to [0,1]. Malformed input raises a parse error carrying the byte
// offset where parsing failed.
Image read_pgm(const std::string& path);

// Binary P5 writer (maxval 255); values are clamped to [0,1] and quantized.
void write_pgm(const Image& img, const std::string& path);

// Grayscale PFM ("Pf"). Written little-endian (scale -1.0), rows
// bottom-to-top per the format convention. Masked pixels are stored as
// +infinity and restored to masked on read. Round-trips are bitwise exact
// for values representable in 32-bit floats.
DisparityMap read_pfm(const std::string& path);
void write_pfm(const DisparityMap& map, const std::string& path);

}  // namespace stereo
