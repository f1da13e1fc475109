#pragma once

#include <filesystem>

#include "polysr/imaging.hpp"

namespace polysr {

enum class PgmEncoding { Ascii, Binary };

/// Reads a P2/P5 graymap or P3/P6 pixmap (8- or 16-bit) and scales
/// intensities to [0, 1]. Colour images are converted to luma.
ImageGrid read_pgm(const std::filesystem::path& path);

/// Writes intensities clamped to [0, 1] and scaled to maxval.
void write_pgm(const std::filesystem::path& path, const ImageGrid& img, int maxval = 65535,
               PgmEncoding encoding = PgmEncoding::Binary);

}  // namespace polysr
