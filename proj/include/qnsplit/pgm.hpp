#pragma once

#include <filesystem>
#include <stdexcept>

#include "qnsplit/vector.hpp"

namespace qnsplit {

/// Grayscale image, row-major, values nominally in [0, 255].
struct Image {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    Vector pixels;
};

class PgmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PgmFormat { plain, binary };  // P2, P5

/// Reads P2 or P5 with maxval <= 255; values are rescaled to 0..255.
Image read_pgm(const std::filesystem::path& path);

/// Writes with maxval 255; pixel values are rounded and clamped.
void write_pgm(const std::filesystem::path& path, const Image& img, PgmFormat format = PgmFormat::binary);

}  // namespace qnsplit
