#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vectra/raster.hpp"

namespace vectra::io {

using Bytes = std::vector<std::uint8_t>;

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);
void write_file(const std::filesystem::path& path, const Bytes& bytes);

// Binary PPM (P6, maxval 255).
RgbImage decode_ppm(const Bytes& bytes);
Bytes encode_ppm(const RgbImage& image);

// Binary PBM (P4). Foreground is stored as 1 (black).
BinaryMask decode_pbm(const Bytes& bytes);
Bytes encode_pbm(const BinaryMask& mask);

// 8-bit RGB PNG. Grayscale, palette and alpha inputs are converted to RGB.
RgbImage decode_png(const Bytes& bytes);
Bytes encode_png(const RgbImage& image);

/// Sniffs the magic bytes and dispatches to the PNG or PPM decoder.
RgbImage decode_image(const Bytes& bytes);
RgbImage load_image(const std::filesystem::path& path);

/// Black foreground on white, for previews and stage dumps.
RgbImage mask_to_image(const BinaryMask& mask);

}  // namespace vectra::io
