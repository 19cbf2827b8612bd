#include "vectra/io.hpp"

#include <png.h>

#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>

namespace vectra::io {

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

namespace {

// Netpbm header tokenizer: whitespace separated, '#' starts a comment.
class PnmHeader {
 public:
  explicit PnmHeader(const Bytes& b) : bytes_(b) {}

  std::string token() {
    skip_space();
    std::string t;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) t.push_back(static_cast<char>(bytes_[pos_++]));
    if (t.empty()) throw IoError("truncated netpbm header");
    return t;
  }

  int number() {
    auto t = token();
    int v = 0;
    for (char c : t) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw IoError("bad netpbm header value: " + t);
      v = v * 10 + (c - '0');
      if (v > (1 << 24)) throw IoError("netpbm dimension too large");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t data_offset() {
    if (pos_ >= bytes_.size()) throw IoError("truncated netpbm header");
    return pos_ + 1;
  }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const Bytes& bytes_;
  std::size_t pos_ = 0;
};

Bytes header(const char* magic, int w, int h, bool with_maxval) {
  std::string s = std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n";
  if (with_maxval) s += "255\n";
  return Bytes(s.begin(), s.end());
}

}  // namespace

RgbImage decode_ppm(const Bytes& bytes) {
  PnmHeader hdr(bytes);
  if (hdr.token() != "P6") throw IoError("not a binary PPM (P6)");
  const int w = hdr.number();
  const int h = hdr.number();
  const int maxval = hdr.number();
  if (maxval != 255) throw IoError("only 8-bit PPM is supported");
  const std::size_t off = hdr.data_offset();
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  if (bytes.size() < off + need) throw IoError("truncated PPM raster");
  RgbImage img(w, h);
  for (std::size_t i = 0; i < img.size(); ++i) {
    img.data()[i] = {bytes[off + 3 * i], bytes[off + 3 * i + 1], bytes[off + 3 * i + 2]};
  }
  return img;
}

Bytes encode_ppm(const RgbImage& image) {
  Bytes out = header("P6", image.width(), image.height(), true);
  out.reserve(out.size() + image.size() * 3);
  for (const auto& p : image.data()) {
    out.push_back(p.r);
    out.push_back(p.g);
    out.push_back(p.b);
  }
  return out;
}

BinaryMask decode_pbm(const Bytes& bytes) {
  PnmHeader hdr(bytes);
  if (hdr.token() != "P4") throw IoError("not a binary PBM (P4)");
  const int w = hdr.number();
  const int h = hdr.number();
  const std::size_t off = hdr.data_offset();
  const std::size_t stride = (static_cast<std::size_t>(w) + 7) / 8;
  if (bytes.size() < off + stride * static_cast<std::size_t>(h)) throw IoError("truncated PBM raster");
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto byte = bytes[off + static_cast<std::size_t>(y) * stride + static_cast<std::size_t>(x / 8)];
      m(x, y) = (byte >> (7 - x % 8)) & 1;
    }
  return m;
}

Bytes encode_pbm(const BinaryMask& mask) {
  Bytes out = header("P4", mask.width(), mask.height(), false);
  const std::size_t stride = (static_cast<std::size_t>(mask.width()) + 7) / 8;
  const std::size_t off = out.size();
  out.resize(off + stride * static_cast<std::size_t>(mask.height()), 0);
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask(x, y))
        out[off + static_cast<std::size_t>(y) * stride + static_cast<std::size_t>(x / 8)] |=
            static_cast<std::uint8_t>(0x80u >> (x % 8));
  return out;
}

namespace {

struct PngReadCursor {
  const Bytes* bytes;
  std::size_t pos;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
  auto* cur = static_cast<PngReadCursor*>(png_get_io_ptr(png));
  if (cur->pos + len > cur->bytes->size()) png_error(png, "truncated PNG stream");
  std::memcpy(out, cur->bytes->data() + cur->pos, len);
  cur->pos += len;
}

void png_write_to_memory(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

[[noreturn]] void png_throw(png_structp, png_const_charp msg) { throw IoError(std::string("png: ") + msg); }

void png_warn_silent(png_structp, png_const_charp) {}

}  // namespace

RgbImage decode_png(const Bytes& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw IoError("not a PNG stream");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn_silent);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  try {
    PngReadCursor cursor{&bytes, 0};
    png_set_read_fn(png, &cursor, png_read_from_memory);
    png_read_info(png, info);
    const auto w = png_get_image_width(png, info);
    const auto h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    if (png_get_rowbytes(png, info) != w * 3) throw IoError("unsupported PNG layout");

    RgbImage img(static_cast<int>(w), static_cast<int>(h));
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
      rows[y] = reinterpret_cast<png_bytep>(&img(0, static_cast<int>(y)));
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
}

Bytes encode_png(const RgbImage& image) {
  if (image.empty()) throw EmptyInputError("cannot encode an empty image as PNG");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn_silent);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  Bytes out;
  try {
    png_set_write_fn(png, &out, png_write_to_memory, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height(); ++y)
      png_write_row(png, reinterpret_cast<png_const_bytep>(&image(0, y)));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  return out;
}

RgbImage decode_image(const Bytes& bytes) {
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(bytes);
  throw IoError("unrecognised image format (expected PNG or binary PPM)");
}

RgbImage load_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

RgbImage mask_to_image(const BinaryMask& mask) {
  RgbImage img(mask.width(), mask.height(), Rgb8{255, 255, 255});
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask.data()[i]) img.data()[i] = Rgb8{0, 0, 0};
  return img;
}

}  // namespace vectra::io
