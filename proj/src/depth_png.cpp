#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "posekit/render.hpp"

namespace posekit {
namespace {

struct FileCloser {
  void operator()(std::FILE *f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path &path, const char *mode) {
  FilePtr f{std::fopen(path.string().c_str(), mode)};
  if (!f) throw Error(Errc::ParseError, "cannot open " + path.string());
  return f;
}

}  // namespace

void write_depth_png(const std::filesystem::path &path, const DepthMap &depth,
                     double mm_per_unit) {
  if (!(mm_per_unit > 0.0)) throw Error(Errc::InvalidParam, "depth scale must be positive");
  const auto height = static_cast<png_uint_32>(depth.rows());
  const auto width = static_cast<png_uint_32>(depth.cols());

  // Big-endian 16-bit samples, as PNG requires.
  std::vector<png_byte> buffer(static_cast<std::size_t>(width) * height * 2);
  for (Eigen::Index y = 0; y < depth.rows(); ++y) {
    for (Eigen::Index x = 0; x < depth.cols(); ++x) {
      const double units = std::round(depth(y, x) / mm_per_unit);
      const auto v = static_cast<std::uint16_t>(std::clamp(units, 0.0, 65535.0));
      const std::size_t at = (static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)) * 2;
      buffer[at] = static_cast<png_byte>(v >> 8);
      buffer[at + 1] = static_cast<png_byte>(v & 0xff);
    }
  }

  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::ParseError, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::ParseError, "failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (png_uint_32 y = 0; y < height; ++y) {
    png_write_row(png, buffer.data() + static_cast<std::size_t>(y) * width * 2);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Eigen::Matrix<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> read_png16(
    const std::filesystem::path &path) {
  FilePtr file = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::ParseError, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::ParseError, "failed reading " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  if (png_get_bit_depth(png, info) != 16 || png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::ParseError, path.string() + " is not a 16-bit grayscale PNG");
  }
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(width) * 2);
  Eigen::Matrix<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(height, width);
  for (png_uint_32 y = 0; y < height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (png_uint_32 x = 0; x < width; ++x) {
      out(y, x) = static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace posekit
