// SPDX-License-Identifier: Apache-2.0
#include <png.h>

#include <cstring>

#include "phishgen/error.hpp"
#include "phishgen/image.hpp"

namespace phishgen {

namespace {
constexpr unsigned char kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t be32(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}
}  // namespace

bool is_png(std::string_view bytes) {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kSignature, 8) == 0;
}

std::pair<int, int> png_dimensions(std::string_view bytes) {
  if (!is_png(bytes) || bytes.size() < 24) return {0, 0};
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (std::memcmp(p + 12, "IHDR", 4) != 0) return {0, 0};
  return {static_cast<int>(be32(p + 16)), static_cast<int>(be32(p + 20))};
}

RasterImage decode_png(std::string_view bytes) {
  if (!is_png(bytes)) throw Error(ErrorCode::undecodable_image, "not a PNG image");
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw Error(ErrorCode::undecodable_image, std::string("PNG header: ") + image.message);
  image.format = PNG_FORMAT_RGBA;
  if (image.width == 0 || image.height == 0 || image.width > 16384 || image.height > 16384) {
    png_image_free(&image);
    throw Error(ErrorCode::undecodable_image, "PNG dimensions out of range");
  }
  RasterImage out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, out.rgba.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::undecodable_image, "PNG data: " + msg);
  }
  return out;
}

std::string encode_png(const RasterImage& img) {
  if (img.empty()) throw Error(ErrorCode::invalid_argument, "cannot encode an empty image");
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGBA;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.rgba.data(), 0, nullptr))
    throw Error(ErrorCode::io_error, std::string("PNG encode: ") + image.message);
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.rgba.data(), 0, nullptr))
    throw Error(ErrorCode::io_error, std::string("PNG encode: ") + image.message);
  out.resize(size);
  return out;
}

}  // namespace phishgen
