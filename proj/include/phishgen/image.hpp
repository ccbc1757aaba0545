// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "phishgen/rng.hpp"

namespace phishgen {

/// 8-bit straight-alpha RGBA raster, rows top to bottom.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  RasterImage() = default;
  RasterImage(int w, int h) : width(w), height(h), rgba(static_cast<std::size_t>(w) * h * 4, 0) {}

  std::uint8_t* at(int x, int y) { return &rgba[(static_cast<std::size_t>(y) * width + x) * 4]; }
  const std::uint8_t* at(int x, int y) const { return &rgba[(static_cast<std::size_t>(y) * width + x) * 4]; }
  bool empty() const { return width <= 0 || height <= 0; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

bool is_png(std::string_view bytes);
/// Throws Error(undecodable_image).
RasterImage decode_png(std::string_view bytes);
std::string encode_png(const RasterImage& image);
/// Width and height from the PNG header without decoding; {0, 0} if not a PNG.
std::pair<int, int> png_dimensions(std::string_view bytes);

/// Multiplies every alpha value by factor, rounding to nearest.
void scale_alpha(RasterImage& image, double factor);

/// Rotates clockwise by degrees (negative turns counter-clockwise).
/// Multiples of 90 are exact pixel permutations; other angles expand the
/// canvas to fit and sample bilinearly, leaving uncovered pixels transparent.
RasterImage rotate(const RasterImage& image, double degrees);

/// Normalized 1-D kernel of radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);
/// Separable blur on all four channels with clamped edges.
RasterImage gaussian_blur(const RasterImage& image, double sigma);

/// Composites grey (128,128,128) grid lines over the image.
void grey_mesh(RasterImage& image, int spacing, int line_width, double alpha);

enum class NoiseDistribution { gaussian, uniform };
/// Adds per-channel noise to RGB. strength is the standard deviation
/// (gaussian) or half-width (uniform). Guarantees at least one changed value.
void add_noise(RasterImage& image, Rng& rng, NoiseDistribution distribution, double strength);

enum class WatermarkPlacement { bottom_right, diagonal };
/// Stamps text using a 5x7 bitmap font with glyphs about a tenth of the
/// image height. Colour contrasts with the covered region.
void draw_watermark(RasterImage& image, std::string_view text, WatermarkPlacement placement, double alpha);

/// Nominal size of an SVG document from width/height or viewBox; {0, 0}
/// when it cannot be read.
std::pair<double, double> svg_size(std::string_view svg);
/// Rasterizes the basic shapes of an SVG (rect, circle, ellipse, polygon,
/// polyline, line-segment paths) with solid fills at scale times nominal
/// size. Throws Error(undecodable_image) if the document has no <svg> root.
RasterImage rasterize_svg(std::string_view svg, double scale);

}  // namespace phishgen
