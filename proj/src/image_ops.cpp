// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <cstdint>

#include "phishgen/error.hpp"
#include "phishgen/image.hpp"

namespace phishgen {
namespace {

std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255)); }

// Source-over of a solid colour with coverage alpha onto a straight-alpha pixel.
void blend(std::uint8_t* px, const std::array<double, 3>& rgb, double alpha) {
  if (alpha <= 0) return;
  const double ad = px[3] / 255.0;
  const double ao = alpha + ad * (1 - alpha);
  if (ao <= 0) return;
  for (int c = 0; c < 3; ++c) px[c] = clamp_byte((rgb[c] * alpha + px[c] * ad * (1 - alpha)) / ao);
  px[3] = clamp_byte(ao * 255.0);
}

bool is_quarter_turn(double degrees, int& quarters) {
  const double q = degrees / 90.0;
  const double r = std::round(q);
  if (std::fabs(q - r) > 1e-9) return false;
  quarters = static_cast<int>(((static_cast<long>(r) % 4) + 4) % 4);
  return true;
}

using Glyph = std::array<std::uint8_t, 7>;

const Glyph& glyph_for(char ch) {
  static const std::array<std::pair<char, Glyph>, 45> font = {{
      {'A', {0b01110, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001}},
      {'B', {0b11110, 0b10001, 0b10001, 0b11110, 0b10001, 0b10001, 0b11110}},
      {'C', {0b01110, 0b10001, 0b10000, 0b10000, 0b10000, 0b10001, 0b01110}},
      {'D', {0b11110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b11110}},
      {'E', {0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b11111}},
      {'F', {0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b10000}},
      {'G', {0b01110, 0b10001, 0b10000, 0b10111, 0b10001, 0b10001, 0b01111}},
      {'H', {0b10001, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001}},
      {'I', {0b01110, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110}},
      {'J', {0b00111, 0b00010, 0b00010, 0b00010, 0b00010, 0b10010, 0b01100}},
      {'K', {0b10001, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010, 0b10001}},
      {'L', {0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111}},
      {'M', {0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001}},
      {'N', {0b10001, 0b10001, 0b11001, 0b10101, 0b10011, 0b10001, 0b10001}},
      {'O', {0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110}},
      {'P', {0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000, 0b10000}},
      {'Q', {0b01110, 0b10001, 0b10001, 0b10001, 0b10101, 0b10010, 0b01101}},
      {'R', {0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001}},
      {'S', {0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110}},
      {'T', {0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100}},
      {'U', {0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110}},
      {'V', {0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100}},
      {'W', {0b10001, 0b10001, 0b10001, 0b10101, 0b10101, 0b10101, 0b01010}},
      {'X', {0b10001, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001, 0b10001}},
      {'Y', {0b10001, 0b10001, 0b10001, 0b01010, 0b00100, 0b00100, 0b00100}},
      {'Z', {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b10000, 0b11111}},
      {'0', {0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110}},
      {'1', {0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110}},
      {'2', {0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111}},
      {'3', {0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110}},
      {'4', {0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010}},
      {'5', {0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110}},
      {'6', {0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110}},
      {'7', {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000}},
      {'8', {0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110}},
      {'9', {0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100}},
      {'.', {0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b01100, 0b01100}},
      {'-', {0b00000, 0b00000, 0b00000, 0b11111, 0b00000, 0b00000, 0b00000}},
      {'_', {0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b11111}},
      {'/', {0b00001, 0b00010, 0b00010, 0b00100, 0b01000, 0b01000, 0b10000}},
      {':', {0b00000, 0b01100, 0b01100, 0b00000, 0b01100, 0b01100, 0b00000}},
      {'@', {0b01110, 0b10001, 0b10111, 0b10101, 0b10111, 0b10000, 0b01110}},
      {' ', {0, 0, 0, 0, 0, 0, 0}},
      {'!', {0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00000, 0b00100}},
      {'?', {0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b00000, 0b00100}},
  }};
  const char up = (ch >= 'a' && ch <= 'z') ? static_cast<char>(ch - 'a' + 'A') : ch;
  for (const auto& [c, g] : font) {
    if (c == up) return g;
  }
  return font.back().second;
}

// One glyph per code point; non-ASCII renders as '?'.
std::string glyph_chars(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if ((c & 0xC0) != 0x80) {
      out += '?';
    }
  }
  return out;
}

}  // namespace

void scale_alpha(RasterImage& image, double factor) {
  for (std::size_t i = 3; i < image.rgba.size(); i += 4) image.rgba[i] = clamp_byte(image.rgba[i] * factor);
}

RasterImage rotate(const RasterImage& src, double degrees) {
  if (src.empty()) return src;
  const int w = src.width;
  const int h = src.height;
  int quarters = 0;
  if (is_quarter_turn(degrees, quarters)) {
    RasterImage out = (quarters % 2) ? RasterImage(h, w) : RasterImage(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        int nx = x, ny = y;
        switch (quarters) {
          case 1: nx = h - 1 - y; ny = x; break;
          case 2: nx = w - 1 - x; ny = h - 1 - y; break;
          case 3: nx = y; ny = w - 1 - x; break;
          default: break;
        }
        std::copy_n(src.at(x, y), 4, out.at(nx, ny));
      }
    }
    return out;
  }
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const int nw = static_cast<int>(std::ceil(w * std::fabs(c) + h * std::fabs(s) - 1e-9));
  const int nh = static_cast<int>(std::ceil(w * std::fabs(s) + h * std::fabs(c) - 1e-9));
  RasterImage out(nw, nh);
  // Premultiplied sample; outside the source counts as transparent.
  auto sample = [&](int x, int y, std::array<double, 4>& acc, double weight) {
    if (x < 0 || y < 0 || x >= w || y >= h || weight == 0) return;
    const auto* p = src.at(x, y);
    const double a = p[3] / 255.0;
    for (int k = 0; k < 3; ++k) acc[k] += weight * p[k] * a;
    acc[3] += weight * a;
  };
  for (int y = 0; y < nh; ++y) {
    for (int x = 0; x < nw; ++x) {
      const double dx = x + 0.5 - nw / 2.0;
      const double dy = y + 0.5 - nh / 2.0;
      // Inverse of the clockwise rotation (y axis points down).
      const double sx = dx * c + dy * s + w / 2.0 - 0.5;
      const double sy = -dx * s + dy * c + h / 2.0 - 0.5;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0;
      const double fy = sy - y0;
      std::array<double, 4> acc{};
      sample(x0, y0, acc, (1 - fx) * (1 - fy));
      sample(x0 + 1, y0, acc, fx * (1 - fy));
      sample(x0, y0 + 1, acc, (1 - fx) * fy);
      sample(x0 + 1, y0 + 1, acc, fx * fy);
      auto* px = out.at(x, y);
      if (acc[3] <= 1e-12) continue;
      for (int k = 0; k < 3; ++k) px[k] = clamp_byte(acc[k] / acc[3]);
      px[3] = clamp_byte(acc[3] * 255.0);
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0)) return {1.0};
  const int radius = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i * i) / (2 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

RasterImage gaussian_blur(const RasterImage& src, double sigma) {
  if (src.empty()) return src;
  const auto kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = src.width;
  const int h = src.height;
  // Premultiplied doubles: r*a, g*a, b*a, a.
  std::vector<double> buf(static_cast<std::size_t>(w) * h * 4);
  for (std::size_t i = 0; i < buf.size(); i += 4) {
    const double a = src.rgba[i + 3];
    for (int k = 0; k < 3; ++k) buf[i + k] = src.rgba[i + k] * a;
    buf[i + 3] = a;
  }
  std::vector<double> tmp(buf.size());
  auto idx = [w](int x, int y) { return (static_cast<std::size_t>(y) * w + x) * 4; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::array<double, 4> acc{};
      for (int i = -radius; i <= radius; ++i) {
        const int sx = std::clamp(x + i, 0, w - 1);
        const double kv = kernel[static_cast<std::size_t>(i + radius)];
        for (int k = 0; k < 4; ++k) acc[k] += kv * buf[idx(sx, y) + k];
      }
      std::copy(acc.begin(), acc.end(), tmp.begin() + static_cast<std::ptrdiff_t>(idx(x, y)));
    }
  }
  RasterImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::array<double, 4> acc{};
      for (int i = -radius; i <= radius; ++i) {
        const int sy = std::clamp(y + i, 0, h - 1);
        const double kv = kernel[static_cast<std::size_t>(i + radius)];
        for (int k = 0; k < 4; ++k) acc[k] += kv * tmp[idx(x, sy) + k];
      }
      auto* px = out.at(x, y);
      px[3] = clamp_byte(acc[3]);
      if (acc[3] > 1e-9) {
        for (int k = 0; k < 3; ++k) px[k] = clamp_byte(acc[k] / acc[3]);
      }
    }
  }
  return out;
}

void grey_mesh(RasterImage& image, int spacing, int line_width, double alpha) {
  if (spacing < 1 || line_width < 1) throw Error(ErrorCode::invalid_params, "mesh spacing and width must be >= 1");
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (x % spacing < line_width || y % spacing < line_width) blend(image.at(x, y), {128, 128, 128}, alpha);
    }
  }
}

void add_noise(RasterImage& image, Rng& rng, NoiseDistribution distribution, double strength) {
  bool changed = false;
  for (std::size_t i = 0; i < image.rgba.size(); i += 4) {
    for (int k = 0; k < 3; ++k) {
      const double n = distribution == NoiseDistribution::gaussian ? strength * rng.normal()
                                                                   : rng.uniform(-strength, strength);
      const auto v = clamp_byte(image.rgba[i + k] + n);
      changed = changed || v != image.rgba[i + k];
      image.rgba[i + k] = v;
    }
  }
  if (!changed && !image.empty()) {
    const auto px = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(image.width) * image.height));
    auto& v = image.rgba[px * 4 + static_cast<std::size_t>(rng.below(3))];
    v = v < 255 ? v + 1 : v - 1;
  }
}

void draw_watermark(RasterImage& image, std::string_view text, WatermarkPlacement placement, double alpha) {
  const auto chars = glyph_chars(text);
  if (image.empty() || chars.empty()) return;
  const int w = image.width;
  const int h = image.height;
  const int s = std::max(1, static_cast<int>(std::lround(h * 0.10 / 7.0)));
  const int gw = 5 * s;
  const int gh = 7 * s;
  const int advance = 6 * s;
  const int n = static_cast<int>(chars.size());
  const int margin = std::max(1, s);

  std::vector<std::pair<int, int>> origins;
  if (placement == WatermarkPlacement::bottom_right) {
    const int tw = n * advance - s;
    const int x0 = std::max(0, w - margin - tw);
    const int y0 = std::max(0, h - margin - gh);
    for (int i = 0; i < n; ++i) origins.emplace_back(x0 + i * advance, y0);
  } else {
    // Bottom-left to top-right.
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
      const int x = margin + static_cast<int>(std::lround(t * std::max(0, w - 2 * margin - gw)));
      const int y = h - margin - gh - static_cast<int>(std::lround(t * std::max(0, h - 2 * margin - gh)));
      origins.emplace_back(x, std::max(0, y));
    }
  }

  // Pick black or white against the region as seen over a white page.
  double lum = 0;
  long count = 0;
  for (const auto& [ox, oy] : origins) {
    for (int y = oy; y < std::min(h, oy + gh); ++y) {
      for (int x = ox; x < std::min(w, ox + gw); ++x) {
        const auto* p = image.at(x, y);
        const double a = p[3] / 255.0;
        lum += a * (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) + (1 - a) * 255.0;
        ++count;
      }
    }
  }
  const bool bright = count == 0 || lum / count > 127.5;
  const std::array<double, 3> colour = bright ? std::array<double, 3>{0, 0, 0} : std::array<double, 3>{255, 255, 255};

  for (int i = 0; i < n; ++i) {
    const auto& g = glyph_for(chars[static_cast<std::size_t>(i)]);
    const auto [ox, oy] = origins[static_cast<std::size_t>(i)];
    for (int row = 0; row < 7; ++row) {
      for (int col = 0; col < 5; ++col) {
        if (!(g[static_cast<std::size_t>(row)] & (0b10000 >> col))) continue;
        for (int dy = 0; dy < s; ++dy) {
          for (int dx = 0; dx < s; ++dx) {
            const int x = ox + col * s + dx;
            const int y = oy + row * s + dy;
            if (x < 0 || y < 0 || x >= w || y >= h) continue;
            blend(image.at(x, y), colour, alpha);
          }
        }
      }
    }
  }
}

}  // namespace phishgen
