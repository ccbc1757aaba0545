// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "phishgen/error.hpp"
#include "phishgen/image.hpp"

using namespace phishgen;
using fixtures::pattern;
using fixtures::solid;

TEST(Png, RoundTripsExactly) {
  const auto img = pattern(13, 7, 5);
  const auto bytes = fixtures::png(img);
  EXPECT_TRUE(is_png(bytes));
  EXPECT_EQ(png_dimensions(bytes), std::make_pair(13, 7));
  EXPECT_EQ(decode_png(bytes), img);
}

TEST(Png, RejectsGarbage) { EXPECT_THROW(decode_png("not a png"), Error); }

TEST(Image, OpacityScalesAlpha) {
  auto img = solid(4, 4, 10, 20, 30, 255);
  scale_alpha(img, 0.2);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      EXPECT_EQ(img.at(x, y)[3], 51);
      EXPECT_EQ(img.at(x, y)[0], 10);
    }
  }
}

TEST(Image, OpacityMultipliesExistingAlpha) {
  const auto src = pattern(9, 9, 3);
  auto img = src;
  scale_alpha(img, 0.3);
  for (std::size_t i = 3; i < img.rgba.size(); i += 4) EXPECT_EQ(img.rgba[i], std::lround(src.rgba[i] * 0.3));
}

// Independent kernel: sampled Gaussian over [-ceil(3s), ceil(3s)], normalized.
TEST(Image, GaussianKernelMatchesOracle) {
  for (double sigma : {0.5, 1.0, 1.7, 2.5}) {
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(std::ceil(3 * sigma));
    ASSERT_EQ(k.size(), static_cast<std::size_t>(2 * r + 1));
    double total = 0;
    for (int i = -r; i <= r; ++i) total += std::exp(-(i * i) / (2 * sigma * sigma));
    for (int i = -r; i <= r; ++i) EXPECT_NEAR(k[i + r], std::exp(-(i * i) / (2 * sigma * sigma)) / total, 1e-12);
    EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(Image, BlurWithTinySigmaIsIdentity) {
  const auto src = pattern(20, 15, 9);
  const auto out = gaussian_blur(src, 0.01);
  ASSERT_EQ(out.rgba.size(), src.rgba.size());
  for (std::size_t i = 0; i < src.rgba.size(); ++i) EXPECT_LE(std::abs(out.rgba[i] - src.rgba[i]), 1);
}

TEST(Image, BlurKeepsConstantImage) {
  const auto src = solid(12, 12, 90, 140, 200, 180);
  const auto out = gaussian_blur(src, 2.0);
  for (std::size_t i = 0; i < src.rgba.size(); ++i) EXPECT_LE(std::abs(out.rgba[i] - src.rgba[i]), 1);
}

TEST(Image, QuarterTurnSwapsDimensions) {
  const auto src = pattern(100, 40, 1);
  const auto cw = rotate(src, 90);
  ASSERT_EQ(cw.width, 40);
  ASSERT_EQ(cw.height, 100);
  // Clockwise: source (x, y) lands at (h-1-y, x).
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      for (int c = 0; c < 4; ++c) ASSERT_EQ(cw.at(src.height - 1 - y, x)[c], src.at(x, y)[c]);
    }
  }
  EXPECT_EQ(rotate(rotate(src, 90), -90), src);
  EXPECT_EQ(rotate(rotate(rotate(rotate(src, 90), 90), 90), 90), src);
}

TEST(Image, SmallRotationGrowsCanvas) {
  const auto src = pattern(30, 10);
  const auto out = rotate(src, 15);
  const double c = std::cos(15 * M_PI / 180), s = std::sin(15 * M_PI / 180);
  EXPECT_EQ(out.width, static_cast<int>(std::ceil(30 * c + 10 * s - 1e-9)));
  EXPECT_EQ(out.height, static_cast<int>(std::ceil(30 * s + 10 * c - 1e-9)));
}

TEST(Image, GreyMeshMatchesOracle) {
  const auto src = solid(17, 11, 255, 0, 0, 255);
  auto img = src;
  grey_mesh(img, 4, 1, 0.5);
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 17; ++x) {
      const bool line = x % 4 < 1 || y % 4 < 1;
      const auto* p = img.at(x, y);
      if (line) {
        EXPECT_EQ(p[0], std::lround(255 * 0.5 + 128 * 0.5));
        EXPECT_EQ(p[1], 64);
        EXPECT_EQ(p[3], 255);
      } else {
        EXPECT_EQ(p[0], 255);
        EXPECT_EQ(p[1], 0);
      }
    }
  }
}

TEST(Image, NoiseIsRoughlyZeroMean) {
  auto img = solid(128, 128, 128, 128, 128, 255);
  Rng rng(11);
  add_noise(img, rng, NoiseDistribution::gaussian, 12);
  double sum = 0;
  std::size_t n = 0, changed = 0;
  for (std::size_t i = 0; i < img.rgba.size(); i += 4) {
    for (int c = 0; c < 3; ++c) {
      sum += img.rgba[i + c];
      changed += img.rgba[i + c] != 128;
      ++n;
    }
    EXPECT_EQ(img.rgba[i + 3], 255);
  }
  EXPECT_NEAR(sum / static_cast<double>(n), 128.0, 1.5);
  EXPECT_GT(changed, n / 2);
}

TEST(Image, NoiseAlwaysChangesSomething) {
  auto img = solid(1, 1, 40, 40, 40);
  Rng rng(1);
  add_noise(img, rng, NoiseDistribution::uniform, 0.01);
  EXPECT_NE(img, solid(1, 1, 40, 40, 40));
}

TEST(Image, WatermarkMarksBottomRight) {
  const auto src = solid(80, 40, 255, 255, 255);
  auto img = src;
  draw_watermark(img, "ABC", WatermarkPlacement::bottom_right, 1.0);
  int left = 0, right = 0;
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 80; ++x) {
      if (img.at(x, y)[0] != 255) (x < 40 ? left : right)++;
    }
  }
  EXPECT_EQ(left, 0);
  EXPECT_GT(right, 0);
}

TEST(Image, WatermarkDiagonalSpansWidth) {
  auto img = solid(120, 60, 0, 0, 0);
  draw_watermark(img, "WATERMARK TEXT", WatermarkPlacement::diagonal, 1.0);
  int min_x = 120, max_x = -1;
  for (int y = 0; y < 60; ++y) {
    for (int x = 0; x < 120; ++x) {
      if (img.at(x, y)[0] != 0) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
      }
    }
  }
  EXPECT_LT(min_x, 40);
  EXPECT_GT(max_x, 80);
}

TEST(Svg, ReadsSize) {
  EXPECT_EQ(svg_size(R"(<svg width="40" height="20"></svg>)"), std::make_pair(40.0, 20.0));
  EXPECT_EQ(svg_size(R"(<svg viewBox="0 0 10 5"></svg>)"), std::make_pair(10.0, 5.0));
}

TEST(Svg, RasterizesShapes) {
  const auto img = rasterize_svg(
      R"(<svg width="40" height="20"><rect width="40" height="20" fill="#1a73e8"/><circle cx="10" cy="10" r="6" fill="white"/></svg>)",
      1.0);
  ASSERT_EQ(img.width, 40);
  ASSERT_EQ(img.height, 20);
  const auto* corner = img.at(35, 2);
  EXPECT_EQ(corner[0], 0x1a);
  EXPECT_EQ(corner[1], 0x73);
  EXPECT_EQ(corner[2], 0xe8);
  EXPECT_EQ(corner[3], 255);
  const auto* centre = img.at(10, 10);
  EXPECT_EQ(centre[0], 255);
  EXPECT_EQ(centre[2], 255);
}

TEST(Svg, ScaleMultipliesSize) {
  const auto img = rasterize_svg(R"(<svg width="10" height="6"><rect width="10" height="6"/></svg>)", 4.0);
  EXPECT_EQ(img.width, 40);
  EXPECT_EQ(img.height, 24);
  EXPECT_EQ(img.at(20, 12)[3], 255);
}

TEST(Svg, RejectsNonSvg) { EXPECT_THROW(rasterize_svg("<html></html>", 1.0), Error); }
