// SPDX-License-Identifier: Apache-2.0
#include "phishgen/visual_features.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "phishgen/error.hpp"
#include "phishgen/image.hpp"
#include "phishgen/url.hpp"

namespace phishgen {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Node& style_parent(Document& doc) {
  if (auto* head = doc.first_element("head")) return *head;
  if (auto* body = doc.first_element("body")) return *body;
  if (auto* html = doc.first_element("html")) return *html;
  return doc.root();
}

void inject_style(Document& doc, std::string css, FeatureApplication& app) {
  auto& style = style_parent(doc).append_child(doc.make_element("style"));
  auto& text = style.append_child(doc.make_text(std::move(css)));
  app.injected_nodes.push_back(style.id());
  app.injected_nodes.push_back(text.id());
}

std::pair<double, double> range_param(const ParamMap& p, const char* name) {
  const auto& r = p.at(name);
  return {r.at(0).get<double>(), r.at(1).get<double>()};
}

// Shortest decimal text for a value rounded to 3 places ("0.8", "1").
std::string short_number(double v) { return fmt::format("{}", std::round(v * 1000.0) / 1000.0); }

double attr_number(const Node& n, const char* name) {
  const auto* v = n.attribute(name);
  if (!v) return 0;
  try {
    return std::max(0.0, std::stod(*v));
  } catch (const std::exception&) {
    return 0;
  }
}

const AssetMap::value_type* find_asset(const AssetMap& assets, const std::string& src) {
  if (auto it = assets.find(src); it != assets.end()) return &*it;
  for (const auto& entry : assets) {
    if (entry.second.original_url == src) return &entry;
  }
  return nullptr;
}

std::string asset_name(const LogoCandidate& logo, FeatureId feature, std::uint64_t seed, std::string_view ext) {
  const std::string& source = logo.asset_path.empty() ? logo.src : logo.asset_path;
  auto stem = path_stem(source);
  if (stem.empty()) stem = "logo";
  return fmt::format("assets/{}.{}.{}.{}", stem, to_string(feature), seed, ext);
}

[[noreturn]] void no_logo(FeatureId id) {
  throw Error(ErrorCode::no_logo_candidate, std::string(to_string(id)) + ": no .png/.svg logo asset on the page");
}

RasterImage load_raster(const AssetRecord& asset, LogoFormat format) {
  if (format == LogoFormat::png) return decode_png(asset.bytes);
  return rasterize_svg(asset.bytes, 4.0);
}

void repoint(Node& img, const std::string& path, FeatureApplication& app) {
  img.set_attribute("src", path);
  img.remove_attribute("srcset");
  app.touched_nodes.push_back(img.id());
  app.assets_added.push_back(path);
}

void store_png(AssetMap& assets, const std::string& path, const AssetRecord& source, const RasterImage& image) {
  assets[path] = AssetRecord{source.original_url, AssetKind::image, encode_png(image), "image/png"};
}

}  // namespace

std::string_view to_string(LogoFormat format) noexcept { return format == LogoFormat::png ? "png" : "svg"; }

std::vector<LogoCandidate> locate_logo_candidates(const Document& doc, const AssetMap* assets) {
  std::vector<LogoCandidate> out;
  doc.visit([&](const Node& n) {
    if (!n.is_element("img")) return;
    const auto* src = n.attribute("src");
    if (!src || src->empty() || src->starts_with("data:")) return;
    LogoCandidate c;
    c.node_id = n.id();
    c.src = *src;
    const AssetMap::value_type* asset = nullptr;
    if (assets) {
      asset = find_asset(*assets, *src);
      if (!asset || asset->second.missing()) return;
      c.asset_path = asset->first;
    }
    const auto ext = path_extension(assets ? c.asset_path : *src);
    if (ext == "png") {
      c.extension = LogoFormat::png;
    } else if (ext == "svg") {
      c.extension = LogoFormat::svg;
    } else {
      return;
    }
    c.in_header = n.has_ancestor("header") || n.has_ancestor("nav");
    std::string hints = lower(*src);
    for (const char* name : {"alt", "id", "class"}) {
      if (const auto* v = n.attribute(name)) hints += " " + lower(*v);
    }
    c.named_logo = hints.find("logo") != std::string::npos;
    c.area = attr_number(n, "width") * attr_number(n, "height");
    if (c.area == 0 && asset) {
      if (c.extension == LogoFormat::png) {
        const auto [w, h] = png_dimensions(asset->second.bytes);
        c.area = static_cast<double>(w) * h;
      } else {
        const auto [w, h] = svg_size(asset->second.bytes);
        c.area = w * h;
      }
    }
    out.push_back(std::move(c));
  });
  std::stable_sort(out.begin(), out.end(), [](const LogoCandidate& a, const LogoCandidate& b) {
    if (a.in_header != b.in_header) return a.in_header;
    if (a.named_logo != b.named_logo) return a.named_logo;
    return a.area > b.area;
  });
  return out;
}

std::string watermark_svg(std::string_view svg, std::string_view text, bool diagonal, double alpha) {
  const auto close = svg.rfind("</svg>");
  if (close == std::string_view::npos) throw Error(ErrorCode::undecodable_image, "SVG without closing </svg>");
  // Work in viewBox units when one is declared.
  double x0 = 0, y0 = 0;
  auto [w, h] = svg_size(svg);
  const auto doc = parse_document(svg);
  const Node* root = nullptr;
  doc.visit([&](const Node& n) {
    if (!root && n.is_element("svg")) root = &n;
  });
  if (root) {
    if (const auto* vb = root->attribute("viewbox")) {
      double v[4] = {0, 0, 0, 0};
      std::sscanf(vb->c_str(), "%lf%*[ ,]%lf%*[ ,]%lf%*[ ,]%lf", &v[0], &v[1], &v[2], &v[3]);
      if (v[2] > 0 && v[3] > 0) {
        x0 = v[0];
        y0 = v[1];
        w = v[2];
        h = v[3];
      }
    }
  }
  if (w <= 0 || h <= 0) {
    w = 300;
    h = 150;
  }
  const double size = std::max(1.0, h * 0.10);
  std::string mark;
  if (diagonal) {
    const double angle = -std::atan2(h, w) * 180.0 / 3.141592653589793;
    mark = fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" fill=\"#000\" fill-opacity=\"{}\" "
        "text-anchor=\"middle\" transform=\"rotate({} {} {})\">{}</text>",
        short_number(x0 + w / 2), short_number(y0 + h / 2), short_number(size), short_number(alpha),
        short_number(angle), short_number(x0 + w / 2), short_number(y0 + h / 2), escape_text(text));
  } else {
    mark = fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" fill=\"#000\" fill-opacity=\"{}\" "
        "text-anchor=\"end\">{}</text>",
        short_number(x0 + w - size * 0.2), short_number(y0 + h - size * 0.2), short_number(size),
        short_number(alpha), escape_text(text));
  }
  std::string out(svg.substr(0, close));
  out += mark;
  out += svg.substr(close);
  return out;
}

FeatureApplication apply_visual_feature(Document& doc, AssetMap& assets, FeatureId feature, const ParamMap& params,
                                        Rng& rng, const VisualOptions& options) {
  if (category_of(feature) != FeatureCategory::visual)
    throw Error(ErrorCode::invalid_argument, std::string(to_string(feature)) + " is not a visual feature");
  ParamMap p = resolve_params(feature, params);
  FeatureApplication app;
  app.feature = feature;

  if (feature == FeatureId::V1) {
    auto [lo, hi] = range_param(p, "opacity_range");
    if (lo > hi) throw Error(ErrorCode::invalid_params, "V1 opacity_range must be ordered");
    const double opacity = std::clamp(std::round(rng.uniform(lo, hi) * 1000.0) / 1000.0, lo, hi);
    p["opacity"] = opacity;
    inject_style(doc, "body{opacity: " + short_number(opacity) + " !important;}", app);
    app.params_used = std::move(p);
    return app;
  }
  if (feature == FeatureId::V2) {
    const auto fonts = p.at("fonts").get<std::vector<std::string>>();
    if (fonts.empty()) throw Error(ErrorCode::invalid_params, "V2 fonts must not be empty");
    const auto& font = rng.pick(fonts);
    p["font"] = font;
    inject_style(doc, "body, body *{font-family: " + font + " !important;}", app);
    app.params_used = std::move(p);
    return app;
  }

  const auto candidates = locate_logo_candidates(doc, &assets);
  if (candidates.empty()) no_logo(feature);
  const auto& logo = candidates.front();
  Node* img = doc.find(logo.node_id);
  const AssetRecord source = assets.at(logo.asset_path);
  p["logo"] = logo.asset_path;

  if (feature == FeatureId::V3) {
    auto [lo, hi] = range_param(p, "opacity_range");
    if (lo > hi) throw Error(ErrorCode::invalid_params, "V3 opacity_range must be ordered");
    const double alpha = std::clamp(std::round(rng.uniform(lo, hi) * 1000.0) / 1000.0, lo, hi);
    p["opacity"] = alpha;
    if (logo.extension == LogoFormat::svg) {
      std::string style = img->attribute("style") ? *img->attribute("style") : std::string();
      while (!style.empty() && std::isspace(static_cast<unsigned char>(style.back()))) style.pop_back();
      if (!style.empty() && style.back() != ';') style += ';';
      style += (style.empty() ? "" : " ") + std::string("opacity: ") + short_number(alpha) + ";";
      img->set_attribute("style", style);
      app.touched_nodes.push_back(img->id());
      app.notes = "svg logo: opacity applied through the img style";
    } else {
      auto image = decode_png(source.bytes);
      scale_alpha(image, alpha);
      const auto path = asset_name(logo, feature, options.seed, "png");
      store_png(assets, path, source, image);
      repoint(*img, path, app);
    }
    app.params_used = std::move(p);
    return app;
  }

  if (feature == FeatureId::V4) {
    std::string placement = p.at("placement").get<std::string>();
    if (placement == "random") placement = rng.bernoulli(0.5) ? "bottom_right" : "diagonal";
    std::string text = p.at("text").is_string() ? p.at("text").get<std::string>() : options.watermark_text;
    if (text.empty()) text = "preview";
    const double alpha = p.at("mark_alpha").get<double>();
    p["placement"] = placement;
    p["text"] = text;
    if (logo.extension == LogoFormat::svg) {
      const auto path = asset_name(logo, feature, options.seed, "svg");
      assets[path] = AssetRecord{source.original_url, AssetKind::image,
                                 watermark_svg(source.bytes, text, placement == "diagonal", alpha), "image/svg+xml"};
      repoint(*img, path, app);
    } else {
      auto image = decode_png(source.bytes);
      draw_watermark(image, text,
                     placement == "diagonal" ? WatermarkPlacement::diagonal : WatermarkPlacement::bottom_right, alpha);
      const auto path = asset_name(logo, feature, options.seed, "png");
      store_png(assets, path, source, image);
      repoint(*img, path, app);
    }
    app.params_used = std::move(p);
    return app;
  }

  // V5
  std::string kind = p.at("kind").get<std::string>();
  if (kind == "random") {
    static const std::vector<std::string> kinds = {"rotate", "gaussian_blur", "grey_mesh", "noise"};
    kind = rng.pick(kinds);
  }
  p["kind"] = kind;
  auto image = load_raster(source, logo.extension);
  if (kind == "rotate") {
    const double angle = p.at("angle").is_number() ? p.at("angle").get<double>() : rng.uniform(5.0, 20.0);
    std::string direction = p.at("direction").get<std::string>();
    if (direction == "random") direction = rng.bernoulli(0.5) ? "cw" : "ccw";
    p["angle"] = angle;
    p["direction"] = direction;
    image = rotate(image, direction == "cw" ? angle : -angle);
  } else if (kind == "gaussian_blur") {
    const double sigma = p.at("sigma").is_number() ? p.at("sigma").get<double>() : rng.uniform(1.0, 2.5);
    p["sigma"] = sigma;
    image = gaussian_blur(image, sigma);
  } else if (kind == "grey_mesh") {
    grey_mesh(image, p.at("spacing").get<int>(), p.at("line_width").get<int>(), p.at("mesh_alpha").get<double>());
  } else {
    const auto dist = p.at("distribution").get<std::string>() == "uniform" ? NoiseDistribution::uniform
                                                                            : NoiseDistribution::gaussian;
    add_noise(image, rng, dist, p.at("strength").get<double>());
  }
  const auto path = asset_name(logo, feature, options.seed, "png");
  store_png(assets, path, source, image);
  repoint(*img, path, app);
  if (logo.extension == LogoFormat::svg) {
    app.notes = "svg logo rasterized at 4x";
    // Keep the displayed size of the vector original.
    if (!img->has_attribute("width") && !img->has_attribute("height")) {
      img->set_attribute("width", std::to_string((image.width + 2) / 4));
      img->set_attribute("height", std::to_string((image.height + 2) / 4));
    }
  }
  app.params_used = std::move(p);
  return app;
}

}  // namespace phishgen
