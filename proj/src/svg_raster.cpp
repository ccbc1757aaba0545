// SPDX-License-Identifier: Apache-2.0
// Just enough SVG to turn flat vector logos into pixels: basic shapes and
// paths with solid fills, group transforms and opacity. Strokes, gradients
// (first stop colour is used), text, masks and filters are ignored.
#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>

#include "phishgen/error.hpp"
#include "phishgen/html.hpp"
#include "phishgen/image.hpp"

namespace phishgen {
namespace {

struct Point {
  double x = 0, y = 0;
};

struct Affine {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;
  Point apply(Point p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }
  Affine operator*(const Affine& o) const {
    return {a * o.a + c * o.b, b * o.a + d * o.b, a * o.c + c * o.d, b * o.c + d * o.d,
            a * o.e + c * o.f + e, b * o.e + d * o.f + f};
  }
};

using Polygon = std::vector<Point>;

struct Paint {
  std::array<double, 3> rgb{0, 0, 0};
  bool none = false;
};

struct Style {
  Paint fill;
  double fill_opacity = 1;
  double opacity = 1;
  bool even_odd = false;
};

// Reads numbers separated by whitespace and/or commas.
class NumberReader {
 public:
  explicit NumberReader(std::string_view s) : s_(s) {}

  void skip_separators() {
    while (pos_ < s_.size() && (std::isspace(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == ',')) ++pos_;
  }
  bool at_number() {
    skip_separators();
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
  }
  std::optional<double> number() {
    if (!at_number()) return std::nullopt;
    std::size_t end = pos_;
    if (s_[end] == '-' || s_[end] == '+') ++end;
    bool dot = false;
    while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || (s_[end] == '.' && !dot))) {
      if (s_[end] == '.') dot = true;
      ++end;
    }
    if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < s_.size() && (s_[e] == '-' || s_[e] == '+')) ++e;
      if (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e]))) {
        end = e;
        while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
      }
    }
    const std::string text(s_.substr(pos_, end - pos_));
    pos_ = end;
    try {
      return std::stod(text);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  // Arc flags may be written without separators ("a1 1 0 01 5 5").
  std::optional<double> flag() {
    skip_separators();
    if (pos_ < s_.size() && (s_[pos_] == '0' || s_[pos_] == '1')) return s_[pos_++] - '0';
    return std::nullopt;
  }
  std::optional<char> command() {
    skip_separators();
    if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) return s_[pos_++];
    return std::nullopt;
  }
  bool done() {
    skip_separators();
    return pos_ >= s_.size();
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

double length_value(const std::string* text, double fallback) {
  if (!text || text->empty() || text->find('%') != std::string::npos) return fallback;
  NumberReader r(*text);
  return r.number().value_or(fallback);
}

std::optional<std::array<double, 3>> parse_colour(std::string value) {
  std::transform(value.begin(), value.end(), value.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  value.erase(std::remove_if(value.begin(), value.end(), [](unsigned char c) { return std::isspace(c); }),
              value.end());
  static const std::map<std::string, std::array<double, 3>> named = {
      {"black", {0, 0, 0}},       {"white", {255, 255, 255}}, {"red", {255, 0, 0}},
      {"green", {0, 128, 0}},     {"blue", {0, 0, 255}},      {"gray", {128, 128, 128}},
      {"grey", {128, 128, 128}},  {"yellow", {255, 255, 0}},  {"orange", {255, 165, 0}},
      {"purple", {128, 0, 128}},  {"navy", {0, 0, 128}},      {"silver", {192, 192, 192}},
      {"currentcolor", {0, 0, 0}}};
  if (auto it = named.find(value); it != named.end()) return it->second;
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  if (value.size() == 4 && value[0] == '#') {
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
      const int v = hex(value[static_cast<std::size_t>(i) + 1]);
      if (v < 0) return std::nullopt;
      out[static_cast<std::size_t>(i)] = v * 17;
    }
    return out;
  }
  if (value.size() == 7 && value[0] == '#') {
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
      const int hi = hex(value[static_cast<std::size_t>(2 * i + 1)]);
      const int lo = hex(value[static_cast<std::size_t>(2 * i + 2)]);
      if (hi < 0 || lo < 0) return std::nullopt;
      out[static_cast<std::size_t>(i)] = hi * 16 + lo;
    }
    return out;
  }
  if (value.starts_with("rgb(") && value.back() == ')') {
    NumberReader r(std::string_view(value).substr(4, value.size() - 5));
    std::array<double, 3> out{};
    for (auto& v : out) {
      auto n = r.number();
      if (!n) return std::nullopt;
      v = std::clamp(*n, 0.0, 255.0);
    }
    return out;
  }
  return std::nullopt;
}

// Presentation attribute or the matching declaration in style="".
std::optional<std::string> property(const Node& n, std::string_view name) {
  if (const auto* style = n.attribute("style")) {
    std::string_view s = *style;
    std::size_t pos = 0;
    while (pos < s.size()) {
      auto end = s.find(';', pos);
      if (end == std::string_view::npos) end = s.size();
      auto decl = s.substr(pos, end - pos);
      pos = end + 1;
      const auto colon = decl.find(':');
      if (colon == std::string_view::npos) continue;
      auto trim = [](std::string_view t) {
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
        return t;
      };
      if (trim(decl.substr(0, colon)) == name) return std::string(trim(decl.substr(colon + 1)));
    }
  }
  if (const auto* v = n.attribute(name)) return *v;
  return std::nullopt;
}

Affine parse_transform(std::string_view text) {
  Affine m;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find('(', pos);
    if (open == std::string_view::npos) break;
    const auto close = text.find(')', open);
    if (close == std::string_view::npos) break;
    std::string name(text.substr(pos, open - pos));
    name.erase(std::remove_if(name.begin(), name.end(),
                              [](unsigned char c) { return std::isspace(c) || c == ','; }),
               name.end());
    NumberReader r(text.substr(open + 1, close - open - 1));
    std::vector<double> args;
    while (auto v = r.number()) args.push_back(*v);
    Affine t;
    if (name == "translate" && !args.empty()) {
      t.e = args[0];
      t.f = args.size() > 1 ? args[1] : 0;
    } else if (name == "scale" && !args.empty()) {
      t.a = args[0];
      t.d = args.size() > 1 ? args[1] : args[0];
    } else if (name == "matrix" && args.size() == 6) {
      t = {args[0], args[1], args[2], args[3], args[4], args[5]};
    } else if (name == "rotate" && !args.empty()) {
      const double r0 = args[0] * std::numbers::pi / 180;
      Affine rot{std::cos(r0), std::sin(r0), -std::sin(r0), std::cos(r0), 0, 0};
      if (args.size() == 3) {
        Affine to{1, 0, 0, 1, args[1], args[2]};
        Affine back{1, 0, 0, 1, -args[1], -args[2]};
        rot = to * rot * back;
      }
      t = rot;
    } else if (name == "skewx" && !args.empty()) {
      t.c = std::tan(args[0] * std::numbers::pi / 180);
    } else if (name == "skewy" && !args.empty()) {
      t.b = std::tan(args[0] * std::numbers::pi / 180);
    }
    m = m * t;
    pos = close + 1;
  }
  return m;
}

void ellipse_polygon(std::vector<Polygon>& out, double cx, double cy, double rx, double ry) {
  if (rx <= 0 || ry <= 0) return;
  Polygon p;
  constexpr int kSteps = 64;
  for (int i = 0; i < kSteps; ++i) {
    const double t = 2 * std::numbers::pi * i / kSteps;
    p.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
  }
  out.push_back(std::move(p));
}

void arc_to(Polygon& poly, Point from, double rx, double ry, double phi_deg, bool large, bool sweep, Point to) {
  if (rx == 0 || ry == 0) {
    poly.push_back(to);
    return;
  }
  rx = std::fabs(rx);
  ry = std::fabs(ry);
  const double phi = phi_deg * std::numbers::pi / 180;
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double dx = (from.x - to.x) / 2, dy = (from.y - to.y) / 2;
  const double x1 = cp * dx + sp * dy, y1 = -sp * dx + cp * dy;
  const double lambda = (x1 * x1) / (rx * rx) + (y1 * y1) / (ry * ry);
  if (lambda > 1) {
    rx *= std::sqrt(lambda);
    ry *= std::sqrt(lambda);
  }
  const double num = rx * rx * ry * ry - rx * rx * y1 * y1 - ry * ry * x1 * x1;
  const double den = rx * rx * y1 * y1 + ry * ry * x1 * x1;
  double coef = den == 0 ? 0 : std::sqrt(std::max(0.0, num / den));
  if (large == sweep) coef = -coef;
  const double cxp = coef * rx * y1 / ry, cyp = -coef * ry * x1 / rx;
  const double cx = cp * cxp - sp * cyp + (from.x + to.x) / 2;
  const double cy = sp * cxp + cp * cyp + (from.y + to.y) / 2;
  auto angle = [](double ux, double uy, double vx, double vy) {
    return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
  };
  const double t1 = angle(1, 0, (x1 - cxp) / rx, (y1 - cyp) / ry);
  double dt = angle((x1 - cxp) / rx, (y1 - cyp) / ry, (-x1 - cxp) / rx, (-y1 - cyp) / ry);
  if (!sweep && dt > 0) dt -= 2 * std::numbers::pi;
  if (sweep && dt < 0) dt += 2 * std::numbers::pi;
  const int steps = std::max(4, static_cast<int>(std::ceil(std::fabs(dt) / (std::numbers::pi / 16))));
  for (int i = 1; i <= steps; ++i) {
    const double t = t1 + dt * i / steps;
    poly.push_back({cx + rx * std::cos(t) * cp - ry * std::sin(t) * sp,
                    cy + rx * std::cos(t) * sp + ry * std::sin(t) * cp});
  }
}

std::vector<Polygon> path_polygons(std::string_view d) {
  std::vector<Polygon> out;
  NumberReader r(d);
  Polygon current;
  Point pen, start, last_ctrl;
  char prev = 0;
  char cmd = 0;
  auto flush = [&] {
    if (current.size() >= 3) out.push_back(current);
    current.clear();
  };
  constexpr int kCurveSteps = 16;
  while (!r.done()) {
    if (auto c = r.command()) {
      cmd = *c;
    } else if (cmd == 0) {
      break;
    }
    const bool rel = std::islower(static_cast<unsigned char>(cmd));
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(cmd)));
    auto pt = [&](double x, double y) { return rel ? Point{pen.x + x, pen.y + y} : Point{x, y}; };
    auto num = [&]() -> double {
      auto v = r.number();
      if (!v) throw Error(ErrorCode::undecodable_image, "bad SVG path data");
      return *v;
    };
    switch (up) {
      case 'M': {
        flush();
        const double x = num(), y = num();
        pen = pt(x, y);
        start = pen;
        current.push_back(pen);
        cmd = rel ? 'l' : 'L';
        break;
      }
      case 'L': {
        const double x = num(), y = num();
        pen = pt(x, y);
        current.push_back(pen);
        break;
      }
      case 'H': {
        const double x = num();
        pen.x = rel ? pen.x + x : x;
        current.push_back(pen);
        break;
      }
      case 'V': {
        const double y = num();
        pen.y = rel ? pen.y + y : y;
        current.push_back(pen);
        break;
      }
      case 'C':
      case 'S': {
        Point c1;
        if (up == 'C') {
          const double x = num(), y = num();
          c1 = pt(x, y);
        } else {
          const char pu = static_cast<char>(std::toupper(static_cast<unsigned char>(prev)));
          c1 = (pu == 'C' || pu == 'S') ? Point{2 * pen.x - last_ctrl.x, 2 * pen.y - last_ctrl.y} : pen;
        }
        const double x2 = num(), y2 = num();
        const Point c2 = pt(x2, y2);
        const double x = num(), y = num();
        const Point end = pt(x, y);
        for (int i = 1; i <= kCurveSteps; ++i) {
          const double t = static_cast<double>(i) / kCurveSteps, u = 1 - t;
          current.push_back({u * u * u * pen.x + 3 * u * u * t * c1.x + 3 * u * t * t * c2.x + t * t * t * end.x,
                             u * u * u * pen.y + 3 * u * u * t * c1.y + 3 * u * t * t * c2.y + t * t * t * end.y});
        }
        last_ctrl = c2;
        pen = end;
        break;
      }
      case 'Q':
      case 'T': {
        Point c1;
        if (up == 'Q') {
          const double x = num(), y = num();
          c1 = pt(x, y);
        } else {
          const char pu = static_cast<char>(std::toupper(static_cast<unsigned char>(prev)));
          c1 = (pu == 'Q' || pu == 'T') ? Point{2 * pen.x - last_ctrl.x, 2 * pen.y - last_ctrl.y} : pen;
        }
        const double x = num(), y = num();
        const Point end = pt(x, y);
        for (int i = 1; i <= kCurveSteps; ++i) {
          const double t = static_cast<double>(i) / kCurveSteps, u = 1 - t;
          current.push_back({u * u * pen.x + 2 * u * t * c1.x + t * t * end.x,
                             u * u * pen.y + 2 * u * t * c1.y + t * t * end.y});
        }
        last_ctrl = c1;
        pen = end;
        break;
      }
      case 'A': {
        const double rx = num(), ry = num(), rot = num();
        const auto large = r.flag();
        const auto sweep = r.flag();
        if (!large || !sweep) throw Error(ErrorCode::undecodable_image, "bad SVG arc flags");
        const double x = num(), y = num();
        const Point end = pt(x, y);
        if (current.empty()) current.push_back(pen);
        arc_to(current, pen, rx, ry, rot, *large != 0, *sweep != 0, end);
        pen = end;
        break;
      }
      case 'Z': {
        flush();
        pen = start;
        current.push_back(pen);
        break;
      }
      default:
        throw Error(ErrorCode::undecodable_image, std::string("unsupported SVG path command ") + cmd);
    }
    prev = cmd;
  }
  flush();
  return out;
}

std::vector<Polygon> point_list(const std::string* text) {
  if (!text) return {};
  NumberReader r(*text);
  Polygon p;
  while (true) {
    auto x = r.number();
    auto y = r.number();
    if (!x || !y) break;
    p.push_back({*x, *y});
  }
  if (p.size() < 3) return {};
  return {p};
}

// Scanline fill with 4 sub-scanlines per row and exact horizontal coverage.
void fill_polygons(RasterImage& img, const std::vector<Polygon>& polys, const Paint& paint, double alpha,
                   bool even_odd) {
  if (paint.none || alpha <= 0 || polys.empty()) return;
  struct Edge {
    double x0, y0, x1, y1;
    int dir;
  };
  std::vector<Edge> edges;
  double ymin = 1e300, ymax = -1e300;
  for (const auto& poly : polys) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& a = poly[i];
      const auto& b = poly[(i + 1) % poly.size()];
      if (a.y == b.y) continue;
      if (a.y < b.y) {
        edges.push_back({a.x, a.y, b.x, b.y, 1});
      } else {
        edges.push_back({b.x, b.y, a.x, a.y, -1});
      }
      ymin = std::min({ymin, a.y, b.y});
      ymax = std::max({ymax, a.y, b.y});
    }
  }
  if (edges.empty()) return;
  constexpr int kSub = 4;
  const int y_begin = std::max(0, static_cast<int>(std::floor(ymin)));
  const int y_end = std::min(img.height, static_cast<int>(std::ceil(ymax)));
  std::vector<double> coverage(static_cast<std::size_t>(img.width) + 1);
  std::vector<std::pair<double, int>> xs;
  for (int y = y_begin; y < y_end; ++y) {
    std::fill(coverage.begin(), coverage.end(), 0.0);
    for (int s = 0; s < kSub; ++s) {
      const double sy = y + (s + 0.5) / kSub;
      xs.clear();
      for (const auto& e : edges) {
        if (sy < e.y0 || sy >= e.y1) continue;
        xs.emplace_back(e.x0 + (sy - e.y0) * (e.x1 - e.x0) / (e.y1 - e.y0), e.dir);
      }
      std::sort(xs.begin(), xs.end());
      int winding = 0;
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        winding += xs[i].second;
        const bool inside = even_odd ? ((i + 1) % 2 == 1) : winding != 0;
        if (!inside) continue;
        const double a = std::clamp(xs[i].first, 0.0, static_cast<double>(img.width));
        const double b = std::clamp(xs[i + 1].first, 0.0, static_cast<double>(img.width));
        if (b <= a) continue;
        const int ia = static_cast<int>(std::floor(a));
        const int ib = static_cast<int>(std::floor(b));
        if (ia == ib) {
          coverage[static_cast<std::size_t>(ia)] += (b - a) / kSub;
        } else {
          coverage[static_cast<std::size_t>(ia)] += (ia + 1 - a) / kSub;
          for (int x = ia + 1; x < ib; ++x) coverage[static_cast<std::size_t>(x)] += 1.0 / kSub;
          if (ib < img.width) coverage[static_cast<std::size_t>(ib)] += (b - ib) / kSub;
        }
      }
    }
    for (int x = 0; x < img.width; ++x) {
      const double cov = std::min(1.0, coverage[static_cast<std::size_t>(x)]);
      if (cov <= 0) continue;
      auto* px = img.at(x, y);
      const double as = alpha * cov;
      const double ad = px[3] / 255.0;
      const double ao = as + ad * (1 - as);
      for (int k = 0; k < 3; ++k)
        px[k] = static_cast<std::uint8_t>(
            std::clamp(std::lround((paint.rgb[static_cast<std::size_t>(k)] * as + px[k] * ad * (1 - as)) / ao), 0L, 255L));
      px[3] = static_cast<std::uint8_t>(std::clamp(std::lround(ao * 255), 0L, 255L));
    }
  }
}

class Renderer {
 public:
  Renderer(const Document& doc, RasterImage& img) : doc_(doc), img_(img) {
    doc.visit([&](const Node& n) {
      if (const auto* id = n.attribute("id")) ids_[*id] = &n;
    });
  }

  void render(const Node& node, const Affine& m, const Style& inherited) {
    for (const auto& child : node.children()) {
      if (!child->is_element()) continue;
      const auto& tag = child->tag();
      if (tag == "defs" || tag == "clippath" || tag == "mask" || tag == "symbol" || tag == "style" ||
          tag == "title" || tag == "desc" || tag == "text" || tag == "lineargradient" ||
          tag == "radialgradient" || tag == "pattern" || tag == "filter" || tag == "metadata")
        continue;
      if (auto display = property(*child, "display"); display && *display == "none") continue;
      Style style = resolve_style(*child, inherited);
      Affine cm = m;
      if (const auto* t = child->attribute("transform")) cm = m * parse_transform(*t);
      if (tag == "g" || tag == "svg" || tag == "a") {
        render(*child, cm, style);
        continue;
      }
      auto polys = shape(*child);
      for (auto& poly : polys) {
        for (auto& p : poly) p = cm.apply(p);
      }
      fill_polygons(img_, polys, style.fill, style.fill_opacity * style.opacity, style.even_odd);
    }
  }

 private:
  const Document& doc_;
  RasterImage& img_;
  std::map<std::string, const Node*> ids_;

  Style resolve_style(const Node& n, const Style& inherited) {
    Style s = inherited;
    if (auto fill = property(n, "fill")) {
      if (*fill == "none" || *fill == "transparent") {
        s.fill.none = true;
      } else if (fill->starts_with("url(")) {
        s.fill = gradient_paint(*fill);
      } else if (auto c = parse_colour(*fill)) {
        s.fill = {*c, false};
      }
    }
    if (auto v = property(n, "fill-opacity")) s.fill_opacity = std::clamp(length_value(&*v, 1), 0.0, 1.0);
    if (auto v = property(n, "opacity")) s.opacity = inherited.opacity * std::clamp(length_value(&*v, 1), 0.0, 1.0);
    if (auto v = property(n, "fill-rule")) s.even_odd = *v == "evenodd";
    return s;
  }

  Paint gradient_paint(const std::string& ref) {
    const auto hash = ref.find('#');
    const auto close = ref.find(')');
    if (hash != std::string::npos && close != std::string::npos && close > hash) {
      if (auto it = ids_.find(ref.substr(hash + 1, close - hash - 1)); it != ids_.end()) {
        for (const auto& stop : it->second->children()) {
          if (!stop->is_element("stop")) continue;
          if (auto colour = property(*stop, "stop-color")) {
            if (auto c = parse_colour(*colour)) return {*c, false};
          }
        }
      }
    }
    return {{0, 0, 0}, false};
  }

  std::vector<Polygon> shape(const Node& n) {
    std::vector<Polygon> out;
    const auto& tag = n.tag();
    if (tag == "rect") {
      const double x = length_value(n.attribute("x"), 0), y = length_value(n.attribute("y"), 0);
      const double w = length_value(n.attribute("width"), 0), h = length_value(n.attribute("height"), 0);
      if (w <= 0 || h <= 0) return out;
      double rx = length_value(n.attribute("rx"), -1), ry = length_value(n.attribute("ry"), -1);
      if (rx < 0) rx = ry;
      if (ry < 0) ry = rx;
      rx = std::clamp(rx, 0.0, w / 2);
      ry = std::clamp(ry, 0.0, h / 2);
      if (rx <= 0 || ry <= 0) {
        out.push_back({{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}});
        return out;
      }
      Polygon p;
      constexpr int kCorner = 8;
      const std::array<Point, 4> centres = {Point{x + w - rx, y + ry}, Point{x + w - rx, y + h - ry},
                                            Point{x + rx, y + h - ry}, Point{x + rx, y + ry}};
      for (int c = 0; c < 4; ++c) {
        for (int i = 0; i <= kCorner; ++i) {
          const double t = (c - 1 + static_cast<double>(i) / kCorner) * std::numbers::pi / 2;
          p.push_back({centres[static_cast<std::size_t>(c)].x + rx * std::cos(t),
                       centres[static_cast<std::size_t>(c)].y + ry * std::sin(t)});
        }
      }
      out.push_back(std::move(p));
    } else if (tag == "circle") {
      const double r = length_value(n.attribute("r"), 0);
      ellipse_polygon(out, length_value(n.attribute("cx"), 0), length_value(n.attribute("cy"), 0), r, r);
    } else if (tag == "ellipse") {
      ellipse_polygon(out, length_value(n.attribute("cx"), 0), length_value(n.attribute("cy"), 0),
                      length_value(n.attribute("rx"), 0), length_value(n.attribute("ry"), 0));
    } else if (tag == "polygon" || tag == "polyline") {
      out = point_list(n.attribute("points"));
    } else if (tag == "path") {
      if (const auto* d = n.attribute("d")) out = path_polygons(*d);
    } else if (tag == "use") {
      const auto* href = n.attribute("href");
      if (!href) href = n.attribute("xlink:href");
      if (href && href->starts_with("#")) {
        if (auto it = ids_.find(href->substr(1)); it != ids_.end() && it->second != &n) out = shape(*it->second);
        const double dx = length_value(n.attribute("x"), 0), dy = length_value(n.attribute("y"), 0);
        for (auto& poly : out) {
          for (auto& p : poly) p = {p.x + dx, p.y + dy};
        }
      }
    }
    return out;
  }
};

const Node* svg_root(const Document& doc) {
  const Node* found = nullptr;
  doc.visit([&](const Node& n) {
    if (!found && n.is_element("svg")) found = &n;
  });
  return found;
}

struct Geometry {
  double width = 0, height = 0;
  std::array<double, 4> view{0, 0, 0, 0};
};

Geometry geometry(const Node& svg) {
  Geometry g;
  if (const auto* vb = svg.attribute("viewbox")) {
    NumberReader r(*vb);
    for (auto& v : g.view) v = r.number().value_or(0);
  }
  g.width = length_value(svg.attribute("width"), g.view[2]);
  g.height = length_value(svg.attribute("height"), g.view[3]);
  if (g.view[2] <= 0 || g.view[3] <= 0) g.view = {0, 0, g.width, g.height};
  return g;
}

}  // namespace

std::pair<double, double> svg_size(std::string_view svg) {
  try {
    const auto doc = parse_document(svg);
    const auto* root = svg_root(doc);
    if (!root) return {0, 0};
    const auto g = geometry(*root);
    if (g.width <= 0 || g.height <= 0) return {0, 0};
    return {g.width, g.height};
  } catch (const Error&) {
    return {0, 0};
  }
}

RasterImage rasterize_svg(std::string_view svg, double scale) {
  const auto doc = parse_document(svg);
  const auto* root = svg_root(doc);
  if (!root) throw Error(ErrorCode::undecodable_image, "no <svg> element");
  auto g = geometry(*root);
  if (g.width <= 0 || g.height <= 0) {
    // Browser default for replaced elements without a size.
    g.width = 300;
    g.height = 150;
    g.view = {0, 0, 300, 150};
  }
  constexpr int kMaxSide = 4096;
  const int w = std::clamp(static_cast<int>(std::ceil(g.width * scale)), 1, kMaxSide);
  const int h = std::clamp(static_cast<int>(std::ceil(g.height * scale)), 1, kMaxSide);
  RasterImage img(w, h);
  const Affine view{w / g.view[2], 0, 0, h / g.view[3], -g.view[0] * w / g.view[2], -g.view[1] * h / g.view[3]};
  Renderer(doc, img).render(*root, view, Style{});
  return img;
}

}  // namespace phishgen
