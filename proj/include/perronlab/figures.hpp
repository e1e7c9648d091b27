#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "kakeya.hpp"
#include "witnesses.hpp"

namespace perronlab {

// Minimal SVG writer. Coordinates are printed with fixed precision so output bytes
// depend only on the inputs.
class Svg {
 public:
  Svg(double width, double height) : w_(width), h_(height) {}

  void rect(double x, double y, double w, double h, const std::string& style) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" style=\"" + style + "\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& style) {
    body_ += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(r) + "\" style=\"" + style + "\"/>\n";
  }
  void line(double x0, double y0, double x1, double y1, const std::string& style) {
    body_ += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y1) + "\" style=\"" + style + "\"/>\n";
  }
  void polygon(std::span<const Point> pts, const std::string& style) {
    std::string p;
    for (const auto& q : pts) p += (p.empty() ? "" : " ") + num(q.x) + "," + num(q.y);
    body_ += "<polygon points=\"" + p + "\" style=\"" + style + "\"/>\n";
  }
  void text(double x, double y, const std::string& s, double size = 12) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) + "\" font-family=\"sans-serif\">" + s + "</text>\n";
  }

  std::string str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w_) + "\" height=\"" + num(h_) + "\" viewBox=\"0 0 " +
           num(w_) + " " + num(h_) + "\">\n<rect width=\"100%\" height=\"100%\" style=\"fill:white\"/>\n" + body_ + "</svg>\n";
  }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", std::abs(v) < 5e-4 ? 0.0 : v);
    return buf;
  }

 private:
  double w_, h_;
  std::string body_;
};

// Inverse values on a log axis, one dot per value.
inline std::string scatter_figure(std::span<const double> values, const std::string& title) {
  Svg svg(720, 160);
  svg.text(20, 24, title);
  if (values.empty()) return svg.str();
  const double lo = std::log10(*std::min_element(values.begin(), values.end()));
  const double hi = std::log10(*std::max_element(values.begin(), values.end()));
  const double span = hi > lo ? hi - lo : 1.0;
  svg.line(40, 100, 680, 100, "stroke:black;stroke-width:1");
  for (double v : values) svg.circle(40 + 640 * (std::log10(v) - lo) / span, 100, 3, "fill:steelblue");
  svg.text(40, 130, "10^" + Svg::num(lo), 10);
  svg.text(640, 130, "10^" + Svg::num(hi), 10);
  return svg.str();
}

// The filled interval I_d split into its 2^N parts, every point of I_d, and the
// extracted witness points.
template <UniformSource S>
std::string dyadic_filling_figure(const WitnessReport& r, const S& stream) {
  Svg svg(720, 200);
  if (!r.found || !r.d) {
    svg.text(20, 24, "no filled dyadic interval");
    return svg.str();
  }
  const unsigned N = r.N;
  const std::uint64_t parts = std::uint64_t{1} << N;
  const auto d = *r.d;
  svg.text(20, 24, "I_d for d = " + std::to_string(d) + ", split into " + std::to_string(parts) + " parts");
  const double x0 = 40, x1 = 680, y = 110;
  for (std::uint64_t l = 1; l <= parts; ++l) {
    const double a = x0 + (x1 - x0) * static_cast<double>(l - 1) / static_cast<double>(parts);
    const double b = x0 + (x1 - x0) * static_cast<double>(l) / static_cast<double>(parts);
    svg.rect(a, y - 20, b - a, 40, l % 2 == 0 ? "fill:#cfe3f5;stroke:black;stroke-width:0.5" : "fill:#eeeeee;stroke:black;stroke-width:0.5");
  }
  for (std::uint64_t k = 1; k <= static_cast<std::uint64_t>(d); ++k) {
    const auto p = locate_inverse_point(k, stream.value(k));
    if (p.d != d) continue;
    svg.circle(x0 + (x1 - x0) * p.t, y, 3, "fill:gray");
  }
  for (double u : r.witness.values()) svg.circle(x0 + (x1 - x0) * (u - 1.0), y, 5, "fill:none;stroke:crimson;stroke-width:2");
  svg.text(x0, 160, "2^d", 10);
  svg.text(x1 - 20, 160, "2^(d+1)", 10);
  return svg.str();
}

// H_{a,N} against its perturbation {ka / X_ka}.
inline std::string homogeneous_figure(const WitnessReport& r) {
  Svg svg(720, 180);
  if (!r.found || !r.a) {
    svg.text(20, 24, "no homogeneous set found");
    return svg.str();
  }
  const double a = static_cast<double>(*r.a);
  const auto w = r.witness.values();
  const double hi = w.empty() ? a : w.back();
  svg.text(20, 24, "H_{a,N} (a = " + std::to_string(*r.a) + ") and its perturbation");
  auto xs = [&](double v) { return 40 + 640 * v / (hi * 1.05); };
  svg.line(40, 70, 680, 70, "stroke:black");
  svg.line(40, 130, 680, 130, "stroke:black");
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double h = a * static_cast<double>(k + 1);
    svg.circle(xs(h), 70, 4, "fill:steelblue");
    svg.circle(xs(w[k]), 130, 4, "fill:crimson");
    svg.line(xs(h), 70, xs(w[k]), 130, "stroke:gray;stroke-dasharray:2,2");
  }
  return svg.str();
}

// Rectangle outlines (R solid, TR dashed) optionally over a level set of a field.
inline std::string rectangles_figure(std::span<const OrientedRectangle> rects, const RasterGrid& grid, const MaxField* field = nullptr, float level = 0.5f) {
  const auto& b = grid.box();
  const double scale = 600.0 / std::max(b.x1 - b.x0, b.y1 - b.y0);
  const double W = (b.x1 - b.x0) * scale + 40, H = (b.y1 - b.y0) * scale + 40;
  Svg svg(W, H);
  auto tx = [&](Point p) { return Point{20 + (p.x - b.x0) * scale, H - 20 - (p.y - b.y0) * scale}; };
  if (field) {
    // One rect per horizontal run of pixels at or above the level.
    const double px = scale / grid.resolution();
    for (std::size_t j = 0; j < field->ny; ++j) {
      std::size_t i = 0;
      while (i < field->nx) {
        if (field->at(i, j) < level) {
          ++i;
          continue;
        }
        const std::size_t s = i;
        while (i < field->nx && field->at(i, j) >= level) ++i;
        const auto p = tx({b.x0 + static_cast<double>(s) / grid.resolution(), b.y0 + static_cast<double>(j + 1) / grid.resolution()});
        svg.rect(p.x, p.y, px * static_cast<double>(i - s), px, "fill:#f6d5a8;stroke:none");
      }
    }
  }
  for (const auto& r : rects) {
    auto c = r.corners();
    std::vector<Point> pts;
    for (auto q : c) pts.push_back(tx(q));
    svg.polygon(pts, "fill:none;stroke:steelblue;stroke-width:1");
    auto t = translate_along_length(r).corners();
    std::vector<Point> tp;
    for (auto q : t) tp.push_back(tx(q));
    svg.polygon(tp, "fill:none;stroke:crimson;stroke-width:1;stroke-dasharray:3,2");
  }
  return svg.str();
}

// Binary PGM (P5), top row first.
inline std::string pgm_bytes(std::size_t nx, std::size_t ny, auto&& gray_at) {
  std::string out = "P5\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n255\n";
  out.reserve(out.size() + nx * ny);
  for (std::size_t r = 0; r < ny; ++r) {
    const std::size_t j = ny - 1 - r;
    for (std::size_t i = 0; i < nx; ++i) out.push_back(static_cast<char>(gray_at(i, j)));
  }
  return out;
}

inline std::string mask_pgm(const Mask& m) {
  return pgm_bytes(m.nx, m.ny, [&](std::size_t i, std::size_t j) { return m.at(i, j) ? 255 : 0; });
}

inline std::string field_pgm(const MaxField& f) {
  return pgm_bytes(f.nx, f.ny, [&](std::size_t i, std::size_t j) { return static_cast<int>(std::lround(std::clamp(f.at(i, j), 0.0f, 1.0f) * 255.0f)); });
}

}  // namespace perronlab
