#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "direction_sets.hpp"
#include "parallel.hpp"

namespace perronlab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Rectangle whose longest side makes the angle omega with the Oy axis.
// The long axis points along (sin omega, cos omega).
struct OrientedRectangle {
  Point center;
  double length = 1.0;
  double width = 1.0;
  double omega = 0.0;

  Point long_axis() const { return {std::sin(omega), std::cos(omega)}; }
  Point short_axis() const { return {std::cos(omega), -std::sin(omega)}; }
  double area() const { return length * width; }

  bool contains(Point p) const {
    const double dx = p.x - center.x, dy = p.y - center.y;
    const auto a = long_axis(), b = short_axis();
    return std::abs(dx * a.x + dy * a.y) <= 0.5 * length && std::abs(dx * b.x + dy * b.y) <= 0.5 * width;
  }

  std::array<Point, 4> corners() const {
    const auto a = long_axis(), b = short_axis();
    const double hl = 0.5 * length, hw = 0.5 * width;
    return {Point{center.x - hl * a.x - hw * b.x, center.y - hl * a.y - hw * b.y}, Point{center.x + hl * a.x - hw * b.x, center.y + hl * a.y - hw * b.y},
            Point{center.x + hl * a.x + hw * b.x, center.y + hl * a.y + hw * b.y}, Point{center.x - hl * a.x + hw * b.x, center.y - hl * a.y + hw * b.y}};
  }
};

inline void validate(const OrientedRectangle& r) {
  if (!(r.width > 0.0) || !(r.length >= r.width)) throw std::invalid_argument("rectangle needs length >= width > 0");
  if (!(r.omega >= 0.0 && r.omega <= kPi / 2)) throw std::invalid_argument("rectangle angle must lie in [0, pi/2]");
}

// TR: R moved along its longest side by its own length.
inline OrientedRectangle translate_along_length(const OrientedRectangle& r) {
  const auto a = r.long_axis();
  OrientedRectangle t = r;
  t.center = {r.center.x + r.length * a.x, r.center.y + r.length * a.y};
  return t;
}

inline std::vector<OrientedRectangle> translate_all(std::span<const OrientedRectangle> rects) {
  std::vector<OrientedRectangle> out;
  out.reserve(rects.size());
  for (const auto& r : rects) out.push_back(translate_along_length(r));
  return out;
}

struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

inline Box bounding_box(std::span<const OrientedRectangle> rects) {
  if (rects.empty()) throw std::invalid_argument("empty rectangle family");
  Box b{1e300, 1e300, -1e300, -1e300};
  for (const auto& r : rects)
    for (auto c : r.corners()) {
      b.x0 = std::min(b.x0, c.x);
      b.y0 = std::min(b.y0, c.y);
      b.x1 = std::max(b.x1, c.x);
      b.y1 = std::max(b.y1, c.y);
    }
  return b;
}

// Pixel grid over a box; pixel (i, j) has center (x0 + (i + 1/2)/res, y0 + (j + 1/2)/res).
class RasterGrid {
 public:
  RasterGrid(Box box, double resolution) : box_(box), res_(resolution) {
    if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
    if (!(box.x1 > box.x0 && box.y1 > box.y0)) throw std::invalid_argument("empty grid box");
    nx_ = static_cast<std::size_t>(std::ceil((box.x1 - box.x0) * res_));
    ny_ = static_cast<std::size_t>(std::ceil((box.y1 - box.y0) * res_));
    box_.x1 = box.x0 + static_cast<double>(nx_) / res_;
    box_.y1 = box.y0 + static_cast<double>(ny_) / res_;
  }

  // Box padded by `margin` around the family, snapped outward to whole pixels.
  static RasterGrid covering(std::span<const OrientedRectangle> rects, double resolution, double margin) {
    auto b = bounding_box(rects);
    return RasterGrid({b.x0 - margin, b.y0 - margin, b.x1 + margin, b.y1 + margin}, resolution);
  }

  const Box& box() const { return box_; }
  double resolution() const { return res_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t pixels() const { return nx_ * ny_; }
  double pixel_area() const { return 1.0 / (res_ * res_); }
  Point center(std::size_t i, std::size_t j) const {
    return {box_.x0 + (static_cast<double>(i) + 0.5) / res_, box_.y0 + (static_cast<double>(j) + 0.5) / res_};
  }
  bool inside(const OrientedRectangle& r) const {
    for (auto c : r.corners())
      if (c.x < box_.x0 || c.x > box_.x1 || c.y < box_.y0 || c.y > box_.y1) return false;
    return true;
  }

 private:
  Box box_;
  double res_;
  std::size_t nx_ = 0, ny_ = 0;
};

// Row-major indicator over a RasterGrid.
struct Mask {
  std::size_t nx = 0, ny = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(std::size_t nx_, std::size_t ny_, std::uint8_t fill = 0) : nx(nx_), ny(ny_), bits(nx_ * ny_, fill) {}
  std::uint8_t at(std::size_t i, std::size_t j) const { return bits[j * nx + i]; }
  std::uint8_t& at(std::size_t i, std::size_t j) { return bits[j * nx + i]; }
  std::size_t count() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1})); }
};

// Pixels whose center lies in the union. Pixels cut by a rectangle edge are
// resolved by a 4x4 supersample (covered when at least half the subsamples are in).
inline Mask rasterize(std::span<const OrientedRectangle> rects, const RasterGrid& grid, Workers workers = {}) {
  for (const auto& r : rects) {
    validate(r);
    if (!grid.inside(r)) throw std::out_of_range("rectangle escapes the grid");
  }
  Mask m(grid.nx(), grid.ny());
  const double res = grid.resolution();
  const double half_diag = 0.5 * std::sqrt(2.0) / res;
  parallel_for(workers, grid.ny(), [&](std::size_t j) {
    const double yc = grid.center(0, j).y;
    for (const auto& r : rects) {
      const auto c = r.corners();
      const double ylo = std::min({c[0].y, c[1].y, c[2].y, c[3].y}), yhi = std::max({c[0].y, c[1].y, c[2].y, c[3].y});
      if (yc + half_diag < ylo || yc - half_diag > yhi) continue;
      const double xlo = std::min({c[0].x, c[1].x, c[2].x, c[3].x}), xhi = std::max({c[0].x, c[1].x, c[2].x, c[3].x});
      const auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor((xlo - grid.box().x0) * res) - 1));
      const auto i1 = std::min(grid.nx(), static_cast<std::size_t>(std::max(0.0, std::ceil((xhi - grid.box().x0) * res) + 1)));
      const auto a = r.long_axis(), b = r.short_axis();
      for (std::size_t i = i0; i < i1; ++i) {
        if (m.at(i, j)) continue;
        const auto p = grid.center(i, j);
        const double du = (p.x - r.center.x) * a.x + (p.y - r.center.y) * a.y;
        const double dv = (p.x - r.center.x) * b.x + (p.y - r.center.y) * b.y;
        const double su = std::abs(du) - 0.5 * r.length, sv = std::abs(dv) - 0.5 * r.width;
        if (su > half_diag || sv > half_diag) continue;
        if (su < -half_diag && sv < -half_diag) {
          m.at(i, j) = 1;
          continue;
        }
        int in = 0;
        for (int sy = 0; sy < 4; ++sy)
          for (int sx = 0; sx < 4; ++sx) {
            const Point q{p.x + ((sx + 0.5) / 4.0 - 0.5) / res, p.y + ((sy + 0.5) / 4.0 - 0.5) / res};
            in += r.contains(q) ? 1 : 0;
          }
        if (in >= 8) m.at(i, j) = 1;
      }
    }
  });
  return m;
}

inline double union_measure(std::span<const OrientedRectangle> rects, const RasterGrid& grid, Workers workers = {}) {
  return static_cast<double>(rasterize(rects, grid, workers).count()) * grid.pixel_area();
}

// |union of TR_i| / |union of R_i| on one grid.
inline double blow_ratio(std::span<const OrientedRectangle> rects, const RasterGrid& grid, Workers workers = {}) {
  const double base = union_measure(rects, grid, workers);
  if (!(base > 0.0)) throw std::domain_error("original family has zero measure");
  const auto moved = translate_all(rects);
  return union_measure(moved, grid, workers) / base;
}

struct PerronTreeOptions {
  // Common length of the rectangles; the tree has this height.
  double length = 1.0;
  // length / width of every rectangle.
  double aspect = 8.0;
  // Sprouting ratio in (1/2, 1): each merge keeps this fraction of the combined base.
  double alpha = 0.8;
};

// Aspect giving rectangles about 3/4 as wide as the elementary triangles of a tree
// over `count` directions spread across [0, pi/4].
inline double default_tree_aspect(std::size_t count) { return static_cast<double>(count) / 0.75; }

// Perron tree realized by rectangles.
//
// Directions (sorted) split a triangle with apex at height `length` into elementary
// triangles whose side angles bisect consecutive directions. Adjacent groups are merged
// level by level: the right group is slid left so that the pair's main triangle keeps
// a fraction alpha of the combined base. Rectangle i hangs from the apex of its (moved)
// triangle along direction omega_i; its translate TR_i sticks out above the apex,
// where the translates fan apart.
inline std::vector<OrientedRectangle> perron_tree(const DirectionSample& directions, const PerronTreeOptions& opt = {}) {
  auto omegas = directions.angles();
  const std::size_t n = omegas.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("perron tree needs 2^J directions");
  if (!(opt.alpha > 0.5 && opt.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (1/2, 1)");
  if (!(opt.aspect >= 1.0) || !(opt.length > 0.0)) throw std::invalid_argument("need length > 0 and aspect >= 1");
  std::sort(omegas.begin(), omegas.end());
  for (std::size_t i = 1; i < n; ++i)
    if (nearly_equal(omegas[i - 1], omegas[i])) throw std::invalid_argument("duplicate directions");
  for (double w : omegas)
    if (!(w >= 0.0 && w < kPi / 2)) throw std::invalid_argument("perron tree directions must lie in [0, pi/2)");

  // Side angles of the elementary triangles.
  std::vector<double> side(n + 1);
  const double spread = n > 1 ? (omegas.back() - omegas.front()) / static_cast<double>(n - 1) : 0.1;
  side[0] = std::max(0.0, omegas[0] - 0.5 * spread);
  for (std::size_t i = 1; i < n; ++i) side[i] = 0.5 * (omegas[i - 1] + omegas[i]);
  side[n] = std::min(0.5 * (omegas[n - 1] + kPi / 2), omegas[n - 1] + 0.5 * spread);

  const double h = opt.length;
  std::vector<double> shift(n, 0.0);
  struct Group {
    std::size_t first, last;
    double start, width;
  };
  // Base of triangle i: [-h tan(side[i+1]), -h tan(side[i])] relative to the common apex
  // at x = 0, so larger angles sit further left. Groups are kept in x order.
  std::vector<Group> groups;
  for (std::size_t i = n; i-- > 0;) {
    const double lo = -h * std::tan(side[i + 1]);
    groups.push_back({i, i, lo, -h * std::tan(side[i]) - lo});
  }
  while (groups.size() > 1) {
    std::vector<Group> next;
    for (std::size_t g = 0; g + 1 < groups.size(); g += 2) {
      const auto& left = groups[g];
      const auto& right = groups[g + 1];
      const double total = left.width + right.width;
      const double move = (left.start + left.width) - right.start - (1.0 - opt.alpha) * total;
      for (std::size_t i = std::min(right.first, right.last); i <= std::max(right.first, right.last); ++i) shift[i] += move;
      next.push_back({std::min(left.first, right.first), std::max(left.last, right.last), left.start, opt.alpha * total});
    }
    groups = std::move(next);
  }

  std::vector<OrientedRectangle> rects;
  rects.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = omegas[i];
    const Point apex{shift[i], h};
    OrientedRectangle r;
    r.omega = w;
    r.length = h;
    r.width = h / opt.aspect;
    r.center = {apex.x - 0.5 * h * std::sin(w), apex.y - 0.5 * h * std::cos(w)};
    rects.push_back(r);
  }
  return rects;
}

// Evenly spread directions omega_i = (i - 1/2) * span / 2^J, i = 1..2^J.
inline DirectionSample spread_directions(unsigned J, double span = kPi / 4) {
  const std::size_t n = std::size_t{1} << J;
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = (static_cast<double>(i) + 0.5) * span / static_cast<double>(n);
  return DirectionSample::from_angles(a, "spread");
}

// Per-pixel supremum of rectangle averages of a mask.
struct MaxField {
  std::size_t nx = 0, ny = 0;
  std::vector<float> values;
  std::vector<double> lengths;
  std::vector<double> aspects;

  float at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
};

struct MaxOpOptions {
  double min_length = 0.5;
  double max_length = 2.0;
  double min_aspect = 4.0;
  double max_aspect = 16.0;
  // Sub-pixel phases per axis of the rotated sampling lattice.
  unsigned phases = 4;
};

namespace detail {

// Ratio-2 geometric ladder lo, 2 lo, ... up to hi (hi itself included when not hit).
inline std::vector<double> geometric_ladder(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("bad scale bounds");
  std::vector<double> out;
  for (double v = lo; v <= hi * (1 + 1e-12); v *= 2.0) out.push_back(v);
  if (out.back() < hi * (1 - 1e-12)) out.push_back(hi);
  return out;
}

// Sliding-window maximum of length w over a strided 1-D view, result for windows ending
// at each index (i.e. max over [i-w+1, i], clipped at 0).
inline void sliding_max(const float* in, float* out, std::size_t n, std::size_t stride, std::size_t w) {
  std::deque<std::size_t> q;
  for (std::size_t i = 0; i < n; ++i) {
    const float v = in[i * stride];
    while (!q.empty() && in[q.back() * stride] <= v) q.pop_back();
    q.push_back(i);
    if (q.front() + w <= i) q.pop_front();
    out[i * stride] = in[q.front() * stride];
  }
}

}  // namespace detail

// Discrete directional maximal operator.
//
// The sampled family, for each direction omega: lengths on a ratio-2 ladder from
// min_length to max_length, aspects on a ratio-2 ladder from min_aspect to max_aspect,
// and every placement on a lattice aligned with (long axis, short axis) with pixel step,
// offset by `phases` sub-pixel phases per axis. Averages are taken over the part of the
// rectangle inside the grid. This under-approximates the continuous supremum.
inline MaxField discrete_max_op(const Mask& mask, const RasterGrid& grid, const DirectionSample& directions, const MaxOpOptions& opt = {}, Workers workers = {}) {
  if (directions.empty()) throw std::invalid_argument("empty direction set");
  if (mask.nx != grid.nx() || mask.ny != grid.ny()) throw std::invalid_argument("mask does not match grid");
  if (opt.phases < 1) throw std::invalid_argument("phases must be >= 1");
  MaxField field;
  field.nx = grid.nx();
  field.ny = grid.ny();
  field.values.assign(grid.pixels(), 0.0f);
  field.lengths = detail::geometric_ladder(opt.min_length, opt.max_length);
  field.aspects = detail::geometric_ladder(opt.min_aspect, opt.max_aspect);

  const double res = grid.resolution();
  const auto& box = grid.box();
  const double cx = 0.5 * (box.x0 + box.x1), cy = 0.5 * (box.y0 + box.y1);
  const double half_diag = 0.5 * std::hypot(box.x1 - box.x0, box.y1 - box.y0);
  const auto extent = static_cast<std::size_t>(std::ceil(2.0 * half_diag * res)) + 2;
  const auto omegas = directions.angles();

  struct Job {
    double omega;
    unsigned pu, pv;
  };
  std::vector<Job> jobs;
  for (double w : omegas)
    for (unsigned pu = 0; pu < opt.phases; ++pu)
      for (unsigned pv = 0; pv < opt.phases; ++pv) jobs.push_back({w, pu, pv});

  auto partial = parallel_chunks(workers, jobs.size(), [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<float> best(grid.pixels(), 0.0f);
    const std::size_t nu = extent, nv = extent;
    std::vector<double> sum((nu + 1) * (nv + 1));
    std::vector<double> cnt((nu + 1) * (nv + 1));
    std::vector<float> avg(nu * nv), tmp(nu * nv), sup(nu * nv);
    for (std::size_t jb = b; jb < e; ++jb) {
      const auto job = jobs[jb];
      const Point a{std::sin(job.omega), std::cos(job.omega)};
      const Point s{std::cos(job.omega), -std::sin(job.omega)};
      const double ou = -half_diag + static_cast<double>(job.pu) / (opt.phases * res);
      const double ov = -half_diag + static_cast<double>(job.pv) / (opt.phases * res);
      // Resample the mask on the rotated lattice; cell (p, q) centered at
      // c + (ou + (p + 1/2)/res) a + (ov + (q + 1/2)/res) s.
      for (std::size_t q = 0; q <= nv; ++q) sum[q * (nu + 1)] = cnt[q * (nu + 1)] = 0.0;
      for (std::size_t p = 0; p <= nu; ++p) sum[p] = cnt[p] = 0.0;
      for (std::size_t q = 0; q < nv; ++q) {
        double row = 0.0, rowc = 0.0;
        const double v = ov + (static_cast<double>(q) + 0.5) / res;
        for (std::size_t p = 0; p < nu; ++p) {
          const double u = ou + (static_cast<double>(p) + 0.5) / res;
          const double x = cx + u * a.x + v * s.x, y = cy + u * a.y + v * s.y;
          const double fi = std::floor((x - box.x0) * res), fj = std::floor((y - box.y0) * res);
          double val = 0.0, in = 0.0;
          if (fi >= 0 && fj >= 0 && fi < static_cast<double>(grid.nx()) && fj < static_cast<double>(grid.ny())) {
            in = 1.0;
            val = mask.at(static_cast<std::size_t>(fi), static_cast<std::size_t>(fj));
          }
          row += val;
          rowc += in;
          sum[(q + 1) * (nu + 1) + p + 1] = sum[q * (nu + 1) + p + 1] + row;
          cnt[(q + 1) * (nu + 1) + p + 1] = cnt[q * (nu + 1) + p + 1] + rowc;
        }
      }
      std::fill(sup.begin(), sup.end(), 0.0f);
      for (double len : field.lengths)
        for (double asp : field.aspects) {
          const auto lu = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(len * res)));
          const auto lv = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(len / asp * res)));
          if (lu > nu || lv > nv) continue;
          // avg[q][p] for the placement whose last cell is (p, q).
          for (std::size_t q = 0; q < nv; ++q)
            for (std::size_t p = 0; p < nu; ++p) {
              if (p + 1 < lu || q + 1 < lv) {
                avg[q * nu + p] = 0.0f;
                continue;
              }
              const std::size_t p1 = p + 1, q1 = q + 1, p0 = p1 - lu, q0 = q1 - lv;
              auto box_sum = [&](const std::vector<double>& t) {
                return t[q1 * (nu + 1) + p1] - t[q0 * (nu + 1) + p1] - t[q1 * (nu + 1) + p0] + t[q0 * (nu + 1) + p0];
              };
              const double c = box_sum(cnt);
              avg[q * nu + p] = c > 0.5 ? static_cast<float>(box_sum(sum) / c) : 0.0f;
            }
          // Cell (p, q) is covered by placements ending in [p, p + lu - 1] x [q, q + lv - 1]:
          // a forward sliding max, done as a backward one on reversed indices.
          for (std::size_t q = 0; q < nv; ++q) {
            std::vector<float> rin(nu), rout(nu);
            for (std::size_t p = 0; p < nu; ++p) rin[p] = avg[q * nu + (nu - 1 - p)];
            detail::sliding_max(rin.data(), rout.data(), nu, 1, lu);
            for (std::size_t p = 0; p < nu; ++p) tmp[q * nu + (nu - 1 - p)] = rout[p];
          }
          for (std::size_t p = 0; p < nu; ++p) {
            std::vector<float> rin(nv), rout(nv);
            for (std::size_t q = 0; q < nv; ++q) rin[q] = tmp[(nv - 1 - q) * nu + p];
            detail::sliding_max(rin.data(), rout.data(), nv, 1, lv);
            for (std::size_t q = 0; q < nv; ++q) sup[(nv - 1 - q) * nu + p] = std::max(sup[(nv - 1 - q) * nu + p], rout[q]);
          }
        }
      // Pull back to the pixel grid: each pixel reads the rotated cell containing its center.
      for (std::size_t j = 0; j < grid.ny(); ++j)
        for (std::size_t i = 0; i < grid.nx(); ++i) {
          const auto c = grid.center(i, j);
          const double dx = c.x - cx, dy = c.y - cy;
          const double fu = std::floor((dx * a.x + dy * a.y - ou) * res), fv = std::floor((dx * s.x + dy * s.y - ov) * res);
          if (fu < 0 || fv < 0 || fu >= static_cast<double>(nu) || fv >= static_cast<double>(nv)) continue;
          auto& dst = best[j * grid.nx() + i];
          dst = std::max(dst, sup[static_cast<std::size_t>(fv) * nu + static_cast<std::size_t>(fu)]);
        }
    }
    return best;
  });
  for (const auto& p : partial)
    for (std::size_t i = 0; i < p.size(); ++i) field.values[i] = std::max(field.values[i], p[i]);
  return field;
}

}  // namespace perronlab
