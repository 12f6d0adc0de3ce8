#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "carleson/geometry.hpp"

namespace carleson {

enum class RegionLabel { InPlus, InMinus, OnGamma };

// A planar curve Gamma with a decidable two-sided region structure.
// Either a closed positively oriented simple polyline (bounded interior is
// Omega+), or the region above a compactly supported piecewise-linear graph
// (Omega+ = {y > f(x)}, f = 0 outside the sampled range).
class PlanarDomain {
  public:
    enum class Kind { JordanPolyline, GraphRegion };

    // Jordan polyline. Input may be either orientation; it is normalized so
    // the bounded interior is Omega+. Throws InvalidInput on degenerate or
    // self-intersecting input.
    static PlanarDomain jordan(std::vector<Point> vertices) {
        if (vertices.size() < 3) throw InvalidInput("jordan: need >= 3 vertices");
        PlanarDomain d;
        d.kind_ = Kind::JordanPolyline;
        d.vertices_ = std::move(vertices);
        double area2 = 0.0;
        const std::size_t n = d.vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& a = d.vertices_[i];
            const Point& b = d.vertices_[(i + 1) % n];
            area2 += a.cross(b);
        }
        if (area2 == 0.0) throw InvalidInput("jordan: zero signed area");
        if (area2 < 0.0) std::reverse(d.vertices_.begin(), d.vertices_.end());
        d.check_simple();
        d.finalize();
        return d;
    }

    // Graph region above piecewise-linear samples f on x0 + k*dx.
    static PlanarDomain graph(double x0, double dx, std::vector<double> f) {
        if (f.size() < 2 || dx <= 0.0) throw InvalidInput("graph: need >= 2 samples, dx > 0");
        PlanarDomain d;
        d.kind_ = Kind::GraphRegion;
        d.gx0_ = x0;
        d.gdx_ = dx;
        d.gf_ = std::move(f);
        // Compact support: the profile continues as f = 0 outside the range.
        d.gf_.front() = 0.0;
        d.gf_.back() = 0.0;
        d.finalize();
        return d;
    }

    Kind kind() const { return kind_; }
    const std::vector<Point>& vertices() const { return vertices_; }
    double graph_x0() const { return gx0_; }
    double graph_dx() const { return gdx_; }
    const std::vector<double>& graph_f() const { return gf_; }

    double diameter() const { return diameter_; }
    double snap_tol() const { return snap_tol_; }

    double graph_value(double x) const {
        const double xe = gx0_ + gdx_ * static_cast<double>(gf_.size() - 1);
        if (x <= gx0_ || x >= xe) return 0.0;
        const double t = (x - gx0_) / gdx_;
        const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), gf_.size() - 2);
        const double u = t - static_cast<double>(i);
        return gf_[i] * (1.0 - u) + gf_[i + 1] * u;
    }

    // Appends every Gamma segment that can meet B(center, radius). For graph
    // regions this includes the flat continuations outside the sampled range,
    // clipped to the query window.
    void collect_segments(const Point& center, double radius,
                          std::vector<std::pair<Point, Point>>& out) const {
        if (kind_ == Kind::JordanPolyline) {
            const std::size_t n = vertices_.size();
            for (std::size_t i = 0; i < n; ++i) {
                const Point& a = vertices_[i];
                const Point& b = vertices_[(i + 1) % n];
                // Quick reject on the segment's bounding circle.
                const double mx = 0.5 * (a.x + b.x), my = 0.5 * (a.y + b.y);
                const double half = 0.5 * dist(a, b);
                const double dc = std::hypot(center.x - mx, center.y - my);
                if (dc > radius + half) continue;
                out.emplace_back(a, b);
            }
            return;
        }
        const double lo = center.x - radius - gdx_;
        const double hi = center.x + radius + gdx_;
        const double xe = gx0_ + gdx_ * static_cast<double>(gf_.size() - 1);
        // Left flat continuation.
        if (lo < gx0_) out.emplace_back(Point(std::min(lo, gx0_ - radius), 0.0), Point(gx0_, 0.0));
        const auto i0 = static_cast<std::ptrdiff_t>(std::floor((lo - gx0_) / gdx_));
        const auto i1 = static_cast<std::ptrdiff_t>(std::ceil((hi - gx0_) / gdx_));
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(gf_.size());
        for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, i0);
             i < std::min(n - 1, i1); ++i) {
            out.emplace_back(Point(gx0_ + gdx_ * i, gf_[i]), Point(gx0_ + gdx_ * (i + 1), gf_[i + 1]));
        }
        // Right flat continuation.
        if (hi > xe) out.emplace_back(Point(xe, 0.0), Point(std::max(hi, xe + radius), 0.0));
    }

    double distance_to_gamma(const Point& p) const {
        if (kind_ == Kind::GraphRegion) {
            double best = std::numeric_limits<double>::infinity();
            // Segments within the window that could beat the vertical bound.
            const double vertical = std::fabs(p.y - graph_value(p.x));
            std::vector<std::pair<Point, Point>> segs;
            collect_segments(p, vertical + gdx_, segs);
            for (const auto& [a, b] : segs) best = std::min(best, dist_point_segment(p, a, b));
            return std::min(best, vertical);
        }
        double best = std::numeric_limits<double>::infinity();
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i)
            best = std::min(best, dist_point_segment(p, vertices_[i], vertices_[(i + 1) % n]));
        return best;
    }

    RegionLabel classify(const Point& p) const {
        if (distance_to_gamma(p) <= snap_tol_) return RegionLabel::OnGamma;
        if (kind_ == Kind::GraphRegion)
            return p.y > graph_value(p.x) ? RegionLabel::InPlus : RegionLabel::InMinus;
        return winding_inside(p) ? RegionLabel::InPlus : RegionLabel::InMinus;
    }

  private:
    PlanarDomain() = default;

    bool winding_inside(const Point& p) const {
        // Crossing-number test against the closed polyline.
        bool inside = false;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Point& a = vertices_[j];
            const Point& b = vertices_[i];
            if ((b.y > p.y) != (a.y > p.y)) {
                const double xint = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
                if (p.x < xint) inside = !inside;
            }
        }
        return inside;
    }

    void check_simple() const {
        // Uniform-grid broadphase keeps this near-linear on fractal corpora.
        const std::size_t n = vertices_.size();
        double minx = 1e300, miny = 1e300, maxx = -1e300, maxy = -1e300;
        double total_len = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            minx = std::min(minx, vertices_[i].x);
            maxx = std::max(maxx, vertices_[i].x);
            miny = std::min(miny, vertices_[i].y);
            maxy = std::max(maxy, vertices_[i].y);
            total_len += dist(vertices_[i], vertices_[(i + 1) % n]);
        }
        const double cell = std::max(total_len / static_cast<double>(n), 1e-12);
        const auto key = [&](double x, double y) {
            const auto ix = static_cast<std::int64_t>(std::floor((x - minx) / cell));
            const auto iy = static_cast<std::int64_t>(std::floor((y - miny) / cell));
            return ix * 73856093LL ^ iy * 19349663LL;
        };
        std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
        grid.reserve(n * 2);
        const auto visit_cells = [&](std::size_t i, auto&& fn) {
            const Point& a = vertices_[i];
            const Point& b = vertices_[(i + 1) % n];
            const double x0 = std::min(a.x, b.x), x1 = std::max(a.x, b.x);
            const double y0 = std::min(a.y, b.y), y1 = std::max(a.y, b.y);
            for (double x = x0;; x += cell) {
                for (double y = y0;; y += cell) {
                    fn(key(x, y));
                    if (y >= y1) break;
                }
                if (x >= x1) break;
            }
        };
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::int64_t> keys;
            visit_cells(i, [&](std::int64_t k) {
                if (std::find(keys.begin(), keys.end(), k) != keys.end()) return;
                keys.push_back(k);
                for (std::size_t j : grid[k]) {
                    if (j == i) continue;
                    const bool adjacent = ((i + 1) % n == j) || ((j + 1) % n == i);
                    if (adjacent) continue;
                    if (segments_properly_intersect(vertices_[i], vertices_[(i + 1) % n],
                                                    vertices_[j], vertices_[(j + 1) % n]))
                        throw InvalidInput("jordan: self-intersecting polyline");
                }
            });
            for (std::int64_t k : keys) grid[k].push_back(i);
        }
    }

    static bool segments_properly_intersect(const Point& a, const Point& b, const Point& c,
                                            const Point& d) {
        const auto orient = [](const Point& p, const Point& q, const Point& r) {
            return (q - p).cross(r - p);
        };
        const double o1 = orient(a, b, c), o2 = orient(a, b, d);
        const double o3 = orient(c, d, a), o4 = orient(c, d, b);
        return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
               o4 != 0;
    }

    void finalize() {
        if (kind_ == Kind::JordanPolyline) {
            double minx = 1e300, miny = 1e300, maxx = -1e300, maxy = -1e300;
            for (const Point& v : vertices_) {
                minx = std::min(minx, v.x);
                maxx = std::max(maxx, v.x);
                miny = std::min(miny, v.y);
                maxy = std::max(maxy, v.y);
            }
            diameter_ = std::hypot(maxx - minx, maxy - miny);
        } else {
            const double span = gdx_ * static_cast<double>(gf_.size() - 1);
            double fmax = 0.0;
            for (double v : gf_) fmax = std::max(fmax, std::fabs(v));
            diameter_ = std::max(std::hypot(span, 2.0 * fmax), 1.0);
        }
        snap_tol_ = 1e-9 * diameter_;
    }

    Kind kind_ = Kind::JordanPolyline;
    std::vector<Point> vertices_;
    double gx0_ = 0.0;
    double gdx_ = 1.0;
    std::vector<double> gf_;
    double diameter_ = 1.0;
    double snap_tol_ = 1e-9;
};

// Total function on finite points: InPlus in the open Omega+ minus the snap
// band, OnGamma within the snap band, InMinus otherwise.
inline RegionLabel classify_point(const PlanarDomain& domain, const Point& p) {
    return domain.classify(p);
}

}  // namespace carleson
