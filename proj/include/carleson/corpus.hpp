#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "carleson/domain.hpp"
#include "carleson/geometry.hpp"
#include "carleson/kernel.hpp"
#include "carleson/rng.hpp"

namespace carleson {

// ---------------------------------------------------------------------------
// Deterministic curve generators
// ---------------------------------------------------------------------------

// Regular n-gon inscribed in the unit circle, vertex 0 at (1, 0), positively
// oriented. Oracle carrier: eps(x, r) = 2 asin(r/2) for x on Gamma.
inline PlanarDomain gen_circle(int n) {
    if (n < 64) throw InvalidInput("gen_circle: n >= 64");
    std::vector<Point> v;
    v.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double t = kTwoPi * static_cast<double>(i) / n;
        v.emplace_back(std::cos(t), std::sin(t));
    }
    return PlanarDomain::jordan(std::move(v));
}

// Circular sector of radius 2 with interior angle omega at the origin vertex;
// every other feature sits at distance >= 1. At the vertex, eps(x, r) =
// |pi - omega| for r <= 0.1.
inline PlanarDomain gen_wedge(double omega) {
    if (!(omega > 0.1 && omega < kTwoPi - 0.1)) throw InvalidInput("gen_wedge: omega out of range");
    std::vector<Point> v;
    v.emplace_back(0.0, 0.0);
    const int arc_steps = std::max(8, static_cast<int>(std::ceil(omega / 0.05)));
    const double R = 2.0;
    for (int i = 0; i <= arc_steps; ++i) {
        const double t = -0.5 * omega + omega * static_cast<double>(i) / arc_steps;
        v.emplace_back(R * std::cos(t), R * std::sin(t));
    }
    return PlanarDomain::jordan(std::move(v));
}

// Standard Koch snowflake as a closed polyline with 3 * 4^depth edges.
inline PlanarDomain gen_koch(int depth) {
    if (depth < 0 || depth > 8) throw InvalidInput("gen_koch: depth in [0, 8]");
    // Positively oriented equilateral triangle.
    std::vector<Point> pts = {Point(0.0, 0.0), Point(1.0, 0.0),
                              Point(0.5, std::sqrt(3.0) / 2.0)};
    for (int d = 0; d < depth; ++d) {
        std::vector<Point> next;
        next.reserve(pts.size() * 4);
        const std::size_t n = pts.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point a = pts[i];
            const Point b = pts[(i + 1) % n];
            const Point delta = b - a;
            // Outward bump: for a counterclockwise polygon the exterior is on
            // the right of the edge direction.
            const Point normal(delta.y, -delta.x);
            const Point p1 = a + delta * (1.0 / 3.0);
            const Point p2 = a + delta * 0.5 + normal * (std::sqrt(3.0) / 6.0);
            const Point p3 = a + delta * (2.0 / 3.0);
            next.push_back(a);
            next.push_back(p1);
            next.push_back(p2);
            next.push_back(p3);
        }
        pts = std::move(next);
    }
    return PlanarDomain::jordan(std::move(pts));
}

// ---------------------------------------------------------------------------
// Lipschitz graph corpus
// ---------------------------------------------------------------------------

struct GraphFunction1D {
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> f;

    double value(double x) const {
        const double xe = x0 + dx * static_cast<double>(f.size() - 1);
        if (x <= x0 || x >= xe) return 0.0;
        const double t = (x - x0) / dx;
        const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), f.size() - 2);
        const double u = t - static_cast<double>(i);
        return f[i] * (1.0 - u) + f[i + 1] * u;
    }

    // Piecewise-constant derivative samples (size f.size() - 1).
    std::vector<double> derivative() const {
        std::vector<double> d(f.size() - 1);
        for (std::size_t i = 0; i + 1 < f.size(); ++i) d[i] = (f[i + 1] - f[i]) / dx;
        return d;
    }

    double slope_max() const {
        double m = 0.0;
        for (double d : derivative()) m = std::max(m, std::fabs(d));
        return m;
    }

    double deriv_l2_squared() const {
        double s = 0.0;
        for (double d : derivative()) s += d * d * dx;
        return s;
    }

    PlanarDomain domain() const { return PlanarDomain::graph(x0, dx, f); }
};

// Random trig polynomial times a smooth window, rescaled so max |f'| equals
// slope_cap exactly (measured on the sample grid). support = half-width of
// the window; samples cover [-1.5 support, 1.5 support].
inline GraphFunction1D gen_lipschitz_graph(std::uint64_t seed, int degree, double slope_cap,
                                           double support = 1.0, int n_samples = 2048) {
    if (slope_cap > 0.1) throw InvalidInput("gen_lipschitz_graph: slope_cap <= 0.1");
    GraphFunction1D g;
    g.x0 = -1.5 * support;
    g.dx = 3.0 * support / static_cast<double>(n_samples - 1);
    g.f.assign(n_samples, 0.0);
    if (slope_cap <= 0.0) return g;

    CounterRng rng(seed);
    std::vector<double> a(degree), b(degree);
    for (int k = 0; k < degree; ++k) {
        a[k] = rng.next_double(-1.0, 1.0);
        b[k] = rng.next_double(-1.0, 1.0);
    }
    const auto window = [&](double x) {
        const double t = std::fabs(x) / support;
        return smooth_bridge(2.0 * (1.0 - t));  // 1 on |x| <= support/2, 0 at |x| >= support
    };
    for (int i = 0; i < n_samples; ++i) {
        const double x = g.x0 + g.dx * i;
        double v = 0.0;
        for (int k = 0; k < degree; ++k) {
            const double w = kTwoPi * (k + 1) * x / (2.0 * support);
            v += a[k] * std::cos(w) + b[k] * std::sin(w);
        }
        g.f[i] = v * window(x);
    }
    g.f.front() = g.f.back() = 0.0;
    const double m = g.slope_max();
    if (m > 0.0) {
        const double scale = slope_cap / m;
        for (double& v : g.f) v *= scale;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Weighted point sets (measures)
// ---------------------------------------------------------------------------

struct WeightedPointSet {
    std::vector<Point> points;
    std::vector<double> weights;

    double total_mass() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }

    double mass_in_ball(const Point& c, double r) const {
        double s = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (dist(points[i], c) <= r) s += weights[i];
        return s;
    }

    // sup over sampled balls of mu(B)/r(B); coarse empirical linear-growth
    // constant over balls centered at support points.
    double growth_constant(int radii_per_point = 8) const {
        double best = 0.0;
        double diam = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); j += std::max<std::size_t>(1, points.size() / 16))
                diam = std::max(diam, dist(points[i], points[j]));
        if (diam == 0.0) return 0.0;
        for (std::size_t i = 0; i < points.size(); i += std::max<std::size_t>(1, points.size() / 64)) {
            for (int k = 0; k < radii_per_point; ++k) {
                const double r = diam * std::pow(0.5, k);
                best = std::max(best, mass_in_ball(points[i], r) / r);
            }
        }
        return best;
    }
};

inline double polyline_perimeter(const PlanarDomain& d) {
    const auto& v = d.vertices();
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += dist(v[i], v[(i + 1) % v.size()]);
    return s;
}

enum class MeasureMode { Arclength, GraphWithNoise };

// Arclength mode: n equal-weight points spread by arclength along Gamma,
// weights summing to H1(Gamma). Noise mode: fraction p of the mass is moved
// to seeded off-curve clusters.
inline WeightedPointSet sample_measure(const PlanarDomain& domain, int n,
                                       MeasureMode mode = MeasureMode::Arclength,
                                       double noise_fraction = 0.0, std::uint64_t seed = 0) {
    if (n < 100) throw InvalidInput("sample_measure: n >= 100");
    WeightedPointSet out;
    out.points.reserve(n);
    out.weights.reserve(n);

    std::vector<std::pair<Point, Point>> segs;
    if (domain.kind() == PlanarDomain::Kind::JordanPolyline) {
        const auto& v = domain.vertices();
        for (std::size_t i = 0; i < v.size(); ++i) segs.emplace_back(v[i], v[(i + 1) % v.size()]);
    } else {
        const auto& f = domain.graph_f();
        for (std::size_t i = 0; i + 1 < f.size(); ++i)
            segs.emplace_back(Point(domain.graph_x0() + domain.graph_dx() * i, f[i]),
                              Point(domain.graph_x0() + domain.graph_dx() * (i + 1), f[i + 1]));
    }
    double total_len = 0.0;
    for (const auto& [a, b] : segs) total_len += dist(a, b);

    int n_noise = 0;
    if (mode == MeasureMode::GraphWithNoise)
        n_noise = static_cast<int>(std::llround(noise_fraction * n));
    const int n_curve = n - n_noise;

    // Equal arclength placement.
    std::size_t seg = 0;
    double seg_start = 0.0;
    for (int i = 0; i < n_curve; ++i) {
        const double target = total_len * (static_cast<double>(i) + 0.5) / n_curve;
        while (seg + 1 < segs.size() &&
               seg_start + dist(segs[seg].first, segs[seg].second) < target) {
            seg_start += dist(segs[seg].first, segs[seg].second);
            ++seg;
        }
        const auto& [a, b] = segs[seg];
        const double len = dist(a, b);
        const double t = len > 0.0 ? std::clamp((target - seg_start) / len, 0.0, 1.0) : 0.0;
        out.points.push_back(a + (b - a) * t);
        out.weights.push_back(total_len / n);
    }

    if (n_noise > 0) {
        CounterRng rng(seed);
        const int n_clusters = 3;
        // Cluster centers keep a definite normal clearance from the curve and
        // share one side of it, seeded over the middle half. Clusters hugging
        // the curve, straddling it, or sitting past its ends contaminate
        // mid-scale ball fits instead of landing cleanly in the low-density
        // classes.
        std::vector<Point> centers;
        const double side = rng.next_double() < 0.5 ? 1.0 : -1.0;
        for (int c = 0; c < n_clusters; ++c) {
            const std::size_t lo = static_cast<std::size_t>(n_curve) / 4;
            const Point base =
                out.points[lo + static_cast<std::size_t>(rng.next_double() * (n_curve / 2 - 1))];
            const double off = 0.15 * total_len / kTwoPi;
            const double slide = 0.5 * off * (2.0 * rng.next_double() - 1.0);
            centers.emplace_back(base.x + slide, base.y + side * off);
        }
        for (int i = 0; i < n_noise; ++i) {
            const Point& c = centers[i % n_clusters];
            const double spread = 0.01 * total_len / kTwoPi;
            out.points.emplace_back(c.x + spread * (rng.next_double() - 0.5),
                                    c.y + spread * (rng.next_double() - 0.5));
            out.weights.push_back(total_len / n);
        }
    }
    return out;
}

}  // namespace carleson
