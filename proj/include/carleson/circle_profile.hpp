#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "carleson/domain.hpp"
#include "carleson/geometry.hpp"

namespace carleson {

// Arc decomposition of a circle dB(center, radius) into Omega+/Omega-/Gamma
// pieces, with the two longest one-sided arcs I+- picked out.
struct CircleProfile {
    struct Arc {
        double begin = 0.0;   // angle in [0, 2*pi)
        double end = 0.0;     // begin + span, may exceed 2*pi
        RegionLabel label = RegionLabel::OnGamma;
        double length(double radius) const { return (end - begin) * radius; }
    };

    Point center;
    double radius = 0.0;
    std::vector<Arc> arcs;
    double len_plus_total = 0.0;  // H^1(dB cap Omega+)
    double len_I_plus = 0.0;      // longest arc inside Omega+
    double len_I_minus = 0.0;     // longest arc inside Omega-
};

// Intersects dB(x, r) with every Gamma segment, sorts the hit angles, and
// labels each maximal gap by a midpoint classification. Tangential contacts
// raise DegenerateTangency; quadrature callers retry with jittered r.
inline CircleProfile circle_profile(const PlanarDomain& domain, const Point& x, double r) {
    if (!(r > 0.0)) throw InvalidInput("circle_profile: r must be > 0");

    std::vector<std::pair<Point, Point>> segs;
    domain.collect_segments(x, r, segs);

    std::vector<double> angles;
    angles.reserve(16);
    for (const auto& [a, b] : segs) {
        double t[2];
        bool tangential = false;
        const int n = circle_segment_intersections(x, r, a, b, t, &tangential);
        if (tangential)
            throw DegenerateTangency("circle_profile: tangential intersection");
        for (int i = 0; i < n; ++i) {
            const Point p = a + (b - a) * t[i];
            angles.push_back(wrap_angle(std::atan2(p.y - x.y, p.x - x.x)));
        }
    }
    std::sort(angles.begin(), angles.end());
    // Collapse duplicate hits at shared polyline vertices.
    const double ang_tol = 1e-12;
    angles.erase(std::unique(angles.begin(), angles.end(),
                             [&](double a, double b) { return b - a <= ang_tol; }),
                 angles.end());
    if (angles.size() >= 2 && (angles.front() + kTwoPi) - angles.back() <= ang_tol)
        angles.pop_back();

    CircleProfile prof;
    prof.center = x;
    prof.radius = r;

    const auto label_at = [&](double theta) {
        return classify_point(domain, Point(x.x + r * std::cos(theta), x.y + r * std::sin(theta)));
    };

    if (angles.empty()) {
        CircleProfile::Arc arc;
        arc.begin = 0.0;
        arc.end = kTwoPi;
        arc.label = label_at(0.0);
        prof.arcs.push_back(arc);
    } else {
        const std::size_t m = angles.size();
        prof.arcs.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double a0 = angles[i];
            const double a1 = (i + 1 < m) ? angles[i + 1] : angles[0] + kTwoPi;
            if (a1 - a0 <= ang_tol) continue;
            CircleProfile::Arc arc;
            arc.begin = a0;
            arc.end = a1;
            arc.label = label_at(0.5 * (a0 + a1));
            prof.arcs.push_back(arc);
        }
    }

    for (const auto& arc : prof.arcs) {
        const double len = arc.length(r);
        if (arc.label == RegionLabel::InPlus) {
            prof.len_plus_total += len;
            prof.len_I_plus = std::max(prof.len_I_plus, len);
        } else if (arc.label == RegionLabel::InMinus) {
            prof.len_I_minus = std::max(prof.len_I_minus, len);
        }
    }
    return prof;
}

// H^1(dB(x, s) cap Omega+), the polar-coordinates integrand of the smoothed
// coefficients.
inline double boundary_arclength_in_plus(const PlanarDomain& domain, const Point& x, double s) {
    return circle_profile(domain, x, s).len_plus_total;
}

// Same quantity with the jitter retry policy applied at tangential radii.
inline double boundary_arclength_in_plus_jittered(const PlanarDomain& domain, const Point& x,
                                                  double s, int max_retries = 3) {
    for (int k = 0;; ++k) {
        try {
            return boundary_arclength_in_plus(domain, x, s);
        } catch (const DegenerateTangency&) {
            if (k >= max_retries) throw;
            s *= 1.0 + 1e-7;
        }
    }
}

struct CorkscrewBalls {
    Point center_plus, center_minus;
    double radius_plus = 0.0;   // 0 when no interior grid point was found
    double radius_minus = 0.0;
};

// Grid search for the largest balls inside B(x,r) cap Omega+- . The score of
// a grid point is min(dist to Gamma, r - |p - x|).
inline CorkscrewBalls corkscrew_search(const PlanarDomain& domain, const Point& x, double r,
                                       int grid_n) {
    if (grid_n < 16) throw InvalidInput("corkscrew_search: grid_n >= 16 required");
    if (domain.distance_to_gamma(x) > r)
        throw InvalidInput("corkscrew_search: x farther than r from Gamma");
    CorkscrewBalls out;
    out.center_plus = out.center_minus = x;
    const double step = 2.0 * r / static_cast<double>(grid_n - 1);
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            const Point p(x.x - r + step * i, x.y - r + step * j);
            const double slack = r - dist(p, x);
            if (slack <= 0.0) continue;
            const RegionLabel lab = classify_point(domain, p);
            if (lab == RegionLabel::OnGamma) continue;
            const double score = std::min(domain.distance_to_gamma(p), slack);
            if (lab == RegionLabel::InPlus && score > out.radius_plus) {
                out.radius_plus = score;
                out.center_plus = p;
            } else if (lab == RegionLabel::InMinus && score > out.radius_minus) {
                out.radius_minus = score;
                out.center_minus = p;
            }
        }
    }
    return out;
}

}  // namespace carleson
