#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "carleson/corpus.hpp"
#include "carleson/geometry.hpp"
#include "carleson/kernel.hpp"
#include "carleson/multiscale.hpp"

namespace carleson {

// ---------------------------------------------------------------------------
// Parameters and normalization
// ---------------------------------------------------------------------------

struct ConstructionParams {
    double theta = 0.05;       // density threshold
    double alpha = 0.08;       // angle budget against the base line
    double flat_param = 0.01;  // flatness parameter of the hypotheses
    double c0 = 0.5;           // mass lower bound on the root ball
    Point root_center{0.0, 0.0};
    double root_radius = 1.0;  // R
    int radii_per_octave = 8;
    int ladder_octaves = 24;  // ladder spans [50R * 2^-24, 50R]

    void validate() const {
        if (!(theta > 0.0 && theta < c0 && c0 <= 1.0))
            throw InvalidInput("need 0 < theta < c0 <= 1");
        if (!(alpha > 0.0 && alpha <= 0.1)) throw InvalidInput("need 0 < alpha <= 0.1");
        if (!(flat_param < theta)) throw InvalidInput("need flat_param < theta");
        if (!(root_radius > 0.0)) throw InvalidInput("root radius must be positive");
        if (radii_per_octave < 2 || ladder_octaves < 2) throw InvalidInput("ladder too coarse");
    }

    // Descending ladder radii 50R * 2^{-k / per_octave}.
    std::vector<double> ladder() const {
        std::vector<double> out;
        const int steps = radii_per_octave * ladder_octaves;
        out.reserve(steps + 1);
        for (int k = 0; k <= steps; ++k)
            out.push_back(50.0 * root_radius *
                          std::pow(2.0, -static_cast<double>(k) / radii_per_octave));
        return out;
    }
    double ladder_floor() const {
        return 50.0 * root_radius * std::pow(2.0, -static_cast<double>(ladder_octaves));
    }
};

// Rigid motion bringing the root center to the origin and the best-fit line
// of the root ball to the horizontal axis.
struct NormalizedMeasure {
    WeightedPointSet set;
    Point shift{0.0, 0.0};  // applied before rotation
    double rotation = 0.0;  // radians, applied about the origin
};

inline NormalizedMeasure normalize_measure(const WeightedPointSet& in, const Point& root_center,
                                           double root_radius) {
    std::vector<Point> inside;
    for (const Point& p : in.points)
        if (dist(p, root_center) <= root_radius) inside.push_back(p);
    if (inside.empty()) throw EmptyBall("no support points in the root ball");
    std::vector<Point> centered;
    centered.reserve(inside.size());
    for (const Point& p : inside) centered.push_back(p - root_center);
    const BetaResult fit = strip_fit_points(centered, root_radius, 64, 1e-9);
    const double ang = fit.line.angle();

    NormalizedMeasure out;
    out.shift = Point(-root_center.x, -root_center.y);
    out.rotation = -ang;
    const double c = std::cos(out.rotation), s = std::sin(out.rotation);
    out.set.weights = in.weights;
    out.set.points.reserve(in.points.size());
    for (const Point& p : in.points) {
        const Point q = p + out.shift;
        out.set.points.emplace_back(c * q.x - s * q.y, s * q.x + c * q.y);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ball classification (density + angle), ladder stopping radius
// ---------------------------------------------------------------------------

namespace detail {

// Convex hull (monotone chain); strip widths over directions depend only on
// hull vertices.
inline std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

inline FitLine ball_fit_line(const WeightedPointSet& set, const Point& center, double r) {
    std::vector<Point> inside;
    for (const Point& p : set.points)
        if (dist(p, center) <= r) inside.push_back(p);
    if (inside.empty()) throw EmptyBall("no support points in the ball");
    const std::vector<Point> hull = convex_hull(std::move(inside));
    return strip_fit_points(hull, r, 64, 1e-7).line;
}

}  // namespace detail

struct BallFlags {
    bool good = false;
    bool very_good = false;
};

// good: density above theta and fit line within the angle budget of the
// horizontal axis (the set is assumed normalized). very_good: good at every
// ladder scale from r(B) up to 50R.
inline bool ball_is_good(const WeightedPointSet& set, const Point& center, double r,
                         const ConstructionParams& params) {
    const double mass = set.mass_in_ball(center, r);
    if (mass == 0.0) throw EmptyBall("ball carries no mass");
    if (mass / r < params.theta) return false;
    const FitLine line = detail::ball_fit_line(set, center, r);
    return std::fabs(line.angle()) <= params.alpha;
}

inline BallFlags classify_ball(const WeightedPointSet& set, const Point& center, double r,
                               const ConstructionParams& params) {
    params.validate();
    if (!(r > 0.0) || r > 50.0 * params.root_radius + 1e-12)
        throw InvalidInput("ball radius outside (0, 50R]");
    BallFlags flags;
    flags.good = ball_is_good(set, center, r, params);
    if (!flags.good) return flags;
    flags.very_good = true;
    for (double s : params.ladder()) {
        if (s < r * (1.0 - 1e-12)) break;
        if (!ball_is_good(set, center, s, params)) {
            flags.very_good = false;
            break;
        }
    }
    return flags;
}

// Smallest ladder radius whose ball is very good. The ladder is descended
// from 50R; the first bad scale stops it.
inline double stopping_radius(const WeightedPointSet& set, const Point& x,
                              const ConstructionParams& params) {
    params.validate();
    const std::vector<double> ladder = params.ladder();
    double h = -1.0;
    for (double s : ladder) {
        if (!ball_is_good(set, x, s, params)) break;
        h = s;
    }
    if (h < 0.0) throw NoVeryGoodBall("the 50R ball already fails goodness");
    return h;
}

// ---------------------------------------------------------------------------
// Stopping functions d and D
// ---------------------------------------------------------------------------

struct StoppingData {
    std::vector<Point> centers;  // support points (normalized coordinates)
    std::vector<double> h;       // per support point, ladder-quantized
    double ladder_floor = 0.0;
    double z0_tol = 0.0;
    std::vector<char> z0_mask;  // d(center) <= z0_tol

    std::vector<Point> d_grid;
    std::vector<double> d_vals;
    double D_x0 = 0.0, D_dx = 0.0;
    std::vector<double> D_vals;

    // d(x) = min over support points of |x - z| + h(z); exact one-term cones.
    double d(const Point& x) const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < centers.size(); ++i)
            best = std::min(best, dist(x, centers[i]) + h[i]);
        return best;
    }
    double D(double p) const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < centers.size(); ++i)
            best = std::min(best, std::fabs(p - centers[i].x) + h[i]);
        return best;
    }
    // Exact inf of D over [a, b]: each cone attains its interval minimum at
    // the clamped apex.
    double D_inf(double a, double b) const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double p = std::clamp(centers[i].x, a, b);
            best = std::min(best, std::fabs(p - centers[i].x) + h[i]);
        }
        return best;
    }
};

inline StoppingData stopping_functions(const WeightedPointSet& set,
                                       const ConstructionParams& params,
                                       const std::vector<Point>& eval_grid, unsigned threads = 1) {
    params.validate();
    StoppingData out;
    out.centers = set.points;
    out.h.assign(set.points.size(), 0.0);
    out.ladder_floor = params.ladder_floor();
    out.z0_tol = out.ladder_floor;
    parallel_for(set.points.size(), threads,
                 [&](std::size_t i) { out.h[i] = stopping_radius(set, set.points[i], params); });

    out.z0_mask.resize(set.points.size());
    for (std::size_t i = 0; i < set.points.size(); ++i)
        out.z0_mask[i] = out.d(set.points[i]) <= out.z0_tol ? 1 : 0;

    out.d_grid = eval_grid;
    out.d_vals.reserve(eval_grid.size());
    for (const Point& p : eval_grid) out.d_vals.push_back(out.d(p));

    const double R = params.root_radius;
    out.D_x0 = -16.0 * R;
    const int n = 1024;
    out.D_dx = 32.0 * R / n;
    out.D_vals.resize(n + 1);
    for (int k = 0; k <= n; ++k) out.D_vals[k] = out.D(out.D_x0 + out.D_dx * k);
    return out;
}

// ---------------------------------------------------------------------------
// Whitney cover of the base line
// ---------------------------------------------------------------------------

struct WhitneyInterval {
    double a = 0.0;
    double len = 0.0;
    bool in_I0 = false;
    double center() const { return a + 0.5 * len; }
};

struct WhitneyCover {
    std::vector<WhitneyInterval> intervals;
    std::vector<std::vector<int>> neighbors;  // j with 15R_i meeting 15R_j
    int max_overlap = 0;
    double clipped_length = 0.0;  // floor leaves abutting the zero set
    double root_a = 0.0, root_len = 0.0;
};

// Maximal dyadic intervals of the root with len < D_inf(I)/20, by top-down
// descent. Floor leaves with D below the resolution are clipped (they abut
// the projected zero set); a floor leaf with D clearly positive means the
// resolution cannot decide and raises an error.
inline WhitneyCover whitney_cover(const std::function<double(double, double)>& D_inf,
                                  double root_a, double root_len, double min_len,
                                  double i0_radius) {
    if (!(root_len > 0.0) || !(min_len > 0.0)) throw InvalidInput("degenerate whitney root");
    WhitneyCover cover;
    cover.root_a = root_a;
    cover.root_len = root_len;
    const std::function<void(double, double)> descend = [&](double a, double len) {
        const double dinf = D_inf(a, a + len);
        if (len < dinf / 20.0) {
            WhitneyInterval iv;
            iv.a = a;
            iv.len = len;
            iv.in_I0 = (a <= i0_radius) && (a + len >= -i0_radius);
            cover.intervals.push_back(iv);
            return;
        }
        if (len <= min_len * (1.0 + 1e-12)) {
            // A non-emittable floor leaf has dinf <= 20 len; anything beyond
            // 20 min_len is not explainable by proximity to the zero set.
            if (dinf > 20.0 * min_len * (1.0 + 1e-9))
                throw ResolutionFloorHit("whitney floor reached with D well above it");
            cover.clipped_length += len;
            return;
        }
        descend(a, 0.5 * len);
        descend(a + 0.5 * len, 0.5 * len);
    };
    descend(root_a, root_len);

    // Intervals come out of the left-first descent already sorted. Meeting
    // dilated intervals have comparable lengths, so the scan window around i
    // stays O(1) in units of len(i).
    const std::size_t n = cover.intervals.size();
    cover.neighbors.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        const double ci = cover.intervals[i].center(), li = cover.intervals[i].len;
        const auto check = [&](std::size_t j) {
            const double cj = cover.intervals[j].center(), lj = cover.intervals[j].len;
            if (std::fabs(ci - cj) <= 7.5 * (li + lj)) {
                cover.neighbors[i].push_back(static_cast<int>(j));
                return true;
            }
            return std::fabs(ci - cj) <= 120.0 * li;  // keep scanning inside the window
        };
        for (std::size_t j = i; j-- > 0;)
            if (!check(j)) break;
        for (std::size_t j = i + 1; j < n; ++j)
            if (!check(j)) break;
        std::sort(cover.neighbors[i].begin(), cover.neighbors[i].end());
        cover.max_overlap =
            std::max(cover.max_overlap, static_cast<int>(cover.neighbors[i].size()) + 1);
    }
    return cover;
}

inline WhitneyCover whitney_cover(const StoppingData& stopping, const ConstructionParams& params) {
    const double R = params.root_radius;
    return whitney_cover(
        [&](double a, double b) { return stopping.D_inf(a, b); }, -16.0 * R, 32.0 * R,
        stopping.ladder_floor, 10.0 * R);
}

// ---------------------------------------------------------------------------
// Blended Lipschitz graph
// ---------------------------------------------------------------------------

struct AffinePiece {
    int interval = -1;
    double slope = 0.0;
    double intercept = 0.0;  // value at the interval center abscissa 0 offset
    Point ball_center{0.0, 0.0};
    double ball_radius = 0.0;
    double selection_score = 0.0;
};

struct BuiltGraph {
    double grid_x0 = 0.0, grid_dx = 0.0;
    std::vector<double> values;
    std::vector<AffinePiece> pieces;  // aligned with cover.intervals
    std::vector<std::pair<double, double>> z0_samples;  // (abscissa, exact height)
    double measured_slope = 0.0;  // max divided difference on the grid

    // Blend of the affine pieces through the partition of unity. Off the
    // bumps' union the nearest exact zero-set sample answers, else 0.
    double evaluate(double p, const WhitneyCover& cover) const {
        double wsum = 0.0, vsum = 0.0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const double c = cover.intervals[i].center(), l = cover.intervals[i].len;
            const double w = bump(std::fabs(p - c) / l);
            if (w <= 0.0) continue;
            wsum += w;
            vsum += w * (pieces[i].intercept + pieces[i].slope * (p - c));
        }
        if (wsum > 1e-12) return vsum / wsum;
        // Inside the clipped zone: interpolate between the exact zero-set
        // samples, which are dense there by construction.
        if (z0_samples.empty()) return 0.0;
        const auto it = std::lower_bound(z0_samples.begin(), z0_samples.end(),
                                         std::make_pair(p, -std::numeric_limits<double>::infinity()));
        const double reach = 2.0 * grid_dx;
        if (it == z0_samples.begin())
            return it->first - p < reach ? it->second : 0.0;
        if (it == z0_samples.end()) {
            const auto& last = z0_samples.back();
            return p - last.first < reach ? last.second : 0.0;
        }
        const auto& lo = *(it - 1);
        const auto& hi = *it;
        const double gap = hi.first - lo.first;
        if (gap <= 2.0 * reach && gap > 0.0)
            return lo.second + (hi.second - lo.second) * (p - lo.first) / gap;
        if (p - lo.first < reach) return lo.second;
        if (hi.first - p < reach) return hi.second;
        return 0.0;
    }

    // Raw bump profile on |p - c| / l: plateau past the own interval, support
    // on the tripled interval.
    static double bump(double t) {
        if (t <= 0.75) return 1.0;
        if (t >= 1.5) return 0.0;
        return smooth_bridge((1.5 - t) / 0.75);
    }
};

inline BuiltGraph build_graph(const WeightedPointSet& set, const WhitneyCover& cover,
                              const StoppingData& stopping, const ConstructionParams& params) {
    params.validate();
    const double R = params.root_radius;
    const std::vector<double> ladder = params.ladder();

    BuiltGraph graph;
    graph.pieces.resize(cover.intervals.size());
    for (std::size_t i = 0; i < cover.intervals.size(); ++i) {
        AffinePiece& piece = graph.pieces[i];
        piece.interval = static_cast<int>(i);
        if (!cover.intervals[i].in_I0) continue;  // A_i = 0 off I0
        const double li = cover.intervals[i].len;
        const double ia = cover.intervals[i].a, ib = ia + li;
        // B_i: very-good ball minimizing |r - l(R_i)| + dist(R_i, proj(B)),
        // ties to the smallest center abscissa, then smallest radius. The
        // score is convex in r, so per point only rungs next to the two
        // kinks (r = l(R_i), r = dist) and the endpoint r = h can win.
        const double top = ladder.front();
        const int max_k = static_cast<int>(ladder.size()) - 1;
        const auto rung_index = [&](double v) {
            if (v >= top) return 0;
            return std::clamp(static_cast<int>(std::floor(
                                  params.radii_per_octave * std::log2(top / std::max(v, 1e-300)))),
                              0, max_k);
        };
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        double best_r = 0.0;
        for (std::size_t j = 0; j < set.points.size(); ++j) {
            const Point& z = set.points[j];
            const int kh = rung_index(stopping.h[j]);
            const double gap0 = std::max({0.0, ia - z.x, z.x - ib});
            int cands[6] = {kh, rung_index(li), rung_index(li) + 1, rung_index(gap0),
                            rung_index(gap0) + 1, 0};
            double bj = std::numeric_limits<double>::infinity(), bjr = 0.0;
            for (int k : cands) {
                k = std::clamp(k, 0, kh);
                const double r = ladder[static_cast<std::size_t>(k)];
                if (r < stopping.h[j] * (1.0 - 1e-12)) continue;
                const double score = std::fabs(r - li) + std::max(0.0, gap0 - r);
                if (score < bj - 1e-15 || (score < bj + 1e-15 && r < bjr)) {
                    bj = score;
                    bjr = r;
                }
            }
            const bool better = bj < best - 1e-15 ||
                                (bj < best + 1e-15 && z.x < set.points[best_j].x - 1e-15) ||
                                (bj < best + 1e-15 &&
                                 std::fabs(z.x - set.points[best_j].x) <= 1e-15 && bjr < best_r);
            if (better) {
                best = bj;
                best_j = j;
                best_r = bjr;
            }
        }
        if (!std::isfinite(best) || best > 60.0 * li)
            throw NoCandidateBall("no plausible very-good ball for a core interval");
        const FitLine line = detail::ball_fit_line(set, set.points[best_j], best_r);
        const double slope = line.dir.y / line.dir.x;
        const double c = cover.intervals[i].center();
        piece.slope = slope;
        piece.intercept = line.point.y + slope * (c - line.point.x);
        piece.ball_center = set.points[best_j];
        piece.ball_radius = best_r;
        piece.selection_score = best;
    }

    for (std::size_t j = 0; j < set.points.size(); ++j)
        if (stopping.z0_mask[j])
            graph.z0_samples.emplace_back(set.points[j].x, set.points[j].y);
    std::sort(graph.z0_samples.begin(), graph.z0_samples.end());

    const int n = 4096;
    graph.grid_x0 = -16.0 * R;
    graph.grid_dx = 32.0 * R / n;
    graph.values.resize(n + 1);
    for (int k = 0; k <= n; ++k)
        graph.values[k] = graph.evaluate(graph.grid_x0 + graph.grid_dx * k, cover);
    for (int k = 0; k < n; ++k)
        graph.measured_slope = std::max(
            graph.measured_slope, std::fabs(graph.values[k + 1] - graph.values[k]) / graph.grid_dx);
    return graph;
}

// ---------------------------------------------------------------------------
// Point partition and diagnostics
// ---------------------------------------------------------------------------

enum class PointLabel : std::uint8_t { Z = 0, LD = 1, BA = 2 };

struct PointPartition {
    std::vector<PointLabel> labels;
    double z_mass = 0.0, ld_mass = 0.0, ba_mass = 0.0;
};

inline PointPartition partition_points(const WeightedPointSet& set, const StoppingData& stopping,
                                       const ConstructionParams& params) {
    params.validate();
    PointPartition out;
    out.labels.resize(set.points.size());
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        if (stopping.h[i] <= stopping.ladder_floor * (1.0 + 1e-9)) {
            out.labels[i] = PointLabel::Z;
            out.z_mass += set.weights[i];
        } else if (set.mass_in_ball(set.points[i], stopping.h[i]) / stopping.h[i] <=
                   params.theta) {
            out.labels[i] = PointLabel::LD;
            out.ld_mass += set.weights[i];
        } else {
            out.labels[i] = PointLabel::BA;
            out.ba_mass += set.weights[i];
        }
    }
    return out;
}

struct DiagnosticsReport {
    double c_dist_b0 = 0.0;    // max dist(x, G_A) / d(x)
    double c_dist_g_a = 0.0;   // max dist(x, G_A) / (flat_param * d(x))
    double c_g_dist_l0 = 0.0;  // max |A| / (flat_param * R) over the grid
    bool piperp_pass = true;   // |x2-y2| <= 6a|x1-y1| + 4d(x) + 4d(y) on all pairs
    double piperp_max_excess = 0.0;
};

namespace detail {

inline double dist_to_polyline(const Point& x, double x0, double dx,
                               const std::vector<double>& vals) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
        const Point a(x0 + dx * static_cast<double>(k), vals[k]);
        const Point b(x0 + dx * static_cast<double>(k + 1), vals[k + 1]);
        best = std::min(best, dist_point_segment(x, a, b));
    }
    return best;
}

}  // namespace detail

inline DiagnosticsReport diagnostics(const WeightedPointSet& set, const BuiltGraph& graph,
                                     const StoppingData& stopping,
                                     const ConstructionParams& params) {
    DiagnosticsReport rep;
    const double eps = params.flat_param;
    std::vector<double> dvals(set.points.size());
    for (std::size_t i = 0; i < set.points.size(); ++i) dvals[i] = stopping.d(set.points[i]);

    for (std::size_t i = 0; i < set.points.size(); ++i) {
        const double gd =
            detail::dist_to_polyline(set.points[i], graph.grid_x0, graph.grid_dx, graph.values);
        if (dvals[i] > stopping.z0_tol) {
            rep.c_dist_b0 = std::max(rep.c_dist_b0, gd / dvals[i]);
            rep.c_dist_g_a = std::max(rep.c_dist_g_a, gd / (eps * dvals[i]));
        }
    }
    for (double v : graph.values)
        rep.c_g_dist_l0 = std::max(rep.c_g_dist_l0, std::fabs(v) / (eps * params.root_radius));

    for (std::size_t i = 0; i < set.points.size(); ++i) {
        for (std::size_t j = i + 1; j < set.points.size(); ++j) {
            const double lhs = std::fabs(set.points[i].y - set.points[j].y);
            const double rhs = 6.0 * params.alpha * std::fabs(set.points[i].x - set.points[j].x) +
                               4.0 * dvals[i] + 4.0 * dvals[j];
            if (lhs > rhs) {
                rep.piperp_pass = false;
                rep.piperp_max_excess = std::max(rep.piperp_max_excess, lhs - rhs);
            }
        }
    }
    return rep;
}

}  // namespace carleson
