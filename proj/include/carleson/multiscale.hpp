#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "carleson/circle_profile.hpp"
#include "carleson/domain.hpp"
#include "carleson/geometry.hpp"
#include "carleson/kernel.hpp"
#include "carleson/quadrature.hpp"
#include "carleson/radial_grid.hpp"

namespace carleson {

// ---------------------------------------------------------------------------
// epsilon(x, r) and its Carleson energy
// ---------------------------------------------------------------------------

// (1/r) max(|pi r - H1(I+)|, |pi r - H1(I-)|). An absent side contributes
// |pi r - 0| / r = pi.
inline double epsilon_from_profile(const CircleProfile& prof) {
    const double pr = kPi * prof.radius;
    return std::max(std::fabs(pr - prof.len_I_plus), std::fabs(pr - prof.len_I_minus)) /
           prof.radius;
}

inline double epsilon_coeff(const PlanarDomain& domain, const Point& x, double r) {
    return epsilon_from_profile(circle_profile(domain, x, r));
}

// Jitter policy for quadrature callers: retry with r * (1 + 1e-7), max 3
// times, quadrature weight unchanged.
inline CircleProfile circle_profile_jittered(const PlanarDomain& domain, const Point& x, double r,
                                             int max_retries = 3) {
    for (int k = 0;; ++k) {
        try {
            return circle_profile(domain, x, r);
        } catch (const DegenerateTangency&) {
            if (k >= max_retries) throw;
            r *= 1.0 + 1e-7;
        }
    }
}

inline double epsilon_coeff_jittered(const PlanarDomain& domain, const Point& x, double r) {
    return epsilon_from_profile(circle_profile_jittered(domain, x, r));
}

// Truncated E(x)^2 = sum_k eps(x, r_k)^2 w_k.
inline double carleson_energy(const PlanarDomain& domain, const Point& x, const RadialGrid& grid) {
    return grid.energy([&](double r) { return epsilon_coeff_jittered(domain, x, r); });
}

// ---------------------------------------------------------------------------
// beta_inf: minimax strip fit (direction sweep + golden-section refinement)
// ---------------------------------------------------------------------------

struct FitLine {
    Point point;  // a point on the line
    Point dir;    // unit direction
    double angle() const {
        double a = std::atan2(dir.y, dir.x);
        if (a < -kPi / 2.0) a += kPi;
        if (a >= kPi / 2.0) a -= kPi;
        return a;
    }
};

struct BetaResult {
    double beta = 0.0;
    FitLine line;
};

namespace detail {

inline double strip_width(const std::vector<Point>& pts, double theta) {
    const double cn = std::cos(theta), sn = std::sin(theta);
    double lo = 1e300, hi = -1e300;
    for (const Point& p : pts) {
        const double v = p.x * cn + p.y * sn;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

// Minimal-width strip over directions; ties go to the first (smallest) angle
// in the sweep so output is deterministic.
inline std::pair<double, double> strip_fit_theta(const std::vector<Point>& pts, int n_dir,
                                                 double refine_tol) {
    double best_w = 1e300, best_theta = 0.0;
    for (int k = 0; k < n_dir; ++k) {
        const double theta = kPi * static_cast<double>(k) / n_dir;
        const double w = strip_width(pts, theta);
        if (w < best_w) {
            best_w = w;
            best_theta = theta;
        }
    }
    // Golden-section around the sweep winner.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_theta - kPi / n_dir, b = best_theta + kPi / n_dir;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = strip_width(pts, c), fd = strip_width(pts, d);
    while (b - a > refine_tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = strip_width(pts, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = strip_width(pts, d);
        }
    }
    const double theta = 0.5 * (a + b);
    const double w = strip_width(pts, theta);
    if (w <= best_w) return {w, theta};
    return {best_w, best_theta};
}

}  // namespace detail

// Strip fit over an explicit point set. The normal direction theta of the
// returned line's strip satisfies width(theta) minimal over the sweep.
inline BetaResult strip_fit_points(const std::vector<Point>& pts, double r, int n_dir,
                                   double refine_tol) {
    if (pts.empty()) throw EmptyIntersection("strip fit: no sample points");
    BetaResult res;
    if (pts.size() == 1) {
        res.beta = 0.0;
        res.line.point = pts[0];
        res.line.dir = Point(1.0, 0.0);
        return res;
    }
    const auto [w, theta] = detail::strip_fit_theta(pts, n_dir, refine_tol);
    const double cn = std::cos(theta), sn = std::sin(theta);
    double lo = 1e300, hi = -1e300;
    for (const Point& p : pts) {
        const double v = p.x * cn + p.y * sn;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double mid = 0.5 * (lo + hi);
    res.beta = 0.5 * w / r;
    res.line.point = Point(mid * cn, mid * sn);
    res.line.dir = Point(-sn, cn);
    if (res.line.dir.x < 0.0) res.line.dir = res.line.dir * -1.0;  // canonical orientation
    return res;
}

// Endpoints of Gamma segments clipped to the closed ball B(center, r). The
// extremes of any linear functional over a clipped segment sit at these
// points, so they determine strip widths exactly.
inline std::vector<Point> gamma_ball_samples(const PlanarDomain& domain, const Point& center,
                                             double r) {
    std::vector<std::pair<Point, Point>> segs;
    domain.collect_segments(center, r, segs);
    std::vector<Point> pts;
    for (const auto& [a, b] : segs) {
        const bool ain = dist(a, center) <= r;
        const bool bin = dist(b, center) <= r;
        double t[2];
        const int n = circle_segment_intersections(center, r, a, b, t);
        if (ain) pts.push_back(a);
        if (bin) pts.push_back(b);
        for (int i = 0; i < n; ++i) pts.push_back(a + (b - a) * t[i]);
    }
    return pts;
}

inline BetaResult beta_inf(const PlanarDomain& domain, const Point& center, double r,
                           int n_dir = 64, double refine_tol = 1e-7) {
    if (n_dir < 32) throw InvalidInput("beta_inf: n_dir >= 32 required");
    const std::vector<Point> pts = gamma_ball_samples(domain, center, r);
    if (pts.empty()) throw EmptyIntersection("beta_inf: Gamma does not meet the ball");
    return strip_fit_points(pts, r, n_dir, refine_tol);
}

// ---------------------------------------------------------------------------
// Shared polar table: m(s) = pi s - H1(dB(x,s) cap Omega+) and eps(x, s) on a
// log-spaced s-grid. One table serves alpha+, a_psi and the lem1 bound at
// every radius of a report, which keeps circle_profile counts linear in the
// grid size.
// ---------------------------------------------------------------------------

class ArcDefectTable {
  public:
    ArcDefectTable(const PlanarDomain& domain, const Point& x, double s_lo, double s_hi,
                   int per_octave = 64)
        : domain_(&domain), x_(x) {
        const double octaves = std::log2(s_hi / s_lo);
        const int steps = std::max(1, static_cast<int>(std::ceil(octaves * per_octave)));
        s_.resize(steps + 1);
        m_.resize(steps + 1);
        eps_.resize(steps + 1);
        for (int k = 0; k <= steps; ++k) {
            const double s = s_lo * std::pow(s_hi / s_lo, static_cast<double>(k) / steps);
            const CircleProfile prof = circle_profile_jittered(domain, x, s);
            s_[k] = s;
            m_[k] = kPi * s - prof.len_plus_total;
            eps_[k] = epsilon_from_profile(prof);
        }
    }

    double s_min() const { return s_.front(); }
    double s_max() const { return s_.back(); }

    double m_at(double s) const { return interp(m_, s); }
    double eps_at(double s) const { return interp(eps_, s); }

    // Trapezoid (on the log axis) of W(s) * m(s) over [a, b] clipped to the
    // table range.
    template <typename W>
    double integrate_weighted_m(W&& weight, double a, double b) const {
        return integrate_weighted(m_, std::forward<W>(weight), a, b);
    }
    template <typename W>
    double integrate_weighted_eps_s(W&& weight, double a, double b) const {
        // integrand W(s) * eps(s) * s
        std::vector<double> tmp(s_.size());
        for (std::size_t k = 0; k < s_.size(); ++k) tmp[k] = eps_[k] * s_[k];
        return integrate_weighted(tmp, std::forward<W>(weight), a, b);
    }

  private:
    template <typename W>
    double integrate_weighted(const std::vector<double>& vals, W&& weight, double a,
                              double b) const {
        a = std::max(a, s_.front());
        b = std::min(b, s_.back());
        if (b <= a) return 0.0;
        const auto g = [&](std::size_t k) { return weight(s_[k]) * vals[k] * s_[k]; };
        // locate index range [ia, ib] of interior nodes
        const auto lo = std::lower_bound(s_.begin(), s_.end(), a);
        const auto hi = std::upper_bound(s_.begin(), s_.end(), b);
        const std::size_t ia = static_cast<std::size_t>(lo - s_.begin());
        const std::size_t ib = static_cast<std::size_t>(hi - s_.begin());  // one past
        std::vector<double> terms;
        terms.reserve(ib - ia + 2);
        const auto g_at = [&](double s) { return weight(s) * interp(vals, s) * s; };
        double prev_s = a, prev_g = g_at(a);
        for (std::size_t k = ia; k < ib; ++k) {
            const double ds = std::log(s_[k] / prev_s);
            if (ds > 0.0) terms.push_back(0.5 * (prev_g + g(k)) * ds);
            prev_s = s_[k];
            prev_g = g(k);
        }
        const double ds = std::log(b / prev_s);
        if (ds > 0.0) terms.push_back(0.5 * (prev_g + g_at(b)) * ds);
        return pairwise_sum(terms);
    }

    double interp(const std::vector<double>& vals, double s) const {
        if (s <= s_.front()) return vals.front();
        if (s >= s_.back()) return vals.back();
        const auto it = std::upper_bound(s_.begin(), s_.end(), s);
        const std::size_t k = static_cast<std::size_t>(it - s_.begin());
        const double t = std::log(s / s_[k - 1]) / std::log(s_[k] / s_[k - 1]);
        return vals[k - 1] * (1.0 - t) + vals[k] * t;
    }

    const PlanarDomain* domain_;
    Point x_;
    std::vector<double> s_;
    std::vector<double> m_;
    std::vector<double> eps_;
};

// ---------------------------------------------------------------------------
// alpha+(x, r): Gaussian half-plane defect via the polar identity
// ---------------------------------------------------------------------------

namespace detail {

// Polar integral int W(s/r) m(s) ds over the table plus the closed-form head
// and tail. The tail assumes a constant circle label beyond 6r, which one
// classify probe verifies.
inline double alpha_plus_from_table(const PlanarDomain& domain, const Point& x, double r,
                                    const ArcDefectTable& table) {
    const double s_lo = 1e-4 * r;
    const double s_hi = 6.0 * r;
    const double core = table.integrate_weighted_m(
        [&](double s) { return std::exp(-(s * s) / (r * r)); }, s_lo, s_hi);
    // Head: |m(s)| <= 2 pi s, contribution bounded by pi s_lo^2 ~ 3e-8 r^2;
    // approximated by the linear continuation of m.
    const double head = 0.5 * table.m_at(s_lo) * s_lo;
    // Tail beyond 6r: e^{-36} scale.
    const RegionLabel far_label = classify_point(
        domain, Point(x.x + s_hi * 1.0000001, x.y));
    double tail = 0.0;
    const double gauss_tail = 0.5 * r * r * std::exp(-(s_hi * s_hi) / (r * r));
    if (far_label == RegionLabel::InPlus)
        tail = -kPi * gauss_tail;  // m(s) = pi s - 2 pi s
    else if (far_label == RegionLabel::InMinus)
        tail = kPi * gauss_tail;  // m(s) = pi s
    return std::fabs(core + head + tail) / (r * r);
}

}  // namespace detail

inline double alpha_plus(const PlanarDomain& domain, const Point& x, double r) {
    const ArcDefectTable table(domain, x, 1e-4 * r, 6.0 * r, 64);
    return detail::alpha_plus_from_table(domain, x, r, table);
}

// ---------------------------------------------------------------------------
// a_psi(x, r): bump-kernel defect, polar route
// ---------------------------------------------------------------------------

namespace detail {

// Signed polar integral (1/r^2) int_0^{1.1 r} phi(s/r) m(s) ds using a table
// for the plateau and a dense composite rule across the kernel transition.
inline double a_psi_signed(const Point&, double r, const Kernel& kernel,
                           const ArcDefectTable& table) {
    const double s_lo = 1e-4 * r;
    const double plateau = table.integrate_weighted_m([](double) { return 1.0; }, s_lo, r);
    const double transition = gauss_integrate_composite(
        [&](double s) { return kernel.profile(s / r) * table.m_at(s); }, r,
        Kernel::support_end * r, 16, 8);
    const double head = 0.5 * table.m_at(s_lo) * s_lo;
    return (plateau + transition + head) / (r * r);
}

}  // namespace detail

struct APsiBound {
    double value = 0.0;        // a_psi(x, r)
    double pointwise_rhs = 0.0;  // (1/r^2) int phi(s/r) eps(x,s) s ds
};

inline APsiBound a_psi_with_bound(const PlanarDomain& domain, const Point& x, double r,
                                  const Kernel& kernel, const ArcDefectTable& table) {
    APsiBound out;
    out.value = std::fabs(detail::a_psi_signed(x, r, kernel, table));
    const double s_lo = 1e-4 * r;
    const double plateau =
        table.integrate_weighted_eps_s([](double) { return 1.0; }, s_lo, r);
    const double transition = gauss_integrate_composite(
        [&](double s) { return kernel.profile(s / r) * table.eps_at(s) * s; }, r,
        Kernel::support_end * r, 16, 8);
    const double head = 0.5 * table.eps_at(s_lo) * s_lo * s_lo;
    out.pointwise_rhs = (plateau + transition + head) / (r * r);
    return out;
}

inline double a_psi(const PlanarDomain& domain, const Point& x, double r, const Kernel& kernel) {
    // Denser table than the energy loops use; single-radius queries are cheap
    // and the cross-validation tolerance against 2-D quadrature is tight.
    const ArcDefectTable table(domain, x, 1e-4 * r, Kernel::support_end * r, 256);
    return std::fabs(detail::a_psi_signed(x, r, kernel, table));
}

// ---------------------------------------------------------------------------
// Energies over a radial grid (shared table per point)
// ---------------------------------------------------------------------------

inline double a_psi_energy(const PlanarDomain& domain, const Point& x, const RadialGrid& grid,
                           const Kernel& kernel) {
    const ArcDefectTable table(domain, x, 1e-4 * grid.r_min, Kernel::support_end * grid.r_max, 64);
    return grid.energy([&](double r) {
        return std::fabs(detail::a_psi_signed(x, r, kernel, table));
    });
}

inline double alpha_energy(const PlanarDomain& domain, const Point& x, const RadialGrid& grid) {
    const ArcDefectTable table(domain, x, 1e-4 * grid.r_min, 6.0 * grid.r_max, 64);
    return grid.energy([&](double r) {
        return detail::alpha_plus_from_table(domain, x, r, table);
    });
}

// ---------------------------------------------------------------------------
// lem1-style inequality check
// ---------------------------------------------------------------------------

struct Lem1Report {
    double lhs = 0.0;         // int_0^R a_psi^2 dr/r (truncated below at grid r_min)
    double rhs_energy = 0.0;  // int_0^{MR} eps^2 dr/r
    double tail = 0.0;        // 2 int_M^inf phi(t) t sqrt(log+(t/M)) dt
    double ratio = 0.0;
};

inline Lem1Report lem1_check(const PlanarDomain& domain, const Point& x, double R, double M,
                             const Kernel& kernel, const RadialGrid& grid) {
    if (M < 1.0) throw InvalidInput("lem1_check: M >= 1 required");
    Lem1Report rep;
    const RadialGrid lhs_grid = RadialGrid::make(grid.r_min, R, grid.per_octave);
    rep.lhs = a_psi_energy(domain, x, lhs_grid, kernel);
    const RadialGrid rhs_grid = RadialGrid::make(grid.r_min, M * R, grid.per_octave);
    rep.rhs_energy = carleson_energy(domain, x, rhs_grid);
    if (M < Kernel::support_end) {
        rep.tail = 2.0 * gauss_integrate(
                             [&](double t) {
                                 const double lg = std::log(std::max(t / M, 1.0));
                                 return kernel.profile(t) * t * std::sqrt(lg);
                             },
                             M, Kernel::support_end, 64);
    }
    rep.ratio = rep.lhs / (rep.rhs_energy + rep.tail + 1e-300);
    return rep;
}

// ---------------------------------------------------------------------------
// Tangent detector
// ---------------------------------------------------------------------------

enum class TangentVerdict { Tangent, NotTangent, Inconclusive };

struct TangentReport {
    TangentVerdict verdict = TangentVerdict::Inconclusive;
    double finest_passing_scale = 0.0;  // largest aperture's smallest passing r, 0 if none
};

namespace detail {

// Does Gamma meet the open double cone X_a(x, u) inside B(x, r)?
inline bool gamma_meets_cone(const PlanarDomain& domain, const Point& x, const Point& u, double a,
                             double r, int samples_per_seg = 64) {
    std::vector<std::pair<Point, Point>> segs;
    domain.collect_segments(x, r, segs);
    for (const auto& [p0, p1] : segs) {
        // Clip the segment to the open disk first; sampling the full segment
        // can miss a tiny ball entirely.
        const Point delta = p1 - p0;
        const double A = delta.norm2();
        if (A == 0.0) continue;
        const Point w = p0 - x;
        const double B = w.dot(delta);
        const double C = w.norm2() - r * r;
        const double disc = B * B - A * C;
        if (disc <= 0.0) continue;
        const double sq = std::sqrt(disc);
        const double t_lo = std::max(0.0, (-B - sq) / A);
        const double t_hi = std::min(1.0, (-B + sq) / A);
        if (t_lo >= t_hi) continue;
        for (int k = 0; k <= samples_per_seg; ++k) {
            const double t = t_lo + (t_hi - t_lo) * static_cast<double>(k) / samples_per_seg;
            const Point d = p0 + delta * t - x;
            const double n = d.norm();
            if (n == 0.0 || n >= r) continue;
            if (std::fabs(d.dot(u)) > a * n) return true;
        }
    }
    return false;
}

}  // namespace detail

// Definition-style detector: x is declared tangent when, for every aperture,
// some tested scale r has Gamma avoiding the double cone around the normal of
// the finest-scale beta line, with the two cone components on opposite sides.
inline TangentReport tangent_detect(const PlanarDomain& domain, const Point& x,
                                    const RadialGrid& grid,
                                    const std::vector<double>& aperture_list) {
    TangentReport rep;
    // Direction orthogonal to the beta-minimizing line at the finest scale.
    FitLine line;
    try {
        line = beta_inf(domain, x, grid.r_min, 64, 1e-7).line;
    } catch (const EmptyIntersection&) {
        rep.verdict = TangentVerdict::Inconclusive;
        return rep;
    }
    const Point u(-line.dir.y, line.dir.x);

    bool any_side_trouble = false;
    double finest_pass = 0.0;
    for (double a : aperture_list) {
        bool aperture_passed = false;
        for (double r : grid.nodes) {  // descending radii
            if (detail::gamma_meets_cone(domain, x, u, a, r)) continue;
            const Point probe_up = x + u * (0.5 * r);
            const Point probe_dn = x - u * (0.5 * r);
            const RegionLabel lu = classify_point(domain, probe_up);
            const RegionLabel ld = classify_point(domain, probe_dn);
            const bool opposite = (lu == RegionLabel::InPlus && ld == RegionLabel::InMinus) ||
                                  (lu == RegionLabel::InMinus && ld == RegionLabel::InPlus);
            if (!opposite) {
                any_side_trouble = true;
                continue;
            }
            aperture_passed = true;
            finest_pass = r;
            break;
        }
        if (!aperture_passed) {
            rep.verdict = any_side_trouble ? TangentVerdict::Inconclusive : TangentVerdict::NotTangent;
            return rep;
        }
    }
    rep.verdict = TangentVerdict::Tangent;
    rep.finest_passing_scale = finest_pass;
    return rep;
}

// ---------------------------------------------------------------------------
// Per-point coefficient report
// ---------------------------------------------------------------------------

struct CoefficientReport {
    Point point;
    double eps_energy = 0.0;
    std::vector<std::pair<double, double>> beta_profile;  // (r, beta_inf)
    double alpha_energy = 0.0;
    double a_psi_energy = 0.0;
};

inline CoefficientReport compute_report(const PlanarDomain& domain, const Point& x,
                                        const RadialGrid& grid, const Kernel& kernel,
                                        const std::vector<double>& beta_scales) {
    CoefficientReport rep;
    rep.point = x;
    rep.eps_energy = carleson_energy(domain, x, grid);
    const ArcDefectTable table(domain, x, 1e-4 * grid.r_min, 6.0 * grid.r_max, 64);
    rep.alpha_energy = grid.energy([&](double r) {
        return detail::alpha_plus_from_table(domain, x, r, table);
    });
    rep.a_psi_energy = grid.energy([&](double r) {
        return std::fabs(detail::a_psi_signed(x, r, kernel, table));
    });
    for (double r : beta_scales) {
        double b = 0.0;
        try {
            b = beta_inf(domain, x, r).beta;
        } catch (const EmptyIntersection&) {
            b = -1.0;  // no boundary inside the ball at this scale
        }
        rep.beta_profile.emplace_back(r, b);
    }
    return rep;
}

}  // namespace carleson
