#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "carleson/domain.hpp"
#include "carleson/geometry.hpp"
#include "carleson/kernel.hpp"
#include "carleson/quadrature.hpp"

namespace carleson {

// Iterated-integral quadrature of a smooth weight over Omega+ inside a square
// window: rows are intersected with Omega+ exactly (linear crossings), the
// row integrals use composite Gauss, and the vertical integration splits its
// panels at every Gamma vertex height so the integrand stays smooth per
// panel. Independent of the polar route by construction (horizontal slices
// versus concentric circles).
class AreaQuadrature {
  public:
    AreaQuadrature(const PlanarDomain& domain, const Point& center, double win_radius)
        : domain_(&domain), center_(center), win_(win_radius) {
        domain.collect_segments(center, win_radius * 1.5, edges_);
    }

    // Intervals of {u : (u, v) in Omega+} within [u_lo, u_hi].
    std::vector<std::pair<double, double>> row_intervals(double v, double u_lo,
                                                         double u_hi) const {
        std::vector<double> xs;
        if (domain_->kind() == PlanarDomain::Kind::JordanPolyline) {
            const auto& verts = domain_->vertices();
            const std::size_t n = verts.size();
            for (std::size_t i = 0; i < n; ++i) {
                const Point& a = verts[i];
                const Point& b = verts[(i + 1) % n];
                if ((a.y > v) != (b.y > v)) xs.push_back(a.x + (v - a.y) * (b.x - a.x) / (b.y - a.y));
            }
            std::sort(xs.begin(), xs.end());
            std::vector<std::pair<double, double>> out;
            for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
                const double lo = std::max(xs[i], u_lo);
                const double hi = std::min(xs[i + 1], u_hi);
                if (hi > lo) out.emplace_back(lo, hi);
            }
            return out;
        }
        // Graph region: inside iff v > f(u). March the crossings of f = v.
        std::vector<std::pair<double, double>> out;
        bool inside = v > domain_->graph_value(u_lo);
        double open_at = inside ? u_lo : 0.0;
        for (const auto& [a, b] : edges_) {
            if (b.x <= u_lo || a.x >= u_hi) continue;
            if ((a.y > v) == (b.y > v)) continue;
            const double u = a.x + (v - a.y) * (b.x - a.x) / (b.y - a.y);
            if (u <= u_lo || u >= u_hi) continue;
            xs.push_back(u);
        }
        std::sort(xs.begin(), xs.end());
        for (double u : xs) {
            if (inside) {
                out.emplace_back(open_at, u);
                inside = false;
            } else {
                open_at = u;
                inside = true;
            }
        }
        if (inside) out.emplace_back(open_at, u_hi);
        return out;
    }

    // Integral over Omega+ cap [center +- win]^2 of weight(u - cx, v - cy).
    // radial_breaks: radii around the center where the weight has limited
    // smoothness; each row interval is split at the crossings. u_breaks /
    // v_breaks: offsets from the center with the same role for the axes.
    double integrate(const std::function<double(double, double)>& weight, double u_scale,
                     int rows_per_panel = 8, int max_panels = 2048,
                     const std::vector<double>& radial_breaks = {},
                     const std::vector<double>& u_breaks = {},
                     const std::vector<double>& v_breaks = {}) const {
        const double v0 = center_.y - win_, v1 = center_.y + win_;
        const double u0 = center_.x - win_, u1 = center_.x + win_;

        // Panel splits at vertex heights inside the window.
        std::vector<double> vs;
        vs.push_back(v0);
        vs.push_back(v1);
        for (const auto& [a, b] : edges_) {
            if (a.y > v0 && a.y < v1 && a.x >= u0 - u_scale && a.x <= u1 + u_scale)
                vs.push_back(a.y);
            if (b.y > v0 && b.y < v1 && b.x >= u0 - u_scale && b.x <= u1 + u_scale)
                vs.push_back(b.y);
        }
        for (double s : radial_breaks) {
            for (double sign : {-1.0, 1.0}) {
                const double v = center_.y + sign * s;
                if (v > v0 && v < v1) vs.push_back(v);
            }
        }
        for (double dv : v_breaks) {
            for (double sign : {-1.0, 1.0}) {
                const double v = center_.y + sign * dv;
                if (v > v0 && v < v1) vs.push_back(v);
            }
        }
        std::sort(vs.begin(), vs.end());
        // Keep every distinct height: dropping one leaves a kink of the row
        // length inside a Gauss panel. Thin only past the hard panel cap.
        const double dedupe = 1e-12 * std::max(1.0, win_);
        std::vector<double> panels;
        panels.push_back(vs.front());
        for (double v : vs)
            if (v - panels.back() > dedupe) panels.push_back(v);
        if (panels.back() < v1) panels.push_back(v1);
        if (panels.size() > static_cast<std::size_t>(max_panels) + 1) {
            std::vector<double> thinned;
            thinned.push_back(panels.front());
            const std::size_t interior = panels.size() - 2;
            const std::size_t stride = (interior + max_panels - 2) / (max_panels - 1);
            for (std::size_t i = 1; i + 1 < panels.size(); i += stride) thinned.push_back(panels[i]);
            thinned.push_back(panels.back());
            panels.swap(thinned);
        }

        const GaussRule& rule = gauss_legendre(rows_per_panel);
        std::vector<double> contributions;
        for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
            const double mid = 0.5 * (panels[p] + panels[p + 1]);
            const double half = 0.5 * (panels[p + 1] - panels[p]);
            for (int q = 0; q < rows_per_panel; ++q) {
                const double v = mid + half * rule.nodes[q];
                const double dv = v - center_.y;
                std::vector<double> cuts;
                for (double s : radial_breaks) {
                    const double d2 = s * s - dv * dv;
                    if (d2 <= 0.0) continue;
                    const double du = std::sqrt(d2);
                    cuts.push_back(center_.x - du);
                    cuts.push_back(center_.x + du);
                }
                for (double du : u_breaks) {
                    cuts.push_back(center_.x - du);
                    cuts.push_back(center_.x + du);
                }
                std::sort(cuts.begin(), cuts.end());
                double row = 0.0;
                for (const auto& [lo, hi] : row_intervals(v, u0, u1)) {
                    double piece_lo = lo;
                    auto piece = [&](double a, double b) {
                        if (b - a <= 0.0) return;
                        const int sub =
                            std::max(1, static_cast<int>(std::ceil((b - a) / (0.25 * u_scale))));
                        row += gauss_integrate_composite(
                            [&](double u) { return weight(u - center_.x, dv); }, a, b, sub, 8);
                    };
                    for (double c : cuts) {
                        if (c <= piece_lo || c >= hi) continue;
                        piece(piece_lo, c);
                        piece_lo = c;
                    }
                    piece(piece_lo, hi);
                }
                contributions.push_back(row * rule.weights[q] * half);
            }
        }
        return pairwise_sum(contributions);
    }

  private:
    const PlanarDomain* domain_;
    Point center_;
    double win_;
    std::vector<std::pair<Point, Point>> edges_;
};

// alpha+ by direct 2-D quadrature of the Gaussian over Omega+.
inline double alpha_plus_area(const PlanarDomain& domain, const Point& x, double r) {
    const AreaQuadrature quad(domain, x, 6.0 * r);
    const double integral = quad.integrate(
        [&](double du, double dv) { return std::exp(-(du * du + dv * dv) / (r * r)); }, r);
    return std::fabs(kPi / 2.0 - integral / (r * r));
}

// a_psi by direct 2-D quadrature of the radial bump over Omega+.
inline double a_psi_area(const PlanarDomain& domain, const Point& x, double r,
                         const Kernel& kernel) {
    const AreaQuadrature quad(domain, x, Kernel::support_end * r);
    const double integral = quad.integrate(
        [&](double du, double dv) { return kernel.psi(du / r, dv / r); }, r, 8, 2048,
        {Kernel::plateau_end * r, Kernel::support_end * r});
    return std::fabs(kernel.c_psi() - integral / (r * r));
}

// a_rho (product kernel) by direct 2-D quadrature; c_rho = c(phi)^2 / 2.
inline double a_rho_area(const PlanarDomain& domain, const Point& x, double r,
                         const Kernel& kernel) {
    const AreaQuadrature quad(domain, x, Kernel::support_end * r);
    const double integral = quad.integrate(
        [&](double du, double dv) { return kernel.rho(du / r, dv / r); }, r, 8, 2048, {},
        {Kernel::plateau_end * r, Kernel::support_end * r},
        {Kernel::plateau_end * r, Kernel::support_end * r});
    const double c_rho = 0.5 * kernel.c_phi() * kernel.c_phi();
    return std::fabs(c_rho - integral / (r * r));
}

// Signed version of a_rho (kept for the 1-D identity check, which is signed
// before absolute values are taken).
inline double a_rho_area_signed(const PlanarDomain& domain, const Point& x, double r,
                                const Kernel& kernel) {
    const AreaQuadrature quad(domain, x, Kernel::support_end * r);
    const double integral = quad.integrate(
        [&](double du, double dv) { return kernel.rho(du / r, dv / r); }, r, 8, 2048, {},
        {Kernel::plateau_end * r, Kernel::support_end * r},
        {Kernel::plateau_end * r, Kernel::support_end * r});
    const double c_rho = 0.5 * kernel.c_phi() * kernel.c_phi();
    return c_rho - integral / (r * r);
}

}  // namespace carleson
