#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "carleson/corpus.hpp"
#include "carleson/fft.hpp"
#include "carleson/geometry.hpp"
#include "carleson/kernel.hpp"
#include "carleson/multiscale.hpp"
#include "carleson/quadrature.hpp"
#include "carleson/radial_grid.hpp"

namespace carleson {

// ---------------------------------------------------------------------------
// Sampled even profile, Fourier convention hat(xi) = int g(t) e^{-2 pi i xi t} dt
// ---------------------------------------------------------------------------

struct Profile1D {
    std::vector<double> samples;  // t_k = (k - half) * dt, odd count
    double dt = 0.0;
    double support_radius = 0.0;

    Profile1D(std::vector<double> s, double step, double radius)
        : samples(std::move(s)), dt(step), support_radius(radius) {
        if (samples.size() < 3 || samples.size() % 2 == 0 || !(dt > 0.0) || !(radius > 0.0))
            throw InvalidInput("profile needs an odd sample count and positive step/radius");
        const std::size_t half = samples.size() / 2;
        for (std::size_t j = 0; j <= half; ++j) {
            if (std::fabs(samples[half + j] - samples[half - j]) > 1e-12)
                throw NonEven("profile samples are not even");
        }
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const double t = (static_cast<double>(k) - static_cast<double>(half)) * dt;
            if (std::fabs(t) > support_radius && samples[k] != 0.0)
                throw InvalidInput("nonzero sample outside the declared support radius");
        }
    }

    static Profile1D from_kernel(const Kernel& kernel, int half = 2048) {
        const double step = Kernel::support_end * 1.02 / static_cast<double>(half);
        std::vector<double> s(2 * half + 1);
        for (int k = 0; k <= 2 * half; ++k) s[k] = kernel.profile((k - half) * step);
        return Profile1D(std::move(s), step, Kernel::support_end);
    }
};

struct SpectralConstants {
    double c_phi = 0.0;    // int phi
    double tilde_c = 0.0;  // int_0^inf |hat(t) - hat(0)|^2 dt / t^3
};

inline SpectralConstants spectral_constants(const Profile1D& profile, std::size_t fft_n) {
    if (!is_power_of_two(fft_n) || fft_n < (std::size_t{1} << 14))
        throw InvalidInput("fft size must be a power of two, at least 2^14");
    if (fft_n < 4 * profile.samples.size())
        throw InvalidInput("fft size too small for the profile sample count");

    const std::size_t half = profile.samples.size() / 2;
    const double dt = profile.dt;
    double c = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < profile.samples.size(); ++k) {
        const double t = (static_cast<double>(k) - static_cast<double>(half)) * dt;
        c += profile.samples[k];
        m2 += t * t * profile.samples[k];
    }
    c *= dt;
    m2 *= dt;

    std::vector<std::complex<double>> a(fft_n, 0.0);
    for (std::size_t k = 0; k < profile.samples.size(); ++k) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(half);
        const std::size_t idx = static_cast<std::size_t>((j + static_cast<std::ptrdiff_t>(fft_n)) %
                                                         static_cast<std::ptrdiff_t>(fft_n));
        a[idx] += profile.samples[k];
    }
    fft_inplace(a);

    const double dxi = 1.0 / (static_cast<double>(fft_n) * dt);
    const auto hat = [&](double t) {
        const double u = t / dxi;
        const std::size_t i = std::min(static_cast<std::size_t>(u), fft_n / 2 - 2);
        const double frac = u - static_cast<double>(i);
        return dt * ((1.0 - frac) * a[i].real() + frac * a[i + 1].real());
    };

    // hat(t) - c = -2 pi^2 m2 t^2 + O(t^4); the head integral has a closed
    // quadratic form, the far tail uses |hat| << |c|.
    const double t0 = 0.01;
    const double slope = 2.0 * kPi * kPi * m2;
    const double head = 0.5 * slope * slope * t0 * t0;
    const double T = 0.25 / dt;
    const double tail = c * c / (2.0 * T * T);

    const int per_octave = 128;
    const int octaves_steps =
        static_cast<int>(std::ceil(std::log2(T / t0) * per_octave));
    const double step = std::log(T / t0) / octaves_steps;
    std::vector<double> contributions;
    contributions.reserve(octaves_steps + 1);
    double prev_t = t0;
    double prev_v = [&] {
        const double d = hat(t0) - c;
        return d * d / (t0 * t0 * t0);
    }();
    for (int k = 1; k <= octaves_steps; ++k) {
        const double t = t0 * std::exp(step * k);
        const double d = hat(t) - c;
        const double v = d * d / (t * t * t);
        contributions.push_back(0.5 * (prev_v + v) * (t - prev_t));
        prev_t = t;
        prev_v = v;
    }

    SpectralConstants out;
    out.c_phi = c;
    out.tilde_c = head + pairwise_sum(contributions) + tail;
    if (!(out.tilde_c > 0.0) || !std::isfinite(out.tilde_c))
        throw InvalidInput("spectral constant must be positive and finite");
    return out;
}

// int |xi hat f(xi)|^2 dxi for the sampled f, by zero-padded FFT.
inline double xi_moment_energy(const GraphFunction1D& f, std::size_t fft_n = std::size_t{1} << 18) {
    if (!is_power_of_two(fft_n) || fft_n < 2 * f.f.size())
        throw InvalidInput("fft size must be a power of two covering the samples");
    std::vector<std::complex<double>> a(fft_n, 0.0);
    for (std::size_t j = 0; j < f.f.size(); ++j) a[j] = f.f[j];
    fft_inplace(a);
    const double dxi = 1.0 / (static_cast<double>(fft_n) * f.dx);
    std::vector<double> contributions;
    contributions.reserve(fft_n);
    for (std::size_t m = 1; m < fft_n; ++m) {
        const double xi = (m <= fft_n / 2 ? static_cast<double>(m)
                                          : static_cast<double>(m) - static_cast<double>(fft_n)) *
                          dxi;
        const double mag2 = std::norm(a[m]) * f.dx * f.dx;
        contributions.push_back(xi * xi * mag2 * dxi);
    }
    return pairwise_sum(contributions);
}

inline double plancherel_energy(const GraphFunction1D& f, const SpectralConstants& constants,
                                std::size_t fft_n = std::size_t{1} << 18) {
    return constants.tilde_c * xi_moment_energy(f, fft_n);
}

// ---------------------------------------------------------------------------
// Space-side quadratures (analytic profile, piecewise-linear f)
// ---------------------------------------------------------------------------

namespace detail {

// phi_r * g (x) = (1/r) int phi((x-y)/r) g(y) dy, for g piecewise linear on
// the sample grid of f. Integrates cell by cell so grid kinks never cross a
// quadrature panel.
inline double conv_phi_r(const Kernel& kernel, const GraphFunction1D& f, double x, double r) {
    const double S = Kernel::support_end;
    const double xe = f.x0 + f.dx * static_cast<double>(f.f.size() - 1);
    const double a = std::max(x - S * r, f.x0);
    const double b = std::min(x + S * r, xe);
    if (a >= b) return 0.0;
    const auto integrand = [&](double y) { return kernel.profile((x - y) / r) * f.value(y); };
    const double cells = (b - a) / f.dx;
    if (cells < 4.0) {
        // Footprint inside a few cells: the profile varies over the whole
        // window, the grid kinks are secondary.
        return gauss_integrate_composite(integrand, a, b, 16, 8) / r;
    }
    const std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(std::floor((a - f.x0) / f.dx));
    const std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(std::ceil((b - f.x0) / f.dx));
    const int nodes = cells > 1024.0 ? 2 : (cells > 128.0 ? 4 : 8);
    double sum = 0.0;
    for (std::ptrdiff_t i = i0; i < i1; ++i) {
        const double lo = std::max(a, f.x0 + f.dx * static_cast<double>(i));
        const double hi = std::min(b, f.x0 + f.dx * static_cast<double>(i + 1));
        if (hi <= lo) continue;
        sum += gauss_integrate(integrand, lo, hi, nodes);
    }
    return sum / r;
}

// Same convolution against the piecewise-constant derivative of f.
inline double conv_phi_r_deriv(const Kernel& kernel, const GraphFunction1D& f,
                               const std::vector<double>& deriv, double x, double r) {
    const double S = Kernel::support_end;
    const double xe = f.x0 + f.dx * static_cast<double>(f.f.size() - 1);
    const double a = std::max(x - S * r, f.x0);
    const double b = std::min(x + S * r, xe);
    if (a >= b) return 0.0;
    const std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(std::floor((a - f.x0) / f.dx));
    const std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(std::ceil((b - f.x0) / f.dx));
    const double cells = (b - a) / f.dx;
    const int nodes = cells > 1024.0 ? 2 : (cells > 128.0 ? 4 : 8);
    const int panels_small = cells < 4.0 ? 16 : 1;
    double sum = 0.0;
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(i0, 0);
         i < std::min<std::ptrdiff_t>(i1, static_cast<std::ptrdiff_t>(deriv.size())); ++i) {
        const double lo = std::max(a, f.x0 + f.dx * static_cast<double>(i));
        const double hi = std::min(b, f.x0 + f.dx * static_cast<double>(i + 1));
        if (hi <= lo) continue;
        const double d = deriv[static_cast<std::size_t>(i)];
        sum += d * gauss_integrate_composite([&](double y) { return kernel.profile((x - y) / r); },
                                             lo, hi, panels_small, nodes);
    }
    return sum / r;
}

}  // namespace detail

// Signed 1-D value (phi_r * f(x1) - c(phi) f(x1)) / r; equals the geometric
// product-kernel defect on the graph when the slope stays below 1/10.
inline double graph_a_rho(const GraphFunction1D& f, const Kernel& kernel, double x1, double r) {
    if (f.slope_max() > 0.1 + 1e-12) throw SlopeTooLarge("slope bound 1/10 exceeded");
    if (!(r > 0.0)) throw InvalidInput("radius must be positive");
    return (detail::conv_phi_r(kernel, f, x1, r) - kernel.c_phi() * f.value(x1)) / r;
}

// Direct space-side value of the two-sided deviation energy
// int int |(phi_r*f(x) - c(phi) f(x)) / r|^2 dx dr/r over the given radii.
inline double deviation_energy_direct(const GraphFunction1D& f, const Kernel& kernel,
                                      const RadialGrid& grid) {
    const double c = kernel.c_phi();
    const double S = Kernel::support_end;
    const double xe = f.x0 + f.dx * static_cast<double>(f.f.size() - 1);
    const std::size_t n = f.f.size();

    std::vector<double> totals;
    totals.reserve(grid.nodes.size());
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
        const double r = grid.nodes[k];
        // Core: trapezoid on the sample grid.
        std::vector<double> vals(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double x = f.x0 + f.dx * static_cast<double>(j);
            const double v = (detail::conv_phi_r(kernel, f, x, r) - c * f.f[j]) / r;
            vals[j] = v * v * f.dx;
        }
        vals.front() *= 0.5;
        vals.back() *= 0.5;
        double e = pairwise_sum(vals);
        // Tails: f vanishes, only the mollified term survives.
        const auto tail_sq = [&](double x) {
            const double v = detail::conv_phi_r(kernel, f, x, r) / r;
            return v * v;
        };
        e += gauss_integrate_composite(tail_sq, xe, xe + S * r, 8, 4);
        e += gauss_integrate_composite(tail_sq, f.x0 - S * r, f.x0, 8, 4);
        totals.push_back(e * grid.weights[k]);
    }
    return pairwise_sum(totals);
}

// Triple-integral deviation from the first-order Taylor model,
// int dr/r int dx int_{|y-x|<=r} |(c^{-1}(phi_r*f')(x)(y-x) + f(x) - f(y)) / r|^2 dy/r.
inline double taylor_deviation_energy(const GraphFunction1D& f, const Kernel& kernel,
                                      const RadialGrid& grid) {
    const double c = kernel.c_phi();
    const double S = Kernel::support_end;
    const double xe = f.x0 + f.dx * static_cast<double>(f.f.size() - 1);
    const std::vector<double> deriv = f.derivative();
    const std::size_t n = f.f.size();

    const auto inner = [&](double x, double r) {
        const double p = detail::conv_phi_r_deriv(kernel, f, deriv, x, r) / c;
        const double fx = f.value(x);
        const int panels = std::clamp(static_cast<int>(std::ceil(2.0 * r / f.dx)), 8, 128);
        const double val = gauss_integrate_composite(
            [&](double y) {
                const double dev = (p * (y - x) + fx - f.value(y)) / r;
                return dev * dev;
            },
            x - r, x + r, panels, 4);
        return val / r;
    };

    std::vector<double> totals;
    totals.reserve(grid.nodes.size());
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
        const double r = grid.nodes[k];
        std::vector<double> vals(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double x = f.x0 + f.dx * static_cast<double>(j);
            vals[j] = inner(x, r) * f.dx;
        }
        vals.front() *= 0.5;
        vals.back() *= 0.5;
        double e = pairwise_sum(vals);
        const double margin = (S + 1.0) * r;
        e += gauss_integrate_composite([&](double x) { return inner(x, r); }, xe, xe + margin, 8, 4);
        e += gauss_integrate_composite([&](double x) { return inner(x, r); }, f.x0 - margin, f.x0,
                                       8, 4);
        totals.push_back(e * grid.weights[k]);
    }
    return pairwise_sum(totals);
}

// ---------------------------------------------------------------------------
// Curve-side square-function energies over the graph of f
// ---------------------------------------------------------------------------

struct CurveEnergyReport {
    double apsi_energy_int = 0.0;  // int_Gamma (A_psi)^2 dH^1
    double gap_energy_int = 0.0;   // int_Gamma |A_rho - A_psi|^2 dH^1
    double deriv_l2 = 0.0;         // ||f'||_2^2
};

inline CurveEnergyReport graph_curve_energies(const GraphFunction1D& f, const Kernel& kernel,
                                              const RadialGrid& grid, int core_panels = 24,
                                              unsigned threads = 1) {
    if (f.slope_max() > 0.1 + 1e-12) throw SlopeTooLarge("slope bound 1/10 exceeded");
    const PlanarDomain domain = f.domain();
    const double S = Kernel::support_end;
    const double xe = f.x0 + f.dx * static_cast<double>(f.f.size() - 1);

    struct Node {
        double x1;
        double w;  // quadrature weight including arclength factor
    };
    std::vector<Node> nodes;
    const GaussRule& rule8 = gauss_legendre(8);
    const auto add_panelized = [&](double a, double b, int panels, const GaussRule& rule) {
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + h * (p + 0.5), half = 0.5 * h;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q)
                nodes.push_back({mid + half * rule.nodes[q], half * rule.weights[q]});
        }
    };
    add_panelized(f.x0, xe, core_panels, rule8);
    const GaussRule& rule4 = gauss_legendre(4);
    add_panelized(xe, xe + S * grid.r_max, 4, rule4);
    add_panelized(f.x0 - S * grid.r_max, f.x0, 4, rule4);

    const std::vector<double> deriv = f.derivative();
    const auto slope_at = [&](double x1) {
        const double t = (x1 - f.x0) / f.dx;
        if (t <= 0.0 || t >= static_cast<double>(deriv.size())) return 0.0;
        return deriv[std::min(static_cast<std::size_t>(t), deriv.size() - 1)];
    };

    std::vector<double> apsi_terms(nodes.size(), 0.0), gap_terms(nodes.size(), 0.0);
    parallel_for(nodes.size(), threads, [&](std::size_t i) {
        const double x1 = nodes[i].x1;
        const Point pt(x1, f.value(x1));
        const double apsi_sq = a_psi_energy(domain, pt, grid, kernel);
        const double arho_sq = grid.energy([&](double r) {
            return (detail::conv_phi_r(kernel, f, x1, r) - kernel.c_phi() * f.value(x1)) / r;
        });
        const double s = slope_at(x1);
        const double w = nodes[i].w * std::sqrt(1.0 + s * s);
        const double gap = std::sqrt(arho_sq) - std::sqrt(apsi_sq);
        apsi_terms[i] = apsi_sq * w;
        gap_terms[i] = gap * gap * w;
    });

    CurveEnergyReport out;
    out.apsi_energy_int = pairwise_sum(apsi_terms);
    out.gap_energy_int = pairwise_sum(gap_terms);
    out.deriv_l2 = f.deriv_l2_squared();
    return out;
}

struct LipsRatio {
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 1.0;
};

inline LipsRatio lips_ratio(const GraphFunction1D& f, const Kernel& kernel, const RadialGrid& grid,
                            unsigned threads = 1) {
    const CurveEnergyReport rep = graph_curve_energies(f, kernel, grid, 24, threads);
    LipsRatio out;
    out.numerator = rep.apsi_energy_int;
    out.denominator = rep.deriv_l2;
    // Zero over zero reads as perfect agreement.
    out.ratio = (out.denominator <= 1e-12 && out.numerator <= 1e-12)
                    ? 1.0
                    : out.numerator / out.denominator;
    return out;
}

}  // namespace carleson
