#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace carleson {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre nodes/weights by Newton iteration on P_n.
inline const GaussRule& gauss_legendre(int n) {
    static thread_local std::vector<GaussRule> cache;
    if (static_cast<int>(cache.size()) <= n) cache.resize(n + 1);
    GaussRule& rule = cache[n];
    if (!rule.nodes.empty()) return rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return rule;
}

template <typename F>
double gauss_integrate(F&& f, double a, double b, int n = 16) {
    const GaussRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return s * half;
}

// Composite Gauss over [a, b] split into `panels` equal pieces.
template <typename F>
double gauss_integrate_composite(F&& f, double a, double b, int panels, int n = 8) {
    double s = 0.0;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) s += gauss_integrate(f, a + k * h, a + (k + 1) * h, n);
    return s;
}

}  // namespace carleson
