#pragma once

#include <cmath>
#include <vector>

#include "carleson/geometry.hpp"

namespace carleson {

// Log-spaced radii realizing truncated dr/r integrals: trapezoid weights on
// the log axis, so sum(w_k) = ln(r_max / r_min) exactly (telescoping).
struct RadialGrid {
    double r_min = 0.0;
    double r_max = 0.0;
    int per_octave = 8;
    std::vector<double> nodes;    // strictly decreasing, nodes[0] = r_max
    std::vector<double> weights;

    static RadialGrid make(double r_min, double r_max, int per_octave) {
        if (!(r_min > 0.0) || !(r_max > r_min)) throw InvalidInput("RadialGrid: need 0 < r_min < r_max");
        if (per_octave < 4) throw InvalidInput("RadialGrid: per_octave >= 4");
        RadialGrid g;
        g.r_min = r_min;
        g.r_max = r_max;
        g.per_octave = per_octave;
        const double octaves = std::log2(r_max / r_min);
        const int steps = std::max(1, static_cast<int>(std::ceil(octaves * per_octave)));
        g.nodes.resize(steps + 1);
        for (int k = 0; k <= steps; ++k)
            g.nodes[k] = r_max * std::pow(r_min / r_max, static_cast<double>(k) / steps);
        g.nodes.back() = r_min;
        g.weights.assign(steps + 1, 0.0);
        for (int k = 0; k < steps; ++k) {
            const double w = 0.5 * std::log(g.nodes[k] / g.nodes[k + 1]);
            g.weights[k] += w;
            g.weights[k + 1] += w;
        }
        return g;
    }

    // sum_k f(r_k)^2 w_k with a fixed deterministic reduction order.
    template <typename F>
    double energy(F&& coeff) const {
        std::vector<double> terms(nodes.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double c = coeff(nodes[k]);
            terms[k] = c * c * weights[k];
        }
        return pairwise_sum(terms);
    }
};

}  // namespace carleson
