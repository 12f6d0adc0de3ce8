#pragma once

#include <cmath>

#include "carleson/quadrature.hpp"

namespace carleson {

// C-infinity bridge b: [0,1] -> [0,1], b(0)=0, b(1)=1, flat to all orders at
// both ends.
inline double smooth_bridge(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

// Radial profile phi: plateau 1 on [0,1], C-infinity cutoff to 0 at 1.1.
// psi(x) = phi(|x|) is the radial kernel of the smoothed square function;
// rho(x) = phi(x1) phi(x2) is its product counterpart.
class Kernel {
  public:
    static constexpr double plateau_end = 1.0;
    static constexpr double support_end = 1.1;

    Kernel() {
        const auto phi_t = [this](double t) { return profile(t) * t; };
        const auto phi_v = [this](double t) { return profile(t); };
        c_psi_ = M_PI * (0.5 + gauss_integrate(phi_t, plateau_end, support_end, 64));
        c_phi_ = 2.0 * (plateau_end + gauss_integrate(phi_v, plateau_end, support_end, 64));
    }

    // Even 1-D profile, evaluated at |t|.
    double profile(double t) const {
        t = std::fabs(t);
        if (t <= plateau_end) return 1.0;
        if (t >= support_end) return 0.0;
        return smooth_bridge((support_end - t) / (support_end - plateau_end));
    }

    double psi(double x, double y) const { return profile(std::hypot(x, y)); }
    double rho(double x, double y) const { return profile(x) * profile(y); }

    // c_psi = integral over the upper half plane of psi = pi * int_0^inf phi(t) t dt.
    double c_psi() const { return c_psi_; }
    // c(phi) = int_R phi.
    double c_phi() const { return c_phi_; }

  private:
    double c_psi_ = 0.0;
    double c_phi_ = 0.0;
};

}  // namespace carleson
