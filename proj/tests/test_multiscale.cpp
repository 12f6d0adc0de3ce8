#include <cmath>

#include "carleson/area_quadrature.hpp"
#include "carleson/corpus.hpp"
#include "carleson/multiscale.hpp"
#include "carleson/rng.hpp"
#include "doctest.h"

using namespace carleson;

namespace {

PlanarDomain half_plane() {
    return PlanarDomain::graph(-16.0, 0.5, std::vector<double>(65, 0.0));
}

// Brute-force sweep oracle for the minimal strip width over random
// directions.
double strip_width_bruteforce(const std::vector<Point>& pts, int n_random, std::uint64_t seed) {
    CounterRng rng(seed);
    double best = 1e300;
    for (int i = 0; i < n_random; ++i) {
        const double theta = rng.next_double(0.0, kPi);
        best = std::min(best, detail::strip_width(pts, theta));
    }
    return best;
}

}  // namespace

TEST_CASE("epsilon: zero on a line") {
    const PlanarDomain hp = half_plane();
    for (double r : {0.01, 0.3, 2.0}) {
        CHECK(epsilon_coeff(hp, Point(0.7, 0.0), r) <= 1e-9);
    }
}

TEST_CASE("epsilon: circle closed form 2 asin(r/2)") {
    const PlanarDomain circ = gen_circle(4096);
    const Point x(1.0, 0.0);
    for (double r : {0.01, 0.1, 0.5, 1.0, 1.7}) {
        const double expect = 2.0 * std::asin(r / 2.0);
        CHECK(std::fabs(epsilon_coeff_jittered(circ, x, r) - expect) < 1e-3);
    }
}

TEST_CASE("epsilon: wedge corner gives |pi - omega|") {
    const PlanarDomain w = gen_wedge(kPi / 2.0);
    for (double r : {0.02, 0.05, 0.1}) {
        CHECK(epsilon_coeff_jittered(w, Point(0, 0), r) ==
              doctest::Approx(kPi / 2.0).epsilon(1e-9));
    }
    const PlanarDomain w2 = gen_wedge(3.0 * kPi / 2.0);
    CHECK(epsilon_coeff_jittered(w2, Point(0, 0), 0.05) ==
          doctest::Approx(kPi / 2.0).epsilon(1e-9));
}

TEST_CASE("carleson_energy: analytic integrand comparisons") {
    const PlanarDomain hp = half_plane();
    const RadialGrid grid = RadialGrid::make(1e-3, 1.0, 8);
    CHECK(carleson_energy(hp, Point(0, 0), grid) <= 1e-12);

    const PlanarDomain circ = gen_circle(4096);
    const double e = carleson_energy(circ, Point(1, 0), grid);
    const double expect = grid.energy([](double r) { return 2.0 * std::asin(r / 2.0); });
    CHECK(std::fabs(e - expect) / expect < 1e-3);

    // Square corner: constant integrand (pi/2)^2 over the range.
    const PlanarDomain w = gen_wedge(kPi / 2.0);
    const double r_min = 1e-3;
    const RadialGrid small = RadialGrid::make(r_min, 0.1, 8);
    const double corner = carleson_energy(w, Point(0, 0), small);
    const double closed = (kPi / 2.0) * (kPi / 2.0) * std::log(0.1 / r_min);
    CHECK(std::fabs(corner - closed) / closed < 0.02);
}

TEST_CASE("radial grid weights sum to the log measure") {
    const RadialGrid g = RadialGrid::make(1e-3, 1.0, 8);
    double total = 0.0;
    for (double w : g.weights) total += w;
    CHECK(total == doctest::Approx(std::log(1.0 / 1e-3)).epsilon(1e-12));
    CHECK_THROWS_AS(RadialGrid::make(1e-3, 1.0, 2), InvalidInput);
}

TEST_CASE("beta_inf: line, circle sagitta, split segments") {
    const PlanarDomain hp = half_plane();
    const BetaResult lineres = beta_inf(hp, Point(0, 0), 0.8);
    CHECK(lineres.beta <= 1e-12);
    CHECK(std::fabs(lineres.line.angle()) <= 1e-9);

    const PlanarDomain circ = gen_circle(4096);
    const double r = 0.2;
    const BetaResult b = beta_inf(circ, Point(1, 0), r, 64, 1e-9);
    const std::vector<Point> pts = gamma_ball_samples(circ, Point(1, 0), r);
    const double brute = strip_width_bruteforce(pts, 100000, 42) / (2.0 * r);
    CHECK(std::fabs(b.beta - brute) < 1e-4);
    CHECK(b.beta <= brute + 1e-12);  // sweep+refine cannot be worse than random probing

    // Two horizontal segments at heights 0 and 0.02: any strip must be at
    // least 0.01 wide at scale r=1.
    std::vector<Point> two = {Point(-0.9, 0), Point(0.9, 0), Point(-0.9, 0.02), Point(0.9, 0.02)};
    const BetaResult b2 = strip_fit_points(two, 1.0, 64, 1e-9);
    CHECK(b2.beta >= 0.01 - 1e-9);
    const double brute2 = strip_width_bruteforce(two, 100000, 7) / 2.0;
    CHECK(b2.beta <= brute2 + 1e-12);
}

TEST_CASE("beta_inf: empty intersection") {
    const PlanarDomain circ = gen_circle(256);
    CHECK_THROWS_AS(beta_inf(circ, Point(0, 0), 0.1), EmptyIntersection);
}

TEST_CASE("alpha_plus: half plane, deep-interior limit, dual quadrature") {
    const PlanarDomain hp = half_plane();
    CHECK(alpha_plus(hp, Point(0.1, 0.0), 0.5) <= 1e-6);

    const PlanarDomain circ = gen_circle(1024);
    // Center of the unit disk with r = 1/16: dist to Gamma = 16 r.
    CHECK(alpha_plus(circ, Point(0, 0), 1.0 / 16.0) ==
          doctest::Approx(kPi / 2.0).epsilon(1e-6));

    const double a_polar = alpha_plus(circ, Point(1, 0), 0.25);
    const double a_area = alpha_plus_area(circ, Point(1, 0), 0.25);
    CHECK(std::fabs(a_polar - a_area) < 1e-4);
}

TEST_CASE("a_psi: half plane zero and dual quadrature on the circle") {
    const Kernel kernel;
    const PlanarDomain hp = half_plane();
    CHECK(a_psi(hp, Point(0.0, 0.0), 0.5, kernel) <= 1e-6);

    const PlanarDomain circ = gen_circle(1024);
    const double p = a_psi(circ, Point(1, 0), 0.25, kernel);
    const double a = a_psi_area(circ, Point(1, 0), 0.25, kernel);
    CHECK(std::fabs(p - a) / std::max(p, a) < 1e-4);
}

TEST_CASE("a_psi pointwise bound (one-scale inequality)") {
    const Kernel kernel;
    const PlanarDomain circ = gen_circle(512);
    const PlanarDomain w = gen_wedge(2.0);
    for (const PlanarDomain* d : {&circ, &w}) {
        const Point x = d->vertices()[0];
        for (double r : {0.05, 0.2, 0.6}) {
            const ArcDefectTable table(*d, x, 1e-4 * r, Kernel::support_end * r, 64);
            const APsiBound b = a_psi_with_bound(*d, x, r, kernel, table);
            CHECK(b.value <= b.pointwise_rhs + 1e-6);
        }
    }
}

TEST_CASE("kernel sandwich on the signed polar integrand") {
    // Replacing phi by the indicator of [0,1] (resp. [0,1.1]) brackets the
    // unsigned integrand of a_psi before absolute values.
    const Kernel kernel;
    const PlanarDomain circ = gen_circle(512);
    const Point x(1.0, 0.0);
    const double r = 0.3;
    const ArcDefectTable table(circ, x, 1e-4 * r, Kernel::support_end * r, 64);
    // m(s) = pi s - H1 >= 0 for the convex circle domain at boundary points
    // (the plus side is the smaller one), so the sandwich is monotone.
    const double lower = table.integrate_weighted_m([](double) { return 1.0; }, 1e-4 * r, r);
    const double full = detail::a_psi_signed(x, r, kernel, table) * r * r;
    const double upper =
        table.integrate_weighted_m([](double) { return 1.0; }, 1e-4 * r, 1.1 * r);
    CHECK(lower <= full + 1e-12);
    CHECK(full <= upper + 1e-12);
}

TEST_CASE("a_psi_energy: line zero, circle finite, lem1 comparison") {
    const Kernel kernel;
    const RadialGrid grid = RadialGrid::make(1e-3, 1.0, 8);
    const PlanarDomain hp = half_plane();
    CHECK(a_psi_energy(hp, Point(0, 0), grid, kernel) <= 1e-12);

    const PlanarDomain circ = gen_circle(1024);
    const double apsi_e = a_psi_energy(circ, Point(1, 0), grid, kernel);
    const double eps_e = carleson_energy(circ, Point(1, 0), grid);
    CHECK(apsi_e > 0.0);
    CHECK(std::isfinite(apsi_e));
    // Energy comparison at M = 1.1 (tail vanishes).
    CHECK(apsi_e <= 10.0 * eps_e);
}

TEST_CASE("lem1_check: line zeros and exact zero tail at M = 1.1") {
    const Kernel kernel;
    const RadialGrid grid = RadialGrid::make(1e-3, 1.0, 8);
    const PlanarDomain hp = half_plane();
    const Lem1Report rep = lem1_check(hp, Point(0, 0), 1.0, 1.1, kernel, grid);
    CHECK(rep.lhs <= 1e-12);
    CHECK(rep.rhs_energy <= 1e-12);
    CHECK(rep.tail == 0.0);

    const Lem1Report rep2 = lem1_check(hp, Point(0, 0), 1.0, 1.05, kernel, grid);
    CHECK(rep2.tail > 0.0);
}

TEST_CASE("scale covariance") {
    const Kernel kernel;
    for (int n : {512}) {
        const PlanarDomain circ = gen_circle(n);
        std::vector<Point> scaled;
        for (const Point& p : circ.vertices()) scaled.push_back(p * 53.0);
        const PlanarDomain big = PlanarDomain::jordan(std::move(scaled));
        const Point x(1.0, 0.0), xs(53.0, 0.0);
        const double r = 0.21;
        CHECK(epsilon_coeff_jittered(circ, x, r) ==
              doctest::Approx(epsilon_coeff_jittered(big, xs, 53.0 * r)).epsilon(1e-9));
        CHECK(beta_inf(circ, x, r).beta ==
              doctest::Approx(beta_inf(big, xs, 53.0 * r).beta).epsilon(1e-9));
        CHECK(alpha_plus(circ, x, r) ==
              doctest::Approx(alpha_plus(big, xs, 53.0 * r)).epsilon(1e-7));
        CHECK(a_psi(circ, x, r, kernel) ==
              doctest::Approx(a_psi(big, xs, 53.0 * r, kernel)).epsilon(1e-7));
    }
}

TEST_CASE("quadrature refinement stability on the smooth corpus") {
    const Kernel kernel;
    const PlanarDomain circ = gen_circle(1024);
    const Point x(1.0, 0.0);
    const RadialGrid g8 = RadialGrid::make(1e-2, 1.0, 8);
    const RadialGrid g16 = RadialGrid::make(1e-2, 1.0, 16);
    const double e8 = carleson_energy(circ, x, g8);
    const double e16 = carleson_energy(circ, x, g16);
    CHECK(std::fabs(e8 - e16) / e16 < 0.01);
    const double a8 = a_psi_energy(circ, x, g8, kernel);
    const double a16 = a_psi_energy(circ, x, g16, kernel);
    CHECK(std::fabs(a8 - a16) / a16 < 0.01);
}

TEST_CASE("tangent_detect: circle tangent, square corner not") {
    const PlanarDomain circ = gen_circle(2048);
    const RadialGrid grid = RadialGrid::make(5e-3, 0.5, 4);
    const std::vector<double> apertures = {0.2, 0.5, std::cos(kPi / 4.0 - 0.1)};
    const TangentReport t1 = tangent_detect(circ, Point(1, 0), grid, apertures);
    CHECK(t1.verdict == TangentVerdict::Tangent);

    const PlanarDomain sq =
        PlanarDomain::jordan({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const TangentReport t2 = tangent_detect(sq, Point(0, 0), grid, apertures);
    CHECK(t2.verdict != TangentVerdict::Tangent);
}

TEST_CASE("eps-beta comparison at tangent points") {
    // eps(x, r') <= C beta_inf(B(x, r)) for r/2 < r' < r on the smooth
    // corpus; the measured constant stays modest.
    const PlanarDomain circ = gen_circle(2048);
    const Point x(1.0, 0.0);
    for (double r : {0.1, 0.3}) {
        const double beta = beta_inf(circ, x, r).beta;
        for (double f : {0.6, 0.8, 0.99}) {
            const double eps = epsilon_coeff_jittered(circ, x, f * r);
            CHECK(eps <= 40.0 * beta);
        }
    }
}
