#include <cmath>
#include <cstdint>

#include "carleson/corpus.hpp"
#include "carleson/domain.hpp"
#include "carleson/multiscale.hpp"
#include "carleson/rng.hpp"
#include "carleson/verify.hpp"
#include "doctest.h"

using namespace carleson;

namespace {

double signed_area(const std::vector<Point>& v) {
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % v.size()];
        a += p.x * q.y - p.y * q.x;
    }
    return 0.5 * a;
}

}  // namespace

TEST_CASE("counter rng matches the published splitmix64 stream") {
    // mix(seed, k) is the (k+1)-th output of a splitmix64 stream started at
    // state = seed, so the seed-0 stream is checkable against the reference
    // implementation's well-known first outputs.
    CHECK(CounterRng::mix(0, 0) == 0xE220A8397B1DCDAFULL);
    CHECK(CounterRng::mix(0, 1) == 0x6E789E6AA1B965F4ULL);
    CHECK(CounterRng::mix(0, 2) == 0x06C45D188009454FULL);

    // Stateful wrapper walks the same counters.
    CounterRng rng(0);
    CHECK(rng.next_u64() == CounterRng::mix(0, 0));
    CHECK(rng.next_u64() == CounterRng::mix(0, 1));

    // Distinct seeds give distinct streams; doubles live in [0, 1).
    CHECK(CounterRng::mix(1, 0) != CounterRng::mix(0, 0));
    CounterRng u(12345);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.next_double();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("circle generator: vertex placement, orientation, area") {
    const PlanarDomain c = gen_circle(4096);
    const auto& v = c.vertices();
    REQUIRE(v.size() == 4096);
    CHECK(v[0].x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v[0].y == doctest::Approx(0.0).epsilon(1e-12));
    // Inscribed 4096-gon area is pi to ~1e-5.
    CHECK(signed_area(v) == doctest::Approx(kPi).epsilon(1e-5));
    CHECK(signed_area(v) > 0.0);  // positively oriented
    CHECK(polyline_perimeter(c) == doctest::Approx(kTwoPi).epsilon(1e-5));
}

TEST_CASE("wedge generator: vertex at origin, symmetric, defect oracle") {
    const PlanarDomain w = gen_wedge(kPi / 2.0);
    const auto& v = w.vertices();
    CHECK(v[0].x == 0.0);
    CHECK(v[0].y == 0.0);
    // Arc endpoints symmetric about the horizontal axis at radius 2.
    CHECK(dist(v[1], Point(0.0, 0.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(v[1].y == doctest::Approx(-v.back().y).epsilon(1e-12));

    // At the vertex the one-scale defect is |pi - omega| for small r.
    for (double r : {0.02, 0.05, 0.1})
        CHECK(epsilon_coeff(w, Point(0.0, 0.0), r) == doctest::Approx(kPi / 2.0).epsilon(1e-3));
    CHECK_THROWS_AS(gen_wedge(0.05), InvalidInput);
}

TEST_CASE("koch generator: edge count and perimeter growth") {
    for (int depth : {0, 1, 3}) {
        const PlanarDomain k = gen_koch(depth);
        const double edges = 3.0 * std::pow(4.0, depth);
        CHECK(static_cast<double>(k.vertices().size()) == edges);
        CHECK(polyline_perimeter(k) ==
              doctest::Approx(3.0 * std::pow(4.0 / 3.0, depth)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gen_koch(9), InvalidInput);
}

TEST_CASE("lipschitz graph generator: exact slope cap, support, reproducibility") {
    const GraphFunction1D f = gen_lipschitz_graph(7, 5, 0.05, 1.0, 1024);
    CHECK(f.slope_max() == doctest::Approx(0.05).epsilon(1e-9));

    // Zero outside the window half-width 1, sampled over [-1.5, 1.5].
    CHECK(f.x0 == doctest::Approx(-1.5).epsilon(1e-12));
    for (std::size_t i = 0; i < f.f.size(); ++i) {
        const double x = f.x0 + f.dx * static_cast<double>(i);
        if (std::fabs(x) >= 1.0) CHECK(f.f[i] == 0.0);
    }

    const GraphFunction1D g = gen_lipschitz_graph(7, 5, 0.05, 1.0, 1024);
    REQUIRE(g.f.size() == f.f.size());
    for (std::size_t i = 0; i < f.f.size(); ++i) CHECK(g.f[i] == f.f[i]);

    const GraphFunction1D z = gen_lipschitz_graph(7, 5, 0.0, 1.0, 256);
    for (double y : z.f) CHECK(y == 0.0);
}

TEST_CASE("sample_measure arclength mode: total mass and placement") {
    const PlanarDomain c = gen_circle(512);
    const WeightedPointSet s = sample_measure(c, 1000);
    REQUIRE(s.points.size() == 1000);
    CHECK(s.total_mass() == doctest::Approx(polyline_perimeter(c)).epsilon(1e-9));
    // Every sample lies on the polyline (distance to the unit circle is
    // within the 512-gon sagitta).
    for (const Point& p : s.points) {
        const double rho = std::hypot(p.x, p.y);
        CHECK(rho <= 1.0 + 1e-12);
        CHECK(rho >= std::cos(kPi / 512.0) - 1e-12);
    }
    CHECK_THROWS_AS(sample_measure(c, 50), InvalidInput);
}

TEST_CASE("sample_measure noise mode: mass fraction and clearance") {
    const GraphFunction1D f = gen_lipschitz_graph(3, 5, 0.05, 1.0, 512);
    const PlanarDomain domain = f.domain();
    const int n = 600;
    const WeightedPointSet s = sample_measure(domain, n, MeasureMode::GraphWithNoise, 0.10, 11);
    REQUIRE(s.points.size() == static_cast<std::size_t>(n));

    double off_mass = 0.0;
    const double clearance = 0.15 * polyline_perimeter(domain) / kTwoPi;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const Point& p = s.points[i];
        const double dy = std::fabs(p.y - f.value(p.x));
        if (dy > 1e-9) {
            off_mass += s.weights[i];
            // Clusters keep a definite normal distance from the graph.
            CHECK(dy > 0.5 * clearance);
        }
    }
    CHECK(off_mass / s.total_mass() == doctest::Approx(0.10).epsilon(1.0 / n));

    // Bit reproducibility.
    const WeightedPointSet t = sample_measure(domain, n, MeasureMode::GraphWithNoise, 0.10, 11);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        CHECK(t.points[i].x == s.points[i].x);
        CHECK(t.points[i].y == s.points[i].y);
    }
}

TEST_CASE("defect oracles survive a brute-force scan") {
    // Million-angle arc sweeps with independent labelers against the closed
    // forms; throws on drift beyond 1e-3.
    const double worst = verify::validate_oracles(1000000, 1);
    CHECK(worst <= 1e-3);
}
