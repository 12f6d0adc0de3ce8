#include <cmath>

#include "carleson/corpus.hpp"
#include "carleson/graph_builder.hpp"
#include "carleson/rng.hpp"
#include "doctest.h"

using namespace carleson;

namespace {

// n points evenly spread on the horizontal axis across [-1, 1]. Linear
// density 3 keeps every ladder ball above the theta = 0.05 gate, including
// the top one at radius 50.
WeightedPointSet line_measure(int n, double tilt = 0.0, double len = 2.0) {
    WeightedPointSet set;
    for (int i = 0; i < n; ++i) {
        const double t = -len / 2.0 + len * (i + 0.5) / n;
        set.points.emplace_back(t * std::cos(tilt), t * std::sin(tilt));
        set.weights.push_back(3.0 * len / n);
    }
    return set;
}

ConstructionParams default_params() {
    ConstructionParams p;
    p.theta = 0.05;
    p.alpha = 0.08;
    p.flat_param = 0.01;
    p.c0 = 0.5;
    p.root_radius = 1.0;
    p.radii_per_octave = 4;
    p.ladder_octaves = 16;
    return p;
}

}  // namespace

TEST_CASE("classify_ball: flat set good, tilted set not, density gate") {
    const ConstructionParams params = default_params();
    const WeightedPointSet flat = line_measure(200);
    const BallFlags f = classify_ball(flat, Point(0, 0), 0.5, params);
    CHECK(f.good);
    CHECK(f.very_good);

    const WeightedPointSet tilted = line_measure(200, 2.0 * params.alpha);
    const BallFlags t = classify_ball(tilted, Point(0, 0), 0.5, params);
    CHECK_FALSE(t.good);

    // Mass scaled so the density sits at theta/2: never good.
    WeightedPointSet sparse = line_measure(200);
    const double mass = sparse.mass_in_ball(Point(0, 0), 0.5);
    for (double& w : sparse.weights) w *= (params.theta / 2.0) * 0.5 / mass;
    CHECK_FALSE(classify_ball(sparse, Point(0, 0), 0.5, params).good);

    CHECK_THROWS_AS(classify_ball(flat, Point(100, 100), 0.5, params), EmptyBall);
}

TEST_CASE("stopping_radius: flat line floors out, isolated cluster stops high") {
    const ConstructionParams params = default_params();
    const WeightedPointSet flat = line_measure(200);
    const double h = stopping_radius(flat, flat.points[100], params);
    CHECK(h == doctest::Approx(params.ladder_floor()).epsilon(1e-12));

    WeightedPointSet mixed = line_measure(200);
    // Tight triangle cluster well off the axis.
    const Point c(0.3, 0.25);
    for (const Point& d : {Point(0, 0), Point(0.004, 0.001), Point(0.001, 0.004)}) {
        mixed.points.push_back(c + d);
        mixed.weights.push_back(0.05);
    }
    const double hc = stopping_radius(mixed, mixed.points[200], params);
    CHECK(hc > 100.0 * params.ladder_floor());
    CHECK(hc >= 0.05);
    CHECK(hc <= 2.0 * params.root_radius);
    // Points on the axis still floor out.
    CHECK(stopping_radius(mixed, mixed.points[100], params) ==
          doctest::Approx(params.ladder_floor()).epsilon(1e-12));
}

TEST_CASE("stopping_functions: cones are exact, Lipschitz, zero set detected") {
    const ConstructionParams params = default_params();
    const WeightedPointSet flat = line_measure(150);
    std::vector<Point> grid;
    for (int i = 0; i <= 20; ++i) grid.emplace_back(-1.0 + 0.1 * i, 0.3);
    const StoppingData sd = stopping_functions(flat, params, grid, 4);

    for (char m : sd.z0_mask) CHECK(m == 1);
    CHECK(sd.d_vals.size() == grid.size());

    // One-term infimum.
    StoppingData single;
    single.centers = {Point(0.2, 0.1)};
    single.h = {0.3};
    CHECK(single.d(Point(1.0, 0.5)) ==
          doctest::Approx(dist(Point(1.0, 0.5), Point(0.2, 0.1)) + 0.3).epsilon(1e-15));
    CHECK(single.D(0.9) == doctest::Approx(0.7 + 0.3).epsilon(1e-15));

    // 1-Lipschitz on random pairs, exactly (min of cones).
    CounterRng rng(4);
    for (int k = 0; k < 200; ++k) {
        const Point a(rng.next_double(-2, 2), rng.next_double(-1, 1));
        const Point b(rng.next_double(-2, 2), rng.next_double(-1, 1));
        CHECK(std::fabs(sd.d(a) - sd.d(b)) <= dist(a, b) + 1e-12);
        CHECK(std::fabs(sd.D(a.x) - sd.D(b.x)) <= std::fabs(a.x - b.x) + 1e-12);
    }

    // d(x) <= h(x) at support points and h <= 2R.
    for (std::size_t i = 0; i < flat.points.size(); ++i) {
        CHECK(sd.d(flat.points[i]) <= sd.h[i] + 1e-15);
        CHECK(sd.h[i] <= 2.0 * params.root_radius + 1e-12);
    }

    // Exact interval minimum agrees with brute sampling.
    for (int k = 0; k < 50; ++k) {
        const double a = rng.next_double(-2, 1), b = a + rng.next_double(0.01, 1.0);
        double brute = 1e300;
        for (int m = 0; m <= 2000; ++m) brute = std::min(brute, sd.D(a + (b - a) * m / 2000.0));
        CHECK(sd.D_inf(a, b) <= brute + 1e-12);
        CHECK(sd.D_inf(a, b) >= brute - (b - a) / 2000.0);
    }
}

TEST_CASE("whitney_cover: constant D yields the 32 dyadic intervals") {
    const WhitneyCover cover = whitney_cover([](double, double) { return 1.0; }, 0.0, 1.0,
                                             1.0 / 1024.0, 100.0);
    CHECK(cover.intervals.size() == 32);
    for (const auto& iv : cover.intervals) CHECK(iv.len == doctest::Approx(1.0 / 32.0));
    CHECK(cover.clipped_length == 0.0);
}

TEST_CASE("whitney_cover: cone distance, empty cover, floor error") {
    const auto cone_inf = [](double a, double b) {
        if (a <= 0.0 && b >= 0.0) return 0.0;
        return std::min(std::fabs(a), std::fabs(b));
    };
    const double floor_len = std::pow(2.0, -16.0);
    const WhitneyCover cover = whitney_cover(cone_inf, -1.0, 2.0, floor_len, 100.0);
    CHECK(cover.intervals.size() > 10);
    double total = cover.clipped_length;
    for (const auto& iv : cover.intervals) {
        const double d0 = cone_inf(iv.a, iv.a + iv.len);
        CHECK(d0 > 0.0);  // the interval at 0 is never emitted
        CHECK(iv.len < d0 / 20.0);
        CHECK(iv.len >= d0 / 42.0 - 1e-15);
        total += iv.len;
    }
    CHECK(total == doctest::Approx(2.0).epsilon(1e-12));  // leaves tile the root

    const WhitneyCover empty =
        whitney_cover([](double, double) { return 0.0; }, 0.0, 1.0, 1.0 / 256.0, 100.0);
    CHECK(empty.intervals.empty());

    // D small but positive at the floor: clipped, not an error. For an exact
    // 1-Lipschitz infimum a floor leaf fails emission iff D_inf <= 20 len,
    // which is always within the clip tolerance; the error guards bad input.
    const WhitneyCover clipped =
        whitney_cover([](double, double) { return 0.1; }, 0.0, 1.0, 1.0 / 64.0, 100.0);
    CHECK(clipped.intervals.empty());
    CHECK(clipped.clipped_length == doctest::Approx(1.0));
}

TEST_CASE("whitney properties on a real construction") {
    const ConstructionParams params = default_params();
    const WeightedPointSet flat = line_measure(120);
    const StoppingData sd = stopping_functions(flat, params, {}, 4);
    const WhitneyCover cover = whitney_cover(sd, params);
    REQUIRE(!cover.intervals.empty());

    int checked = 0;
    for (std::size_t i = 0; i < cover.intervals.size(); ++i) {
        const auto& iv = cover.intervals[i];
        if (!iv.in_I0) continue;
        ++checked;
        // (a) 5 len <= D <= 50 len on the 15-fold dilation.
        for (int k = 0; k <= 60; ++k) {
            const double p = iv.center() + 15.0 * iv.len * (k / 60.0 - 0.5);
            const double Dp = sd.D(p);
            CHECK(Dp >= 5.0 * iv.len - 1e-12);
            CHECK(Dp <= 50.0 * iv.len + 1e-12);
        }
        // (b) meeting dilations have comparable lengths.
        for (int j : cover.neighbors[i]) {
            const double ratio = cover.intervals[static_cast<std::size_t>(j)].len / iv.len;
            CHECK(ratio <= 10.0 + 1e-9);
            CHECK(ratio >= 0.1 - 1e-9);
        }
    }
    CHECK(checked > 0);
    // (c) bounded overlap, frozen regression bound (observed 39).
    CHECK(cover.max_overlap <= 48);
    // Disjoint interiors and sortedness.
    for (std::size_t i = 0; i + 1 < cover.intervals.size(); ++i)
        CHECK(cover.intervals[i].a + cover.intervals[i].len <=
              cover.intervals[i + 1].a + 1e-15);
}

TEST_CASE("build_graph: flat measure gives the zero graph") {
    const ConstructionParams params = default_params();
    const WeightedPointSet flat = line_measure(120);
    const StoppingData sd = stopping_functions(flat, params, {}, 4);
    const WhitneyCover cover = whitney_cover(sd, params);
    const BuiltGraph graph = build_graph(flat, cover, sd, params);
    for (double v : graph.values) CHECK(std::fabs(v) <= 1e-9);
    CHECK(graph.measured_slope <= 1e-9);
}

TEST_CASE("build_graph: small tilt is reproduced on the core") {
    ConstructionParams params = default_params();
    const double s = params.alpha / 2.0;
    // Tilted support, but normalized coordinates keep L0 horizontal only when
    // the builder gets the normalized set; emulate a measured tilt instead by
    // tilting less than the budget and skipping normalization.
    WeightedPointSet tilted = line_measure(160);
    for (auto& p : tilted.points) p = Point(p.x, s * p.x);
    const StoppingData sd = stopping_functions(tilted, params, {}, 4);
    const WhitneyCover cover = whitney_cover(sd, params);
    const BuiltGraph graph = build_graph(tilted, cover, sd, params);
    // Central half of the root ball: output slope within [s/2, 2s].
    int hits = 0;
    for (int k = 0; k + 1 < static_cast<int>(graph.values.size()); ++k) {
        const double x = graph.grid_x0 + graph.grid_dx * k;
        if (x < -0.5 || x > 0.5 - graph.grid_dx) continue;
        const double slope = (graph.values[k + 1] - graph.values[k]) / graph.grid_dx;
        CHECK(slope >= s / 2.0 - 1e-9);
        CHECK(slope <= 2.0 * s + 1e-9);
        ++hits;
    }
    CHECK(hits > 50);
    // Support and Lipschitz assertions.
    const double R = params.root_radius;
    for (int k = 0; k < static_cast<int>(graph.values.size()); ++k) {
        const double x = graph.grid_x0 + graph.grid_dx * k;
        if (std::fabs(x) > 12.0 * R) CHECK(graph.values[k] == 0.0);
    }
    // The constant absorbs the taper to zero past the 10R core, where the
    // extrapolated pieces sit at height ~ alpha 10R over intervals ~ R/2.
    CHECK(graph.measured_slope <= 25.0 * params.alpha);
}

TEST_CASE("partition of unity sums to one over the covered core") {
    const ConstructionParams params = default_params();
    const WeightedPointSet flat = line_measure(120);
    const StoppingData sd = stopping_functions(flat, params, {}, 4);
    const WhitneyCover cover = whitney_cover(sd, params);
    // Raw bump sum >= 1 on every interval, so normalized weights sum to one
    // exactly; verify the normalization denominator never degenerates there.
    CounterRng rng(9);
    for (int k = 0; k < 500; ++k) {
        const std::size_t i = static_cast<std::size_t>(rng.next_double(0, 1) *
                                                       static_cast<double>(cover.intervals.size()));
        const auto& iv = cover.intervals[std::min(i, cover.intervals.size() - 1)];
        const double p = iv.a + rng.next_double(0.0, 1.0) * iv.len;
        double wsum = 0.0;
        for (const auto& jv : cover.intervals)
            wsum += BuiltGraph::bump(std::fabs(p - jv.center()) / jv.len);
        CHECK(wsum >= 1.0 - 1e-12);
        double norm = 0.0;
        for (const auto& jv : cover.intervals)
            norm += BuiltGraph::bump(std::fabs(p - jv.center()) / jv.len) / wsum;
        CHECK(std::fabs(norm - 1.0) <= 1e-9);
    }
}

TEST_CASE("partition_points: flat measure is pure Z, planted outlier is not Z") {
    const ConstructionParams params = default_params();
    WeightedPointSet mixed = line_measure(200);
    const double total_line = mixed.total_mass();
    // Vertically stacked pair: any small ball holding both fits a vertical
    // line, so the stopping time is far above the floor.
    mixed.points.emplace_back(0.1, 0.25);
    mixed.weights.push_back(0.05);
    mixed.points.emplace_back(0.1, 0.253);
    mixed.weights.push_back(0.05);
    const StoppingData sd = stopping_functions(mixed, params, {}, 4);
    const PointPartition part = partition_points(mixed, sd, params);
    CHECK(part.labels.back() != PointLabel::Z);
    CHECK(part.z_mass >= 0.99 * total_line);
    CHECK(part.z_mass + part.ld_mass + part.ba_mass ==
          doctest::Approx(mixed.total_mass()).epsilon(1e-12));
    // Dense flat sampling keeps at least half the mass in Z.
    CHECK(part.z_mass >= 0.5 * mixed.total_mass());
}

TEST_CASE("diagnostics: flat measure trivial, tilted line satisfies the pair bound") {
    const ConstructionParams params = default_params();
    const WeightedPointSet flat = line_measure(120);
    const StoppingData sd = stopping_functions(flat, params, {}, 4);
    const WhitneyCover cover = whitney_cover(sd, params);
    const BuiltGraph graph = build_graph(flat, cover, sd, params);
    const DiagnosticsReport rep = diagnostics(flat, graph, sd, params);
    CHECK(rep.piperp_pass);
    CHECK(rep.c_g_dist_l0 <= 1e-9);

    WeightedPointSet tilted = line_measure(160);
    for (auto& p : tilted.points) p = Point(p.x, (params.alpha / 2.0) * p.x);
    const StoppingData sd2 = stopping_functions(tilted, params, {}, 4);
    const BuiltGraph graph2 = build_graph(tilted, whitney_cover(sd2, params), sd2, params);
    const DiagnosticsReport rep2 = diagnostics(tilted, graph2, sd2, params);
    CHECK(rep2.piperp_pass);  // slope alpha/2 < 6 alpha strictly
}

TEST_CASE("normalization: rigid motion brings the root fit to the axis") {
    WeightedPointSet tilted = line_measure(150, 0.05);
    for (auto& p : tilted.points) p = p + Point(3.0, -2.0);
    const NormalizedMeasure nm = normalize_measure(tilted, Point(3.0, -2.0), 1.0);
    double ymax = 0.0, inside = 0;
    for (const Point& p : nm.set.points) {
        if (p.norm() <= 1.0) {
            ymax = std::max(ymax, std::fabs(p.y));
            inside += 1;
        }
    }
    CHECK(inside > 100);
    CHECK(ymax <= 1e-9);
}

TEST_CASE("determinism: identical inputs give bit-identical graphs") {
    const ConstructionParams params = default_params();
    WeightedPointSet mixed = line_measure(150);
    CounterRng rng(77);
    for (int k = 0; k < 10; ++k) {
        mixed.points.emplace_back(rng.next_double(-0.8, 0.8), rng.next_double(0.05, 0.2));
        mixed.weights.push_back(0.02);
    }
    const StoppingData sd1 = stopping_functions(mixed, params, {}, 4);
    const StoppingData sd2 = stopping_functions(mixed, params, {}, 1);
    REQUIRE(sd1.h == sd2.h);
    const BuiltGraph g1 = build_graph(mixed, whitney_cover(sd1, params), sd1, params);
    const BuiltGraph g2 = build_graph(mixed, whitney_cover(sd2, params), sd2, params);
    CHECK(g1.values == g2.values);
    CHECK(g1.z0_samples == g2.z0_samples);
}
