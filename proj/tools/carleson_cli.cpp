// Command-line surface: analyze | verify | build-graph | tangent | gen | render.
// Exit codes: 0 ok, 1 failed assertion or aborted construction, 2 malformed
// input or unknown suite, 3 oracle self-validation failure.

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "carleson/corpus.hpp"
#include "carleson/graph_builder.hpp"
#include "carleson/io.hpp"
#include "carleson/multiscale.hpp"
#include "carleson/verify.hpp"

namespace fs = std::filesystem;
using namespace carleson;

namespace {

std::string out_path(const io::RunConfig& config, const std::string& name) {
    fs::create_directories(config.out_dir);
    return (fs::path(config.out_dir) / name).string();
}

std::vector<Point> boundary_samples(const PlanarDomain& domain, int n) {
    const WeightedPointSet set = sample_measure(domain, std::max(n, 100));
    std::vector<Point> pts(set.points.begin(), set.points.begin() + n);
    return pts;
}

std::vector<Point> domain_polyline(const PlanarDomain& domain) {
    if (domain.kind() == PlanarDomain::Kind::JordanPolyline) {
        std::vector<Point> pl = domain.vertices();
        pl.push_back(pl.front());
        return pl;
    }
    std::vector<Point> pl;
    const auto& f = domain.graph_f();
    for (std::size_t i = 0; i < f.size(); ++i)
        pl.emplace_back(domain.graph_x0() + domain.graph_dx() * static_cast<double>(i), f[i]);
    return pl;
}

int cmd_analyze(const io::RunConfig& config, const std::string& curve_path, int samples) {
    const PlanarDomain domain = io::load_curve(curve_path);
    const RadialGrid grid = RadialGrid::make(config.r_min, config.r_max, config.per_octave);
    const std::vector<Point> pts = boundary_samples(domain, samples);
    // Beta is reported at one radius per octave.
    std::vector<double> beta_scales;
    for (double r = config.r_max; r >= config.r_min * (1.0 - 1e-12); r *= 0.5)
        beta_scales.push_back(r);

    std::vector<io::ReportRow> rows(pts.size());
    const Kernel kernel;
    parallel_for(pts.size(), config.threads, [&](std::size_t i) {
        io::ReportRow row;
        row.point = pts[i];
        row.eps_energy = carleson_energy(domain, pts[i], grid);
        row.alpha_energy = alpha_energy(domain, pts[i], grid);
        row.apsi_energy = a_psi_energy(domain, pts[i], grid, kernel);
        for (double r : beta_scales) {
            double b = 0.0;
            try {
                b = beta_inf(domain, pts[i], r).beta;
            } catch (const EmptyIntersection&) {
                b = 0.0;
            }
            row.beta_at_scales.push_back(b);
        }
        rows[i] = std::move(row);
    });
    io::write_file(out_path(config, "report.csv"), io::report_to_csv(rows, beta_scales, config));

    if (config.render) {
        io::SvgScene scene;
        double emax = 0.0;
        for (const auto& row : rows) emax = std::max(emax, row.eps_energy);
        for (const auto& row : rows)
            scene.points.push_back(
                {row.point.x, row.point.y, emax > 0.0 ? row.eps_energy / emax : 0.0});
        scene.polylines.push_back(domain_polyline(domain));
        io::write_file(out_path(config, "report.svg"), io::scene_to_svg(scene, config));
    }
    return 0;
}

int cmd_verify(const io::RunConfig& config, const std::string& suite) {
    const double oracle_worst =
        verify::validate_oracles(1000000, static_cast<unsigned>(config.threads));
    io::VerifyReport report = verify::run_suite(suite, config.seed, config.threads);
    report.constants.emplace_back("oracle_scan_worst_abs", oracle_worst);
    io::write_file(out_path(config, "verify_" + suite + ".json"),
                   io::verify_to_json(report, config));
    for (const auto& rec : report.records)
        if (!rec.pass)
            std::cerr << "FAIL " << suite << "/" << rec.check << " [" << rec.item
                      << "] lhs=" << io::fmt(rec.lhs) << " rhs=" << io::fmt(rec.rhs) << "\n";
    std::cout << "suite " << suite << (report.pass() ? " pass" : " FAIL") << " ("
              << report.records.size() << " checks)\n";
    return report.pass() ? 0 : 1;
}

int cmd_build_graph(const io::RunConfig& config, const std::string& measure_path) {
    WeightedPointSet set = io::load_measure_csv(measure_path);
    ConstructionParams params;
    params.theta = config.theta;
    params.alpha = config.alpha;
    params.flat_param = config.flat_param;
    params.c0 = config.c0;
    params.radii_per_octave = std::max(2, config.per_octave / 2);

    const double b0_density =
        set.mass_in_ball(params.root_center, params.root_radius) / params.root_radius;
    if (b0_density < params.c0)
        std::cerr << "warning: root ball density " << io::fmt(b0_density) << " below c0="
                  << io::fmt(params.c0) << ", proceeding\n";

    const StoppingData stopping = stopping_functions(set, params, {}, config.threads);
    const WhitneyCover cover = whitney_cover(stopping, params);
    const BuiltGraph graph = build_graph(set, cover, stopping, params);
    const PointPartition part = partition_points(set, stopping, params);

    const double total = set.total_mass();
    io::GraphArtifact artifact;
    artifact.grid_x0 = graph.grid_x0;
    artifact.grid_dx = graph.grid_dx;
    artifact.values = graph.values;
    for (const auto& piece : graph.pieces)
        artifact.pieces.push_back(
            {static_cast<double>(piece.interval), piece.slope, piece.intercept});
    artifact.z_mass_fraction = part.z_mass / total;
    artifact.ld_mass_fraction = part.ld_mass / total;
    artifact.ba_mass_fraction = part.ba_mass / total;
    io::write_file(out_path(config, "graph.json"), io::graph_to_json(artifact, config));

    io::SvgScene scene;
    for (std::size_t i = 0; i < set.points.size(); ++i)
        scene.points.push_back({set.points[i].x, set.points[i].y, -1.0});
    std::vector<Point> gpl;
    for (std::size_t k = 0; k < graph.values.size(); ++k)
        gpl.emplace_back(graph.grid_x0 + graph.grid_dx * static_cast<double>(k),
                         graph.values[k]);
    scene.polylines.push_back(std::move(gpl));
    io::write_file(out_path(config, "graph.svg"), io::scene_to_svg(scene, config));

    std::cout << "z=" << io::fmt(artifact.z_mass_fraction)
              << " ld=" << io::fmt(artifact.ld_mass_fraction)
              << " ba=" << io::fmt(artifact.ba_mass_fraction)
              << " slope=" << io::fmt(graph.measured_slope) << "\n";
    if (config.alpha <= 0.08 && graph.measured_slope > 0.1) {
        std::cerr << "slope bound 1/10 violated at default flatness budget\n";
        return 1;
    }
    return 0;
}

int cmd_tangent(const io::RunConfig& config, const std::string& curve_path, int samples) {
    const PlanarDomain domain = io::load_curve(curve_path);
    const RadialGrid grid = RadialGrid::make(config.r_min, config.r_max, config.per_octave);
    const std::vector<double> apertures = {0.2, 0.5, std::cos(kPi / 4.0 - 0.1)};
    const std::vector<Point> pts = boundary_samples(domain, samples);

    std::vector<TangentReport> reports(pts.size());
    parallel_for(pts.size(), config.threads,
                 [&](std::size_t i) { reports[i] = tangent_detect(domain, pts[i], grid, apertures); });

    std::ostringstream os;
    os << config.comment_header() << "x,y,verdict,finest_passing_scale\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const char* verdict = reports[i].verdict == TangentVerdict::Tangent
                                  ? "tangent"
                                  : (reports[i].verdict == TangentVerdict::NotTangent
                                         ? "not_tangent"
                                         : "inconclusive");
        os << io::fmt(pts[i].x) << ',' << io::fmt(pts[i].y) << ',' << verdict << ','
           << io::fmt(reports[i].finest_passing_scale) << '\n';
    }
    io::write_file(out_path(config, "tangent.csv"), os.str());
    return 0;
}

int cmd_gen(const io::RunConfig& config, const std::string& what, int n, double omega, int depth,
            double slope_cap, const std::string& measure_mode, int measure_n,
            double noise_fraction) {
    PlanarDomain domain = gen_circle(4096);
    if (what == "circle") {
        domain = gen_circle(n);
    } else if (what == "wedge") {
        domain = gen_wedge(omega);
    } else if (what == "koch") {
        domain = gen_koch(depth);
    } else if (what == "lipschitz") {
        domain = gen_lipschitz_graph(config.seed, 5, slope_cap).domain();
    } else {
        std::cerr << "unknown generator: " << what << "\n";
        return 2;
    }
    io::write_file(out_path(config, "curve.json"), io::curve_to_json(domain, config));
    if (!measure_mode.empty()) {
        WeightedPointSet set;
        if (measure_mode == "arclength") {
            set = sample_measure(domain, measure_n);
        } else if (measure_mode == "noise") {
            set = sample_measure(domain, measure_n, MeasureMode::GraphWithNoise, noise_fraction,
                                 config.seed);
        } else {
            std::cerr << "unknown measure mode: " << measure_mode << "\n";
            return 2;
        }
        io::write_file(out_path(config, "measure.csv"), io::measure_to_csv(set, config));
    }
    return 0;
}

int cmd_render(const io::RunConfig& config, const std::string& curve_path,
               const std::string& measure_path) {
    io::SvgScene scene;
    if (!curve_path.empty())
        scene.polylines.push_back(domain_polyline(io::load_curve(curve_path)));
    if (!measure_path.empty()) {
        const WeightedPointSet set = io::load_measure_csv(measure_path);
        for (std::size_t i = 0; i < set.points.size(); ++i)
            scene.points.push_back({set.points[i].x, set.points[i].y, -1.0});
    }
    if (scene.points.empty() && scene.polylines.empty()) {
        std::cerr << "render: need --curve and/or --measure\n";
        return 2;
    }
    io::write_file(out_path(config, "render.svg"), io::scene_to_svg(scene, config));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiscale curve flatness analysis"};
    app.require_subcommand(1);

    io::RunConfig config;
    app.add_option("--rmin", config.r_min, "smallest radius");
    app.add_option("--rmax", config.r_max, "largest radius");
    app.add_option("--per-octave", config.per_octave, "radial nodes per octave");
    app.add_option("--theta", config.theta, "density threshold");
    app.add_option("--alpha", config.alpha, "angle threshold");
    app.add_option("--flat-param", config.flat_param, "flatness parameter");
    app.add_option("--c0", config.c0, "root density floor");
    app.add_option("--seed", config.seed, "rng seed");
    app.add_option("--threads", config.threads, "worker threads (1 = reproducibility reference)");
    app.add_option("--out", config.out_dir, "output directory");

    std::string curve_path, measure_path, suite, what = "circle", measure_mode;
    int samples = 50, gen_n = 4096, depth = 3, measure_n = 1000;
    double omega = kPi / 2.0, slope_cap = 0.05, noise_fraction = 0.1;

    CLI::App* analyze = app.add_subcommand("analyze", "per-point energy report");
    analyze->add_option("--curve", curve_path, "curve JSON")->required();
    analyze->add_option("--samples", samples, "boundary sample count");
    analyze->add_flag("--render", config.render, "also write an SVG heat map");

    CLI::App* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    verify_cmd->add_option("suite", suite, "suite id")->required();

    CLI::App* build = app.add_subcommand("build-graph", "approximating Lipschitz graph");
    build->add_option("--measure", measure_path, "measure CSV")->required();

    CLI::App* tangent = app.add_subcommand("tangent", "per-point tangent verdicts");
    tangent->add_option("--curve", curve_path, "curve JSON")->required();
    tangent->add_option("--samples", samples, "boundary sample count");

    CLI::App* gen = app.add_subcommand("gen", "write corpus curves and measures");
    gen->add_option("what", what, "circle|wedge|koch|lipschitz");
    gen->add_option("--n", gen_n, "polygon vertex count");
    gen->add_option("--omega", omega, "wedge interior angle");
    gen->add_option("--depth", depth, "fractal depth");
    gen->add_option("--slope-cap", slope_cap, "graph slope cap");
    gen->add_option("--measure-mode", measure_mode, "arclength|noise (also write measure.csv)");
    gen->add_option("--measure-n", measure_n, "measure point count");
    gen->add_option("--noise-fraction", noise_fraction, "off-curve mass fraction");

    CLI::App* render = app.add_subcommand("render", "SVG of curves and measures");
    render->add_option("--curve", curve_path, "curve JSON");
    render->add_option("--measure", measure_path, "measure CSV");

    // Global flags are accepted after the subcommand too.
    for (CLI::App* sub : {analyze, verify_cmd, build, tangent, gen, render}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        config.command = app.get_subcommands().front()->get_name();
        if (analyze->parsed()) {
            config.inputs = {curve_path};
            return cmd_analyze(config, curve_path, samples);
        }
        if (verify_cmd->parsed()) {
            config.inputs = {suite};
            return cmd_verify(config, suite);
        }
        if (build->parsed()) {
            config.inputs = {measure_path};
            return cmd_build_graph(config, measure_path);
        }
        if (tangent->parsed()) {
            config.inputs = {curve_path};
            return cmd_tangent(config, curve_path, samples);
        }
        if (gen->parsed()) {
            config.inputs = {what};
            return cmd_gen(config, what, gen_n, omega, depth, slope_cap, measure_mode, measure_n,
                           noise_fraction);
        }
        if (render->parsed()) {
            config.inputs = {};
            if (!curve_path.empty()) config.inputs.push_back(curve_path);
            if (!measure_path.empty()) config.inputs.push_back(measure_path);
            return cmd_render(config, curve_path, measure_path);
        }
    } catch (const UnknownSuite& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const MalformedInput& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const OracleValidationFailure& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 2;
}
