#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "carleson/corpus.hpp"
#include "carleson/domain.hpp"
#include "carleson/geometry.hpp"
#include "json.hpp"

namespace carleson {

struct MalformedInput : std::runtime_error {
    explicit MalformedInput(const std::string& what) : std::runtime_error(what) {}
};

namespace io {

using ordered_json = nlohmann::ordered_json;

// Locale-independent shortest round-trip formatting. All text output goes
// through here so goldens are byte-stable across platforms.
inline std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline constexpr const char* kArtifactVersion = "1";

// Echoed verbatim into every output file header.
struct RunConfig {
    std::string command;
    std::vector<std::string> inputs;
    double r_min = 1e-3;
    double r_max = 1.0;
    int per_octave = 8;
    double theta = 0.05;
    double alpha = 0.08;
    double flat_param = 0.01;
    double c0 = 0.5;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_dir = ".";
    bool render = false;

    ordered_json to_json() const {
        ordered_json j;
        j["artifact_version"] = kArtifactVersion;
        j["command"] = command;
        j["inputs"] = inputs;
        j["r_min"] = r_min;
        j["r_max"] = r_max;
        j["per_octave"] = per_octave;
        j["theta"] = theta;
        j["alpha"] = alpha;
        j["flat_param"] = flat_param;
        j["c0"] = c0;
        j["seed"] = seed;
        j["threads"] = threads;
        j["render"] = render;
        return j;
    }

    // '#'-prefixed block for CSV/SVG outputs, one key per line.
    std::string comment_header() const {
        std::ostringstream os;
        os << "# artifact_version=" << kArtifactVersion << "\n";
        os << "# command=" << command << "\n";
        for (const auto& in : inputs) os << "# input=" << in << "\n";
        os << "# r_min=" << fmt(r_min) << " r_max=" << fmt(r_max)
           << " per_octave=" << per_octave << "\n";
        os << "# theta=" << fmt(theta) << " alpha=" << fmt(alpha)
           << " flat_param=" << fmt(flat_param) << " c0=" << fmt(c0) << "\n";
        os << "# seed=" << seed << " threads=" << threads << "\n";
        return os.str();
    }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MalformedInput("cannot open for writing: " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedInput("cannot open: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// ---------------------------------------------------------------------------
// Curve JSON: {"kind":"jordan","vertices":[[x,y],...]} or
//             {"kind":"graph","x0":...,"dx":...,"f":[...]}
// ---------------------------------------------------------------------------

inline PlanarDomain load_curve(const std::string& path) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw MalformedInput(path + ": " + e.what());
    }
    if (!j.contains("kind") || !j["kind"].is_string())
        throw MalformedInput(path + ": missing string field 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "jordan") {
            if (!j.contains("vertices") || !j["vertices"].is_array())
                throw MalformedInput(path + ": 'jordan' needs array field 'vertices'");
            std::vector<Point> verts;
            std::size_t row = 0;
            for (const auto& v : j["vertices"]) {
                if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                    throw MalformedInput(path + ": vertices[" + std::to_string(row) +
                                         "] is not a numeric pair");
                verts.emplace_back(v[0].get<double>(), v[1].get<double>());
                ++row;
            }
            return PlanarDomain::jordan(std::move(verts));
        }
        if (kind == "graph") {
            for (const char* field : {"x0", "dx", "f"})
                if (!j.contains(field))
                    throw MalformedInput(path + ": 'graph' needs field '" + std::string(field) +
                                         "'");
            if (!j["f"].is_array()) throw MalformedInput(path + ": field 'f' must be an array");
            std::vector<double> f;
            for (const auto& v : j["f"]) {
                if (!v.is_number()) throw MalformedInput(path + ": non-numeric entry in 'f'");
                f.push_back(v.get<double>());
            }
            return PlanarDomain::graph(j["x0"].get<double>(), j["dx"].get<double>(),
                                       std::move(f));
        }
    } catch (const InvalidInput& e) {
        throw MalformedInput(path + ": " + e.what());
    }
    throw MalformedInput(path + ": unknown kind '" + kind + "'");
}

inline std::string curve_to_json(const PlanarDomain& domain, const RunConfig& config) {
    ordered_json j;
    j["config"] = config.to_json();
    if (domain.kind() == PlanarDomain::Kind::JordanPolyline) {
        j["kind"] = "jordan";
        auto& arr = j["vertices"] = ordered_json::array();
        for (const Point& p : domain.vertices()) arr.push_back({p.x, p.y});
    } else {
        j["kind"] = "graph";
        j["x0"] = domain.graph_x0();
        j["dx"] = domain.graph_dx();
        j["f"] = domain.graph_f();
    }
    return j.dump(1) + "\n";
}

// ---------------------------------------------------------------------------
// Measure CSV: '#' header block, then "x,y,w" rows.
// ---------------------------------------------------------------------------

inline std::string measure_to_csv(const WeightedPointSet& set, const RunConfig& config) {
    std::ostringstream os;
    os << config.comment_header() << "x,y,w\n";
    for (std::size_t i = 0; i < set.points.size(); ++i)
        os << fmt(set.points[i].x) << ',' << fmt(set.points[i].y) << ',' << fmt(set.weights[i])
           << '\n';
    return os.str();
}

inline WeightedPointSet load_measure_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    WeightedPointSet set;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "x,y,w")
                throw MalformedInput(path + ":" + std::to_string(line_no) +
                                     ": expected header 'x,y,w'");
            header_seen = true;
            continue;
        }
        double vals[3];
        const char* p = line.c_str();
        const char* end = p + line.size();
        for (int k = 0; k < 3; ++k) {
            const auto res = std::from_chars(p, end, vals[k]);
            if (res.ec != std::errc())
                throw MalformedInput(path + ":" + std::to_string(line_no) + ": bad field " +
                                     std::to_string(k + 1));
            p = res.ptr;
            if (k < 2) {
                if (p == end || *p != ',')
                    throw MalformedInput(path + ":" + std::to_string(line_no) +
                                         ": expected ',' after field " + std::to_string(k + 1));
                ++p;
            }
        }
        if (p != end)
            throw MalformedInput(path + ":" + std::to_string(line_no) + ": trailing characters");
        set.points.emplace_back(vals[0], vals[1]);
        set.weights.push_back(vals[2]);
    }
    if (!header_seen) throw MalformedInput(path + ": no 'x,y,w' header found");
    return set;
}

// ---------------------------------------------------------------------------
// Analysis report CSV: one row per sampled point.
// ---------------------------------------------------------------------------

struct ReportRow {
    Point point;
    double eps_energy = 0.0;
    double alpha_energy = 0.0;
    double apsi_energy = 0.0;
    std::vector<double> beta_at_scales;
};

inline std::string report_to_csv(const std::vector<ReportRow>& rows,
                                 const std::vector<double>& beta_scales,
                                 const RunConfig& config) {
    std::ostringstream os;
    os << config.comment_header();
    os << "x,y,eps_energy,alpha_energy,apsi_energy";
    for (double s : beta_scales) os << ",beta_r_" << fmt(s);
    os << '\n';
    for (const auto& row : rows) {
        os << fmt(row.point.x) << ',' << fmt(row.point.y) << ',' << fmt(row.eps_energy) << ','
           << fmt(row.alpha_energy) << ',' << fmt(row.apsi_energy);
        for (double b : row.beta_at_scales) os << ',' << fmt(b);
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Verification JSON report.
// ---------------------------------------------------------------------------

struct VerifyRecord {
    std::string check;
    std::string item;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::string suite;
    std::vector<VerifyRecord> records;
    // Measured corpus-wide constants worth reporting (name -> value).
    std::vector<std::pair<std::string, double>> constants;

    bool pass() const {
        for (const auto& r : records)
            if (!r.pass) return false;
        return !records.empty();
    }
};

inline std::string verify_to_json(const VerifyReport& report, const RunConfig& config) {
    ordered_json j;
    j["config"] = config.to_json();
    j["suite"] = report.suite;
    j["pass"] = report.pass();
    auto& consts = j["constants"] = ordered_json::object();
    for (const auto& [k, v] : report.constants) consts[k] = v;
    auto& recs = j["records"] = ordered_json::array();
    for (const auto& r : report.records) {
        ordered_json rec;
        rec["check"] = r.check;
        rec["item"] = r.item;
        rec["lhs"] = r.lhs;
        rec["rhs"] = r.rhs;
        rec["ratio"] = r.ratio;
        rec["tolerance"] = r.tolerance;
        rec["pass"] = r.pass;
        recs.push_back(std::move(rec));
    }
    return j.dump(1) + "\n";
}

// ---------------------------------------------------------------------------
// Built-graph JSON.
// ---------------------------------------------------------------------------

struct GraphArtifact {
    double grid_x0 = 0.0;
    double grid_dx = 0.0;
    std::vector<double> values;
    std::vector<std::array<double, 3>> pieces;  // interval index, slope, intercept
    double z_mass_fraction = 0.0;
    double ld_mass_fraction = 0.0;
    double ba_mass_fraction = 0.0;
};

inline std::string graph_to_json(const GraphArtifact& g, const RunConfig& config) {
    ordered_json j;
    j["config"] = config.to_json();
    j["grid"] = {{"x0", g.grid_x0}, {"dx", g.grid_dx}, {"n", g.values.size()}};
    j["values"] = g.values;
    auto& pieces = j["pieces"] = ordered_json::array();
    for (const auto& p : g.pieces)
        pieces.push_back({{"interval", static_cast<int>(p[0])}, {"slope", p[1]},
                          {"intercept", p[2]}});
    j["z_mass_fraction"] = g.z_mass_fraction;
    j["ld_mass_fraction"] = g.ld_mass_fraction;
    j["ba_mass_fraction"] = g.ba_mass_fraction;
    return j.dump(1) + "\n";
}

// ---------------------------------------------------------------------------
// SVG rendering: fixed viewBox from the data bounding box padded 5%.
// ---------------------------------------------------------------------------

struct SvgScene {
    // (x, y, heat in [0,1] or -1 for plain) point markers.
    std::vector<std::array<double, 3>> points;
    // Polylines as vertex lists.
    std::vector<std::vector<Point>> polylines;
};

inline std::string scene_to_svg(const SvgScene& scene, const RunConfig& config) {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool first = true;
    const auto grow = [&](double x, double y) {
        if (first) {
            xmin = xmax = x;
            ymin = ymax = y;
            first = false;
            return;
        }
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (const auto& p : scene.points) grow(p[0], p[1]);
    for (const auto& pl : scene.polylines)
        for (const auto& p : pl) grow(p.x, p.y);
    const double pad_x = 0.05 * std::max(xmax - xmin, 1e-9);
    const double pad_y = 0.05 * std::max(ymax - ymin, 1e-9);
    xmin -= pad_x;
    xmax += pad_x;
    ymin -= pad_y;
    ymax += pad_y;
    const double w = xmax - xmin, h = ymax - ymin;
    const double marker = 0.004 * std::max(w, h);

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<!--\n" << config.comment_header() << "-->\n";
    // y axis flipped so the math orientation reads naturally.
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(xmin) << ' '
       << fmt(-ymax) << ' ' << fmt(w) << ' ' << fmt(h) << "\">\n";
    for (const auto& pl : scene.polylines) {
        if (pl.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"" << fmt(marker * 0.5)
           << "\" points=\"";
        for (const auto& p : pl) os << fmt(p.x) << ',' << fmt(-p.y) << ' ';
        os << "\"/>\n";
    }
    for (const auto& p : scene.points) {
        std::string fill = "#333333";
        if (p[2] >= 0.0) {
            // Cold-to-hot ramp on the heat value.
            const int red = static_cast<int>(255.0 * std::min(1.0, p[2]));
            const int blue = 255 - red;
            char buf[8];
            std::snprintf(buf, sizeof(buf), "#%02x00%02x", red, blue);
            fill = buf;
        }
        os << "<circle cx=\"" << fmt(p[0]) << "\" cy=\"" << fmt(-p[1]) << "\" r=\""
           << fmt(marker) << "\" fill=\"" << fill << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace io
}  // namespace carleson
