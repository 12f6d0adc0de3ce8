#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace carleson {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct DegenerateTangency : std::runtime_error {
    explicit DegenerateTangency(const std::string& what) : std::runtime_error(what) {}
};
struct EmptyIntersection : std::runtime_error {
    explicit EmptyIntersection(const std::string& what) : std::runtime_error(what) {}
};
struct SlopeTooLarge : std::runtime_error {
    explicit SlopeTooLarge(const std::string& what) : std::runtime_error(what) {}
};
struct NonEven : std::runtime_error {
    explicit NonEven(const std::string& what) : std::runtime_error(what) {}
};
struct EmptyBall : std::runtime_error {
    explicit EmptyBall(const std::string& what) : std::runtime_error(what) {}
};
struct NoVeryGoodBall : std::runtime_error {
    explicit NoVeryGoodBall(const std::string& what) : std::runtime_error(what) {}
};
struct NoCandidateBall : std::runtime_error {
    explicit NoCandidateBall(const std::string& what) : std::runtime_error(what) {}
};
struct ResolutionFloorHit : std::runtime_error {
    explicit ResolutionFloorHit(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Point / vector basics
// ---------------------------------------------------------------------------

struct Point {
    double x = 0.0;
    double y = 0.0;

    Point() = default;
    Point(double px, double py) : x(px), y(py) {
        if (!std::isfinite(px) || !std::isfinite(py))
            throw InvalidInput("Point: non-finite coordinate");
    }

    Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
    Point operator*(double s) const { return {x * s, y * s}; }

    double dot(const Point& o) const { return x * o.x + y * o.y; }
    double cross(const Point& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
};

inline double dist(const Point& a, const Point& b) { return (a - b).norm(); }

// Distance from p to the closed segment [a, b].
inline double dist_point_segment(const Point& p, const Point& a, const Point& b) {
    const Point d = b - a;
    const double l2 = d.norm2();
    if (l2 == 0.0) return dist(p, a);
    double t = (p - a).dot(d) / l2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, a + d * t);
}

// Normalizes an angle to [0, 2*pi).
inline double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

// Acute angle between two undirected line directions, in [0, pi/2].
inline double line_angle_between(double theta_a, double theta_b) {
    double d = std::fabs(std::fmod(theta_a - theta_b, kPi));
    if (d > kPi / 2.0) d = kPi - d;
    return d;
}

// ---------------------------------------------------------------------------
// Circle-segment intersection
// ---------------------------------------------------------------------------

// Parameters t in [0,1] along [a,b] where |a + t(b-a) - c| = r.
// Flags a tangential contact (discriminant within tolerance of zero while the
// segment grazes the circle) via *tangential.
inline int circle_segment_intersections(const Point& c, double r, const Point& a,
                                         const Point& b, double t_out[2],
                                         bool* tangential = nullptr) {
    const Point d = b - a;
    const Point f = a - c;
    const double qa = d.norm2();
    if (qa == 0.0) return 0;
    const double qb = 2.0 * f.dot(d);
    const double qc = f.norm2() - r * r;
    double disc = qb * qb - 4.0 * qa * qc;
    // Relative tangency tolerance at the scale of the quadratic coefficients.
    const double scale = qb * qb + 4.0 * std::fabs(qa * qc) + 1e-300;
    if (tangential) *tangential = false;
    if (disc <= 0.0) {
        if (disc > -1e-24 * scale && tangential) {
            const double t = std::clamp(-qb / (2.0 * qa), 0.0, 1.0);
            const double closest = (f + d * t).norm();
            if (std::fabs(closest - r) <= 1e-12 * r) *tangential = true;
        }
        return 0;
    }
    if (disc < 1e-24 * scale && tangential) *tangential = true;
    const double sq = std::sqrt(disc);
    int n = 0;
    // Numerically stable pair of roots.
    const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
    double roots[2] = {q / qa, (q != 0.0) ? qc / q : -qb / (2.0 * qa)};
    if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);
    for (double t : roots) {
        if (t >= 0.0 && t <= 1.0) t_out[n++] = t;
    }
    if (n == 2 && t_out[0] == t_out[1]) n = 1;
    return n;
}

// ---------------------------------------------------------------------------
// Deterministic reductions / parallel map
// ---------------------------------------------------------------------------

// Pairwise tree sum: fixed association order independent of chunking, so
// reported energies are reproducible.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v, 0, v.size()); }

// Parallel map over [0, n): results are written by index, so the outcome is
// identical for every thread count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const int t = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(t);
    std::exception_ptr err;
    std::mutex err_mtx;
    for (int k = 0; k < t; ++k) {
        pool.emplace_back([&, k]() {
            try {
                for (std::size_t i = k; i < n; i += t) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mtx);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace carleson
