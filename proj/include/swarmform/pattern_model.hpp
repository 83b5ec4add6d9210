#pragma once

// Formation model on the complex plane: agents sit on the vertices of a
// polygon inscribed in an ellipse with semi-axes (s_x, s_y) around a centroid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmform/error.hpp"

namespace swarmform {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Wraps an angle into [0, 2pi).
inline double normalize_angle(double angle) {
    double a = std::fmod(angle, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    // fmod of a tiny negative value can round up to exactly 2pi.
    if (a >= kTwoPi) a = 0.0;
    return a;
}

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
    friend constexpr Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
    friend constexpr Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }
    friend constexpr Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }
    constexpr Point2& operator+=(Point2 o) { x += o.x; y += o.y; return *this; }
    constexpr Point2& operator-=(Point2 o) { x -= o.x; y -= o.y; return *this; }
    friend constexpr bool operator==(Point2, Point2) = default;

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

inline Point2 rotate(Point2 p, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

inline Point2 mean(std::span<const Point2> pts) {
    Point2 acc;
    for (const auto& p : pts) acc += p;
    return pts.empty() ? acc : acc / static_cast<double>(pts.size());
}

/// Complex number in polar form; argument kept in [0, 2pi).
struct PolarComplex {
    double modulus = 0.0;
    double argument = 0.0;

    static PolarComplex make(double modulus, double argument) {
        if (!(modulus >= 0.0) || !std::isfinite(modulus))
            throw Error(ErrorKind::InvalidArgument, "modulus must be finite and >= 0");
        return {modulus, normalize_angle(argument)};
    }
};

/// Independent inputs of the formation model.
struct PrimaryPrimitives {
    int n = 3;
    double r = 1.0;      ///< formation (circumcircle) radius
    double e = 1.0;      ///< elongation ratio; 1 means regular polygon
    double phase = 0.0;  ///< global phase offset, radians
    Point2 centroid{};

    void validate() const {
        if (n < 3) throw Error(ErrorKind::InvalidArgument, "agent count n must be >= 3");
        if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "formation radius r must be > 0");
        if (!(e > 0.0)) throw Error(ErrorKind::InvalidArgument, "elongation e must be > 0");
        if (!std::isfinite(phase) || !centroid.finite())
            throw Error(ErrorKind::InvalidArgument, "phase and centroid must be finite");
    }
};

struct ShapingRadii {
    double s_x = 0.0;
    double s_y = 0.0;
    friend constexpr bool operator==(ShapingRadii, ShapingRadii) = default;
};

/// Parameters that regenerate a pattern from its phases.
struct EllipseModel {
    Point2 center{};
    ShapingRadii radii{};
};

struct Agent {
    int id = 0;
    Point2 position{};
};

/// Instantaneous swarm pattern. The centroid is always the arithmetic mean of
/// the agent positions; `model` is present while the pattern is still
/// described by the ellipse parametrisation.
struct PatternState {
    std::vector<Agent> agents;
    Point2 centroid{};
    std::vector<double> phases;
    std::optional<EllipseModel> model;

    std::size_t size() const { return agents.size(); }

    std::vector<Point2> positions() const {
        std::vector<Point2> out;
        out.reserve(agents.size());
        for (const auto& a : agents) out.push_back(a.position);
        return out;
    }

    /// Builds a state with ids 0..n-1. Missing phases are measured about the
    /// centroid.
    static PatternState from_positions(std::span<const Point2> positions,
                                       std::span<const double> phases = {}) {
        if (!phases.empty() && phases.size() != positions.size())
            throw Error(ErrorKind::InvalidArgument, "one phase per agent required");
        PatternState s;
        s.agents.reserve(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i) {
            if (!positions[i].finite())
                throw Error(ErrorKind::InvalidArgument, "agent position must be finite");
            s.agents.push_back({static_cast<int>(i), positions[i]});
        }
        s.centroid = mean(positions);
        s.phases.reserve(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i) {
            if (!phases.empty()) {
                s.phases.push_back(normalize_angle(phases[i]));
            } else {
                const Point2 d = positions[i] - s.centroid;
                s.phases.push_back(normalize_angle(std::atan2(d.y, d.x)));
            }
        }
        return s;
    }
};

/// De Moivre roots of z, in k-order.
inline std::vector<Point2> nth_roots(PolarComplex z, int n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "root count n must be >= 1");
    if (!(z.modulus > 0.0))
        throw Error(ErrorKind::DegenerateInput, "all roots of zero coincide at the origin");
    const double radius = std::pow(z.modulus, 1.0 / n);
    std::vector<Point2> roots;
    roots.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double arg = (z.argument + kTwoPi * k) / n;
        roots.push_back({radius * std::cos(arg), radius * std::sin(arg)});
    }
    return roots;
}

inline ShapingRadii shaping_radii(double r, double e) {
    if (!(r > 0.0) || !(e > 0.0))
        throw Error(ErrorKind::InvalidArgument, "shaping radii need r > 0 and e > 0");
    return {r * e, r / e};
}

/// Positions on the ellipse (center, radii) at the given phases.
inline PatternState ellipse_pattern(const EllipseModel& model, std::span<const double> phases) {
    std::vector<Point2> pts;
    pts.reserve(phases.size());
    for (double th : phases) {
        pts.push_back({model.center.x + model.radii.s_x * std::cos(th),
                       model.center.y + model.radii.s_y * std::sin(th)});
    }
    PatternState s = PatternState::from_positions(pts, phases);
    s.model = model;
    return s;
}

inline PatternState formation_positions(const PrimaryPrimitives& prims, ShapingRadii radii) {
    prims.validate();
    std::vector<double> phases;
    phases.reserve(static_cast<std::size_t>(prims.n));
    for (int i = 0; i < prims.n; ++i)
        phases.push_back(normalize_angle(prims.phase + kTwoPi * i / prims.n));
    return ellipse_pattern({prims.centroid, radii}, phases);
}

inline PatternState formation_positions(const PrimaryPrimitives& prims) {
    return formation_positions(prims, shaping_radii(prims.r, prims.e));
}

inline double linear_distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

/// Agent indices sorted by phase (ties broken by id).
inline std::vector<std::size_t> phase_order(const PatternState& p) {
    std::vector<std::size_t> idx(p.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::ranges::stable_sort(idx, [&](std::size_t a, std::size_t b) { return p.phases[a] < p.phases[b]; });
    return idx;
}

inline bool is_regular(const PatternState& p, double tol) {
    if (p.size() < 3) throw Error(ErrorKind::InvalidArgument, "regularity needs >= 3 agents");
    auto within = [tol](std::span<const double> values) {
        const auto [lo, hi] = std::ranges::minmax(values);
        return hi - lo <= tol * hi;
    };
    const auto order = phase_order(p);
    std::vector<double> sides;
    std::vector<double> radii;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& a = p.agents[order[k]].position;
        const auto& b = p.agents[order[(k + 1) % order.size()]].position;
        sides.push_back(linear_distance(a, b));
        radii.push_back(linear_distance(a, p.centroid));
    }
    return within(sides) && within(radii);
}

} // namespace swarmform
