#pragma once

// Mathematical transformation: move the pattern into a unit-circle local
// frame, push every agent through a linear fractional map, scale the images
// back up and walk each agent to its image along a discretised straight line.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swarmform/error.hpp"
#include "swarmform/pattern_model.hpp"

namespace swarmform {

using Complex = std::complex<double>;

inline Complex to_complex(Point2 p) { return {p.x, p.y}; }
inline Point2 to_point(Complex z) { return {z.real(), z.imag()}; }

/// w = (a z + b) / (c z + d) with ad - bc != 0.
class MoebiusMap {
public:
    static MoebiusMap make(Complex a, Complex b, Complex c, Complex d) {
        if (std::abs(a * d - b * c) <= 1e-12)
            throw Error(ErrorKind::InvalidArgument, "Moebius map needs ad - bc != 0");
        return MoebiusMap(a, b, c, d);
    }

    static MoebiusMap identity() { return MoebiusMap(1.0, 0.0, 0.0, 1.0); }
    /// i(1 - z)/(1 + z): unit circle onto the real axis, -1 to infinity.
    static MoebiusMap cayley() { return MoebiusMap({0.0, -1.0}, {0.0, 1.0}, 1.0, 1.0); }
    static MoebiusMap reciprocal() { return MoebiusMap(0.0, 1.0, 1.0, 0.0); }

    Complex a() const { return a_; }
    Complex b() const { return b_; }
    Complex c() const { return c_; }
    Complex d() const { return d_; }
    Complex determinant() const { return a_ * d_ - b_ * c_; }

    Complex operator()(Complex z) const {
        const Complex den = c_ * z + d_;
        if (std::abs(den) <= 1e-12) throw PoleError("Moebius map evaluated at its pole");
        return (a_ * z + b_) / den;
    }

    /// Composition: (*this)(rhs(z)).
    MoebiusMap operator*(const MoebiusMap& rhs) const {
        return MoebiusMap(a_ * rhs.a_ + b_ * rhs.c_, a_ * rhs.b_ + b_ * rhs.d_,
                          c_ * rhs.a_ + d_ * rhs.c_, c_ * rhs.b_ + d_ * rhs.d_);
    }

private:
    MoebiusMap(Complex a, Complex b, Complex c, Complex d) : a_(a), b_(b), c_(c), d_(d) {}
    Complex a_, b_, c_, d_;
};

inline Point2 apply_moebius(const MoebiusMap& m, Point2 p) { return to_point(m(to_complex(p))); }

struct FrameRecord {
    Point2 origin{};
    double magnification = 1.0;
};

enum class CircleToLineVariant { Exact, PaperLiteral };
enum class MoebiusDirection { CircleToLine, LineToCircle };

/// Translate by -centroid and scale by the circumradius estimate.
inline std::pair<std::vector<Point2>, FrameRecord> to_local(const PatternState& p) {
    double r = 0.0;
    for (const auto& a : p.agents) r = std::max(r, linear_distance(a.position, p.centroid));
    if (!(r > 0.0)) throw Error(ErrorKind::DegenerateInput, "pattern has zero extent");
    std::vector<Point2> local;
    local.reserve(p.size());
    for (const auto& a : p.agents) local.push_back((a.position - p.centroid) / r);
    return {std::move(local), FrameRecord{p.centroid, r}};
}

inline std::vector<Point2> to_global(std::span<const Point2> points, const FrameRecord& frame) {
    if (!(frame.magnification > 0.0)) throw Error(ErrorKind::InvalidArgument, "magnification must be > 0");
    std::vector<Point2> out;
    out.reserve(points.size());
    for (const auto& q : points) out.push_back(frame.origin + q * frame.magnification);
    return out;
}

/// Circle-to-line map. Exact evaluates i(1 - z)/(1 + z); PaperLiteral uses
/// the Euclidean form with 1 + x^2 + y^2 in the denominator.
inline Point2 circle_to_line(Point2 p, CircleToLineVariant variant = CircleToLineVariant::Exact) {
    const double r2 = p.x * p.x + p.y * p.y;
    if (variant == CircleToLineVariant::PaperLiteral) {
        const double den = 1.0 + r2;
        return {2.0 * p.y / den, (1.0 - r2) / den};
    }
    const double den = (1.0 + p.x) * (1.0 + p.x) + p.y * p.y;
    if (std::sqrt(den) <= 1e-9) throw PoleError("circle_to_line evaluated at z = -1");
    return {2.0 * p.y / den, (1.0 - r2) / den};
}

/// Inversion in the unit circle, p / |p|^2.
inline Point2 line_to_circle(Point2 p) {
    const double r2 = p.x * p.x + p.y * p.y;
    if (std::sqrt(r2) <= 1e-12) throw PoleError("line_to_circle evaluated at the origin");
    return {p.x / r2, p.y / r2};
}

inline double max_pairwise_distance(std::span<const Point2> pts) {
    double m = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) m = std::max(m, linear_distance(pts[i], pts[j]));
    return m;
}

inline double auto_magnification(std::span<const Point2> local_images, double target_span) {
    if (!(target_span > 0.0)) throw Error(ErrorKind::InvalidArgument, "target_span must be > 0");
    const double span = max_pairwise_distance(local_images);
    if (!(span > 0.0)) throw Error(ErrorKind::DegenerateInput, "images coincide");
    return target_span / span;
}

/// ceil(|dest - start| / step_length) + 1 evenly spaced points, endpoints included.
inline std::vector<Point2> discretize_path(Point2 start, Point2 dest, double step_length) {
    if (!(step_length > 0.0)) throw Error(ErrorKind::InvalidArgument, "step_length must be > 0");
    const double length = linear_distance(start, dest);
    if (length == 0.0) return {start};
    const auto slices = static_cast<std::size_t>(std::ceil(length / step_length));
    std::vector<Point2> out;
    out.reserve(slices + 1);
    for (std::size_t k = 0; k <= slices; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(slices);
        out.push_back(start + (dest - start) * f);
    }
    out.back() = dest;
    return out;
}

struct MoebiusConfig {
    CircleToLineVariant variant = CircleToLineVariant::Exact;
    double target_span = 0.0;   ///< 0: twice the circumradius estimate
    int stagger_ticks = 25;     ///< start delay for odd-indexed agents
    double speed = 0.5;         ///< world units per second
    double dt = 0.01;
    double step_length = 0.0;   ///< 0: speed * dt
    double line_offset = 0.5;   ///< local-frame offset of the line before inversion
    bool recenter = false;      ///< translate destinations so their mean is the centroid
};

struct AgentPath {
    int agent_id = 0;
    std::vector<Point2> waypoints;
};

struct WaypointPlan {
    std::vector<AgentPath> per_agent;
    double step_length = 0.0;
    std::vector<int> stagger;
    std::vector<Point2> local_images;  ///< map output in the local frame
    FrameRecord frame;                 ///< origin and magnification used for destinations
    double pre_rotation = 0.0;         ///< local-frame rotation applied before CircleToLine
    double dt = 0.01;

    /// Ticks until every agent has reached its last waypoint.
    long ticks() const {
        long t = 0;
        for (std::size_t i = 0; i < per_agent.size(); ++i)
            t = std::max(t, static_cast<long>(stagger[i]) + static_cast<long>(per_agent[i].waypoints.size()) - 1);
        return t;
    }
    double duration() const { return static_cast<double>(ticks()) * dt; }

    std::vector<Point2> destinations() const {
        std::vector<Point2> out;
        for (const auto& a : per_agent) out.push_back(a.waypoints.back());
        return out;
    }

    /// Agent positions `tick` ticks after the plan starts.
    PatternState at_tick(long tick) const {
        std::vector<Point2> pts;
        pts.reserve(per_agent.size());
        for (std::size_t i = 0; i < per_agent.size(); ++i) {
            const auto& w = per_agent[i].waypoints;
            const long k = std::clamp(tick - stagger[i], 0L, static_cast<long>(w.size()) - 1);
            pts.push_back(w[static_cast<std::size_t>(k)]);
        }
        PatternState s = PatternState::from_positions(pts);
        for (std::size_t i = 0; i < per_agent.size(); ++i) s.agents[i].id = per_agent[i].agent_id;
        return s;
    }

    std::vector<PatternState> trajectory() const {
        std::vector<PatternState> out;
        for (long t = 0; t <= ticks(); ++t) out.push_back(at_tick(t));
        return out;
    }
};

/// Rotation that moves the pole at angle pi to the middle of the nearest
/// gap between angularly adjacent agents.
inline double anti_pole_rotation(std::span<const Point2> local) {
    std::vector<double> angles;
    for (const auto& p : local) angles.push_back(normalize_angle(std::atan2(p.y, p.x)));
    std::ranges::sort(angles);
    const std::size_t n = angles.size();
    double best = 0.0;
    double best_gap = -1.0;
    double best_abs = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = angles[i];
        const double hi = i + 1 < n ? angles[i + 1] : angles[0] + kTwoPi;
        const double gap = hi - lo;
        if (gap <= 0.0) continue;
        double delta = std::remainder(std::numbers::pi - 0.5 * (lo + hi), kTwoPi);
        const double mag = std::abs(delta);
        const bool better = mag < best_abs - 1e-12 ||
                            (std::abs(mag - best_abs) <= 1e-12 && (gap > best_gap + 1e-12 ||
                                                                   (std::abs(gap - best_gap) <= 1e-12 && delta > best)));
        if (better) {
            best = delta;
            best_abs = mag;
            best_gap = gap;
        }
    }
    return best;
}

namespace detail {

/// Unit normal of the least-squares line through zero-mean points,
/// oriented so its first nonzero component is positive in y.
inline Point2 fitted_line_normal(std::span<const Point2> pts) {
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& p : pts) {
        sxx += p.x * p.x;
        syy += p.y * p.y;
        sxy += p.x * p.y;
    }
    const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    Point2 dir{std::cos(theta), std::sin(theta)};
    Point2 normal{-dir.y, dir.x};
    if (normal.y < 0.0 || (normal.y == 0.0 && normal.x < 0.0)) normal = -normal;
    return normal;
}

} // namespace detail

inline WaypointPlan plan_moebius_transform(const PatternState& p, MoebiusDirection direction,
                                           const MoebiusConfig& cfg = {}) {
    if (p.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty pattern");
    if (!(cfg.dt > 0.0) || !(cfg.speed > 0.0) || cfg.stagger_ticks < 0)
        throw Error(ErrorKind::InvalidArgument, "invalid Moebius configuration");

    auto [local, frame] = to_local(p);
    const double r_est = frame.magnification;

    WaypointPlan plan;
    plan.dt = cfg.dt;
    plan.step_length = cfg.step_length > 0.0 ? cfg.step_length : cfg.speed * cfg.dt;

    FrameRecord out_frame = frame;
    if (direction == MoebiusDirection::CircleToLine) {
        plan.pre_rotation = anti_pole_rotation(local);
        for (std::size_t i = 0; i < local.size(); ++i) {
            const Point2 z = rotate(local[i], plan.pre_rotation);
            try {
                plan.local_images.push_back(circle_to_line(z, cfg.variant));
            } catch (const PoleError&) {
                throw PoleError("agent " + std::to_string(p.agents[i].id) + " sits on the pole z = -1",
                                p.agents[i].id);
            }
        }
    } else {
        const Point2 normal = detail::fitted_line_normal(local);
        const Point2 shift = normal * cfg.line_offset;
        for (std::size_t i = 0; i < local.size(); ++i) {
            try {
                plan.local_images.push_back(line_to_circle(local[i] + shift));
            } catch (const PoleError&) {
                throw PoleError("agent " + std::to_string(p.agents[i].id) + " sits on the local origin",
                                p.agents[i].id);
            }
        }
        // The shifted local origin, expressed globally.
        out_frame.origin = frame.origin - shift * r_est;
    }

    const double target = cfg.target_span > 0.0 ? cfg.target_span : 2.0 * r_est;
    out_frame.magnification = auto_magnification(plan.local_images, target);
    auto dest = to_global(plan.local_images, out_frame);
    if (cfg.recenter) {
        const Point2 off = p.centroid - mean(dest);
        for (auto& d : dest) d += off;
        out_frame.origin += off;
    }
    plan.frame = out_frame;

    for (std::size_t i = 0; i < p.size(); ++i) {
        plan.per_agent.push_back({p.agents[i].id, discretize_path(p.agents[i].position, dest[i], plan.step_length)});
        plan.stagger.push_back(i % 2 == 1 ? cfg.stagger_ticks : 0);
    }
    return plan;
}

} // namespace swarmform
