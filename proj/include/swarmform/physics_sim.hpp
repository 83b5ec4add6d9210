#pragma once

// Fixed-step particle world. A virtual leader particle carries the swarm
// centroid: it feels the obstacle emitters and the propulsion toward the
// goal. Each agent is pulled toward its formation slot (leader position plus
// the slot offset) by a critically damped spring. Transformations are
// triggered and undone by thresholds on the obstacle load at the centroid.

#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "swarmform/error.hpp"
#include "swarmform/macro_transform.hpp"
#include "swarmform/moebius_transform.hpp"
#include "swarmform/pattern_model.hpp"

namespace swarmform {

struct Particle {
    double mass = 1.0;
    Point2 position{};
    Point2 velocity{};
    double age = 0.0;
};

/// Inverse-square point source; strength > 0 attracts, < 0 repels.
struct ForceSource {
    Point2 anchor{};
    double strength = 0.0;
    double min_distance = 0.1;

    Point2 force_at(Point2 p) const {
        const Point2 to_anchor = anchor - p;
        const double d = norm(to_anchor);
        if (d == 0.0) return {};
        const double clamped = std::max(d, min_distance);
        return to_anchor * (strength / (d * clamped * clamped));
    }

    double magnitude_at(Point2 p) const {
        const double d = std::max(linear_distance(anchor, p), min_distance);
        return std::abs(strength) / (d * d);
    }
};

struct Obstacle {
    Point2 a{};
    Point2 b{};
    std::vector<ForceSource> emitters;

    /// Wall segment with repulsive emitters every `spacing` units, both ends included.
    static Obstacle wall(Point2 a, Point2 b, double strength, double min_distance, double spacing = 0.5) {
        if (!(strength < 0.0)) throw Error(ErrorKind::InvalidArgument, "wall emitters must be repulsive");
        if (!(min_distance > 0.0) || !(spacing > 0.0))
            throw Error(ErrorKind::InvalidArgument, "wall needs min_distance > 0 and spacing > 0");
        Obstacle o{a, b, {}};
        const auto count = static_cast<std::size_t>(std::ceil(linear_distance(a, b) / spacing - 1e-9));
        for (std::size_t k = 0; k <= count; ++k) {
            const double f = count == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(count);
            o.emitters.push_back({a + (b - a) * f, strength, min_distance});
        }
        return o;
    }
};

struct SimConfig {
    double dt = 0.01;
    double f_max = 0.1;           ///< obstacle load that starts a transformation
    double f_min = 0.05;          ///< obstacle load below which the pattern restores
    double propulsion = 1.0;
    Point2 goal{};
    double agent_radius = 0.1;
    double max_speed = 1.0;
    double damping = 0.02;        ///< per-step velocity loss fraction
    double slot_stiffness = 100.0;
    double agent_mass = 1.0;
    double centroid_mass = 1.0;
    double plan_speed = 0.5;      ///< agent speed assumed by the transformation planners

    void validate() const {
        if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
        if (!(f_min > 0.0) || !(f_max > 0.0) || !(f_min < f_max))
            throw Error(ErrorKind::InvalidArgument, "thresholds need 0 < f_min < f_max");
        if (!(agent_radius > 0.0) || !(max_speed > 0.0) || !(plan_speed > 0.0))
            throw Error(ErrorKind::InvalidArgument, "agent_radius, max_speed and plan_speed must be > 0");
        if (!(damping >= 0.0 && damping <= 1.0)) throw Error(ErrorKind::InvalidArgument, "damping must lie in [0, 1]");
        if (!(slot_stiffness >= 0.0) || !(agent_mass > 0.0) || !(centroid_mass > 0.0))
            throw Error(ErrorKind::InvalidArgument, "masses must be > 0 and stiffness >= 0");
        if (!goal.finite() || !std::isfinite(propulsion))
            throw Error(ErrorKind::InvalidArgument, "goal and propulsion must be finite");
    }
};

enum class Mode { Normal, Flattening, Flattened, Restoring };
enum class Planner { Macro, Moebius };

constexpr std::string_view to_string(Mode m) {
    switch (m) {
    case Mode::Normal: return "Normal";
    case Mode::Flattening: return "Flattening";
    case Mode::Flattened: return "Flattened";
    case Mode::Restoring: return "Restoring";
    }
    return "?";
}

constexpr Mode next_mode(Mode m) {
    switch (m) {
    case Mode::Normal: return Mode::Flattening;
    case Mode::Flattening: return Mode::Flattened;
    case Mode::Flattened: return Mode::Restoring;
    case Mode::Restoring: return Mode::Normal;
    }
    return Mode::Normal;
}

constexpr std::string_view to_string(Planner p) { return p == Planner::Macro ? "macro" : "moebius"; }

using TransformPlan = std::variant<std::monostate, MacroPlan, WaypointPlan>;

struct ModeTransition {
    long tick = 0;
    Mode from = Mode::Normal;
    Mode to = Mode::Normal;
};

struct World {
    std::vector<Particle> particles;
    Particle centroid_particle;
    std::vector<Obstacle> obstacles;
    SimConfig config;
    Mode mode = Mode::Normal;
    TransformPlan active_plan;
    long tick = 0;

    Planner planner = Planner::Macro;
    MacroConfig macro;
    MoebiusConfig moebius;
    /// Slot offsets relative to the leader while Normal or Flattened.
    PatternState formation;
    long plan_ticks = 0;
    std::vector<ModeTransition> transitions;
};

/// One agent at one tick.
struct TraceRecord {
    long tick = 0;
    double sim_time = 0.0;
    std::string mode;
    int agent_id = 0;
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Places the formation described by `prims` around prims.centroid, agents at rest on their slots.
inline World make_world(const PrimaryPrimitives& prims, const SimConfig& config, std::vector<Obstacle> obstacles,
                        Planner planner = Planner::Macro) {
    config.validate();
    World w;
    w.config = config;
    w.obstacles = std::move(obstacles);
    w.planner = planner;
    PrimaryPrimitives rel = prims;
    rel.centroid = {};
    w.formation = formation_positions(rel);
    w.centroid_particle = {config.centroid_mass, prims.centroid, {}, 0.0};
    for (const auto& a : w.formation.agents)
        w.particles.push_back({config.agent_mass, prims.centroid + a.position, {}, 0.0});
    w.macro.agent_radius = config.agent_radius;
    w.macro.speed = config.plan_speed;
    w.moebius.speed = config.plan_speed;
    w.moebius.dt = config.dt;
    w.moebius.recenter = true;
    return w;
}

/// Vector sum of the emitter forces at the centroid plus the propulsion toward the goal.
inline Point2 net_centroid_force(const World& w) {
    const Point2 c = w.centroid_particle.position;
    Point2 f{};
    for (const auto& o : w.obstacles)
        for (const auto& e : o.emitters) f += e.force_at(c);
    const Point2 to_goal = w.config.goal - c;
    const double d = norm(to_goal);
    if (d > 0.0) f += to_goal * (w.config.propulsion / d);
    return f;
}

/// Sum of emitter force magnitudes at the centroid; this is what the
/// transformation thresholds compare against.
inline double obstacle_load(const World& w) {
    const Point2 c = w.centroid_particle.position;
    double load = 0.0;
    for (const auto& o : w.obstacles)
        for (const auto& e : o.emitters) load += e.magnitude_at(c);
    return load;
}

namespace detail {

inline bool plan_complete(const World& w) {
    if (const auto* m = std::get_if<MacroPlan>(&w.active_plan))
        return static_cast<double>(w.plan_ticks) * w.config.dt >= m->duration();
    if (const auto* p = std::get_if<WaypointPlan>(&w.active_plan)) return w.plan_ticks >= p->ticks();
    return true;
}

inline PatternState plan_state(const World& w) {
    if (const auto* m = std::get_if<MacroPlan>(&w.active_plan))
        return evaluate_plan(*m, static_cast<double>(w.plan_ticks) * w.config.dt);
    if (const auto* p = std::get_if<WaypointPlan>(&w.active_plan)) return p->at_tick(w.plan_ticks);
    return w.formation;
}

inline void check_finite(const World& w) {
    auto bad = [](const Particle& p) { return !p.position.finite() || !p.velocity.finite(); };
    if (bad(w.centroid_particle)) throw DivergenceError("non-finite centroid state at tick " + std::to_string(w.tick), w.tick);
    for (const auto& p : w.particles)
        if (bad(p)) throw DivergenceError("non-finite agent state at tick " + std::to_string(w.tick), w.tick);
}

inline void integrate(Particle& p, Point2 force, const SimConfig& cfg) {
    p.velocity += force * (cfg.dt / p.mass);
    p.velocity = p.velocity * (1.0 - cfg.damping);
    const double speed = norm(p.velocity);
    if (speed > cfg.max_speed) p.velocity = p.velocity * (cfg.max_speed / speed);
    p.position += p.velocity * cfg.dt;
    p.age += cfg.dt;
}

} // namespace detail

/// Slot offsets (relative to the leader) the agents are currently pulled toward.
inline PatternState current_slots(const World& w) {
    if (w.mode == Mode::Flattening || w.mode == Mode::Restoring) return detail::plan_state(w);
    return w.formation;
}

inline World step(World w) {
    const SimConfig& cfg = w.config;
    const PatternState slots = current_slots(w);
    const Particle leader = w.centroid_particle;
    const double damping_coeff = 2.0 * std::sqrt(cfg.slot_stiffness * cfg.agent_mass);

    std::vector<Point2> forces;
    forces.reserve(w.particles.size());
    for (std::size_t i = 0; i < w.particles.size(); ++i) {
        const Particle& p = w.particles[i];
        const Point2 slot = leader.position + slots.agents[i].position;
        forces.push_back((slot - p.position) * cfg.slot_stiffness - (p.velocity - leader.velocity) * damping_coeff);
    }
    detail::integrate(w.centroid_particle, net_centroid_force(w), cfg);
    for (std::size_t i = 0; i < w.particles.size(); ++i) detail::integrate(w.particles[i], forces[i], cfg);

    ++w.tick;
    if (w.mode == Mode::Flattening || w.mode == Mode::Restoring) ++w.plan_ticks;
    detail::check_finite(w);
    return w;
}

/// Threshold rule plus plan bookkeeping; at most one transition per call.
inline World update_mode(World w, Planner planner) {
    const double load = obstacle_load(w);
    const Mode before = w.mode;
    switch (w.mode) {
    case Mode::Normal:
        if (load > w.config.f_max) {
            if (planner == Planner::Macro)
                w.active_plan = plan_flatten(w.formation, w.macro);
            else
                w.active_plan = plan_moebius_transform(w.formation, MoebiusDirection::CircleToLine, w.moebius);
            w.plan_ticks = 0;
            w.mode = Mode::Flattening;
        }
        break;
    case Mode::Flattening:
        if (detail::plan_complete(w)) {
            w.formation = detail::plan_state(w);
            w.mode = Mode::Flattened;
        }
        break;
    case Mode::Flattened:
        if (load < w.config.f_min) {
            if (const auto* m = std::get_if<MacroPlan>(&w.active_plan))
                w.active_plan = plan_inverse(*m);
            else
                w.active_plan = plan_moebius_transform(w.formation, MoebiusDirection::LineToCircle, w.moebius);
            w.plan_ticks = 0;
            w.mode = Mode::Restoring;
        }
        break;
    case Mode::Restoring:
        if (detail::plan_complete(w)) {
            w.formation = detail::plan_state(w);
            w.active_plan = std::monostate{};
            w.mode = Mode::Normal;
        }
        break;
    }
    if (w.mode != before) w.transitions.push_back({w.tick, before, w.mode});
    return w;
}

inline World update_mode(World w) {
    const Planner p = w.planner;
    return update_mode(std::move(w), p);
}

inline void append_records(const World& w, std::vector<TraceRecord>& out) {
    const std::string mode(to_string(w.mode));
    for (std::size_t i = 0; i < w.particles.size(); ++i) {
        const auto& p = w.particles[i];
        out.push_back({w.tick, static_cast<double>(w.tick) * w.config.dt, mode, w.formation.agents[i].id,
                       p.position.x, p.position.y, p.velocity.x, p.velocity.y});
    }
}

/// Runs until max_ticks steps have been taken or the centroid reaches the
/// goal. `w` is advanced in place; one record per agent per recorded tick.
inline std::vector<TraceRecord> run(World& w, long max_ticks) {
    if (max_ticks < 1) throw Error(ErrorKind::InvalidArgument, "max_ticks must be >= 1");
    std::vector<TraceRecord> trace;
    for (long k = 0; k < max_ticks; ++k) {
        w = update_mode(std::move(w));
        append_records(w, trace);
        w = step(std::move(w));
        if (linear_distance(w.centroid_particle.position, w.config.goal) <= w.config.agent_radius) break;
    }
    return trace;
}

/// Current agent positions as a pattern.
inline PatternState agent_pattern(const World& w) {
    std::vector<Point2> pts;
    for (const auto& p : w.particles) pts.push_back(p.position);
    return PatternState::from_positions(pts);
}

} // namespace swarmform
