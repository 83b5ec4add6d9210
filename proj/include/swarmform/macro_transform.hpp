#pragma once

// Macroscopic transformation: rotate the pattern by a fixed offset, deflate
// s_y to zero (optionally inflating s_x), then reassign phases so the agents
// spread evenly along the resulting line. Everything is expressed through
// the ellipse parameters, so plans are keyframe lists rather than paths.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "swarmform/error.hpp"
#include "swarmform/pattern_model.hpp"

namespace swarmform {

struct MacroConfig {
    double angle_offset = deg_to_rad(15.0);
    int steps = 100;            ///< equal decrements of s_y
    int rotation_steps = 0;     ///< 0: one keyframe per started degree
    int correction_steps = 50;
    bool inflate_x = false;     ///< force x-inflation even when spacing is fine
    double s_x_target = 0.0;    ///< 0: derived from agent_radius
    double agent_radius = 0.1;
    double speed = 0.5;         ///< agent planning speed, world units per second
    double min_interval = 1e-3; ///< floor on keyframe spacing, seconds
};

struct MacroKeyframe {
    double time_offset = 0.0;
    double phase = 0.0;
    double s_x = 0.0;
    double s_y = 0.0;
    /// Blend from the rotated phases (0) to the corrective phases (1).
    double correction = 0.0;

    friend bool operator==(const MacroKeyframe&, const MacroKeyframe&) = default;
};

struct MacroPlan {
    std::vector<MacroKeyframe> keyframes;
    double angle_offset = 0.0;
    std::optional<std::vector<double>> corrective_phases;
    PatternState base;   ///< pattern the keyframes are expressed against
    bool inverse = false;

    double duration() const { return keyframes.empty() ? 0.0 : keyframes.back().time_offset; }
    bool inflates_x() const {
        return !keyframes.empty() && keyframes.back().s_x != keyframes.front().s_x;
    }
};

inline PatternState rotate_pattern(const PatternState& p, double angle) {
    std::vector<double> phases;
    phases.reserve(p.size());
    for (double ph : p.phases) phases.push_back(normalize_angle(ph + angle));
    if (p.model) return ellipse_pattern(*p.model, phases);

    std::vector<Point2> pts;
    pts.reserve(p.size());
    for (const auto& a : p.agents) pts.push_back(p.centroid + rotate(a.position - p.centroid, angle));
    PatternState out = PatternState::from_positions(pts, phases);
    for (std::size_t i = 0; i < p.size(); ++i) out.agents[i].id = p.agents[i].id;
    return out;
}

/// Positions from the keyframe's ellipse parameters and the pattern's phases.
/// `corrective` holds per-agent target phases used when kf.correction > 0.
inline PatternState apply_keyframe(const PatternState& p, const MacroKeyframe& kf,
                                   std::span<const double> corrective = {}) {
    const bool blend = kf.correction > 0.0 && !corrective.empty();
    if (blend && corrective.size() != p.size())
        throw Error(ErrorKind::InvalidArgument, "one corrective phase per agent required");

    std::vector<double> phases;
    phases.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double ph = normalize_angle(p.phases[i] + kf.phase);
        if (!blend) {
            phases.push_back(ph);
            continue;
        }
        // Interpolate the x-projection linearly so agents slide along the
        // line in order; the phase stays in the agent's half of the ellipse.
        const double x = (1.0 - kf.correction) * std::cos(ph) + kf.correction * std::cos(corrective[i]);
        const double a = std::acos(std::clamp(x, -1.0, 1.0));
        phases.push_back(std::sin(ph) >= 0.0 ? a : normalize_angle(kTwoPi - a));
    }
    const Point2 center = p.model ? p.model->center : p.centroid;
    PatternState out = ellipse_pattern({center, {kf.s_x, kf.s_y}}, phases);
    for (std::size_t i = 0; i < p.size(); ++i) out.agents[i].id = p.agents[i].id;
    return out;
}

namespace detail {

inline double max_displacement(const PatternState& a, const PatternState& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, linear_distance(a.agents[i].position, b.agents[i].position));
    return m;
}

/// Targets arccos(1 - 2i/(n-1)) matched to agents in order of decreasing
/// x-projection, mirrored into each agent's half of the ellipse.
inline std::vector<double> corrective_targets(std::span<const double> rotated_phases) {
    const std::size_t n = rotated_phases.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
        return std::cos(rotated_phases[a]) > std::cos(rotated_phases[b]);
    });
    std::vector<double> targets(n);
    for (std::size_t rank = 0; rank < n; ++rank) {
        const std::size_t i = order[rank];
        const double t = std::acos(std::clamp(1.0 - 2.0 * static_cast<double>(rank) / static_cast<double>(n - 1), -1.0, 1.0));
        targets[i] = std::sin(rotated_phases[i]) >= 0.0 ? t : normalize_angle(kTwoPi - t);
    }
    return targets;
}

} // namespace detail

inline MacroPlan plan_flatten(const PatternState& p, const MacroConfig& cfg = {}) {
    const std::size_t n = p.size();
    if (n < 3) throw Error(ErrorKind::InvalidArgument, "flatten needs >= 3 agents");
    if (!p.model) throw Error(ErrorKind::InvalidArgument, "flatten needs an ellipse-model pattern");
    if (cfg.steps < 1 || cfg.correction_steps < 1 || !(cfg.speed > 0.0) || !(cfg.agent_radius > 0.0))
        throw Error(ErrorKind::InvalidArgument, "invalid macro configuration");

    const ShapingRadii start = p.model->radii;
    const double auto_target = std::max(start.s_x, static_cast<double>(n) * cfg.agent_radius * 1.5);
    const bool crowded = 2.0 * start.s_x / static_cast<double>(n - 1) < 3.0 * cfg.agent_radius;
    double s_x_end = start.s_x;
    if (cfg.inflate_x || crowded) s_x_end = cfg.s_x_target > 0.0 ? cfg.s_x_target : auto_target;

    MacroPlan plan;
    plan.base = p;
    plan.angle_offset = cfg.angle_offset;

    PatternState prev = p;
    auto push = [&](MacroKeyframe kf) {
        const PatternState next = apply_keyframe(p, kf, plan.corrective_phases ? std::span<const double>(*plan.corrective_phases)
                                                                             : std::span<const double>{});
        const double dt = std::max(detail::max_displacement(prev, next) / cfg.speed, cfg.min_interval);
        kf.time_offset = plan.keyframes.back().time_offset + dt;
        plan.keyframes.push_back(kf);
        prev = next;
    };

    plan.keyframes.push_back({0.0, 0.0, start.s_x, start.s_y, 0.0});

    int rotation_steps = cfg.rotation_steps;
    if (rotation_steps <= 0)
        rotation_steps = cfg.angle_offset == 0.0 ? 0 : static_cast<int>(std::ceil(std::abs(cfg.angle_offset) * 180.0 / std::numbers::pi));
    for (int k = 1; k <= rotation_steps; ++k)
        push({0.0, cfg.angle_offset * k / rotation_steps, start.s_x, start.s_y, 0.0});

    for (int k = 1; k <= cfg.steps; ++k) {
        const double f = static_cast<double>(k) / cfg.steps;
        const double s_y = k == cfg.steps ? 0.0 : start.s_y * (1.0 - f);
        const double s_x = k == cfg.steps ? s_x_end : start.s_x + (s_x_end - start.s_x) * f;
        push({0.0, cfg.angle_offset, s_x, s_y, 0.0});
    }

    // n = 3 and 4 come out close enough to equidistant without correction.
    if (n >= 5) {
        std::vector<double> rotated;
        rotated.reserve(n);
        for (double ph : p.phases) rotated.push_back(normalize_angle(ph + cfg.angle_offset));
        plan.corrective_phases = detail::corrective_targets(rotated);
        for (int k = 1; k <= cfg.correction_steps; ++k)
            push({0.0, cfg.angle_offset, s_x_end, 0.0, static_cast<double>(k) / cfg.correction_steps});
    }
    return plan;
}

/// Same keyframes played backwards, ending on the plan's base pattern.
inline MacroPlan plan_inverse(const MacroPlan& plan) {
    MacroPlan inv = plan;
    inv.inverse = !plan.inverse;
    inv.angle_offset = -plan.angle_offset;
    const double total = plan.duration();
    inv.keyframes.assign(plan.keyframes.rbegin(), plan.keyframes.rend());
    for (auto& kf : inv.keyframes) kf.time_offset = total - kf.time_offset;
    if (!inv.keyframes.empty()) inv.keyframes.front().time_offset = 0.0;
    return inv;
}

/// Pattern at time `t` seconds into the plan (clamped to the plan's span).
inline PatternState evaluate_plan(const MacroPlan& plan, double t) {
    const auto& kfs = plan.keyframes;
    if (kfs.empty()) return plan.base;
    const std::span<const double> corrective =
        plan.corrective_phases ? std::span<const double>(*plan.corrective_phases) : std::span<const double>{};
    if (t <= kfs.front().time_offset) return apply_keyframe(plan.base, kfs.front(), corrective);
    if (t >= kfs.back().time_offset) return apply_keyframe(plan.base, kfs.back(), corrective);
    const auto hi = std::ranges::upper_bound(kfs, t, {}, &MacroKeyframe::time_offset);
    const auto& b = *hi;
    const auto& a = *(hi - 1);
    const double f = (t - a.time_offset) / (b.time_offset - a.time_offset);
    auto lerp = [f](double u, double v) { return u + (v - u) * f; };
    const MacroKeyframe kf{t, lerp(a.phase, b.phase), lerp(a.s_x, b.s_x), lerp(a.s_y, b.s_y),
                           lerp(a.correction, b.correction)};
    return apply_keyframe(plan.base, kf, corrective);
}

/// States at every keyframe plus every multiple of dt in between.
inline std::vector<PatternState> sample_plan(const MacroPlan& plan, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
    std::vector<double> times;
    for (const auto& kf : plan.keyframes) times.push_back(kf.time_offset);
    for (double t = dt; t < plan.duration(); t += dt) times.push_back(t);
    std::ranges::sort(times);
    std::vector<PatternState> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(evaluate_plan(plan, t));
    return out;
}

/// Unordered agent pairs that come closer than two radii at any sampled state.
inline int count_collisions(std::span<const PatternState> trajectory, double agent_radius) {
    if (!(agent_radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "agent_radius must be > 0");
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    const double limit = 2.0 * agent_radius;
    for (const auto& s : trajectory)
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j)
                if (linear_distance(s.agents[i].position, s.agents[j].position) < limit)
                    pairs.emplace(i, j);
    return static_cast<int>(pairs.size());
}

} // namespace swarmform
