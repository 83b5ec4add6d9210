#pragma once

// Experiment sweeps: collision counts per rotation offset (Table-style grid)
// and simulated transformation time per swarm size for both methods.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "swarmform/macro_transform.hpp"
#include "swarmform/moebius_transform.hpp"
#include "swarmform/pattern_model.hpp"
#include "swarmform/physics_sim.hpp"

namespace swarmform::harness {

using Method = Planner;

inline std::string method_name(Method m) { return std::string(to_string(m)); }

struct SweepSummary {
    std::string method;
    int n = 0;
    double transform_time = 0.0;  ///< simulated seconds
    int collisions = 0;
    double max_displacement = 0.0;
    double mean_displacement = 0.0;

    friend bool operator==(const SweepSummary&, const SweepSummary&) = default;
};

struct SweepOptions {
    double r = 1.0;
    double phase = 0.0;
    double dt = 0.01;
    MacroConfig macro{};
    MoebiusConfig moebius{};
};

inline PatternState regular_pattern(int n, double r, double phase = 0.0) {
    return formation_positions(PrimaryPrimitives{n, r, 1.0, phase, {}});
}

/// result[a][k] is the collision count for angles[a] and ns[k].
inline std::vector<std::vector<int>> sweep_rotation_collisions(std::span<const double> angles, std::span<const int> ns,
                                                               const SweepOptions& opt = {}) {
    std::vector<std::vector<int>> table;
    table.reserve(angles.size());
    for (double angle : angles) {
        std::vector<int> row;
        for (int n : ns) {
            MacroConfig cfg = opt.macro;
            cfg.angle_offset = angle;
            const auto plan = plan_flatten(regular_pattern(n, opt.r, opt.phase), cfg);
            row.push_back(count_collisions(sample_plan(plan, opt.dt), cfg.agent_radius));
        }
        table.push_back(std::move(row));
    }
    return table;
}

namespace detail {

inline void fill_displacements(SweepSummary& s, const PatternState& from, const PatternState& to) {
    double total = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        const double d = linear_distance(from.agents[i].position, to.agents[i].position);
        s.max_displacement = std::max(s.max_displacement, d);
        total += d;
    }
    s.mean_displacement = from.size() == 0 ? 0.0 : total / static_cast<double>(from.size());
}

} // namespace detail

inline SweepSummary measure_transform(Method method, int n, const SweepOptions& opt = {}) {
    const PatternState start = regular_pattern(n, opt.r, opt.phase);
    SweepSummary s{method_name(method), n, 0.0, 0, 0.0, 0.0};
    if (method == Method::Macro) {
        const auto plan = plan_flatten(start, opt.macro);
        s.transform_time = plan.duration();
        s.collisions = count_collisions(sample_plan(plan, opt.dt), opt.macro.agent_radius);
        detail::fill_displacements(s, start, evaluate_plan(plan, plan.duration()));
    } else {
        MoebiusConfig cfg = opt.moebius;
        cfg.dt = opt.dt;
        const auto plan = plan_moebius_transform(start, MoebiusDirection::CircleToLine, cfg);
        s.transform_time = plan.duration();
        s.collisions = count_collisions(plan.trajectory(), opt.macro.agent_radius);
        detail::fill_displacements(s, start, plan.at_tick(plan.ticks()));
    }
    return s;
}

inline std::vector<SweepSummary> sweep_transform_time(Method method, std::span<const int> ns, double r,
                                                      SweepOptions opt = {}) {
    if (ns.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one n");
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "sweep needs r > 0");
    opt.r = r;
    std::vector<SweepSummary> out;
    out.reserve(ns.size());
    for (int n : ns) out.push_back(measure_transform(method, n, opt));
    return out;
}

} // namespace swarmform::harness
