#pragma once

// Command-line front end. Subcommands: form, transform, sweep-collisions,
// sweep-time, render. Exit codes: 0 success, 1 invalid input or I/O failure,
// 2 numeric failure (divergence or a Moebius pole).

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "swarmform/error.hpp"
#include "swarmform/harness/io.hpp"
#include "swarmform/harness/scenario.hpp"
#include "swarmform/harness/sweeps.hpp"
#include "swarmform/physics_sim.hpp"
#include "swarmform/transform_classifier.hpp"

namespace swarmform::harness {

struct Overrides {
    std::optional<int> n;
    std::optional<std::string> method;
    std::optional<std::string> variant;
    std::optional<double> angle_deg;
};

/// Applies command-line overrides and rebuilds the world so a new n takes effect.
inline Scenario apply_overrides(Scenario s, const Overrides& o) {
    if (o.n) s.primitives.n = *o.n;
    if (o.method) s.planner = detail::parse_planner(*o.method);
    const World& old = s.world_template;
    World w = make_world(s.primitives, old.config, old.obstacles, s.planner);
    w.macro = old.macro;
    w.moebius = old.moebius;
    if (o.angle_deg) w.macro.angle_offset = deg_to_rad(*o.angle_deg);
    if (o.variant) w.moebius.variant = detail::parse_variant(*o.variant);
    s.world_template = std::move(w);
    return s;
}

/// Trace rows for a kinematic trajectory; velocities are backward differences.
inline std::vector<TraceRecord> trajectory_records(const std::vector<PatternState>& states, double dt,
                                                   const std::string& mode) {
    std::vector<TraceRecord> out;
    for (std::size_t k = 0; k < states.size(); ++k) {
        for (std::size_t i = 0; i < states[k].size(); ++i) {
            const Point2 p = states[k].agents[i].position;
            Point2 v{};
            if (k > 0) v = (p - states[k - 1].agents[i].position) / dt;
            out.push_back({static_cast<long>(k), static_cast<double>(k) * dt, mode, states[k].agents[i].id, p.x, p.y,
                           v.x, v.y});
        }
    }
    return out;
}

namespace detail {

inline Scenario scenario_from(const std::string& config) {
    return config.empty() ? default_tunnel_scenario() : load_scenario(config);
}

inline nlohmann::json point_json(Point2 p) { return nlohmann::json::array({p.x, p.y}); }

inline int run_form(const std::string& config, const Overrides& o, const std::filesystem::path& out_dir,
                    long svg_every, std::ostream& out) {
    Scenario s = apply_overrides(scenario_from(config), o);
    World w = s.world_template;
    const PatternState start = agent_pattern(w);
    const auto trace = run(w, s.max_ticks);
    emit_trace(trace, out_dir / "trace.csv");

    double max_speed = 0.0;
    for (const auto& r : trace) max_speed = std::max(max_speed, std::hypot(r.vx, r.vy));
    nlohmann::json transitions = nlohmann::json::array();
    for (const auto& t : w.transitions)
        transitions.push_back({{"tick", t.tick}, {"from", to_string(t.from)}, {"to", to_string(t.to)}});
    const PatternState end = agent_pattern(w);
    nlohmann::json doc = {{"scenario", s.name},
                          {"planner", to_string(s.planner)},
                          {"n", s.primitives.n},
                          {"ticks", w.tick},
                          {"sim_time", static_cast<double>(w.tick) * w.config.dt},
                          {"final_mode", to_string(w.mode)},
                          {"transitions", transitions},
                          {"final_leader", point_json(w.centroid_particle.position)},
                          {"final_centroid", point_json(end.centroid)},
                          {"restored_congruent", congruent(start, end, 1e-3)},
                          {"max_speed", max_speed}};
    emit_json(doc, out_dir / "summary.json");
    if (svg_every > 0) emit_svg_frames(trace, w.obstacles, w.config.agent_radius, out_dir / "frames", svg_every);
    out << s.name << ": " << w.tick << " ticks, " << w.transitions.size() << " mode changes, final centroid ("
        << end.centroid.x << ", " << end.centroid.y << ")\n";
    return 0;
}

inline int run_transform(const Overrides& o, double r, double dt, const std::filesystem::path& out_dir,
                         std::ostream& out) {
    const Method method = detail::parse_planner(o.method.value_or("macro"));
    SweepOptions opt;
    opt.r = r;
    opt.dt = dt;
    if (o.angle_deg) opt.macro.angle_offset = deg_to_rad(*o.angle_deg);
    if (o.variant) opt.moebius.variant = detail::parse_variant(*o.variant);
    opt.moebius.dt = dt;
    const int n = o.n.value_or(5);

    const PatternState start = regular_pattern(n, r, opt.phase);
    std::vector<PatternState> states;
    if (method == Method::Macro) {
        states = sample_plan(plan_flatten(start, opt.macro), dt);
    } else {
        states = plan_moebius_transform(start, MoebiusDirection::CircleToLine, opt.moebius).trajectory();
    }
    emit_trace(trajectory_records(states, dt, "Flattening"), out_dir / "trace.csv");
    const SweepSummary summary = measure_transform(method, n, opt);
    nlohmann::json doc = to_json(summary);
    doc["case"] = to_string(classify(start, states.back(), 1e-6).kind);
    emit_json(doc, out_dir / "summary.json");
    out << summary.method << " n=" << n << ": time " << summary.transform_time << " s, " << summary.collisions
        << " collisions, max displacement " << summary.max_displacement << "\n";
    return 0;
}

inline int run_sweep_collisions(std::vector<double> angles, const std::optional<double>& angle,
                                const std::vector<int>& ns, double agent_radius,
                                const std::filesystem::path& out_dir, std::ostream& out) {
    if (angle) angles = {*angle};
    if (angles.empty() || ns.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one angle and one n");
    std::vector<double> rad;
    for (double a : angles) rad.push_back(deg_to_rad(a));
    SweepOptions opt;
    opt.macro.agent_radius = agent_radius;
    const auto table = sweep_rotation_collisions(rad, ns, opt);

    std::string csv = "angle_deg";
    for (int n : ns) csv += ",n" + std::to_string(n);
    csv += '\n';
    for (std::size_t a = 0; a < angles.size(); ++a) {
        csv += format_double(angles[a]);
        for (int c : table[a]) csv += "," + std::to_string(c);
        csv += '\n';
    }
    write_text_file(out_dir / "collisions.csv", csv);
    emit_json({{"angles_deg", angles}, {"ns", ns}, {"agent_radius", agent_radius}, {"collisions", table}},
              out_dir / "collisions.json");
    out << csv;
    return 0;
}

inline int run_sweep_time(const Overrides& o, const std::vector<int>& ns, double r, double dt,
                          const std::filesystem::path& out_dir, std::ostream& out) {
    const Method method = detail::parse_planner(o.method.value_or("macro"));
    SweepOptions opt;
    opt.dt = dt;
    if (o.angle_deg) opt.macro.angle_offset = deg_to_rad(*o.angle_deg);
    if (o.variant) opt.moebius.variant = detail::parse_variant(*o.variant);
    const auto rows = sweep_transform_time(method, ns, r, opt);
    const std::string stem = "sweep_" + method_name(method);
    emit_summary(rows, out_dir / (stem + ".json"));
    std::string csv = "method,n,transform_time,collisions,max_displacement,mean_displacement\n";
    for (const auto& s : rows)
        csv += s.method + "," + std::to_string(s.n) + "," + format_double(s.transform_time) + "," +
               std::to_string(s.collisions) + "," + format_double(s.max_displacement) + "," +
               format_double(s.mean_displacement) + "\n";
    write_text_file(out_dir / (stem + ".csv"), csv);
    out << csv;
    return 0;
}

inline int run_render(const std::string& trace_path, const std::string& config, long every,
                      const std::filesystem::path& out_dir, std::ostream& out) {
    const auto records = parse_trace_csv(read_text_file(trace_path));
    const Scenario s = scenario_from(config);
    const auto files =
        emit_svg_frames(records, s.world_template.obstacles, s.world_template.config.agent_radius, out_dir, every);
    out << files.size() << " frames written to " << out_dir.string() << "\n";
    return 0;
}

} // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"swarm formation transformation harness", "swarmform"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = "out";
    Overrides o;
    double r = 1.0;
    double dt = 0.01;
    long every = 1;
    long svg_every = 0;
    double agent_radius = 0.1;
    std::string trace_path;
    std::vector<double> angles{15.0, 30.0, 45.0, 60.0};
    std::vector<int> collision_ns{3, 4, 5, 6};
    std::vector<int> time_ns;
    for (int n = 3; n <= 25; ++n) time_ns.push_back(n);

    auto add_method = [&](CLI::App* sub) {
        sub->add_option("--method", o.method, "macro | moebius")->check(CLI::IsMember({"macro", "moebius"}));
        sub->add_option("--variant", o.variant, "exact | paper-literal")
            ->check(CLI::IsMember({"exact", "paper-literal"}));
        sub->add_option("--angle", o.angle_deg, "macro rotation offset in degrees");
    };

    auto* form = app.add_subcommand("form", "simulate a scenario end to end");
    form->add_option("--config", config, "scenario file (default: reference tunnel)");
    form->add_option("--out", out_dir, "output directory");
    form->add_option("--n", o.n, "number of agents");
    form->add_option("--svg-every", svg_every, "also render every k-th tick as SVG");
    add_method(form);

    auto* transform = app.add_subcommand("transform", "plan one flattening transformation");
    transform->add_option("--out", out_dir, "output directory");
    transform->add_option("--n", o.n, "number of agents");
    transform->add_option("--r", r, "pattern radius");
    transform->add_option("--dt", dt, "sampling interval");
    add_method(transform);

    auto* sweep_c = app.add_subcommand("sweep-collisions", "collision counts per rotation offset and n");
    sweep_c->add_option("--out", out_dir, "output directory");
    sweep_c->add_option("--angles", angles, "offsets in degrees");
    sweep_c->add_option("--angle", o.angle_deg, "single offset in degrees");
    sweep_c->add_option("--ns", collision_ns, "swarm sizes");
    sweep_c->add_option("--agent-radius", agent_radius, "collision radius");

    auto* sweep_t = app.add_subcommand("sweep-time", "transformation time per swarm size");
    sweep_t->add_option("--out", out_dir, "output directory");
    sweep_t->add_option("--ns", time_ns, "swarm sizes");
    sweep_t->add_option("--r", r, "pattern radius");
    sweep_t->add_option("--dt", dt, "sampling interval");
    add_method(sweep_t);

    auto* render = app.add_subcommand("render", "turn a trace CSV into SVG frames");
    render->add_option("--trace", trace_path, "trace.csv to render")->required();
    render->add_option("--config", config, "scenario file for obstacles");
    render->add_option("--out", out_dir, "output directory");
    render->add_option("--every", every, "render every k-th tick");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*form) return detail::run_form(config, o, out_dir, svg_every, out);
        if (*transform) return detail::run_transform(o, r, dt, out_dir, out);
        if (*sweep_c) return detail::run_sweep_collisions(angles, o.angle_deg, collision_ns, agent_radius, out_dir, out);
        if (*sweep_t) return detail::run_sweep_time(o, time_ns, r, dt, out_dir, out);
        if (*render) return detail::run_render(trace_path, config, every, out_dir, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::NumericDivergence || e.kind() == ErrorKind::PoleError ? 2 : 1;
    }
    return 1;
}

} // namespace swarmform::harness
