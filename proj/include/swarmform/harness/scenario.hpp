#pragma once

// Scenario construction: tunnel and funnel obstacle layouts, plus loading of
// plain-text scenario files with [scenario], [primitives], [sim],
// [tunnel] or [funnel], and [planner] sections.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "swarmform/error.hpp"
#include "swarmform/physics_sim.hpp"

namespace swarmform::harness {

struct WallStyle {
    double strength = -0.05;
    double min_distance = 0.1;
    double spacing = 0.5;
};

struct ScenarioFragment {
    std::vector<Obstacle> obstacles;
    Point2 goal{};
};

struct Scenario {
    std::string name;
    World world_template;
    PrimaryPrimitives primitives;
    Planner planner = Planner::Macro;
    long max_ticks = 6000;
};

/// Two horizontal walls at y = +-width/2 over [entry_x, entry_x + length];
/// the goal sits goal_margin past the exit on the centre line.
inline ScenarioFragment build_tunnel(double width, double length, double entry_x, WallStyle style = {},
                                     double goal_margin = 10.0) {
    if (!(width > 0.0) || !(length > 0.0))
        throw Error(ErrorKind::InvalidArgument, "tunnel needs width > 0 and length > 0");
    const double h = width / 2.0;
    const double exit_x = entry_x + length;
    ScenarioFragment f;
    f.obstacles.push_back(Obstacle::wall({entry_x, h}, {exit_x, h}, style.strength, style.min_distance, style.spacing));
    f.obstacles.push_back(Obstacle::wall({entry_x, -h}, {exit_x, -h}, style.strength, style.min_distance, style.spacing));
    f.goal = {exit_x + goal_margin, 0.0};
    return f;
}

/// Two walls converging from entry_width at x = entry_x to exit_width at
/// x = entry_x + length.
inline ScenarioFragment build_funnel(double entry_width, double exit_width, double length, double entry_x = 0.0,
                                     WallStyle style = {}, double goal_margin = 10.0) {
    if (!(exit_width > 0.0) || !(entry_width > exit_width))
        throw Error(ErrorKind::InvalidArgument, "funnel needs entry_width > exit_width > 0");
    if (!(length > 0.0)) throw Error(ErrorKind::InvalidArgument, "funnel needs length > 0");
    const double exit_x = entry_x + length;
    ScenarioFragment f;
    f.obstacles.push_back(Obstacle::wall({entry_x, entry_width / 2}, {exit_x, exit_width / 2}, style.strength,
                                         style.min_distance, style.spacing));
    f.obstacles.push_back(Obstacle::wall({entry_x, -entry_width / 2}, {exit_x, -exit_width / 2}, style.strength,
                                         style.min_distance, style.spacing));
    f.goal = {exit_x + goal_margin, 0.0};
    return f;
}

inline Scenario make_scenario(std::string name, const PrimaryPrimitives& prims, SimConfig sim,
                              const ScenarioFragment& fragment, Planner planner = Planner::Macro) {
    sim.goal = fragment.goal;
    Scenario s;
    s.name = std::move(name);
    s.primitives = prims;
    s.planner = planner;
    s.world_template = make_world(prims, sim, fragment.obstacles, planner);
    return s;
}

/// Reference tunnel: r = 1 pattern starting 6 units before a 1.2 wide,
/// 10 long tunnel.
inline Scenario default_tunnel_scenario(int n = 5, Planner planner = Planner::Macro) {
    PrimaryPrimitives prims{n, 1.0, 1.0, 0.0, {-6.0, 0.0}};
    return make_scenario("tunnel", prims, SimConfig{}, build_tunnel(1.2, 10.0, 0.0), planner);
}

/// Reference funnel: irregular (e = 1.25) pattern through a 4 -> 1.2 funnel.
inline Scenario default_funnel_scenario(int n = 5, Planner planner = Planner::Macro) {
    PrimaryPrimitives prims{n, 1.0, 1.25, 0.0, {-6.0, 0.0}};
    return make_scenario("funnel", prims, SimConfig{}, build_funnel(4.0, 1.2, 10.0), planner);
}

namespace detail {

inline Planner parse_planner(const std::string& s) {
    if (s == "macro") return Planner::Macro;
    if (s == "moebius") return Planner::Moebius;
    throw Error(ErrorKind::InvalidArgument, "unknown planner method '" + s + "'");
}

inline CircleToLineVariant parse_variant(const std::string& s) {
    if (s == "exact") return CircleToLineVariant::Exact;
    if (s == "paper-literal") return CircleToLineVariant::PaperLiteral;
    throw Error(ErrorKind::InvalidArgument, "unknown variant '" + s + "'");
}

/// Section headers in file order. read_ini drops empty sections, so they are scanned directly.
inline std::vector<std::string> section_names(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos || line[b] != '[') continue;
        const auto e = line.find(']', b);
        if (e == std::string::npos) continue;
        out.push_back(line.substr(b + 1, e - b - 1));
    }
    return out;
}

/// Value at path, or fallback when absent. Present but malformed values throw.
template <class T>
T get_or(const boost::property_tree::ptree& tree, const std::string& path, T fallback) {
    if (!tree.get_child_optional(path)) return fallback;
    return tree.get<T>(path);
}

} // namespace detail

/// Parses scenario text. Unset keys keep the defaults of the reference tunnel.
inline Scenario parse_scenario(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("scenario parse error: ") + e.what());
    }
    try {
        PrimaryPrimitives prims;
        prims.n = detail::get_or(tree, "primitives.n", 5);
        prims.r = detail::get_or(tree, "primitives.r", 1.0);
        prims.e = detail::get_or(tree, "primitives.e", 1.0);
        prims.phase = deg_to_rad(detail::get_or(tree, "primitives.phase_deg", 0.0));
        prims.centroid = {detail::get_or(tree, "primitives.centroid_x", -6.0),
                          detail::get_or(tree, "primitives.centroid_y", 0.0)};

        SimConfig sim;
        sim.dt = detail::get_or(tree, "sim.dt", sim.dt);
        sim.f_max = detail::get_or(tree, "sim.f_max", sim.f_max);
        sim.f_min = detail::get_or(tree, "sim.f_min", sim.f_min);
        sim.propulsion = detail::get_or(tree, "sim.propulsion", sim.propulsion);
        sim.agent_radius = detail::get_or(tree, "sim.agent_radius", sim.agent_radius);
        sim.max_speed = detail::get_or(tree, "sim.max_speed", sim.max_speed);
        sim.damping = detail::get_or(tree, "sim.damping", sim.damping);
        sim.slot_stiffness = detail::get_or(tree, "sim.slot_stiffness", sim.slot_stiffness);
        sim.agent_mass = detail::get_or(tree, "sim.agent_mass", sim.agent_mass);
        sim.centroid_mass = detail::get_or(tree, "sim.centroid_mass", sim.centroid_mass);
        sim.plan_speed = detail::get_or(tree, "sim.plan_speed", sim.plan_speed);

        const auto sections = detail::section_names(text);
        const bool has_tunnel = std::ranges::find(sections, "tunnel") != sections.end();
        const bool has_funnel = std::ranges::find(sections, "funnel") != sections.end();
        if (has_tunnel && has_funnel)
            throw Error(ErrorKind::InvalidArgument, "scenario may contain [tunnel] or [funnel], not both");

        const std::string name_default = has_funnel ? "funnel" : "tunnel";
        const auto wall = [&](const char* key, double fallback) {
            return detail::get_or(tree, name_default + "." + key, fallback);
        };
        const WallStyle style{wall("strength", -0.05), wall("min_distance", 0.1), wall("spacing", 0.5)};
        const ScenarioFragment fragment =
            has_funnel ? build_funnel(wall("entry_width", 4.0), wall("exit_width", 1.2), wall("length", 10.0),
                                      wall("entry_x", 0.0), style, wall("goal_margin", 10.0))
                       : build_tunnel(wall("width", 1.2), wall("length", 10.0), wall("entry_x", 0.0), style,
                                      wall("goal_margin", 10.0));
        const std::string name = detail::get_or(tree, "scenario.name", name_default);

        const Planner planner = detail::parse_planner(detail::get_or<std::string>(tree, "planner.method", "macro"));
        Scenario s = make_scenario(name, prims, sim, fragment, planner);
        s.max_ticks = detail::get_or(tree, "scenario.max_ticks", s.max_ticks);
        if (s.max_ticks < 1) throw Error(ErrorKind::InvalidArgument, "max_ticks must be >= 1");

        auto& w = s.world_template;
        w.macro.angle_offset = deg_to_rad(detail::get_or(tree, "planner.angle_deg", 15.0));
        w.macro.steps = detail::get_or(tree, "planner.steps", w.macro.steps);
        w.macro.correction_steps = detail::get_or(tree, "planner.correction_steps", w.macro.correction_steps);
        w.macro.inflate_x = detail::get_or(tree, "planner.inflate_x", w.macro.inflate_x);
        w.moebius.variant = detail::parse_variant(detail::get_or<std::string>(tree, "planner.variant", "exact"));
        w.moebius.stagger_ticks = detail::get_or(tree, "planner.stagger_ticks", w.moebius.stagger_ticks);
        w.moebius.line_offset = detail::get_or(tree, "planner.line_offset", w.moebius.line_offset);
        return s;
    } catch (const pt::ptree_bad_data& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("bad value in scenario: ") + e.what());
    }
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open scenario '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

} // namespace swarmform::harness
