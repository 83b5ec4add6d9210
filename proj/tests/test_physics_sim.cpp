#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "swarmform/harness/scenario.hpp"
#include "swarmform/physics_sim.hpp"
#include "swarmform/transform_classifier.hpp"

using namespace swarmform;
using namespace swarmform::harness;

namespace {

World open_world(SimConfig cfg, Point2 centroid = {}) {
    return make_world(PrimaryPrimitives{4, 1.0, 1.0, 0.3, centroid}, cfg, {});
}

ForceSource emitter(Point2 at, double strength) { return {at, strength, 0.1}; }

Obstacle single(Point2 at, double strength) { return {at, at, {emitter(at, strength)}}; }

bool legal(Mode from, Mode to) { return next_mode(from) == to; }

} // namespace

TEST(ForceSource, InverseSquareWithClamp) {
    const ForceSource f = emitter({0, 0}, -2.0);
    const Point2 at2 = f.force_at({2, 0});
    EXPECT_NEAR(at2.x, 0.5, 1e-15);
    EXPECT_NEAR(at2.y, 0.0, 1e-15);
    // inside min_distance the magnitude saturates at |strength| / min_distance^2
    EXPECT_NEAR(norm(f.force_at({0.05, 0})), 2.0 / 0.01, 1e-9);
    EXPECT_NEAR(f.magnitude_at({0.05, 0}), 2.0 / 0.01, 1e-9);
    EXPECT_EQ(norm(f.force_at({0, 0})), 0.0);
    const ForceSource pull = emitter({0, 0}, 1.0);
    EXPECT_LT(pull.force_at({1, 0}).x, 0.0);
}

TEST(Obstacle, WallEmittersEvenlySpacedAndRepulsive) {
    const auto w = Obstacle::wall({0, 1}, {10, 1}, -0.05, 0.1, 0.5);
    ASSERT_EQ(w.emitters.size(), 21u);
    for (std::size_t k = 0; k < w.emitters.size(); ++k) {
        EXPECT_NEAR(w.emitters[k].anchor.x, 0.5 * k, 1e-12);
        EXPECT_LT(w.emitters[k].strength, 0.0);
    }
    EXPECT_THROW(Obstacle::wall({0, 0}, {1, 0}, 0.05, 0.1), Error);
    EXPECT_THROW(Obstacle::wall({0, 0}, {1, 0}, -0.05, 0.0), Error);
}

TEST(SimConfig, Validation) {
    SimConfig c;
    EXPECT_NO_THROW(c.validate());
    c.f_min = c.f_max;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.dt = 0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.damping = 1.5;
    EXPECT_THROW(c.validate(), Error);
}

TEST(NetCentroidForce, Examples) {
    SimConfig cfg;
    cfg.propulsion = 0.0;
    World w = open_world(cfg);
    EXPECT_EQ(net_centroid_force(w).x, 0.0);
    EXPECT_EQ(net_centroid_force(w).y, 0.0);

    const double S = 0.3, d = 1.5;
    w.obstacles = {single({-d, 0}, -S)};
    EXPECT_NEAR(net_centroid_force(w).x, S / (d * d), 1e-15);
    EXPECT_NEAR(net_centroid_force(w).y, 0.0, 1e-15);

    w.obstacles = {single({-d, 0}, -S), single({d, 0}, -S)};
    EXPECT_NEAR(net_centroid_force(w).x, 0.0, 1e-15);
    EXPECT_NEAR(net_centroid_force(w).y, 0.0, 1e-15);
    // the load counts both emitters even though the vector cancels
    EXPECT_NEAR(obstacle_load(w), 2 * S / (d * d), 1e-15);
}

TEST(NetCentroidForce, PropulsionPointsAtGoal) {
    SimConfig cfg;
    cfg.propulsion = 2.0;
    cfg.goal = {3, 4};
    const World w = open_world(cfg);
    EXPECT_NEAR(net_centroid_force(w).x, 1.2, 1e-15);
    EXPECT_NEAR(net_centroid_force(w).y, 1.6, 1e-15);
}

TEST(Step, ZeroForceKeepsPosition) {
    SimConfig cfg;
    cfg.propulsion = 0.0;
    const World w = open_world(cfg, {1, 2});
    const World s = step(w);
    EXPECT_EQ(s.tick, 1);
    EXPECT_EQ(s.centroid_particle.position.x, 1.0);
    EXPECT_EQ(s.centroid_particle.position.y, 2.0);
    for (std::size_t i = 0; i < w.particles.size(); ++i) {
        EXPECT_NEAR(s.particles[i].position.x, w.particles[i].position.x, 1e-15);
        EXPECT_NEAR(s.particles[i].position.y, w.particles[i].position.y, 1e-15);
        EXPECT_DOUBLE_EQ(s.particles[i].age, cfg.dt);
    }
    EXPECT_DOUBLE_EQ(s.centroid_particle.age, cfg.dt);
}

TEST(Step, ConstantForceFromRest) {
    SimConfig cfg;
    cfg.propulsion = 0.4;
    cfg.goal = {100, 0};
    cfg.centroid_mass = 2.0;
    const World s = step(open_world(cfg));
    EXPECT_NEAR(s.centroid_particle.velocity.x, (0.4 / 2.0) * cfg.dt * (1 - cfg.damping), 1e-15);
    EXPECT_NEAR(s.centroid_particle.position.x, s.centroid_particle.velocity.x * cfg.dt, 1e-15);
}

TEST(Step, SpeedClamp) {
    SimConfig cfg;
    cfg.propulsion = 1e4;
    cfg.goal = {100, 0};
    cfg.max_speed = 0.7;
    const World s = step(open_world(cfg));
    EXPECT_NEAR(norm(s.centroid_particle.velocity), 0.7, 1e-12);
}

TEST(Step, Deterministic) {
    World a = default_tunnel_scenario().world_template;
    World b = a;
    for (int k = 0; k < 200; ++k) {
        a = step(update_mode(std::move(a)));
        b = step(update_mode(std::move(b)));
    }
    for (std::size_t i = 0; i < a.particles.size(); ++i) {
        EXPECT_EQ(a.particles[i].position.x, b.particles[i].position.x);
        EXPECT_EQ(a.particles[i].velocity.y, b.particles[i].velocity.y);
    }
}

TEST(Step, DivergenceNamesTick) {
    SimConfig cfg;
    cfg.propulsion = 1e308;
    cfg.centroid_mass = 1e-300;
    cfg.max_speed = std::numeric_limits<double>::infinity();
    cfg.goal = {10, 0};
    World w = open_world(cfg);
    try {
        run(w, 10);
        FAIL();
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NumericDivergence);
        EXPECT_EQ(e.tick(), 1);
    }
}

TEST(UpdateMode, ThresholdIsStrict) {
    SimConfig cfg;
    cfg.f_max = 0.1;
    cfg.f_min = 0.05;
    World w = open_world(cfg);
    // load = S / d^2 = 0.4 / 4 = 0.1 exactly
    w.obstacles = {single({-2, 0}, -0.4)};
    EXPECT_EQ(obstacle_load(w), 0.1);
    EXPECT_EQ(update_mode(w, Planner::Macro).mode, Mode::Normal);

    w.obstacles = {single({-2, 0}, -0.41)};
    const World t = update_mode(w, Planner::Macro);
    EXPECT_EQ(t.mode, Mode::Flattening);
    ASSERT_TRUE(std::holds_alternative<MacroPlan>(t.active_plan));
    EXPECT_FALSE(std::get<MacroPlan>(t.active_plan).keyframes.empty());
    ASSERT_EQ(t.transitions.size(), 1u);
    EXPECT_EQ(t.transitions[0].from, Mode::Normal);

    const World m = update_mode(w, Planner::Moebius);
    ASSERT_TRUE(std::holds_alternative<WaypointPlan>(m.active_plan));
    EXPECT_FALSE(std::get<WaypointPlan>(m.active_plan).per_agent.empty());
}

TEST(UpdateMode, FlattenedRestoresBelowMinimum) {
    SimConfig cfg;
    World w = open_world(cfg);
    w.obstacles = {single({-2, 0}, -1.0)};
    w = update_mode(w, Planner::Macro);
    ASSERT_EQ(w.mode, Mode::Flattening);
    while (w.mode == Mode::Flattening) w = update_mode(step(std::move(w)), Planner::Macro);
    ASSERT_EQ(w.mode, Mode::Flattened);
    // still loaded: stays flat
    EXPECT_EQ(update_mode(w, Planner::Macro).mode, Mode::Flattened);
    w.obstacles.clear();
    const World r = update_mode(w, Planner::Macro);
    EXPECT_EQ(r.mode, Mode::Restoring);
    EXPECT_TRUE(std::get<MacroPlan>(r.active_plan).inverse);
}

TEST(Run, GoalAtStartEndsAfterOneTick) {
    SimConfig cfg;
    cfg.goal = {2, 3};
    World w = open_world(cfg, {2, 3});
    const auto trace = run(w, 100);
    EXPECT_EQ(w.tick, 1);
    EXPECT_EQ(trace.size(), w.particles.size());
    EXPECT_THROW(run(w, 0), Error);
}

TEST(Run, TraceRowsContiguous) {
    World w = default_tunnel_scenario().world_template;
    const auto trace = run(w, 300);
    ASSERT_EQ(trace.size(), 300u * 5u);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        EXPECT_EQ(trace[k].tick, static_cast<long>(k / 5));
        EXPECT_EQ(trace[k].agent_id, static_cast<int>(k % 5));
        EXPECT_DOUBLE_EQ(trace[k].sim_time, static_cast<double>(k / 5) * 0.01);
    }
}

class TunnelRun : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        scenario_ = new Scenario(default_tunnel_scenario(5));
        world_ = new World(scenario_->world_template);
        trace_ = new std::vector<TraceRecord>(run(*world_, scenario_->max_ticks));
    }
    static void TearDownTestSuite() {
        delete trace_;
        delete world_;
        delete scenario_;
    }
    static Scenario* scenario_;
    static World* world_;
    static std::vector<TraceRecord>* trace_;
};

Scenario* TunnelRun::scenario_ = nullptr;
World* TunnelRun::world_ = nullptr;
std::vector<TraceRecord>* TunnelRun::trace_ = nullptr;

TEST_F(TunnelRun, FullModeCycle) {
    const auto& tr = world_->transitions;
    ASSERT_EQ(tr.size(), 4u);
    EXPECT_EQ(tr[0].from, Mode::Normal);
    EXPECT_EQ(tr[1].to, Mode::Flattened);
    EXPECT_EQ(tr[2].to, Mode::Restoring);
    EXPECT_EQ(tr[3].to, Mode::Normal);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        EXPECT_TRUE(legal(tr[k].from, tr[k].to));
        if (k > 0) {
            EXPECT_GT(tr[k].tick, tr[k - 1].tick);
        }
    }
}

TEST_F(TunnelRun, RegressionLockedTransitions) {
    const auto& tr = world_->transitions;
    ASSERT_EQ(tr.size(), 4u);
    EXPECT_EQ(tr[0].tick, 926);
    EXPECT_EQ(tr[1].tick, 1204);
    EXPECT_EQ(tr[2].tick, 4074);
    EXPECT_EQ(tr[3].tick, 4352);
    EXPECT_EQ(world_->tick, 5391);
}

TEST_F(TunnelRun, CentroidPassesExitAndShapeRestores) {
    const double exit_x = 10.0;
    EXPECT_GT(world_->centroid_particle.position.x, exit_x);
    EXPECT_GT(agent_pattern(*world_).centroid.x, exit_x);
    EXPECT_TRUE(congruent(formation_positions(scenario_->primitives), agent_pattern(*world_), 1e-3));
}

TEST_F(TunnelRun, ModesInTraceFollowTheMachine) {
    std::string prev = "Normal";
    for (const auto& r : *trace_) {
        if (r.mode != prev) {
            const auto from = prev == "Normal" ? Mode::Normal
                              : prev == "Flattening" ? Mode::Flattening
                              : prev == "Flattened" ? Mode::Flattened
                                                    : Mode::Restoring;
            EXPECT_EQ(std::string(to_string(next_mode(from))), r.mode);
            prev = r.mode;
        }
    }
}

TEST_F(TunnelRun, SpeedNeverExceedsClamp) {
    for (const auto& r : *trace_) EXPECT_LE(std::hypot(r.vx, r.vy), world_->config.max_speed * (1 + 1e-12));
}

TEST_F(TunnelRun, SymmetricTunnelKeepsCentroidOnAxis) {
    double worst = 0.0;
    std::vector<double> ysum;
    for (const auto& r : *trace_) {
        if (static_cast<std::size_t>(r.tick) >= ysum.size()) ysum.resize(r.tick + 1, 0.0);
        ysum[r.tick] += r.y;
    }
    for (double s : ysum) worst = std::max(worst, std::abs(s / 5.0));
    EXPECT_LE(worst, 1e-6);
    EXPECT_LE(std::abs(world_->centroid_particle.position.y), 1e-6);
}

TEST(TunnelScenario, WideWeakTunnelNeverTransforms) {
    WallStyle weak;
    weak.strength = -0.002;
    auto s = make_scenario("wide", PrimaryPrimitives{5, 1, 1, 0, {-6, 0}}, SimConfig{}, build_tunnel(8.0, 10.0, 0.0, weak));
    World w = s.world_template;
    const auto trace = run(w, s.max_ticks);
    EXPECT_TRUE(w.transitions.empty());
    for (const auto& r : trace) EXPECT_EQ(r.mode, "Normal");
    EXPECT_GT(w.centroid_particle.position.x, 10.0);
}

TEST(TunnelScenario, NarrowTunnelTriggersFlattening) {
    World w = default_tunnel_scenario(5).world_template;
    run(w, 2000);
    ASSERT_FALSE(w.transitions.empty());
    EXPECT_EQ(w.transitions[0].to, Mode::Flattening);
}

TEST(TunnelScenario, RunsAreIdentical) {
    World a = default_tunnel_scenario(5, Planner::Moebius).world_template;
    World b = a;
    EXPECT_EQ(run(a, 3000), run(b, 3000));
}

TEST(FunnelScenario, PatternDeflatesInTransit) {
    const auto s = default_funnel_scenario(5);
    World w = s.world_template;
    const auto trace = run(w, s.max_ticks);
    // ratio of the y-extent to the x-extent, relative to the start
    auto ratio_at = [&](std::size_t first) {
        double lx = 1e300, hx = -1e300, ly = 1e300, hy = -1e300;
        for (std::size_t k = first; k < first + 5; ++k) {
            lx = std::min(lx, trace[k].x);
            hx = std::max(hx, trace[k].x);
            ly = std::min(ly, trace[k].y);
            hy = std::max(hy, trace[k].y);
        }
        return (hy - ly) / (hx - lx);
    };
    const double r0 = ratio_at(0);
    double lowest = 1.0;
    for (std::size_t k = 0; k < trace.size(); k += 5) lowest = std::min(lowest, ratio_at(k) / r0);
    EXPECT_LT(lowest, 0.5);
    // the pattern is fully collinear while inside the funnel
    EXPECT_NEAR(lowest, 0.0, 1e-9);
    EXPECT_EQ(w.transitions.size(), 4u);
}
