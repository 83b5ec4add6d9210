#pragma once

// Shared helpers for the unit tests: a seeded generator and small pattern
// builders. Every property test draws from a fixed seed so failures replay.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "swarmform/pattern_model.hpp"

namespace swarmform::test {

inline constexpr double kPi = std::numbers::pi;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Point2 point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }

    /// Random scattered pattern with n agents whose points are well separated.
    PatternState scattered(int n, double extent = 5.0) {
        std::vector<Point2> pts;
        while (static_cast<int>(pts.size()) < n) {
            const Point2 c = point(-extent, extent);
            bool ok = true;
            for (const auto& p : pts) ok = ok && linear_distance(p, c) > 0.5;
            if (ok) pts.push_back(c);
        }
        return PatternState::from_positions(pts);
    }

private:
    std::mt19937_64 rng_;
};

inline PatternState square(double side_half_diag = 1.0, Point2 centroid = {}) {
    return formation_positions(PrimaryPrimitives{4, side_half_diag, 1.0, 0.0, centroid});
}

/// Applies x -> R(angle)(x - pivot) + pivot + shift to every agent.
inline PatternState rigid(const PatternState& p, double angle, Point2 pivot, Point2 shift = {}) {
    std::vector<Point2> pts;
    for (const auto& a : p.agents) pts.push_back(rotate(a.position - pivot, angle) + pivot + shift);
    return PatternState::from_positions(pts);
}

inline PatternState scaled(const PatternState& p, double s) {
    std::vector<Point2> pts;
    for (const auto& a : p.agents) pts.push_back(p.centroid + (a.position - p.centroid) * s);
    return PatternState::from_positions(pts);
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

} // namespace swarmform::test
