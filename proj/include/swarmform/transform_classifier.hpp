#pragma once

// Transformation taxonomy. Two patterns share their geometric relationships
// when one maps onto the other by a proper rigid motion (rotation plus
// translation); scaling and reflection both count as a change of geometry.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

#include "swarmform/error.hpp"
#include "swarmform/pattern_model.hpp"

namespace swarmform {

struct GeometricSignature {
    std::vector<double> sorted_pairwise_distances;
    std::vector<Point2> canonical_coordinates;
};

enum class TransformationCase { Case1, Case2, Case3, Case4 };

constexpr std::string_view to_string(TransformationCase c) {
    switch (c) {
    case TransformationCase::Case1: return "Case1";
    case TransformationCase::Case2: return "Case2";
    case TransformationCase::Case3: return "Case3";
    case TransformationCase::Case4: return "Case4";
    }
    return "?";
}

/// Cases 1 and 2 keep the geometry.
constexpr bool is_elementary(TransformationCase c) {
    return c == TransformationCase::Case1 || c == TransformationCase::Case2;
}

struct TransformRecord {
    PatternState before;
    PatternState after;
    TransformationCase kind = TransformationCase::Case2;
    std::vector<double> per_agent_displacement;
};

namespace detail {

inline std::vector<double> sorted_pairwise(const PatternState& p) {
    std::vector<double> d;
    d.reserve(p.size() * (p.size() - 1) / 2);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            d.push_back(linear_distance(p.agents[i].position, p.agents[j].position));
    std::ranges::sort(d);
    return d;
}

inline std::vector<Point2> centered(const PatternState& p) {
    std::vector<Point2> out;
    out.reserve(p.size());
    for (const auto& a : p.agents) out.push_back(a.position - p.centroid);
    return out;
}

inline double max_norm(const std::vector<Point2>& pts) {
    double m = 0.0;
    for (const auto& v : pts) m = std::max(m, norm(v));
    return m;
}

inline void require_same_count(const PatternState& p, const PatternState& q) {
    if (p.size() != q.size())
        throw Error(ErrorKind::InvalidArgument, "patterns have different agent counts");
}

inline void require_same_labels(const PatternState& p, const PatternState& q) {
    require_same_count(p, q);
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p.agents[i].id != q.agents[i].id)
            throw Error(ErrorKind::InvalidArgument, "agent ids do not match");
}

// Greedy nearest assignment of the rotated points of `a` onto `b`, followed
// by the closed-form 2D Procrustes rotation on that correspondence. Returns
// the max residual.
inline double align_residual(const std::vector<Point2>& a, const std::vector<Point2>& b, double angle) {
    const std::size_t n = a.size();
    std::vector<std::size_t> match(n);
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 ra = rotate(a[i], angle);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j]) continue;
            const double d = norm(ra - b[j]);
            if (d < best) { best = d; best_j = j; }
        }
        used[best_j] = true;
        match[i] = best_j;
    }
    double sc = 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sc += dot(a[i], b[match[i]]);
        ss += cross(a[i], b[match[i]]);
    }
    const double refined = std::atan2(ss, sc);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        residual = std::max(residual, norm(rotate(a[i], refined) - b[match[i]]));
    return residual;
}

} // namespace detail

inline GeometricSignature signature(const PatternState& p) {
    if (p.size() < 3) throw Error(ErrorKind::InvalidArgument, "signature needs >= 3 agents");
    auto pts = detail::centered(p);
    const double scale = detail::max_norm(pts);
    if (!(scale > 1e-12 * (1.0 + norm(p.centroid))))
        throw Error(ErrorKind::DegenerateInput, "all agents coincide");
    // Agent 0 defines the reference direction unless it sits on the centroid.
    auto ref = std::ranges::find_if(pts, [&](Point2 v) { return norm(v) > 1e-12 * scale; });
    const double angle = -std::atan2(ref->y, ref->x);
    for (auto& v : pts) v = rotate(v, angle);
    return {detail::sorted_pairwise(p), std::move(pts)};
}

inline bool congruent(const PatternState& p, const PatternState& q, double tol) {
    detail::require_same_count(p, q);
    if (p.size() == 0) return true;

    const auto dp = detail::sorted_pairwise(p);
    const auto dq = detail::sorted_pairwise(q);
    for (std::size_t k = 0; k < dp.size(); ++k)
        if (std::abs(dp[k] - dq[k]) > 2.0 * tol) return false;

    const auto a = detail::centered(p);
    const auto b = detail::centered(q);
    const double ra = detail::max_norm(a);
    if (ra <= tol) return detail::max_norm(b) <= tol;

    const auto anchor = *std::ranges::max_element(a, {}, [](Point2 v) { return norm(v); });
    const double anchor_angle = std::atan2(anchor.y, anchor.x);
    for (const auto& cand : b) {
        if (std::abs(norm(cand) - ra) > 2.0 * tol) continue;
        const double angle = std::atan2(cand.y, cand.x) - anchor_angle;
        if (detail::align_residual(a, b, angle) <= tol) return true;
    }
    return false;
}

inline TransformRecord classify(const PatternState& before, const PatternState& after, double tol) {
    detail::require_same_labels(before, after);
    TransformRecord rec{before, after, TransformationCase::Case2, {}};
    bool all_moved = true;
    for (std::size_t i = 0; i < before.size(); ++i) {
        const double d = linear_distance(before.agents[i].position, after.agents[i].position);
        rec.per_agent_displacement.push_back(d);
        if (!(d > tol)) all_moved = false;
    }
    if (congruent(before, after, tol))
        rec.kind = all_moved ? TransformationCase::Case1 : TransformationCase::Case2;
    else
        rec.kind = all_moved ? TransformationCase::Case3 : TransformationCase::Case4;
    return rec;
}

/// True when every labelled agent came back to within tol of where it started.
inline bool verify_inverse(const PatternState& before, const PatternState& after_roundtrip, double tol) {
    detail::require_same_labels(before, after_roundtrip);
    for (std::size_t i = 0; i < before.size(); ++i)
        if (linear_distance(before.agents[i].position, after_roundtrip.agents[i].position) > tol)
            return false;
    return true;
}

} // namespace swarmform
