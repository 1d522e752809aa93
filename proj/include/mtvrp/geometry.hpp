#pragma once

// Kinematic kernels for intercepting linearly moving points with a
// speed-limited agent. Everything here is a pure function.

#include <cmath>
#include <limits>
#include <optional>

namespace mtvrp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct SpaceTimePoint {
    Vec2 position;
    double time = 0.0;
};

/// Constant-velocity motion over a closed time interval.
struct LinearArc {
    double start_time = 0.0;
    double end_time = 0.0;
    Vec2 start_position;
    Vec2 velocity;

    Vec2 position(double t) const { return start_position + (t - start_time) * velocity; }
    double speed() const { return norm(velocity); }
    /// The same motion restricted to [t0, t1]; bounds are not clamped.
    LinearArc restricted(double t0, double t1) const {
        return {t0, t1, position(t0), velocity};
    }
};

struct TimeInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Times t in [max(arc.start, origin.time), arc.end] at which an agent leaving
/// `origin` can be at arc.position(t) without exceeding v_max. The set is
/// either empty or a closed interval.
std::optional<TimeInterval> reach_time_bounds(const SpaceTimePoint& origin, const LinearArc& arc,
                                              double v_max);

/// Earliest interception time of `arc` from `origin`; +inf when unreachable.
/// Waiting is allowed, so a reachable arc is never intercepted before its start.
double earliest_arrival(const SpaceTimePoint& origin, const LinearArc& arc, double v_max);

/// Latest time t on `from` such that `to` can still be intercepted after
/// leaving from.position(t) at t. Bisection to 1e-9 on the reachability
/// predicate; -inf when no departure time works.
double latest_departure(const LinearArc& from, const LinearArc& to, double v_max);

/// Same quantity computed in closed form by reversing time: a departure at t is
/// feasible iff the end point of `to` is reachable from (from(t), t).
double latest_departure_closed_form(const LinearArc& from, const LinearArc& to, double v_max);

/// Straight-line travel distance from a to b, or +inf when the move would
/// need to go backwards in time or exceed v_max.
double straight_line_cost(const SpaceTimePoint& a, const SpaceTimePoint& b, double v_max);

inline constexpr double kLatestDepartureTol = 1e-9;

}  // namespace mtvrp
