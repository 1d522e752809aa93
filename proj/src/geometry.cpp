#include "mtvrp/geometry.hpp"

#include <algorithm>

namespace mtvrp {

std::optional<TimeInterval> reach_time_bounds(const SpaceTimePoint& origin, const LinearArc& arc,
                                              double v_max) {
    const double lo = std::max(arc.start_time, origin.time);
    if (lo > arc.end_time) return std::nullopt;

    // Relative position of the target at the origin time (extrapolated), then
    // solve |w + v s|^2 <= v_max^2 s^2 for s = t - origin.time >= 0. With the
    // target no faster than the agent the feasible set is [s*, inf).
    const Vec2 w = arc.position(origin.time) - origin.position;
    const Vec2 v = arc.velocity;
    const double a = std::min(dot(v, v) - v_max * v_max, 0.0);
    const double b = dot(w, v);
    const double c = dot(w, w);

    double s_star;
    if (c == 0.0) {
        s_star = 0.0;
    } else if (b < 0.0) {
        // Avoids cancellation in (b + sqrt(D)) / -a; also covers a -> 0.
        const double disc = b * b - a * c;
        s_star = c / (std::sqrt(disc) - b);
    } else if (a < 0.0) {
        const double disc = b * b - a * c;
        s_star = (b + std::sqrt(disc)) / -a;
    } else {
        return std::nullopt;  // target recedes at exactly v_max
    }

    const double t_lo = std::max(lo, origin.time + s_star);
    if (!(t_lo <= arc.end_time)) return std::nullopt;
    return TimeInterval{t_lo, arc.end_time};
}

double earliest_arrival(const SpaceTimePoint& origin, const LinearArc& arc, double v_max) {
    const auto r = reach_time_bounds(origin, arc, v_max);
    return r ? r->lo : kInf;
}

double latest_departure(const LinearArc& from, const LinearArc& to, double v_max) {
    auto feasible = [&](double t) {
        return earliest_arrival({from.position(t), t}, to, v_max) < kInf;
    };
    if (!feasible(from.start_time)) return -kInf;
    if (feasible(from.end_time)) return from.end_time;
    double lo = from.start_time;
    double hi = from.end_time;
    while (hi - lo > kLatestDepartureTol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

double latest_departure_closed_form(const LinearArc& from, const LinearArc& to, double v_max) {
    // In reversed time u = -t the question becomes an earliest arrival from the
    // end point of `to` onto the reversed `from` arc.
    const SpaceTimePoint origin{to.position(to.end_time), -to.end_time};
    const LinearArc reversed{-from.end_time, -from.start_time, from.position(from.end_time),
                             -1.0 * from.velocity};
    const auto r = reach_time_bounds(origin, reversed, v_max);
    if (!r) return -kInf;
    return -r->lo;
}

double straight_line_cost(const SpaceTimePoint& a, const SpaceTimePoint& b, double v_max) {
    if (b.time < a.time) return kInf;
    const double d = norm(b.position - a.position);
    return d <= v_max * (b.time - a.time) ? d : kInf;
}

}  // namespace mtvrp
