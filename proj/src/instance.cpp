#include "mtvrp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace mtvrp {

using nlohmann::json;

double Instance::depot_horizon() const {
    double horizon = 0.0;
    for (const auto& tgt : targets) {
        for (const auto& w : tgt.windows) {
            const double d = std::max(norm(w.position(w.start_time) - depot),
                                      norm(w.position(w.end_time) - depot));
            horizon = std::max(horizon, w.end_time + d / v_max);
        }
    }
    return horizon + 1.0;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw InstanceError(path + ": " + what);
}

bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

}  // namespace

void validate(const Instance& inst) {
    if (inst.n_agents < 1) fail("n_agents", "must be >= 1");
    if (!(inst.v_max > 0.0) || !std::isfinite(inst.v_max)) fail("v_max", "must be finite and > 0");
    if (!(inst.capacity >= 0.0) || !std::isfinite(inst.capacity))
        fail("capacity", "must be finite and >= 0");
    if (!finite(inst.depot)) fail("depot", "must be finite");
    for (std::size_t i = 0; i < inst.targets.size(); ++i) {
        const auto& tgt = inst.targets[i];
        const std::string path = "targets[" + std::to_string(i) + "]";
        if (tgt.id != static_cast<int>(i) + 1)
            fail(path + ".id", "expected " + std::to_string(i + 1));
        if (!(tgt.demand >= 0.0) || !std::isfinite(tgt.demand))
            fail(path + ".demand", "must be finite and >= 0");
        if (tgt.demand > inst.capacity) fail(path + ".demand", "exceeds capacity");
        if (tgt.windows.empty()) fail(path + ".windows", "at least one window required");
        for (std::size_t j = 0; j < tgt.windows.size(); ++j) {
            const auto& w = tgt.windows[j];
            const std::string wp = path + ".windows[" + std::to_string(j) + "]";
            if (!std::isfinite(w.start_time) || !std::isfinite(w.end_time))
                fail(wp, "times must be finite");
            if (w.start_time < 0.0) fail(wp + ".t0", "must be >= 0");
            if (w.start_time > w.end_time) fail(wp, "t0 > t1");
            if (!finite(w.start_position)) fail(wp + ".p0", "must be finite");
            if (!finite(w.velocity)) fail(wp + ".vel", "must be finite");
            if (w.speed() > inst.v_max * (1.0 + 1e-12)) fail(wp + ".vel", "speed exceeds v_max");
            if (j > 0 && !(w.start_time > tgt.windows[j - 1].end_time))
                fail(wp, "windows must be sorted and pairwise disjoint");
        }
    }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void dump_to(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_to(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_to(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
            } else {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out += buf;
            }
            break;
        }
        default:
            out += j.dump();
    }
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

double get_number(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing");
    const auto& v = j.at(key);
    if (!v.is_number()) fail(path + "." + key, "must be a number");
    return v.get<double>();
}

int get_int(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing");
    const auto& v = j.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "must be an integer");
    return v.get<int>();
}

Vec2 get_vec(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing");
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(path + "." + key, "must be [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

const json& get_array(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing");
    const auto& v = j.at(key);
    if (!v.is_array()) fail(path + "." + key, "must be an array");
    return v;
}

std::string strip_root(const std::string& path) {
    return path.rfind("$.", 0) == 0 ? path.substr(2) : path;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InstanceError(path.string() + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InstanceError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InstanceError(path.string() + ": cannot open file for writing");
    out << text << '\n';
}

}  // namespace

std::string dump_canonical(const json& j) {
    std::string out;
    dump_to(j, out);
    return out;
}

json to_json(const Instance& inst) {
    json targets = json::array();
    for (const auto& tgt : inst.targets) {
        json windows = json::array();
        for (const auto& w : tgt.windows) {
            windows.push_back({{"t0", w.start_time},
                               {"t1", w.end_time},
                               {"p0", vec_json(w.start_position)},
                               {"vel", vec_json(w.velocity)}});
        }
        targets.push_back({{"id", tgt.id}, {"demand", tgt.demand}, {"windows", windows}});
    }
    return {{"v_max", inst.v_max},
            {"capacity", inst.capacity},
            {"n_agents", inst.n_agents},
            {"depot", vec_json(inst.depot)},
            {"targets", targets}};
}

Instance instance_from_json(const json& j) {
    if (!j.is_object()) throw InstanceError("$: instance must be an object");
    Instance inst;
    inst.v_max = get_number(j, "v_max", "$");
    inst.capacity = get_number(j, "capacity", "$");
    inst.n_agents = get_int(j, "n_agents", "$");
    inst.depot = get_vec(j, "depot", "$");
    const auto& targets = get_array(j, "targets", "$");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const std::string path = "$.targets[" + std::to_string(i) + "]";
        Target tgt;
        tgt.id = get_int(targets[i], "id", path);
        tgt.demand = get_number(targets[i], "demand", path);
        const auto& windows = get_array(targets[i], "windows", path);
        for (std::size_t k = 0; k < windows.size(); ++k) {
            const std::string wp = path + ".windows[" + std::to_string(k) + "]";
            LinearArc w;
            w.start_time = get_number(windows[k], "t0", wp);
            w.end_time = get_number(windows[k], "t1", wp);
            w.start_position = get_vec(windows[k], "p0", wp);
            w.velocity = get_vec(windows[k], "vel", wp);
            tgt.windows.push_back(w);
        }
        inst.targets.push_back(std::move(tgt));
    }
    try {
        validate(inst);
    } catch (const InstanceError& e) {
        throw InstanceError(strip_root(e.what()));
    }
    return inst;
}

Instance load_instance(const std::filesystem::path& path) {
    return instance_from_json(read_json_file(path));
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
    write_text_file(path, dump_canonical(to_json(inst)));
}

json to_json(const Solution& sol) {
    json tours = json::array();
    for (const auto& tour : sol.tours) {
        json seq = json::array();
        for (const auto& v : tour.sequence) {
            seq.push_back({{"target", v.target},
                           {"window", v.window},
                           {"time", v.time},
                           {"position", vec_json(v.position)}});
        }
        tours.push_back({{"sequence", seq}, {"load", tour.load}});
    }
    return {{"cost", sol.cost}, {"tours", tours}};
}

Solution solution_from_json(const json& j) {
    Solution sol;
    sol.cost = get_number(j, "cost", "solution");
    const auto& tours = get_array(j, "tours", "solution");
    for (std::size_t i = 0; i < tours.size(); ++i) {
        const std::string path = "solution.tours[" + std::to_string(i) + "]";
        SolutionTour tour;
        tour.load = get_number(tours[i], "load", path);
        const auto& seq = get_array(tours[i], "sequence", path);
        for (std::size_t k = 0; k < seq.size(); ++k) {
            const std::string vp = path + ".sequence[" + std::to_string(k) + "]";
            tour.sequence.push_back({get_int(seq[k], "target", vp), get_int(seq[k], "window", vp),
                                     get_number(seq[k], "time", vp),
                                     get_vec(seq[k], "position", vp)});
        }
        sol.tours.push_back(std::move(tour));
    }
    return sol;
}

Solution load_solution(const std::filesystem::path& path) {
    return solution_from_json(read_json_file(path));
}

void save_solution(const Solution& sol, const std::filesystem::path& path) {
    write_text_file(path, dump_canonical(to_json(sol)));
}

std::uint64_t instance_hash(const Instance& inst) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump_canonical(to_json(inst))) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Generator

Instance generate(const GeneratorParams& p) {
    if (p.n_targets < 0 || p.n_agents < 1 || p.windows_per_target < 1 ||
        !(p.total_window_len > 0.0) || !(p.arena_size > 0.0) || !(p.v_max > 0.0))
        throw InstanceError("generator: parameters must be positive");

    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Instance inst;
    inst.n_agents = p.n_agents;
    inst.v_max = p.v_max;
    inst.capacity = p.capacity >= 0.0
                        ? p.capacity
                        : std::ceil(static_cast<double>(p.n_targets) / p.n_agents) * p.demand;
    inst.depot = {0.5 * p.arena_size, 0.5 * p.arena_size};

    // Window starts are spread over a horizon long enough to cross the arena twice.
    const double start_horizon = 2.0 * p.arena_size / p.v_max;
    const int n_win = p.windows_per_target;

    for (int id = 1; id <= p.n_targets; ++id) {
        for (;;) {
            std::vector<double> len(n_win);
            double sum = 0.0;
            for (auto& l : len) sum += (l = 0.5 + unit(rng));
            for (auto& l : len) l *= p.total_window_len / sum;

            // Sorted offsets plus the cumulative lengths of earlier windows
            // give sorted, disjoint windows.
            std::vector<double> offsets(n_win);
            for (auto& o : offsets) o = unit(rng) * start_horizon;
            std::sort(offsets.begin(), offsets.end());

            Target tgt{id, p.demand, {}};
            Vec2 pos{unit(rng) * p.arena_size, unit(rng) * p.arena_size};
            double consumed = 0.0;
            double prev_end = 0.0;
            Vec2 prev_vel{};
            bool reachable = true;
            for (int j = 0; j < n_win; ++j) {
                const double t0 = offsets[j] + consumed + (j > 0 ? 1e-3 * j : 0.0);
                const double t1 = t0 + len[j];
                consumed += len[j];
                if (j > 0) pos = pos + (t0 - prev_end) * prev_vel;
                const double speed = unit(rng) * 0.5 * p.v_max;
                const double heading = unit(rng) * 2.0 * std::numbers::pi;
                const Vec2 vel{speed * std::cos(heading), speed * std::sin(heading)};
                tgt.windows.push_back({t0, t1, pos, vel});
                if (norm(pos - inst.depot) > p.v_max * t0) reachable = false;
                pos = pos + len[j] * vel;
                prev_end = t1;
                prev_vel = vel;
            }
            if (reachable) {
                inst.targets.push_back(std::move(tgt));
                break;
            }
        }
    }
    validate(inst);
    return inst;
}

// ---------------------------------------------------------------------------
// Verification

VerifyReport verify(const Instance& inst, const Solution& sol, double tol) {
    VerifyReport rep;
    auto bad = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };

    if (static_cast<int>(sol.tours.size()) > inst.n_agents)
        bad("tours: " + std::to_string(sol.tours.size()) + " tours for " +
            std::to_string(inst.n_agents) + " agents");

    std::vector<int> covered(static_cast<std::size_t>(inst.n_targets()) + 1, 0);
    double total = 0.0;
    for (std::size_t ti = 0; ti < sol.tours.size(); ++ti) {
        const auto& tour = sol.tours[ti];
        const std::string tp = "tours[" + std::to_string(ti) + "]";
        const auto& seq = tour.sequence;
        if (seq.size() < 2) {
            bad(tp + ": sequence must start and end at the depot");
            continue;
        }
        const auto& first = seq.front();
        const auto& last = seq.back();
        if (first.target != 0 || last.target != 0) bad(tp + ": must start and end at the depot");
        if (std::abs(first.time) > tol) bad(tp + ": must leave the depot at time 0");
        if (norm(first.position - inst.depot) > tol * (1.0 + norm(inst.depot)) ||
            norm(last.position - inst.depot) > tol * (1.0 + norm(inst.depot)))
            bad(tp + ": endpoints must be at the depot position");

        double load = 0.0;
        for (std::size_t k = 0; k < seq.size(); ++k) {
            const auto& v = seq[k];
            const std::string vp = tp + ".sequence[" + std::to_string(k) + "]";
            if (k > 0) {
                const auto& u = seq[k - 1];
                const double dt = v.time - u.time;
                const double d = norm(v.position - u.position);
                total += d;
                if (dt < -tol) bad(vp + ": time goes backwards");
                if (d > inst.v_max * std::max(dt, 0.0) * (1.0 + tol) + tol)
                    bad(vp + ": speed limit exceeded");
            }
            if (v.target == 0) {
                if (k != 0 && k + 1 != seq.size()) bad(vp + ": depot inside a tour");
                continue;
            }
            if (v.target < 0 || v.target > inst.n_targets()) {
                bad(vp + ": unknown target " + std::to_string(v.target));
                continue;
            }
            const auto& tgt = inst.target(v.target);
            if (v.window < 0 || v.window >= static_cast<int>(tgt.windows.size())) {
                bad(vp + ": unknown window " + std::to_string(v.window));
                continue;
            }
            const auto& w = tgt.windows[static_cast<std::size_t>(v.window)];
            if (v.time < w.start_time - tol || v.time > w.end_time + tol)
                bad(vp + ": interception outside its time window");
            const Vec2 expected = w.position(v.time);
            if (norm(expected - v.position) > tol * (1.0 + norm(expected)))
                bad(vp + ": position does not match the target");
            ++covered[static_cast<std::size_t>(v.target)];
            load += tgt.demand;
        }
        if (load > inst.capacity + tol) bad(tp + ": capacity exceeded");
        if (std::abs(load - tour.load) > tol * (1.0 + load)) bad(tp + ": reported load is wrong");
    }
    for (int i = 1; i <= inst.n_targets(); ++i) {
        const int c = covered[static_cast<std::size_t>(i)];
        if (c != 1)
            bad("target " + std::to_string(i) + ": covered " + std::to_string(c) + " times");
    }
    rep.recomputed_cost = total;
    if (std::abs(total - sol.cost) > tol * (1.0 + total))
        bad("cost: reported " + std::to_string(sol.cost) + " but trajectories measure " +
            std::to_string(total));
    return rep;
}

}  // namespace mtvrp
