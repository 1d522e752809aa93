// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "mtvrp/bnb.hpp"
#include "mtvrp/feasgen.hpp"
#include "mtvrp/oracle.hpp"
#include "mtvrp/pricing.hpp"
#include "test_util.hpp"

using namespace mtvrp;
using mtvrp::testing::small_random;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Duals of the master LP over the tours of one feasible solution.
std::optional<Duals> initial_duals(const TwGraph& g) {
    const auto tours = generate_feasible(g, EdgeSet(g.n_tw()));
    if (tours.empty()) return std::nullopt;
    ColumnPool pool;
    for (const auto& t : tours) pool.add(make_tour(g, t));
    const RmpSolution s = solve_rmp(g, pool, EdgeSet(g.n_tw()));
    if (!s.optimal()) return std::nullopt;
    return s.duals;
}

Duals random_duals(const TwGraph& g, std::mt19937_64& rng) {
    Duals d;
    d.cover.assign(static_cast<std::size_t>(g.instance().n_targets()) + 1, 0.0);
    d.fleet = std::uniform_real_distribution<double>(-40.0, 0.0)(rng);
    for (int i = 1; i <= g.instance().n_targets(); ++i) {
        d.cover[static_cast<std::size_t>(i)] = std::uniform_real_distribution<double>(0.0, 120.0)(rng);
    }
    return d;
}

struct SampledLabel {
    Label label;
    PartialTour tour;
    const TwGraph* graph;
};

// Labels created by exact pricing runs under master duals, sampled uniformly.
std::vector<SampledLabel> sample_labels(std::vector<TwGraph>& graphs, std::size_t want, std::uint64_t seed) {
    std::vector<SampledLabel> all;
    std::mt19937_64 rng(seed);
    for (std::uint64_t s = 0; all.size() < 20 * want && s < 200; ++s) {
        const Instance inst = small_random(seed + s, 4 + static_cast<int>(s % 3));
        const TwGraph& g = graphs.emplace_back(TwGraph::build(inst, 8));
        std::vector<Duals> duals;
        if (auto d = initial_duals(g)) duals.push_back(*d);
        duals.push_back(random_duals(g, rng));
        for (const Duals& d : duals) {
            PricingOptions opts;
            opts.on_label = [&](const Label& l, const PartialTour& t) { all.push_back({l, t, &g}); };
            PricingSolver(g).solve(d, EdgeSet(g.n_tw()), opts);
        }
    }
    std::shuffle(all.begin(), all.end(), rng);
    if (all.size() > want) all.resize(want);
    return all;
}

struct SolvedCase {
    Instance inst;
    BnbResult result;
    double oracle_cost = kInf;
};

std::vector<SolvedCase> g_cases;

Outcome oracle_equivalence() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    int agree = 0, total = 0, infeasible = 0;
    double worst = 0.0;
    for (int n : {3, 4, 5, 6}) {
        for (int i = 0; i < 50; ++i) {
            SolvedCase c;
            c.inst = small_random(static_cast<std::uint64_t>(1000 * n + i), n, 2);
            const TwGraph g = TwGraph::build(c.inst, 32);
            c.result = solve(g, {});
            c.oracle_cost = oracle::exhaustive_optimum(g).cost;
            ++total;
            bool ok;
            if (c.oracle_cost == kInf) {
                ok = c.result.status == SolveStatus::Infeasible;
                ++infeasible;
            } else {
                ok = c.result.status == SolveStatus::Optimal &&
                     rel_diff(c.result.stats.optimal_cost, c.oracle_cost) <= 1e-5;
                if (c.result.status == SolveStatus::Optimal)
                    worst = std::max(worst, rel_diff(c.result.stats.optimal_cost, c.oracle_cost));
                if (ok && c.result.solution) ok = verify(c.inst, *c.result.solution).ok();
            }
            agree += ok;
            if (!ok && o.detail.size() < 200) o.detail += fmt(" [n=%d seed=%d]", n, 1000 * n + i);
            g_cases.push_back(std::move(c));
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.pass = agree == total && secs < 300.0;
    o.detail = fmt("%d/%d agree (%d infeasible), max rel diff %.2e, %.1f s", agree, total, infeasible, worst,
                   secs) +
               o.detail;
    return o;
}

Outcome bound_sandwich() {
    std::vector<TwGraph> graphs;
    graphs.reserve(256);
    const auto labels = sample_labels(graphs, 1000, 7000);
    long entries = 0, bad = 0;
    double worst_lb = -kInf, worst_ub = -kInf;
    for (const auto& s : labels) {
        const TargetWindow& w = s.graph->tw(s.label.tw);
        for (int k = 0; k < w.n_segments(); ++k) {
            const double lb = s.label.g_lb[static_cast<std::size_t>(k)];
            const double ub = s.label.g_ub[static_cast<std::size_t>(k)];
            if (lb == kInf && ub == kInf) continue;
            const double exact = tour_cost_in_segment(*s.graph, s.tour, w.seg_begin + k).cost;
            ++entries;
            if (exact < kInf) {
                const double excess = lb - exact;
                if (!(excess <= 1e-6)) ++bad;
                worst_lb = std::max(worst_lb, excess);
            }
            if (ub < kInf) {
                const double excess = exact - (ub + s.graph->segment(w.seg_begin + k).spatial_length);
                if (!(excess <= 1e-6)) ++bad;
                worst_ub = std::max(worst_ub, excess);
            }
        }
    }
    Outcome o;
    o.pass = labels.size() == 1000 && bad == 0;
    o.detail = fmt("%zu labels, %ld finite entries, %ld violations, max lb-exact %.2e, max exact-(ub+len) %.2e",
                   labels.size(), entries, bad, worst_lb, worst_ub);
    return o;
}

Outcome min_time_labels() {
    std::vector<TwGraph> graphs;
    graphs.reserve(256);
    const auto labels = sample_labels(graphs, 500, 8000);
    long bad = 0;
    double worst = 0.0, worst_socp = 0.0;
    for (const auto& s : labels) {
        const double chain = min_execution_time(*s.graph, s.tour);
        const double d = std::abs(chain - s.label.t);
        worst = std::max(worst, d);
        if (!(d <= 1e-9)) ++bad;
        const auto arcs = sequence_arcs(*s.graph, s.tour);
        const auto ft = optimize_trajectory(arcs, s.graph->v_max(), TrajObjective::FinalTime);
        worst_socp = std::max(worst_socp, std::abs(ft.cost - s.label.t));
    }
    Outcome o;
    o.pass = labels.size() == 500 && bad == 0;
    o.detail = fmt("%zu labels, %ld mismatches, max |t - chain| %.2e, max |t - cone optimum| %.2e",
                   labels.size(), bad, worst, worst_socp);
    return o;
}

Outcome dominance_safety() {
    Outcome o;
    std::mt19937_64 rng(4242);
    int instances = 0, comparisons = 0, with_tours = 0, bad = 0;
    for (std::uint64_t s = 0; instances < 20; ++s) {
        const int n = 3 + static_cast<int>(s % 3);
        const Instance inst = small_random(9000 + s, n);
        const TwGraph g = TwGraph::build(inst, 8);
        const auto d0 = initial_duals(g);
        if (!d0) continue;
        ++instances;
        PricingOptions on, off;
        off.dominance = false;
        const PricingSolver ps(g);
        for (const Duals& d : {*d0, random_duals(g, rng), random_duals(g, rng)}) {
            const auto a = ps.solve(d, EdgeSet(g.n_tw()), on).min_reduced_cost();
            const auto b = ps.solve(d, EdgeSet(g.n_tw()), off).min_reduced_cost();
            ++comparisons;
            with_tours += a.has_value();
            if (a.has_value() != b.has_value() || (a && std::abs(*a - *b) > 1e-6)) ++bad;
        }
        const BnbResult r1 = solve(g, {});
        BnbOptions nodom;
        nodom.dominance = false;
        const BnbResult r2 = solve(g, nodom);
        if (r1.status != r2.status || (r1.status == SolveStatus::Optimal &&
                                       std::abs(r1.stats.optimal_cost - r2.stats.optimal_cost) > 1e-6))
            ++bad;
    }
    o.pass = bad == 0;
    o.detail = fmt("%d instances, %d pricing comparisons (%d with negative tours), %d mismatches", instances,
                   comparisons, with_tours, bad);
    return o;
}

Outcome feasgen_completeness() {
    std::mt19937_64 rng(5151);
    int agree = 0, feasible = 0, infeasible = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 4;
        const TwGraph g = TwGraph::build(small_random(12000 + static_cast<std::uint64_t>(trial), n), 2);
        EdgeSet banned(g.n_tw());
        const unsigned density = 2 + static_cast<unsigned>(trial % 5);
        for (int a = 0; a < g.n_tw(); ++a) {
            for (int b = 0; b < g.n_tw(); ++b) {
                if (g.has_edge(a, b) && rng() % density == 0) banned.insert(a, b);
            }
        }
        const bool expected = oracle::exhaustive_feasible(g, banned);
        const auto tours = generate_feasible(g, banned);
        bool ok = expected == !tours.empty();
        if (ok && expected) {
            for (const auto& t : tours) {
                for (std::size_t k = 1; k < t.size(); ++k) ok = ok && !banned.contains(t[k - 1], t[k]);
            }
            ok = ok && static_cast<int>(tours.size()) <= g.instance().n_agents &&
                 verify(g.instance(), build_solution(g, tours)).ok();
        }
        agree += ok;
        (expected ? feasible : infeasible) += 1;
    }
    Outcome o;
    o.pass = agree == 200;
    o.detail = fmt("%d/200 agree (%d feasible, %d infeasible)", agree, feasible, infeasible);
    return o;
}

Outcome segment_invariance() {
    int solved = 0, bad = 0;
    double worst = 0.0;
    for (std::uint64_t s = 0; solved < 20 && s < 200; ++s) {
        const Instance inst = small_random(15000 + s, 4 + static_cast<int>(s % 3));
        std::vector<double> costs;
        for (int n_seg : {4, 8, 32}) {
            const BnbResult r = solve(inst, {.n_seg_tar = n_seg});
            if (r.status != SolveStatus::Optimal) break;
            costs.push_back(r.stats.optimal_cost);
        }
        if (costs.size() != 3) continue;
        ++solved;
        for (double c : costs) {
            worst = std::max(worst, rel_diff(c, costs.front()));
            if (rel_diff(c, costs.front()) > 1e-6) ++bad;
        }
    }
    Outcome o;
    o.pass = solved == 20 && bad == 0;
    o.detail = fmt("%d instances at 4/8/32 segments, %d mismatches, max rel diff %.2e", solved, bad, worst);
    return o;
}

Outcome relaxation_sanity() {
    int solved = 0, bad_bound = 0, bad_gap = 0, bad_red = 0, bad_price = 0, branched = 0;
    double max_gap = 0.0;
    for (const SolvedCase& c : g_cases) {
        const BnbResult& r = c.result;
        if (r.status != SolveStatus::Optimal) continue;
        ++solved;
        branched += r.stats.nodes_expanded > 1;
        const double opt = r.stats.optimal_cost;
        if (!(r.stats.root_lp <= opt + 1e-9 * std::max(1.0, opt))) ++bad_bound;
        if (!(r.stats.gap_percent >= 0.0)) ++bad_gap;
        max_gap = std::max(max_gap, r.stats.gap_percent);
        const TwGraph g = TwGraph::build(c.inst, 32);
        for (int i = 0; i < r.root_pool_size; ++i) {
            const Tour& t = r.pool[i];
            if (reduced_cost(t.cost, g, t.sequence, *r.root_duals) < -1e-4) ++bad_red;
        }
        if (!PricingSolver(g).solve(*r.root_duals, EdgeSet(g.n_tw()), {}).tours.empty()) ++bad_price;
    }
    Outcome o;
    o.pass = solved > 0 && bad_bound == 0 && bad_gap == 0 && bad_red == 0 && bad_price == 0;
    o.detail = fmt("%d solved (%d branched): root LP above optimum %d, negative gap %d, "
                   "root columns below -eps %d, root pricing non-empty %d, max gap %.3f%%",
                   solved, branched, bad_bound, bad_gap, bad_red, bad_price, max_gap);
    return o;
}

struct ArcGen {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    explicit ArcGen(std::uint64_t seed) : rng(seed) {}
    double u() { return unit(rng); }
    LinearArc make(double v_max, double t_lo, double t_span) {
        const double t0 = t_lo + t_span * u();
        const double t1 = t0 + 40.0 * u();
        const double speed = 0.5 * v_max * u();
        const double h = 6.283185307179586 * u();
        return {t0, t1, {100.0 * u() - 50.0, 100.0 * u() - 50.0}, {speed * std::cos(h), speed * std::sin(h)}};
    }
};

Outcome geometry_vs_grid() {
    ArcGen gen(8080);
    constexpr int kRes = 4000;
    int efat_ok = 0, lfdt_ok = 0, cost_ok = 0;
    for (int i = 0; i < 500; ++i) {
        const LinearArc a = gen.make(1.0, 0.0, 80.0);
        const SpaceTimePoint o{{100.0 * gen.u() - 50.0, 100.0 * gen.u() - 50.0}, 40.0 * gen.u()};
        const double t = earliest_arrival(o, a, 1.0);
        const auto grid = oracle::grid_earliest_arrival(o, a, 1.0, kRes);
        if (t == kInf) {
            efat_ok += grid.time == kInf;
        } else {
            efat_ok += grid.time < kInf && t <= grid.time + 1e-9 && t > grid.time - grid.step - 1e-9;
        }
    }
    for (int i = 0; i < 500; ++i) {
        const LinearArc from = gen.make(1.0, 0.0, 60.0);
        const LinearArc to = gen.make(1.0, 20.0, 60.0);
        const double t = latest_departure(from, to, 1.0);
        const auto grid = oracle::grid_latest_departure(from, to, 1.0, kRes);
        if (t == -kInf) {
            lfdt_ok += grid.time == -kInf;
        } else if (grid.time == -kInf) {
            lfdt_ok += t < from.start_time + (from.end_time - from.start_time) / kRes + 1e-9;
        } else {
            lfdt_ok += t >= grid.time - 1e-9 && t < grid.time + grid.step + 1e-9;
        }
    }
    for (int i = 0; i < 500; ++i) {
        std::vector<LinearArc> arcs{{0.0, 0.0, {0, 0}, {0, 0}}};
        const int n = 2 + i % 3;
        for (int k = 1; k < n; ++k) arcs.push_back(gen.make(1.0, 20.0 * k, 60.0));
        const auto r = optimize_trajectory(arcs, 1.0);
        const auto grid = oracle::grid_tour_cost(arcs, 1.0, 200);
        if (!r.feasible()) {
            cost_ok += grid.upper == kInf;
        } else {
            const double tol = 1e-7 * (1.0 + r.cost);
            cost_ok += r.cost <= grid.upper + tol && r.cost >= grid.lower - tol;
        }
    }
    Outcome o;
    o.pass = efat_ok == 500 && lfdt_ok == 500 && cost_ok == 500;
    o.detail = fmt("EFAT %d/500, LFDT %d/500, tour cost %d/500 within grid bounds", efat_ok, lfdt_ok, cost_ok);
    return o;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome cli_determinism() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / ("mtvrp_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = MTVRP_CLI_PATH;
    int identical = 0, runs = 0;
    for (int seed : {1, 2, 3}) {
        std::string files[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path out = dir / ("run" + std::to_string(rep));
            const std::string gen = cli + " generate --seed " + std::to_string(seed) +
                                    " --targets 5 --agents 2 --out " + out.string() + " > /dev/null";
            const fs::path inst = out / ("mtvrp_s" + std::to_string(seed) + "_n5_m2.json");
            const fs::path sol = out / ("sol" + std::to_string(seed) + ".json");
            const std::string run = cli + " solve " + inst.string() + " --segments 16 --out " + sol.string() +
                                    " 2> /dev/null";
            if (std::system(gen.c_str()) != 0 || std::system(run.c_str()) != 0) {
                o.detail += fmt(" [seed %d failed]", seed);
                continue;
            }
            files[rep] = read_file(inst) + read_file(sol);
        }
        ++runs;
        identical += !files[0].empty() && files[0] == files[1];
    }
    fs::remove_all(dir);
    o.pass = identical == 3;
    o.detail = fmt("%d/%d seeds gave byte-identical instance and solution files", identical, runs) + o.detail;
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"oracle equivalence", oracle_equivalence},
        {"bound sandwich", bound_sandwich},
        {"minimum-time labels", min_time_labels},
        {"dominance safety", dominance_safety},
        {"feasibility generator completeness", feasgen_completeness},
        {"segment invariance", segment_invariance},
        {"relaxation sanity", relaxation_sanity},
        {"geometry vs grid", geometry_vs_grid},
        {"CLI determinism", cli_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
                  << "): " << o.detail << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
    return failed == 0 ? 0 : 1;
}
