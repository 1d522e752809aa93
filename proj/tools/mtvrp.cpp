// Command-line front end: solve, generate, verify, oracle and sweep.
//
// Exit codes: 0 success or optimal, 1 error, 2 infeasible, 3 limit hit,
// 4 verification failed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mtvrp/bnb.hpp"
#include "mtvrp/instance.hpp"
#include "mtvrp/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mtvrp;

namespace {

enum Exit { kOk = 0, kError = 1, kInfeasible = 2, kLimit = 3, kViolations = 4 };

int exit_code(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return kOk;
        case SolveStatus::Infeasible: return kInfeasible;
        case SolveStatus::LimitHit: return kLimit;
    }
    return kError;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

struct SolveArgs {
    std::string instance;
    int segments = 32;
    std::optional<double> time_limit;
    long label_cap = 50'000'000;
    bool trace = false;
    std::string out;
    std::string stats;
    std::string lp_dump;
    std::string cache_dir;
};

int run_solve(const SolveArgs& a) {
    const Instance inst = load_instance(a.instance);
    BnbOptions opts;
    opts.n_seg_tar = a.segments;
    opts.time_limit_sec = a.time_limit;
    opts.label_cap = a.label_cap;
    if (a.trace) opts.trace = &std::cerr;
    if (!a.cache_dir.empty()) opts.table_cache = a.cache_dir;
    std::ostringstream lp;
    if (!a.lp_dump.empty()) opts.lp_dump = &lp;

    const BnbResult r = solve(inst, opts);
    if (!a.lp_dump.empty()) write_text(a.lp_dump, lp.str());
    if (!a.stats.empty()) write_text(a.stats, stats_json(r) + "\n");
    if (r.solution) {
        const std::string text = dump_canonical(to_json(*r.solution)) + "\n";
        if (a.out.empty()) {
            std::cout << text;
        } else {
            write_text(a.out, text);
        }
    }
    std::cerr << to_string(r.status);
    if (r.solution) std::cerr << " cost " << r.stats.optimal_cost;
    if (!r.message.empty()) std::cerr << " (" << r.message << ")";
    std::cerr << '\n';
    return exit_code(r.status);
}

struct GenerateArgs {
    GeneratorParams p;
    std::string out_dir;
};

fs::path instance_file(const fs::path& dir, const GeneratorParams& p) {
    return dir / ("mtvrp_s" + std::to_string(p.seed) + "_n" + std::to_string(p.n_targets) + "_m" +
                  std::to_string(p.n_agents) + ".json");
}

int run_generate(const GenerateArgs& a) {
    fs::create_directories(a.out_dir);
    const fs::path file = instance_file(a.out_dir, a.p);
    save_instance(generate(a.p), file);
    std::cout << file.string() << '\n';
    return kOk;
}

int run_verify(const std::string& inst_path, const std::string& sol_path) {
    const Instance inst = load_instance(inst_path);
    const Solution sol = load_solution(sol_path);
    const VerifyReport rep = verify(inst, sol);
    json j = {{"ok", rep.ok()}, {"recomputed_cost", rep.recomputed_cost}, {"violations", rep.violations}};
    std::cout << j.dump() << '\n';
    return rep.ok() ? kOk : kViolations;
}

int run_oracle(const std::string& inst_path, int segments) {
    const Instance inst = load_instance(inst_path);
    const TwGraph g = TwGraph::build(inst, segments);
    const oracle::OptimumResult o = oracle::exhaustive_optimum(g);
    json tours = json::array();
    for (const auto& t : o.tours) tours.push_back({{"sequence", t.sequence}, {"cost", t.cost}});
    json j = {{"cost", o.cost < kInf ? json(o.cost) : json(nullptr)},
              {"tours", tours},
              {"enumerated", o.enumerated}};
    std::cout << j.dump() << '\n';
    return o.cost < kInf ? kOk : kInfeasible;
}

// Sweep config keys: seeds, targets, agents, capacity, windows_per_target,
// window_sum, arena, v_max, segments, time_limit, values, and optionally
// instances (paths) in place of seeds.
int run_sweep(const std::string& experiment, const std::string& config_path) {
    static const std::vector<std::string> kExperiments = {"targets", "capacity", "agents", "windows",
                                                         "segments"};
    if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
        throw std::invalid_argument("unknown experiment " + experiment);
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot read " + config_path);
    const json cfg = json::parse(in);

    GeneratorParams base;
    base.n_targets = cfg.value("targets", base.n_targets);
    base.n_agents = cfg.value("agents", base.n_agents);
    base.capacity = cfg.value("capacity", base.capacity);
    base.windows_per_target = cfg.value("windows_per_target", base.windows_per_target);
    base.total_window_len = cfg.value("window_sum", base.total_window_len);
    base.arena_size = cfg.value("arena", base.arena_size);
    base.v_max = cfg.value("v_max", base.v_max);
    const int segments = cfg.value("segments", 32);
    const std::optional<double> limit =
        cfg.contains("time_limit") ? std::optional<double>(cfg.at("time_limit").get<double>()) : std::nullopt;
    const std::vector<double> values = cfg.at("values").get<std::vector<double>>();

    struct Source {
        std::optional<std::uint64_t> seed;
        std::optional<std::string> path;
    };
    std::vector<Source> sources;
    if (cfg.contains("instances")) {
        for (const auto& p : cfg.at("instances")) sources.push_back({std::nullopt, p.get<std::string>()});
    } else {
        for (const auto& s : cfg.at("seeds")) sources.push_back({s.get<std::uint64_t>(), std::nullopt});
    }
    if (sources.size() > 0 && sources.front().path && experiment != "segments")
        throw std::invalid_argument("instance files can only be swept over segments");

    for (const Source& src : sources) {
        for (double v : values) {
            GeneratorParams p = base;
            if (src.seed) p.seed = *src.seed;
            BnbOptions opts;
            opts.n_seg_tar = segments;
            opts.time_limit_sec = limit;
            if (experiment == "targets") p.n_targets = static_cast<int>(v);
            if (experiment == "capacity") p.capacity = v;
            if (experiment == "agents") p.n_agents = static_cast<int>(v);
            if (experiment == "windows") p.total_window_len = v;
            if (experiment == "segments") opts.n_seg_tar = static_cast<int>(v);
            const Instance inst = src.path ? load_instance(*src.path) : generate(p);
            const BnbResult r = solve(inst, opts);
            json rec = json::parse(stats_json(r));
            rec["experiment"] = experiment;
            rec["value"] = v;
            if (src.seed) rec["seed"] = *src.seed;
            if (src.path) rec["instance"] = *src.path;
            rec["instance_hash"] = instance_hash(inst);
            std::cout << rec.dump() << '\n';
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact solver for the moving-target vehicle routing problem"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "Solve an instance to optimality");
    solve_cmd->add_option("instance", sa.instance, "Instance JSON")->required();
    solve_cmd->add_option("--segments", sa.segments, "Segments per target")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--time-limit", sa.time_limit, "Wall-clock limit in seconds");
    solve_cmd->add_option("--label-cap", sa.label_cap, "Pricing label creation cap");
    solve_cmd->add_flag("--trace", sa.trace, "Progress records on stderr");
    solve_cmd->add_option("--out", sa.out, "Solution JSON path (stdout when omitted)");
    solve_cmd->add_option("--stats", sa.stats, "Stats JSON path");
    solve_cmd->add_option("--lp-dump", sa.lp_dump, "Write the root master LP in LP format");
    solve_cmd->add_option("--cache-dir", sa.cache_dir, "Directory for cached distance tables");

    GenerateArgs ga;
    auto* gen_cmd = app.add_subcommand("generate", "Generate a random instance");
    gen_cmd->add_option("--seed", ga.p.seed, "Random seed")->required();
    gen_cmd->add_option("--targets", ga.p.n_targets, "Number of targets")->required();
    gen_cmd->add_option("--agents", ga.p.n_agents, "Number of agents")->required();
    gen_cmd->add_option("--capacity", ga.p.capacity, "Agent capacity (default ceil(targets/agents))");
    gen_cmd->add_option("--window-sum", ga.p.total_window_len, "Total window length per target");
    gen_cmd->add_option("--windows", ga.p.windows_per_target, "Windows per target");
    gen_cmd->add_option("--arena", ga.p.arena_size, "Arena side length");
    gen_cmd->add_option("--vmax", ga.p.v_max, "Agent speed limit");
    gen_cmd->add_option("--out", ga.out_dir, "Output directory")->required();

    std::string verify_inst, verify_sol;
    auto* verify_cmd = app.add_subcommand("verify", "Check a solution against an instance");
    verify_cmd->add_option("instance", verify_inst, "Instance JSON")->required();
    verify_cmd->add_option("solution", verify_sol, "Solution JSON")->required();

    std::string oracle_inst;
    int oracle_segments = 1;
    auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive optimum of a small instance");
    oracle_cmd->add_option("instance", oracle_inst, "Instance JSON")->required();
    oracle_cmd->add_option("--segments", oracle_segments, "Segments per target")->check(CLI::PositiveNumber);

    std::string experiment, config;
    auto* sweep_cmd = app.add_subcommand("sweep", "Solve a parameter sweep, one JSON record per run");
    sweep_cmd->add_option("--experiment", experiment, "targets|capacity|agents|windows|segments")
        ->required()
        ->check(CLI::IsMember({"targets", "capacity", "agents", "windows", "segments"}));
    sweep_cmd->add_option("--config", config, "Sweep config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kError;
    }

    try {
        if (*solve_cmd) return run_solve(sa);
        if (*gen_cmd) return run_generate(ga);
        if (*verify_cmd) return run_verify(verify_inst, verify_sol);
        if (*oracle_cmd) return run_oracle(oracle_inst, oracle_segments);
        if (*sweep_cmd) return run_sweep(experiment, config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
