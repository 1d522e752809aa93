#include "mtvrp/twgraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "mtvrp/convex.hpp"

namespace mtvrp {

std::vector<Edge> EdgeSet::edges() const {
    std::vector<Edge> out;
    out.reserve(static_cast<std::size_t>(count_));
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) {
            if (bits_[idx(a, b)]) out.emplace_back(a, b);
        }
    }
    return out;
}

std::vector<int> allocate_segments(const Target& target, int n_seg_tar) {
    const auto& w = target.windows;
    const int n = static_cast<int>(w.size());
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    if (n == 0) return counts;
    double total = 0.0;
    int longest = 0;
    for (int j = 0; j < n; ++j) {
        const double len = w[j].end_time - w[j].start_time;
        total += len;
        if (len > w[longest].end_time - w[longest].start_time) longest = j;
    }
    int used = 0;
    for (int j = 0; j < n; ++j) {
        if (j == longest) continue;
        const double len = w[j].end_time - w[j].start_time;
        const double share = total > 0.0 ? len / total : 0.0;
        counts[j] = std::max(1, static_cast<int>(std::floor(share * n_seg_tar)));
        used += counts[j];
    }
    counts[longest] = std::max(1, n_seg_tar - used);
    return counts;
}

TwGraph TwGraph::build(const Instance& inst, int n_seg_tar,
                       const std::optional<std::filesystem::path>& cache_dir) {
    if (n_seg_tar < 1) throw std::invalid_argument("n_seg_tar must be at least 1");
    if (inst.n_targets() > kMaxTargets)
        throw std::invalid_argument("at most " + std::to_string(kMaxTargets) + " targets supported");
    TwGraph g;
    g.inst_ = inst;
    g.n_seg_tar_ = n_seg_tar;
    g.horizon_ = inst.depot_horizon();
    g.tw_of_target_.resize(static_cast<std::size_t>(inst.n_targets() + 1));

    auto add_tw = [&](int target, int window, const LinearArc& arc, int n_seg) {
        TargetWindow tw{target, window, arc, g.n_segments(), g.n_segments() + n_seg};
        const int id = g.n_tw();
        const double len = arc.end_time - arc.start_time;
        for (int k = 0; k < n_seg; ++k) {
            const double t0 = arc.start_time + len * k / n_seg;
            const double t1 = k + 1 == n_seg ? arc.end_time : arc.start_time + len * (k + 1) / n_seg;
            g.segs_.push_back({id, t0, t1, {arc.position(t0), t0}, arc.speed() * (t1 - t0)});
        }
        g.tws_.push_back(tw);
        g.tw_of_target_[static_cast<std::size_t>(target)].push_back(id);
    };

    add_tw(0, 0, LinearArc{0.0, g.horizon_, inst.depot, {0.0, 0.0}}, 1);
    for (const Target& t : inst.targets) {
        const auto counts = allocate_segments(t, n_seg_tar);
        for (std::size_t j = 0; j < t.windows.size(); ++j) {
            add_tw(t.id, static_cast<int>(j), t.windows[j], counts[j]);
        }
    }

    std::optional<std::filesystem::path> file;
    if (cache_dir) {
        file = table_cache_file(*cache_dir, inst, n_seg_tar);
        if (g.load_tables(*file)) {
            g.compute_max_lfdt();
            return g;
        }
    }
    g.compute_tables();
    g.compute_max_lfdt();
    if (file) {
        std::filesystem::create_directories(*cache_dir);
        g.save_tables(*file);
    }
    return g;
}

void TwGraph::compute_tables() {
    const std::size_t W = tws_.size();
    const std::size_t S = segs_.size();
    const double v = v_max();
    lfdt_.assign(W * W, -kInf);
    for (int a = 0; a < n_tw(); ++a) {
        for (int b = 0; b < n_tw(); ++b) {
            if (has_edge(a, b)) lfdt_[tw_index(a, b)] = latest_departure(tw(a).arc, tw(b).arc, v);
        }
    }
    c_start_.assign(S * S, kInf);
    c_seg_.assign(S * S, kInf);
    for (int s = 0; s < n_segments(); ++s) {
        const Segment& x = segs_[s];
        const LinearArc xa = x.arc(tw(x.tw).arc);
        for (int s2 = 0; s2 < n_segments(); ++s2) {
            const Segment& y = segs_[s2];
            if (!has_edge(x.tw, y.tw)) continue;
            c_start_[seg_index(s, s2)] = straight_line_cost(x.start, y.start, v);
            c_seg_[seg_index(s, s2)] = segment_distance(xa, y.arc(tw(y.tw).arc), v);
        }
    }
}

void TwGraph::compute_max_lfdt() {
    const std::size_t nt = static_cast<std::size_t>(n_targets() + 1);
    max_lfdt_.assign(tws_.size() * nt, -kInf);
    for (int a = 0; a < n_tw(); ++a) {
        for (int b = 0; b < n_tw(); ++b) {
            double& m = max_lfdt_[static_cast<std::size_t>(a) * nt +
                                  static_cast<std::size_t>(tw(b).target)];
            m = std::max(m, lfdt(a, b));
        }
    }
}

int TwGraph::segment_of(int tw_id, double t) const {
    const TargetWindow& w = tw(tw_id);
    const int n = w.n_segments();
    const double len = w.arc.end_time - w.arc.start_time;
    int k = len > 0.0 ? static_cast<int>(std::floor((t - w.arc.start_time) / len * n)) : 0;
    k = std::clamp(k, 0, n - 1);
    while (k > 0 && t < segs_[w.seg_begin + k].t0) --k;
    while (k + 1 < n && t >= segs_[w.seg_begin + k + 1].t0) ++k;
    return w.seg_begin + k;
}

std::vector<int> TwGraph::unreachable_targets() const {
    std::vector<int> out;
    const SpaceTimePoint start{inst_.depot, 0.0};
    for (int i = 1; i <= n_targets(); ++i) {
        const auto& ws = windows_of(i);
        const bool any = std::any_of(ws.begin(), ws.end(),
                                     [&](int id) { return efat(start, id) < kInf; });
        if (!any) out.push_back(i);
    }
    return out;
}

namespace {

constexpr char kMagic[4] = {'M', 'T', 'V', 'G'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

bool TwGraph::save_tables(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) return false;
    const std::uint32_t header[3] = {kVersion, static_cast<std::uint32_t>(n_tw()),
                                     static_cast<std::uint32_t>(n_segments())};
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    for (const auto* v : {&lfdt_, &c_start_, &c_seg_}) {
        out.write(reinterpret_cast<const char*>(v->data()),
                  static_cast<std::streamsize>(v->size() * sizeof(double)));
    }
    return static_cast<bool>(out);
}

bool TwGraph::load_tables(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return false;
    char magic[4];
    std::uint32_t header[3];
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (!in || std::memcmp(magic, kMagic, 4) != 0 || header[0] != kVersion ||
        header[1] != static_cast<std::uint32_t>(n_tw()) ||
        header[2] != static_cast<std::uint32_t>(n_segments())) {
        return false;
    }
    const std::size_t W = tws_.size();
    const std::size_t S = segs_.size();
    std::vector<double> lfdt(W * W), c_start(S * S), c_seg(S * S);
    for (auto* v : {&lfdt, &c_start, &c_seg}) {
        in.read(reinterpret_cast<char*>(v->data()),
                static_cast<std::streamsize>(v->size() * sizeof(double)));
    }
    if (!in) return false;
    lfdt_ = std::move(lfdt);
    c_start_ = std::move(c_start);
    c_seg_ = std::move(c_seg);
    return true;
}

std::filesystem::path table_cache_file(const std::filesystem::path& dir, const Instance& inst,
                                       int n_seg_tar) {
    char name[64];
    std::snprintf(name, sizeof name, "%016llx_%d.bin",
                  static_cast<unsigned long long>(instance_hash(inst)), n_seg_tar);
    return dir / name;
}

}  // namespace mtvrp
