#pragma once

#include <bitset>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "mtvrp/geometry.hpp"
#include "mtvrp/instance.hpp"

namespace mtvrp {

/// A target paired with one of its time windows. Node 0 is the depot.
struct TargetWindow {
    int target = 0;
    int window = 0;
    LinearArc arc;
    int seg_begin = 0;  // [seg_begin, seg_end) into TwGraph::segments()
    int seg_end = 0;

    int n_segments() const { return seg_end - seg_begin; }
};

/// A time slice of a target-window.
struct Segment {
    int tw = 0;
    double t0 = 0.0;
    double t1 = 0.0;
    SpaceTimePoint start;
    double spatial_length = 0.0;

    LinearArc arc(const LinearArc& owner) const { return owner.restricted(t0, t1); }
};

/// Upper limit on the number of targets, fixed by the width of TargetSet.
inline constexpr int kMaxTargets = 128;

/// Bit i - 1 stands for target i.
using TargetSet = std::bitset<kMaxTargets>;

using Edge = std::pair<int, int>;

/// Dense set of directed target-window edges.
class EdgeSet {
public:
    EdgeSet() = default;
    explicit EdgeSet(int n_tw) : n_(n_tw), bits_(static_cast<std::size_t>(n_tw) * n_tw, 0) {}

    void insert(int from, int to) {
        auto& b = bits_[idx(from, to)];
        count_ += b == 0;
        b = 1;
    }
    void insert(Edge e) { insert(e.first, e.second); }
    bool contains(int from, int to) const { return !bits_.empty() && bits_[idx(from, to)] != 0; }
    bool contains(Edge e) const { return contains(e.first, e.second); }
    int size() const { return count_; }
    bool empty() const { return count_ == 0; }
    int n_tw() const { return n_; }

    /// Sorted lexicographically.
    std::vector<Edge> edges() const;

    friend bool operator==(const EdgeSet& a, const EdgeSet& b) { return a.bits_ == b.bits_; }

private:
    std::size_t idx(int from, int to) const {
        return static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(to);
    }
    int n_ = 0;
    int count_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Per-window segment counts for one target. Every window gets at least one;
/// the longest window (lowest index on ties) takes the remainder.
std::vector<int> allocate_segments(const Target& target, int n_seg_tar);

/// The target-window graph with its precomputed tables. Immutable once built.
class TwGraph {
public:
    static constexpr int kDepot = 0;

    /// When cache_dir is set, the three tables are read from / written to a
    /// binary file keyed by the instance hash and n_seg_tar.
    static TwGraph build(const Instance& inst, int n_seg_tar,
                         const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

    const Instance& instance() const { return inst_; }
    int n_seg_tar() const { return n_seg_tar_; }
    double v_max() const { return inst_.v_max; }
    double horizon() const { return horizon_; }

    int n_tw() const { return static_cast<int>(tws_.size()); }
    int n_segments() const { return static_cast<int>(segs_.size()); }
    const std::vector<TargetWindow>& tws() const { return tws_; }
    const TargetWindow& tw(int id) const { return tws_[static_cast<std::size_t>(id)]; }
    const std::vector<Segment>& segments() const { return segs_; }
    const Segment& segment(int id) const { return segs_[static_cast<std::size_t>(id)]; }
    const std::vector<int>& windows_of(int target) const {
        return tw_of_target_[static_cast<std::size_t>(target)];
    }
    double demand(int tw_id) const {
        const int t = tw(tw_id).target;
        return t == 0 ? 0.0 : inst_.target(t).demand;
    }

    bool has_edge(int from, int to) const { return tw(from).target != tw(to).target; }

    /// -inf when `to` cannot be intercepted after `from`, or no edge exists.
    double lfdt(int from, int to) const { return lfdt_[tw_index(from, to)]; }
    /// max over the windows of `target` of lfdt(from, .).
    double max_lfdt(int from, int target) const {
        return max_lfdt_[static_cast<std::size_t>(from) * (n_targets() + 1) +
                         static_cast<std::size_t>(target)];
    }
    double c_start(int s, int s2) const { return c_start_[seg_index(s, s2)]; }
    double c_seg(int s, int s2) const { return c_seg_[seg_index(s, s2)]; }

    /// Segment of `tw_id` containing t; boundaries belong to the later segment
    /// and the window end to the last one.
    int segment_of(int tw_id, double t) const;

    /// Earliest interception of `tw_id` starting from `origin`.
    double efat(const SpaceTimePoint& origin, int tw_id) const {
        return earliest_arrival(origin, tw(tw_id).arc, v_max());
    }

    /// Targets with no window reachable from the depot.
    std::vector<int> unreachable_targets() const;

    bool save_tables(const std::filesystem::path& file) const;
    bool load_tables(const std::filesystem::path& file);

private:
    int n_targets() const { return inst_.n_targets(); }
    std::size_t tw_index(int a, int b) const {
        return static_cast<std::size_t>(a) * tws_.size() + static_cast<std::size_t>(b);
    }
    std::size_t seg_index(int a, int b) const {
        return static_cast<std::size_t>(a) * segs_.size() + static_cast<std::size_t>(b);
    }
    void compute_tables();
    void compute_max_lfdt();

    Instance inst_;
    int n_seg_tar_ = 0;
    double horizon_ = 0.0;
    std::vector<TargetWindow> tws_;
    std::vector<Segment> segs_;
    std::vector<std::vector<int>> tw_of_target_;
    std::vector<double> lfdt_;
    std::vector<double> max_lfdt_;
    std::vector<double> c_start_;
    std::vector<double> c_seg_;
};

std::filesystem::path table_cache_file(const std::filesystem::path& dir, const Instance& inst,
                                       int n_seg_tar);

}  // namespace mtvrp
