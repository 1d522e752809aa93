#include "mtvrp/feasgen.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace mtvrp {

namespace {

constexpr double kLoadTol = 1e-9;

struct MLabel {
    int tw = 0;
    double t = 0.0;
    double load = 0.0;
    TargetSet visited;
    int agent = 1;
    int parent = -1;
};

struct Key {
    int tw;
    int agent;
    TargetSet visited;

    bool operator<(const Key& o) const {
        if (tw != o.tw) return tw < o.tw;
        if (agent != o.agent) return agent < o.agent;
        for (std::size_t w = kMaxTargets; w-- > 0;) {
            if (visited[w] != o.visited[w]) return o.visited[w];
        }
        return false;
    }
};

bool m_dominates(const MLabel& a, const MLabel& b) { return a.t <= b.t && a.load <= b.load; }

// The open tour can be closed at the depot.
bool can_close(const EdgeSet& banned, int tw) {
    return tw == TwGraph::kDepot || !banned.contains(tw, TwGraph::kDepot);
}

}  // namespace

std::vector<PartialTour> generate_feasible(const TwGraph& g, const EdgeSet& banned,
                                           FeasgenStats* stats) {
    FeasgenStats local;
    FeasgenStats& st = stats ? *stats : local;
    const Instance& inst = g.instance();
    const int n_tar = inst.n_targets();

    std::vector<MLabel> labels{MLabel{}};
    std::vector<int> stack{0};
    std::map<Key, std::vector<int>> store;

    auto key_of = [](const MLabel& u) { return Key{u.tw, u.agent, u.visited}; };
    // Dominated by a stored m-label other than `self`.
    auto dominated = [&](const MLabel& u, int self) {
        const auto it = store.find(key_of(u));
        if (it == store.end()) return false;
        return std::any_of(it->second.begin(), it->second.end(), [&](int i) {
            return i != self && m_dominates(labels[static_cast<std::size_t>(i)], u);
        });
    };

    while (!stack.empty()) {
        const int index = stack.back();
        stack.pop_back();
        ++st.pops;
        const MLabel u = labels[static_cast<std::size_t>(index)];
        if (dominated(u, index)) {
            ++st.pruned;
            continue;
        }
        if (static_cast<int>(u.visited.count()) == n_tar && can_close(banned, u.tw)) {
            std::vector<int> seq;
            for (int i = index; i >= 0; i = labels[static_cast<std::size_t>(i)].parent) {
                seq.push_back(labels[static_cast<std::size_t>(i)].tw);
            }
            std::reverse(seq.begin(), seq.end());
            seq.push_back(TwGraph::kDepot);
            std::vector<PartialTour> tours;
            PartialTour cur;
            for (int tw : seq) {
                if (tw == TwGraph::kDepot && !cur.empty()) {
                    cur.push_back(tw);
                    if (cur.size() > 2) tours.push_back(cur);
                    cur.clear();
                }
                cur.push_back(tw);
            }
            return tours;
        }
        if (u.agent < inst.n_agents && can_close(banned, u.tw)) {
            MLabel next;
            next.visited = u.visited;
            next.agent = u.agent + 1;
            next.parent = index;
            if (!dominated(next, -1)) {
                const int id = static_cast<int>(labels.size());
                labels.push_back(next);
                store[key_of(next)].push_back(id);
                stack.push_back(id);
                ++st.pushed;
            }
        }

        const Vec2 here = g.tw(u.tw).arc.position(u.t);
        std::vector<std::pair<double, int>> succ;
        for (int tw = 1; tw < g.n_tw(); ++tw) {
            if (!g.has_edge(u.tw, tw) || banned.contains(u.tw, tw)) continue;
            if (u.t > g.lfdt(u.tw, tw) + kLatestDepartureTol) continue;
            const int target = g.tw(tw).target;
            if (u.visited.test(static_cast<std::size_t>(target - 1))) continue;
            if (u.load + g.demand(tw) > inst.capacity + kLoadTol) continue;
            const double t = g.efat({here, u.t}, tw);
            if (t == kInf) continue;
            if (u.agent == inst.n_agents) {
                bool ok = true;
                for (int i = 1; i <= n_tar && ok; ++i) {
                    if (i == target || u.visited.test(static_cast<std::size_t>(i - 1))) continue;
                    ok = t <= g.max_lfdt(tw, i) + kLatestDepartureTol;
                }
                if (!ok) continue;
            }
            succ.emplace_back(t, tw);
        }
        // Latest arrival pushed first so the earliest is expanded next.
        std::sort(succ.begin(), succ.end(), [](const auto& a, const auto& b) {
            return std::tie(a.first, a.second) > std::tie(b.first, b.second);
        });
        for (const auto& [t, tw] : succ) {
            MLabel next;
            next.tw = tw;
            next.t = t;
            next.load = u.load + g.demand(tw);
            next.visited = u.visited;
            next.visited.set(static_cast<std::size_t>(g.tw(tw).target - 1));
            next.agent = u.agent;
            next.parent = index;
            if (dominated(next, -1)) {
                ++st.pruned;
                continue;
            }
            const int id = static_cast<int>(labels.size());
            labels.push_back(next);
            auto& bucket = store[key_of(next)];
            std::erase_if(bucket, [&](int i) { return m_dominates(next, labels[static_cast<std::size_t>(i)]); });
            bucket.push_back(id);
            stack.push_back(id);
            ++st.pushed;
        }
    }
    return {};
}

}  // namespace mtvrp
